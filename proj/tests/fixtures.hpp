#pragma once

#include <string>

#include "eulerimg/model.hpp"

inline std::string data_path(const std::string& rel) { return std::string(EULERIMG_DATA_DIR) + "/" + rel; }

inline eulerimg::model::PairSpec fixture(const std::string& name) {
  return eulerimg::model::load_spec(data_path("fixtures/" + name + ".json"));
}
