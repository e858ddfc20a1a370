#pragma once

// Deciders for (N), (gI), (rI), (wE), (sE) on an image model.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerimg/model.hpp"
#include "json.hpp"

namespace eulerimg::checks {

using mat::Mat2;
using model::ImageModel;
using model::PairSpec;

inline constexpr std::uint64_t kDefaultBudget = 100000000;

// A decider produced an inconsistent answer; never caught by classify.
class CheckError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { kHolds, kFails, kNotDecided };
std::string to_string(Verdict v);

struct Witness {
  std::size_t sigma = 0;
  Mat2 f_part;
  Mat2 g_part_elem;
  int tensor_rank_defect = 0;  // 4 - rank(kron(f_part, g_part_elem) - I)
};

struct WitnessDescriptor {
  std::size_t block = 0;
  Mat2 N;
  ff::FqElem u;  // eigenvalue of N, possibly in an extension of the model field
};

// SL2(F_p) in a fixed order: the Borel part [[a, b], [0, 1/a]] (a outer,
// b inner) and then the big cell [[a, (a d - 1)/c], [c, d]] (c, a, d).
std::uint64_t sl2_size(std::uint64_t p);
Mat2 sl2_element(ff::Field base, std::uint64_t index);

// The f-part group of the model (SL2, {+-I} or {I}).
std::uint64_t f_part_size(const ImageModel& m);
Mat2 f_part_element(const ImageModel& m, std::uint64_t index);

Verdict check_N(const ImageModel& m);
bool check_irreducible(const ImageModel& m);
bool rI_exception(const PairSpec& s, std::uint64_t p);

struct BruteOptions {
  std::uint64_t budget = kDefaultBudget;
  unsigned threads = 1;
  bool force_all_blocks = false;  // disable the d * det N = 1 skip
};

struct BruteResult {
  std::optional<Witness> witness;
  std::vector<std::size_t> skipped_blocks;
  std::uint64_t pairs_examined = 0;
};

// Throws BudgetExceeded if |f-part| * max|g_part| exceeds the budget.
BruteResult check_sE_brute(const ImageModel& m, const BruteOptions& opts = {});
bool within_budget(const ImageModel& m, std::uint64_t budget);

std::optional<WitnessDescriptor> check_wE_symbolic(const ImageModel& m);
Witness construct_witness(const ImageModel& m, const WitnessDescriptor& w);

enum class Criterion { kSufficient, kExceptional, kInapplicable };
std::string to_string(Criterion c);

struct CriterionResult {
  Criterion outcome = Criterion::kInapplicable;
  std::string detail;
};

// p is needed to reduce the g-group; any good prime not dividing |G| gives
// the same answer.
CriterionResult criterion_special2(const PairSpec& s, std::uint64_t p);
CriterionResult criterion_specialq(const PairSpec& s, std::uint64_t p);

struct ConditionResult {
  Verdict verdict = Verdict::kNotDecided;
  std::vector<std::string> methods;
  std::string note;
};

struct CheckReport {
  std::string label;
  std::uint64_t p = 0;
  std::string field;
  ConditionResult N, gI, rI, wE, sE;
  Verdict euler_type = Verdict::kNotDecided;
  Verdict euler_adapted = Verdict::kNotDecided;
  std::optional<Witness> witness;
  std::optional<WitnessDescriptor> descriptor;
  std::vector<std::size_t> skipped_blocks;
  CriterionResult special2, specialq;
  std::vector<std::string> assumptions;
  double seconds = 0;  // wall time; not serialized

  nlohmann::json to_json() const;
};

struct ClassifyOptions {
  BruteOptions brute;
  bool run_brute = true;
};

CheckReport classify(const PairSpec& s, std::uint64_t p, const ClassifyOptions& opts = {});

}  // namespace eulerimg::checks
