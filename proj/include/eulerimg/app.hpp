#pragma once

// Fixture cases, prime scans, case verification and report emission.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eulerimg/checks.hpp"
#include "json.hpp"

namespace eulerimg::app {

using checks::Verdict;
using model::PairSpec;

class AppError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::uint64_t budget = checks::kDefaultBudget;
  unsigned threads = 1;
};

// Group-theoretic facts stated for a case; absent fields are not checked.
struct DeclaredFacts {
  std::optional<std::size_t> order;
  std::optional<std::string> proj_type;
  std::optional<std::size_t> scalars;
  std::optional<std::size_t> index;  // [G : G_H]
  std::optional<std::vector<std::string>> det_H;
};

struct FixtureCase {
  std::string id;
  std::string spec_path;  // absolute after loading
  std::string pair;
  std::string claim;
  std::int64_t modulus = 1;
  std::vector<std::int64_t> failing_classes;
  std::vector<std::uint64_t> primes;
  std::vector<std::uint64_t> brute_primes;
  DeclaredFacts facts;

  Verdict expected(std::uint64_t p) const;
};

std::vector<FixtureCase> load_cases(const std::string& path);
const FixtureCase& find_case(const std::vector<FixtureCase>& cases, const std::string& id);

struct FactCheck {
  std::string name;
  std::string declared;
  std::string computed;
  bool ok = false;
};

// Computed at the spec's validation prime.
std::vector<FactCheck> integrity_facts(const PairSpec& s, const DeclaredFacts& d);

struct CaseRun {
  std::uint64_t p = 0;
  Verdict expected = Verdict::kNotDecided;
  checks::CheckReport report;
  bool match = false;
};

struct CaseResult {
  std::string id;
  std::string claim;
  std::vector<CaseRun> runs;
  std::vector<FactCheck> facts;
  std::vector<std::string> errors;
  bool pass = false;

  nlohmann::json to_json() const;
};

CaseResult verify_case(const FixtureCase& c, const RunOptions& opts = {});

struct PrimeSummary {
  std::uint64_t p = 0;
  Verdict wE = Verdict::kNotDecided;
  Verdict sE = Verdict::kNotDecided;
  Verdict euler_type = Verdict::kNotDecided;
  Verdict euler_adapted = Verdict::kNotDecided;
  std::vector<std::string> sE_methods;
};

struct ClassRollup {
  std::int64_t residue = 0;
  std::size_t holds = 0, fails = 0, not_decided = 0;

  std::size_t total() const { return holds + fails + not_decided; }
  bool constant() const;
};

struct ScanResult {
  std::int64_t modulus = 1;
  std::vector<std::uint64_t> primes;
  std::vector<PrimeSummary> summaries;
  std::vector<std::pair<std::uint64_t, std::string>> errors;
  std::vector<ClassRollup> rollup;  // by (sE), residues ascending

  std::vector<std::int64_t> nonconstant_classes() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Good primes in [p_min, p_max]; parallel across primes, merged in order.
ScanResult scan(const PairSpec& s, std::uint64_t p_min, std::uint64_t p_max, std::int64_t modulus,
                const RunOptions& opts = {});

struct OracleRow {
  std::uint64_t p = 0;
  bool symbolic = false;
  std::optional<bool> brute;
  std::string error;

  bool agree() const { return error.empty() && brute && *brute == symbolic; }
};

struct OracleResult {
  std::vector<OracleRow> rows;
  bool pass() const;
  nlohmann::json to_json() const;
};

// Throws AppError if the spec does not validate.
OracleResult oracle_compare(const PairSpec& s, const std::vector<std::uint64_t>& primes, const RunOptions& opts = {});

std::string report_text(const checks::CheckReport& r);
std::string case_csv(const std::vector<CaseResult>& results);

// Drops "generated_at" keys at any depth.
nlohmann::json strip_volatile(nlohmann::json j);

}  // namespace eulerimg::app
