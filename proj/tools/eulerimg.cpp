#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "eulerimg/app.hpp"

using namespace eulerimg;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kError = 1, kNotDecided = 2, kMismatch = 3 };

struct Globals {
  std::uint64_t budget = checks::kDefaultBudget;
  unsigned threads = 1;
  std::string json_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed;
};

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw app::AppError("cannot write " + path);
  out << text;
}

void emit_json(const Globals& g, const std::string& command, const json& result) {
  if (g.json_path.empty()) return;
  json j{{"command", command}, {"generated_at", utc_now()}, {"result", result}};
  if (g.seed) j["seed"] = *g.seed;
  write_file(g.json_path, j.dump(2) + "\n");
}

model::PairSpec load_valid(const std::string& path) {
  auto s = model::load_spec(path);
  auto v = model::validate_spec(s);
  if (!v.empty()) {
    std::string msg = path + " does not validate:";
    for (const auto& x : v) msg += "\n  " + x;
    throw model::SpecError(msg);
  }
  return s;
}

app::RunOptions run_options(const Globals& g) { return {g.budget, g.threads}; }

int cmd_check(const Globals& g, const std::string& spec, std::uint64_t p) {
  auto s = load_valid(spec);
  checks::ClassifyOptions co;
  co.brute = {g.budget, g.threads, false};
  auto r = checks::classify(s, p, co);
  std::cout << app::report_text(r);
  emit_json(g, "check", r.to_json());
  return r.euler_adapted == checks::Verdict::kNotDecided ? kNotDecided : kOk;
}

int cmd_scan(const Globals& g, const std::string& spec, std::uint64_t from, std::uint64_t to, std::int64_t modulus) {
  auto s = load_valid(spec);
  auto r = app::scan(s, from, to, modulus, run_options(g));
  std::cout << "p      wE           sE           Euler-adapted\n";
  for (const auto& x : r.summaries) {
    std::cout << std::left << std::setw(7) << x.p << std::setw(13) << checks::to_string(x.wE) << std::setw(13)
              << checks::to_string(x.sE) << checks::to_string(x.euler_adapted) << "\n";
  }
  for (const auto& [p, e] : r.errors) std::cout << "p = " << p << ": error: " << e << "\n";
  std::cout << "\nresidue mod " << modulus << "  holds  fails  not-decided\n";
  for (const auto& c : r.rollup) {
    std::cout << std::setw(15) << c.residue << std::setw(7) << c.holds << std::setw(7) << c.fails << c.not_decided
              << (c.constant() ? "" : "  NOT CONSTANT") << "\n";
  }
  emit_json(g, "scan", r.to_json());
  if (!g.csv_path.empty()) write_file(g.csv_path, r.to_csv());
  if (!r.nonconstant_classes().empty()) return kMismatch;
  bool undecided = std::any_of(r.summaries.begin(), r.summaries.end(),
                               [](const app::PrimeSummary& x) { return x.sE == checks::Verdict::kNotDecided; });
  return undecided ? kNotDecided : kOk;
}

int cmd_verify(const Globals& g, const std::string& cases_path, const std::string& id) {
  auto cases = app::load_cases(cases_path);
  std::vector<const app::FixtureCase*> todo;
  if (id == "all") {
    for (const auto& c : cases) todo.push_back(&c);
  } else {
    todo.push_back(&app::find_case(cases, id));
  }
  std::vector<app::CaseResult> results;
  json out{{"cases", json::array()}};
  bool all_pass = true;
  for (const auto* c : todo) {
    auto r = app::verify_case(*c, run_options(g));
    std::cout << "case " << r.id << " (" << c->pair << "): " << (r.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& run : r.runs) {
      std::cout << "  p = " << run.p << "  expected sE " << checks::to_string(run.expected) << ", got "
                << checks::to_string(run.report.sE.verdict) << "  [" << (run.match ? "ok" : "MISMATCH") << "]\n";
    }
    for (const auto& f : r.facts) {
      std::cout << "  " << f.name << ": declared " << f.declared << ", computed " << f.computed << "  ["
                << (f.ok ? "ok" : "MISMATCH") << "]\n";
    }
    for (const auto& e : r.errors) std::cout << "  error: " << e << "\n";
    if (!r.pass) {
      auto bad = std::find_if(r.runs.begin(), r.runs.end(), [](const app::CaseRun& x) { return !x.match; });
      if (bad != r.runs.end()) std::cout << "  counterexample transcript:\n" << app::report_text(bad->report);
    }
    all_pass = all_pass && r.pass;
    out["cases"].push_back(r.to_json());
    results.push_back(std::move(r));
  }
  out["pass"] = all_pass;
  emit_json(g, "verify-paper", out);
  if (!g.csv_path.empty()) write_file(g.csv_path, app::case_csv(results));
  bool errors = std::any_of(results.begin(), results.end(), [](const app::CaseResult& r) { return !r.errors.empty(); });
  if (all_pass) return kOk;
  return errors ? kError : kMismatch;
}

int cmd_oracle(const Globals& g, const std::string& spec, const std::vector<std::uint64_t>& primes) {
  auto s = load_valid(spec);
  auto r = app::oracle_compare(s, primes, run_options(g));
  bool errors = false;
  for (const auto& row : r.rows) {
    std::cout << "p = " << row.p << "  symbolic " << (row.symbolic ? "witness" : "none");
    if (row.brute) std::cout << "  brute " << (*row.brute ? "witness" : "none");
    if (!row.error.empty()) {
      std::cout << "  error: " << row.error;
      errors = true;
    }
    std::cout << (row.agree() ? "  [agree]" : "  [DISAGREE]") << "\n";
  }
  emit_json(g, "oracle-compare", r.to_json());
  if (r.pass()) return kOk;
  return errors ? kError : kMismatch;
}

int cmd_validate(const std::string& spec) {
  auto s = model::load_spec(spec);
  auto v = model::validate_spec(s);
  for (const auto& x : v) std::cout << x << "\n";
  if (!v.empty()) return kError;
  std::cout << spec << ": ok (validation prime " << model::validation_prime(s) << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Euler-adapted image checks for f x g Galois representations"};
  cli.require_subcommand(1);
  Globals g;
  cli.add_option("--budget", g.budget, "max f-part x g-part pairs for brute enumeration");
  cli.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  cli.add_option("--json", g.json_path, "write a JSON report");
  cli.add_option("--csv", g.csv_path, "write a CSV rollup");
  cli.add_option("--seed", g.seed, "seed for randomized suites (recorded in JSON)");

  std::string spec, cases_path = std::string(EULERIMG_DATA_DIR) + "/cases.json", case_id;
  std::uint64_t p = 0, from = 0, to = 0;
  std::int64_t modulus = 1;
  std::vector<std::uint64_t> primes;

  auto* check = cli.add_subcommand("check", "classify one prime");
  check->add_option("spec", spec)->required();
  check->add_option("p", p)->required();

  auto* scan = cli.add_subcommand("scan", "classify a range of good primes and roll up by residue");
  scan->add_option("spec", spec)->required();
  scan->add_option("--from", from)->required();
  scan->add_option("--to", to)->required();
  scan->add_option("--modulus", modulus)->required();

  auto* verify = cli.add_subcommand("verify-paper", "run a fixture case (or all) against its declared verdicts");
  verify->add_option("case", case_id)->required();
  verify->add_option("--cases", cases_path, "case table");

  auto* oracle = cli.add_subcommand("oracle-compare", "compare symbolic and brute deciders");
  oracle->add_option("spec", spec)->required();
  oracle->add_option("primes", primes)->required();

  auto* validate = cli.add_subcommand("validate", "lint a spec file");
  validate->add_option("spec", spec)->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = cli.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*check) return cmd_check(g, spec, p);
    if (*scan) return cmd_scan(g, spec, from, to, modulus);
    if (*verify) return cmd_verify(g, cases_path, case_id);
    if (*oracle) return cmd_oracle(g, spec, primes);
    if (*validate) return cmd_validate(spec);
  } catch (const checks::CheckError& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
