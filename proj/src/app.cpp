#include "eulerimg/app.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "eulerimg/numtheory.hpp"

namespace eulerimg::app {

using nlohmann::json;

namespace {

std::int64_t residue(std::uint64_t p, std::int64_t m) { return static_cast<std::int64_t>(p % static_cast<std::uint64_t>(m)); }

template <typename T>
std::string join(const std::vector<T>& v, const std::string& sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

bool contains(const std::vector<std::string>& v, const std::string& x) { return std::find(v.begin(), v.end(), x) != v.end(); }

DeclaredFacts facts_from_json(const json& j) {
  DeclaredFacts d;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "order") {
      d.order = it->get<std::size_t>();
    } else if (k == "proj_type") {
      d.proj_type = it->get<std::string>();
    } else if (k == "scalars") {
      d.scalars = it->get<std::size_t>();
    } else if (k == "index") {
      d.index = it->get<std::size_t>();
    } else if (k == "det_H") {
      d.det_H = it->get<std::vector<std::string>>();
    } else {
      throw AppError("facts: unknown field '" + k + "'");
    }
  }
  return d;
}

json summary_json(const PrimeSummary& s) {
  return {{"p", s.p},
          {"wE", checks::to_string(s.wE)},
          {"sE", checks::to_string(s.sE)},
          {"euler_type", checks::to_string(s.euler_type)},
          {"euler_adapted", checks::to_string(s.euler_adapted)},
          {"sE_methods", s.sE_methods}};
}

}  // namespace

Verdict FixtureCase::expected(std::uint64_t p) const {
  auto r = residue(p, modulus);
  bool fails = std::find(failing_classes.begin(), failing_classes.end(), r) != failing_classes.end();
  return fails ? Verdict::kFails : Verdict::kHolds;
}

std::vector<FixtureCase> load_cases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AppError("cannot open case file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw AppError(path + ": " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  std::vector<FixtureCase> out;
  try {
    for (const auto& c : j.at("cases")) {
      FixtureCase fc;
      fc.id = c.at("id").get<std::string>();
      fc.spec_path = (dir / c.at("spec").get<std::string>()).string();
      fc.pair = c.at("pair").get<std::string>();
      fc.claim = c.at("claim").get<std::string>();
      fc.modulus = c.at("modulus").get<std::int64_t>();
      fc.failing_classes = c.at("failing_classes").get<std::vector<std::int64_t>>();
      fc.primes = c.at("primes").get<std::vector<std::uint64_t>>();
      fc.brute_primes = c.value("brute_primes", std::vector<std::uint64_t>{});
      if (c.contains("facts")) fc.facts = facts_from_json(c["facts"]);
      if (fc.modulus < 1) throw AppError(fc.id + ": modulus must be positive");
      for (auto p : fc.brute_primes)
        if (std::find(fc.primes.begin(), fc.primes.end(), p) == fc.primes.end())
          throw AppError(fc.id + ": brute prime " + std::to_string(p) + " is not in the prime list");
      out.push_back(std::move(fc));
    }
  } catch (const json::exception& e) {
    throw AppError(path + ": " + e.what());
  }
  return out;
}

const FixtureCase& find_case(const std::vector<FixtureCase>& cases, const std::string& id) {
  for (const auto& c : cases)
    if (c.id == id) return c;
  std::vector<std::string> ids;
  for (const auto& c : cases) ids.push_back(c.id);
  throw AppError("no case '" + id + "' (known: " + join(ids, ", ") + ")");
}

std::vector<FactCheck> integrity_facts(const PairSpec& s, const DeclaredFacts& d) {
  const auto p = model::validation_prime(s);
  auto f = ff::make_field(p, model::required_degree(s, p));
  auto gs = model::build_gside(s, f);
  std::vector<FactCheck> out;
  auto num = [&](const std::string& name, const std::optional<std::size_t>& want, std::size_t got) {
    if (want) out.push_back({name, std::to_string(*want), std::to_string(got), *want == got});
  };
  num("order", d.order, gs.G.order());
  if (d.proj_type) {
    auto t = grp::projective_type(gs.G).to_string();
    out.push_back({"proj_type", *d.proj_type, t, t == *d.proj_type});
  }
  num("scalars", d.scalars, gs.G.scalars().size());
  num("index", d.index, gs.G.order() / gs.GH.order());
  if (d.det_H) {
    std::set<std::uint64_t> want, got;
    for (const auto& c : *d.det_H) want.insert(cyclo::reduce_mod_p(cyclo::parse(c), f).encode());
    for (const auto& x : gs.GH.elements()) got.insert(x.det().encode());
    out.push_back({"det_H", "{" + join(*d.det_H, ", ") + "}", std::to_string(got.size()) + " values", want == got});
  }
  return out;
}

CaseResult verify_case(const FixtureCase& c, const RunOptions& opts) {
  CaseResult r;
  r.id = c.id;
  r.claim = c.claim;
  PairSpec s;
  try {
    s = model::load_spec(c.spec_path);
  } catch (const model::SpecError& e) {
    r.errors.push_back(e.what());
    return r;
  }
  for (const auto& v : model::validate_spec(s)) r.errors.push_back("spec: " + v);
  if (!r.errors.empty()) return r;

  r.facts = integrity_facts(s, c.facts);
  for (auto p : c.primes) {
    CaseRun run;
    run.p = p;
    run.expected = c.expected(p);
    checks::ClassifyOptions co;
    co.brute = {opts.budget, opts.threads, false};
    co.run_brute = std::find(c.brute_primes.begin(), c.brute_primes.end(), p) != c.brute_primes.end();
    try {
      run.report = checks::classify(s, p, co);
    } catch (const std::exception& e) {
      r.errors.push_back("p = " + std::to_string(p) + ": " + e.what());
      continue;
    }
    const auto& rep = run.report;
    run.match = rep.sE.verdict == run.expected && rep.wE.verdict == run.expected;
    if (co.run_brute && !contains(rep.sE.methods, "brute")) {
      run.match = false;
      r.errors.push_back("p = " + std::to_string(p) + ": brute confirmation did not run (budget " +
                         std::to_string(opts.budget) + ")");
    }
    r.runs.push_back(std::move(run));
  }
  r.pass = r.errors.empty() && std::all_of(r.runs.begin(), r.runs.end(), [](const CaseRun& x) { return x.match; }) &&
           std::all_of(r.facts.begin(), r.facts.end(), [](const FactCheck& f) { return f.ok; });
  return r;
}

json CaseResult::to_json() const {
  json j{{"id", id}, {"claim", claim}, {"pass", pass}};
  j["runs"] = json::array();
  for (const auto& run : runs) {
    j["runs"].push_back({{"p", run.p},
                         {"expected_sE", checks::to_string(run.expected)},
                         {"match", run.match},
                         {"report", run.report.to_json()}});
  }
  j["facts"] = json::array();
  for (const auto& f : facts)
    j["facts"].push_back({{"name", f.name}, {"declared", f.declared}, {"computed", f.computed}, {"ok", f.ok}});
  j["errors"] = errors;
  return j;
}

bool ClassRollup::constant() const { return (holds > 0) + (fails > 0) + (not_decided > 0) <= 1; }

std::vector<std::int64_t> ScanResult::nonconstant_classes() const {
  std::vector<std::int64_t> out;
  for (const auto& c : rollup)
    if (!c.constant()) out.push_back(c.residue);
  return out;
}

ScanResult scan(const PairSpec& s, std::uint64_t p_min, std::uint64_t p_max, std::int64_t modulus,
                const RunOptions& opts) {
  if (modulus < 1) throw AppError("modulus must be positive");
  ScanResult r;
  r.modulus = modulus;
  for (std::uint64_t p = p_min; p <= p_max; ++p)
    if (nt::is_prime(p) && model::good_prime(s, p).good) r.primes.push_back(p);

  std::vector<std::optional<PrimeSummary>> slots(r.primes.size());
  std::vector<std::string> errs(r.primes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < r.primes.size();) {
      checks::ClassifyOptions co;
      co.brute = {opts.budget, 1, false};
      try {
        auto rep = checks::classify(s, r.primes[i], co);
        slots[i] = PrimeSummary{rep.p, rep.wE.verdict, rep.sE.verdict, rep.euler_type, rep.euler_adapted, rep.sE.methods};
      } catch (const std::exception& e) {
        errs[i] = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(r.primes.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::map<std::int64_t, ClassRollup> by_class;
  for (std::size_t i = 0; i < r.primes.size(); ++i) {
    if (!slots[i]) {
      r.errors.emplace_back(r.primes[i], errs[i]);
      continue;
    }
    r.summaries.push_back(*slots[i]);
    auto& c = by_class[residue(r.primes[i], modulus)];
    c.residue = residue(r.primes[i], modulus);
    switch (slots[i]->sE) {
      case Verdict::kHolds:
        ++c.holds;
        break;
      case Verdict::kFails:
        ++c.fails;
        break;
      case Verdict::kNotDecided:
        ++c.not_decided;
        break;
    }
  }
  for (auto& [k, c] : by_class) r.rollup.push_back(c);
  return r;
}

json ScanResult::to_json() const {
  json j{{"modulus", modulus}, {"primes", primes}};
  j["results"] = json::array();
  for (const auto& s : summaries) j["results"].push_back(summary_json(s));
  j["rollup"] = json::array();
  for (const auto& c : rollup) {
    j["rollup"].push_back({{"residue", c.residue},
                           {"holds", c.holds},
                           {"fails", c.fails},
                           {"not_decided", c.not_decided},
                           {"constant", c.constant()}});
  }
  j["errors"] = json::array();
  for (const auto& [p, e] : errors) j["errors"].push_back({{"p", p}, {"error", e}});
  return j;
}

std::string ScanResult::to_csv() const {
  std::ostringstream os;
  os << "residue,modulus,holds,fails,not_decided,constant\n";
  for (const auto& c : rollup)
    os << c.residue << ',' << modulus << ',' << c.holds << ',' << c.fails << ',' << c.not_decided << ','
       << (c.constant() ? "yes" : "no") << '\n';
  return os.str();
}

bool OracleResult::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const OracleRow& r) { return r.agree(); });
}

json OracleResult::to_json() const {
  json j{{"pass", pass()}};
  j["rows"] = json::array();
  for (const auto& r : rows) {
    json row{{"p", r.p}, {"symbolic", r.symbolic}, {"agree", r.agree()}};
    row["brute"] = r.brute ? json(*r.brute) : json(nullptr);
    if (!r.error.empty()) row["error"] = r.error;
    j["rows"].push_back(row);
  }
  return j;
}

OracleResult oracle_compare(const PairSpec& s, const std::vector<std::uint64_t>& primes, const RunOptions& opts) {
  auto violations = model::validate_spec(s);
  if (!violations.empty()) throw AppError("spec does not validate: " + join(violations, "; "));
  OracleResult out;
  for (auto p : primes) {
    OracleRow row;
    row.p = p;
    try {
      auto m = model::build_image(s, p);
      row.symbolic = checks::check_wE_symbolic(m).has_value();
      row.brute = checks::check_sE_brute(m, {opts.budget, opts.threads, false}).witness.has_value();
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out.rows.push_back(row);
  }
  return out;
}

std::string report_text(const checks::CheckReport& r) {
  std::ostringstream os;
  os << r.label << " at p = " << r.p << " over " << r.field << "\n";
  auto line = [&](const char* name, const checks::ConditionResult& c) {
    os << "  " << name << "  " << checks::to_string(c.verdict) << "  [" << join(c.methods, ", ") << "]";
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  };
  line("N ", r.N);
  line("gI", r.gI);
  line("rI", r.rI);
  line("wE", r.wE);
  line("sE", r.sE);
  os << "  Euler type:    " << checks::to_string(r.euler_type) << "\n";
  os << "  Euler-adapted: " << checks::to_string(r.euler_adapted) << "\n";
  os << "  special2: " << checks::to_string(r.special2.outcome) << " (" << r.special2.detail << ")\n";
  os << "  specialq: " << checks::to_string(r.specialq.outcome) << " (" << r.specialq.detail << ")\n";
  if (!r.skipped_blocks.empty()) os << "  blocks skipped by the determinant test: " << join(r.skipped_blocks, ", ") << "\n";
  if (r.witness) {
    os << "  witness in block " << r.witness->sigma << ":\n";
    os << "    M = " << r.witness->f_part.to_string() << "\n";
    os << "    N = " << r.witness->g_part_elem.to_string() << "\n";
    os << "    4 - rank(M (x) N - I) = " << r.witness->tensor_rank_defect << "\n";
  }
  for (const auto& a : r.assumptions) os << "  assumes: " << a << "\n";
  return os.str();
}

std::string case_csv(const std::vector<CaseResult>& results) {
  std::ostringstream os;
  os << "case,p,expected_sE,sE,wE,euler_adapted,match\n";
  for (const auto& c : results)
    for (const auto& run : c.runs)
      os << c.id << ',' << run.p << ',' << checks::to_string(run.expected) << ','
         << checks::to_string(run.report.sE.verdict) << ',' << checks::to_string(run.report.wE.verdict) << ','
         << checks::to_string(run.report.euler_adapted) << ',' << (run.match ? "yes" : "no") << '\n';
  return os.str();
}

json strip_volatile(json j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [k, v] : j.items()) v = strip_volatile(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_volatile(v);
  }
  return j;
}

}  // namespace eulerimg::app
