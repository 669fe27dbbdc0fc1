// hpaudit: command-line front end for the locality audits, signaling
// simulations, combinatorics scans and sampling experiments.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 internal model
// inconsistency (e.g. moments that admit no joint distribution).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hpaudit/audit.hpp"
#include "hpaudit/combinatorics.hpp"
#include "hpaudit/core_model.hpp"
#include "hpaudit/error.hpp"
#include "hpaudit/experiment.hpp"
#include "hpaudit/models.hpp"
#include "hpaudit/parallel.hpp"
#include "hpaudit/serialize.hpp"
#include "hpaudit/setting_grid.hpp"
#include "hpaudit/signaling.hpp"

namespace {

using nlohmann::json;
using namespace hpaudit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct RunConfig {
  std::string subcommand;
  std::string model = "hp-v2";
  int n = 4;
  std::string theta = "lower";
  std::string grid = "standard";
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string format;
  std::string output;

  // Signaling.
  int version = 1;
  int k = 1;
  double prior = 0.5;
  bool withhold_r = false;

  // Combinatorics.
  long long limit = 100;
  std::string family = "all";
  int side = 3;
  int select = 2;

  // Sampling.
  std::size_t pairs = 20;
  std::string a_text;
  std::string b_text;
};

ModelParams model_params(const RunConfig& cfg) {
  ModelParams p;
  p.n = cfg.n;
  p.theta = ThetaPolicy::parse(cfg.theta);
  p.validate();
  return p;
}

// The output path is left out so that identical runs written to different
// files stay byte-identical.
json config_json(const RunConfig& cfg) {
  json j = {{"subcommand", cfg.subcommand}, {"seed", cfg.seed}, {"format", cfg.format}};
  const std::string& s = cfg.subcommand;
  if (s == "audit" || s == "sample") {
    j["model"] = cfg.model;
    j["n"] = cfg.n;
    j["theta"] = cfg.theta;
    j["trials"] = cfg.trials;
  }
  if (s == "audit") j["grid"] = cfg.grid;
  if (s == "sample") {
    j["pairs"] = cfg.pairs;
    j["a"] = cfg.a_text;
    j["b"] = cfg.b_text;
  }
  if (s == "signal") {
    j["version"] = cfg.version;
    j["k"] = cfg.k;
    j["trials"] = cfg.trials;
    j["prior"] = cfg.prior;
    j["withhold_r"] = cfg.withhold_r;
    j["n"] = cfg.n;
  }
  if (s == "combinat scan" || s == "combinat perm") j["limit"] = cfg.limit;
  if (s == "combinat census") {
    j["n"] = cfg.n;
    j["family"] = cfg.family;
    j["grid"] = cfg.grid;
  }
  if (s == "combinat toy") {
    j["side"] = cfg.side;
    j["select"] = cfg.select;
  }
  return j;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    throw Error(ErrorCode::InvalidArgument, "cannot write output file '" + cfg.output + "'");
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Direction parse_direction(const std::string& text) {
  std::stringstream in(text);
  std::string comp;
  std::vector<double> v;
  while (std::getline(in, comp, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(comp, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != comp.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad direction component '" + comp + "'");
    }
    v.push_back(value);
  }
  if (v.size() != 3) throw Error(ErrorCode::InvalidArgument, "direction needs 3 components");
  try {
    return make_direction({v[0], v[1], v[2]});
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, e.detail());
  }
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// --- audit ---

int cmd_audit(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "json";
  const unsigned threads = default_threads();
  const ModelParams params = model_params(cfg);
  const SettingGrid grid = SettingGrid::parse(cfg.grid);
  grid.validate();
  const std::uint64_t mc = cfg.trials == 0 ? 1'000'000 : cfg.trials;
  const auto model = make_model(cfg.model, params, mc, cfg.seed);

  RandomStream lambda_rng(cfg.seed, 0xA0D17);
  const auto lambdas = model->audit_lambdas(lambda_rng);

  const AuditReport pi = audit_parameter_independence(*model, grid, lambdas, threads);
  const AuditReport sl = audit_signal_locality(*model, grid, threads);
  const AuditReport oi = audit_outcome_independence(*model, grid, lambdas, threads);
  const AuditReport qm = compare_to_qm(*model, grid, threads);

  const double s2 = std::numbers::sqrt2 / 2.0;
  const Direction a = make_direction({1, 0, 0});
  const Direction a_alt = make_direction({0, 1, 0});
  const Direction b = make_direction({s2, s2, 0});
  const Direction b_alt = make_direction({-s2, s2, 0});
  const double s = chsh(*model, a, a_alt, b, b_alt);

  const std::vector<const AuditReport*> reports = {&pi, &sl, &oi, &qm};
  if (cfg.format == "json") {
    json out = {{"config", config_json(cfg)},
                {"reports", json::array()},
                {"chsh",
                 {{"a", to_json(a)}, {"a_alt", to_json(a_alt)}, {"b", to_json(b)},
                  {"b_alt", to_json(b_alt)}, {"S", s}}}};
    for (const auto* r : reports) out["reports"].push_back(to_json(*r));
    emit(cfg, dump(out));
  } else if (cfg.format == "csv") {
    std::string text = audit_csv_header();
    for (const auto* r : reports) text += audit_csv_rows(*r);
    emit(cfg, text);
  } else {
    std::ostringstream out;
    out << "model " << model->name() << "  grid " << grid.descriptor << " (" << grid.size()
        << " settings)\n";
    char line[200];
    std::snprintf(line, sizeof line, "%-24s %16s  %s\n", "condition", "max_violation",
                  "partial maxima");
    out << line;
    for (const auto* r : reports) {
      std::string parts;
      for (const auto& [key, value] : r->partial_max) parts += key + "=" + fixed(value) + " ";
      std::snprintf(line, sizeof line, "%-24s %16.10g  %s\n", r->condition.c_str(),
                    r->max_violation, parts.c_str());
      out << line;
    }
    std::snprintf(line, sizeof line, "%-24s %16.10g\n", "chsh_S", s);
    out << line;
    emit(cfg, out.str());
  }
  return kExitOk;
}

// --- signal ---

int cmd_signal(RunConfig cfg) {
  ChannelConfig ch;
  ch.version = cfg.version;
  ch.k = cfg.k;
  ch.trials = cfg.trials == 0 ? 100'000 : cfg.trials;
  cfg.trials = ch.trials;
  ch.prior_bit1 = cfg.prior;
  ch.seed = cfg.seed;
  ch.withhold_r = cfg.withhold_r;
  ch.params.n = cfg.n;
  ch.validate();

  // Without --output the report goes to stdout in --format (table by
  // default); with --output the file gets --format (json by default) and the
  // table is printed as well.
  if (cfg.format.empty()) cfg.format = cfg.output.empty() ? "table" : "json";
  const ChannelReport report = run_protocol(ch, default_threads());

  std::string text;
  if (cfg.format == "json") {
    text = dump({{"config", config_json(cfg)}, {"report", to_json(report)}});
  } else if (cfg.format == "csv") {
    text = "k,trials,empirical,analytic,standard_error,z_score,errors\n" + std::to_string(ch.k) +
           "," + std::to_string(ch.trials) + "," + format_double(report.empirical_error_rate) +
           "," + format_double(report.analytic_error_rate) + "," +
           format_double(report.standard_error) + "," + format_double(report.z_score) + "," +
           std::to_string(report.errors()) + "\n";
  } else {
    text = channel_table(report);
  }
  emit(cfg, text);
  if (!cfg.output.empty()) std::cout << channel_table(report);
  return kExitOk;
}

// --- combinat ---

int cmd_scan(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "csv";
  const auto table = scan_table(cfg.limit, default_threads());
  if (cfg.format == "json") {
    json rows = json::array();
    json divisible = json::array();
    for (const auto& r : table) {
      rows.push_back(to_json(r));
      if (r.binom_divisible) divisible.push_back(r.n);
    }
    emit(cfg, dump({{"config", config_json(cfg)}, {"divisible", divisible}, {"results", rows}}));
  } else if (cfg.format == "csv") {
    emit(cfg, scan_csv(table));
  } else {
    std::ostringstream out;
    char line[120];
    std::snprintf(line, sizeof line, "%8s %10s %8s\n", "n", "divisible", "witness");
    out << line;
    for (const auto& r : table) {
      std::snprintf(line, sizeof line, "%8lld %10s %8s\n", r.n, r.binom_divisible ? "yes" : "no",
                    r.witness_prime ? std::to_string(*r.witness_prime).c_str() : "-");
      out << line;
    }
    emit(cfg, out.str());
  }
  return kExitOk;
}

int cmd_perm(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "json";
  if (cfg.limit < 2) throw Error(ErrorCode::InvalidArgument, "limit must be >= 2");
  std::vector<PermIntegrality> rows;
  for (long long n = 2; n <= cfg.limit; n += 2) rows.push_back(perm_integrality(n));
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    emit(cfg, dump({{"config", config_json(cfg)}, {"results", arr}}));
  } else {
    std::ostringstream out;
    out << "n,div_by_9,div_by_9n2\n";
    for (const auto& r : rows) {
      out << r.n << ',' << (r.div_by_9 ? "true" : "false") << ','
          << (r.div_by_9n2 ? "true" : "false") << '\n';
    }
    emit(cfg, out.str());
  }
  return kExitOk;
}

int cmd_census(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "json";
  const SettingGrid grid = cfg.grid == "standard" ? SettingGrid::cube26() : SettingGrid::parse(cfg.grid);
  std::vector<std::string> names;
  if (cfg.family == "all") {
    names = fixture_family_names();
  } else {
    names = {cfg.family};
  }
  std::vector<CensusReport> reports;
  std::vector<FamilyValidation> validations;
  for (const auto& name : names) {
    const PartitionFamily fam = fixture_family(name, cfg.n);
    validations.push_back(validate_family(fam, grid));
    for (const auto& a : grid.directions) {
      for (const auto& b : grid.directions) reports.push_back(census_E_A(fam, a, b));
    }
  }
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    json vals = json::array();
    for (const auto& v : validations) vals.push_back(to_json(v));
    bool all_consistent = true;
    for (const auto& r : reports) all_consistent = all_consistent && r.consistent;
    emit(cfg, dump({{"config", config_json(cfg)},
                    {"all_consistent", all_consistent},
                    {"validations", vals},
                    {"reports", arr}}));
  } else {
    emit(cfg, census_csv(reports));
  }
  return kExitOk;
}

int cmd_toy(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "json";
  const CoverageTable table = toy_census_enumeration(cfg.side, cfg.select);
  if (cfg.format == "json") {
    emit(cfg, dump({{"config", config_json(cfg)}, {"coverage", to_json(table)}}));
  } else {
    std::ostringstream out;
    out << "cell,total";
    for (int s = 0; s < table.select; ++s) out << ",slot" << s;
    out << '\n';
    for (std::size_t c = 0; c < table.counts.size(); ++c) {
      out << c << ',' << table.per_cell_total[c];
      for (auto v : table.counts[c]) out << ',' << v;
      out << '\n';
    }
    emit(cfg, out.str());
  }
  return kExitOk;
}

// --- sample ---

int cmd_sample(RunConfig cfg) {
  if (cfg.format.empty()) cfg.format = "json";
  if (cfg.trials == 0) cfg.trials = 100'000;
  const unsigned threads = default_threads();
  const ModelParams params = model_params(cfg);
  const auto model = make_model(cfg.model, params, 1'000'000, cfg.seed);

  std::vector<std::pair<Direction, Direction>> settings;
  if (!cfg.a_text.empty() || !cfg.b_text.empty()) {
    if (cfg.a_text.empty() || cfg.b_text.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--a and --b must be given together");
    }
    settings.emplace_back(parse_direction(cfg.a_text), parse_direction(cfg.b_text));
  } else {
    if (cfg.pairs < 1) throw Error(ErrorCode::InvalidArgument, "--pairs must be >= 1");
    settings = random_setting_pairs(cfg.seed, cfg.pairs);
  }

  std::vector<MomentEstimate> rows;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    rows.push_back(estimate_moments(*model, settings[i].first, settings[i].second, cfg.trials,
                                    cfg.seed, 0x5A + i, params.theta, threads));
  }
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    emit(cfg, dump({{"config", config_json(cfg)}, {"rows", arr}}));
  } else if (cfg.format == "csv") {
    emit(cfg, moments_csv(rows));
  } else {
    std::ostringstream out;
    char line[200];
    std::snprintf(line, sizeof line, "%4s %12s %12s %12s %9s %9s %9s\n", "pair", "E(A)", "E(B)",
                  "E(AB)", "z_A", "z_B", "z_AB");
    out << line;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      std::snprintf(line, sizeof line, "%4zu %12.6f %12.6f %12.6f %9.3f %9.3f %9.3f\n", i,
                    r.mean_a, r.mean_b, r.mean_ab, r.z_a, r.z_b, r.z_ab);
      out << line;
    }
    emit(cfg, out.str());
  }
  return kExitOk;
}

void add_format(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--format", cfg.format, "Output format: json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_option("--output,-o", cfg.output, "Write the report to this file instead of stdout");
}

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.model, "hp-v1, hp-v2, qm or local-fixture")
      ->check(CLI::IsMember({"hp-v1", "hp-v2", "qm", "local-fixture"}));
  cmd->add_option("--n", cfg.n, "Even resolution parameter n >= 2")->capture_default_str();
  cmd->add_option("--theta", cfg.theta, "Remainder policy: lower, upper or fixed:<t>")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Locality audits for the Hess-Philipp hidden-variable model"};
  app.require_subcommand(1);
  app.footer("Environment: LHV_AUDIT_THREADS caps worker threads. Exit codes: 0 ok, 2 usage, "
             "3 internal model inconsistency.");

  auto* audit = app.add_subcommand("audit", "Parameter independence, signal locality, outcome "
                                            "independence, QM comparison and CHSH");
  add_model_options(audit, cfg);
  audit->add_option("--grid", cfg.grid,
                    "standard, axes, cube26, fibonacci:<count> or list:x,y,z;x,y,z;...")
      ->capture_default_str();
  audit->add_option("--trials", cfg.trials, "Monte Carlo samples for local-fixture (default 1e6)");
  add_format(audit, cfg);
  audit->footer("CSV columns: condition,model,station,lambda,a_index,b_index,alt_index,quantity,"
                "outcome,lhs,rhs,violation");

  auto* signal = app.add_subcommand("signal", "Simulate the superluminal signaling protocol");
  signal->add_option("--version", cfg.version, "Model version 1 or 2")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  signal->add_option("--k", cfg.k, "Repetitions per bit")->capture_default_str();
  signal->add_option("--trials", cfg.trials, "Transmitted bits (default 1e5)");
  signal->add_option("--prior", cfg.prior, "Probability that Alice sends bit 1")
      ->capture_default_str();
  signal->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  signal->add_option("--n", cfg.n, "Even resolution parameter n >= 2")->capture_default_str();
  signal->add_flag("--withhold-r", cfg.withhold_r,
                   "Version 2 diagnostic: Bob is not told r(lambda)");
  add_format(signal, cfg);
  signal->footer("CSV columns: k,trials,empirical,analytic,standard_error,z_score,errors");

  auto* combinat = app.add_subcommand("combinat", "Divisibility and counting checks");
  combinat->require_subcommand(1);
  auto* scan = combinat->add_subcommand("scan", "Even n <= limit with 9n^2 | C(9n^2, 3n)");
  scan->add_option("--limit", cfg.limit, "Largest n to check")->capture_default_str();
  add_format(scan, cfg);
  scan->footer("CSV columns: n,divisible,worst_prime,needed,available");
  auto* perm = combinat->add_subcommand("perm", "Integrality of P(9n^2, 3n)/9 and /9n^2");
  perm->add_option("--limit", cfg.limit, "Largest n to check")->capture_default_str();
  add_format(perm, cfg);
  perm->footer("CSV columns: n,div_by_9,div_by_9n2");
  auto* census = combinat->add_subcommand("census", "Counting-level census of E_lambda(A)");
  census->add_option("--n", cfg.n, "Even resolution parameter n >= 2")->capture_default_str();
  census->add_option("--family", cfg.family, "fixture-0, fixture-half, fixture-1 or all")
      ->check(CLI::IsMember({"fixture-0", "fixture-half", "fixture-1", "all"}))
      ->capture_default_str();
  census->add_option("--grid", cfg.grid, "Setting grid (default cube26)");
  add_format(census, cfg);
  census->footer("CSV columns: family,n,ax,ay,az,bx,by,bz,census_E_A,formula_lo,formula_hi,"
                 "consistent");
  auto* toy = combinat->add_subcommand("toy", "Exhaustive coverage check on a small grid");
  toy->add_option("--side", cfg.side, "Grid side")->capture_default_str();
  toy->add_option("--select", cfg.select, "Cells per ordered selection")->capture_default_str();
  add_format(toy, cfg);
  toy->footer("CSV columns: cell,total,slot0,slot1,...");

  auto* sample = app.add_subcommand("sample", "Empirical vs closed-form moments");
  add_model_options(sample, cfg);
  sample->add_option("--trials", cfg.trials, "Runs per setting pair (default 1e5)");
  sample->add_option("--pairs", cfg.pairs, "Random setting pairs")->capture_default_str();
  sample->add_option("--a", cfg.a_text, "Station-1 setting x,y,z");
  sample->add_option("--b", cfg.b_text, "Station-2 setting x,y,z");
  add_format(sample, cfg);
  sample->footer("CSV columns: ax,ay,az,bx,by,bz,trials,emp_A,emp_B,emp_AB,exact_A,exact_B,"
                 "exact_AB,z_A,z_B,z_AB");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (audit->parsed()) {
      cfg.subcommand = "audit";
      return cmd_audit(cfg);
    }
    if (signal->parsed()) {
      cfg.subcommand = "signal";
      return cmd_signal(cfg);
    }
    if (sample->parsed()) {
      cfg.subcommand = "sample";
      return cmd_sample(cfg);
    }
    if (scan->parsed()) {
      cfg.subcommand = "combinat scan";
      return cmd_scan(cfg);
    }
    if (perm->parsed()) {
      cfg.subcommand = "combinat perm";
      return cmd_perm(cfg);
    }
    if (census->parsed()) {
      cfg.subcommand = "combinat census";
      return cmd_census(cfg);
    }
    if (toy->parsed()) {
      cfg.subcommand = "combinat toy";
      return cmd_toy(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "hpaudit: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::JointInconsistency:
      case ErrorCode::ExpectationOutOfRange:
      case ErrorCode::FamilyContractViolated:
        return kExitInternal;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "hpaudit: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
