#include "hpaudit/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hpaudit {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const Direction& d) { return json::array({d.x(), d.y(), d.z()}); }

json to_json(const HiddenSource& s) {
  return {{"r", s.r}, {"emission_time", s.emission_time}, {"seed_tag", s.seed_tag}};
}

json to_json(const BoundedValue& v) { return {{"lo", v.lo}, {"hi", v.hi}}; }

namespace {

json row_json(const AuditRow& row) {
  json j = {{"station", row.station},
            {"lambda", row.lambda_index},
            {"a_index", row.a_index},
            {"b_index", row.b_index},
            {"quantity", row.quantity},
            {"outcome", row.outcome},
            {"lhs", row.lhs},
            {"rhs", row.rhs},
            {"violation", row.violation}};
  j["alt_index"] = row.alt_index ? json(*row.alt_index) : json(nullptr);
  return j;
}

json log_json(const std::vector<LogEntry>& log) {
  json out = json::array();
  for (const auto& e : log) out.push_back({{"context", e.context}, {"value", e.value}});
  return out;
}

}  // namespace

json to_json(const AuditReport& r) {
  json grid = json::array();
  for (const auto& d : r.grid) grid.push_back(to_json(d));
  json lambdas = json::array();
  for (const auto& s : r.lambdas) lambdas.push_back(to_json(s));
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));

  json witness = nullptr;
  if (const AuditRow* w = r.witness()) {
    witness = row_json(*w);
    witness["a"] = to_json(r.grid[w->a_index]);
    witness["b"] = to_json(r.grid[w->b_index]);
    witness["alt"] = w->alt_index ? to_json(r.grid[*w->alt_index]) : json(nullptr);
    witness["lambda_state"] =
        w->lambda_index >= 0 ? to_json(r.lambdas[static_cast<std::size_t>(w->lambda_index)])
                             : json(nullptr);
  }
  return {{"condition", r.condition},
          {"model", r.model},
          {"max_violation", r.max_violation},
          {"partial_max", r.partial_max},
          {"witness", witness},
          {"grid_descriptor", r.grid_descriptor},
          {"grid", grid},
          {"lambdas", lambdas},
          {"rows", rows},
          {"clamp_log", log_json(r.clamp_log)},
          {"skip_log", log_json(r.skip_log)}};
}

json to_json(const ChannelConfig& c) {
  return {{"version", c.version},   {"k", c.k},
          {"trials", c.trials},     {"prior_bit1", c.prior_bit1},
          {"seed", c.seed},         {"withhold_r", c.withhold_r},
          {"n", c.params.n},        {"theta", c.params.theta.to_string()}};
}

json to_json(const ChannelReport& r) {
  return {{"config", to_json(r.config)},
          {"empirical_error_rate", r.empirical_error_rate},
          {"analytic_error_rate", r.analytic_error_rate},
          {"standard_error", r.standard_error},
          {"z_score", r.z_score},
          {"errors", r.errors()},
          {"confusion", {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}}},
          {"bit0_outcomes", r.bit0_outcomes},
          {"bit0_plus_outcomes", r.bit0_plus_outcomes}};
}

namespace {

json valuations_json(const std::vector<PrimeValuation>& vals) {
  json out = json::array();
  for (const auto& v : vals) {
    out.push_back({{"p", v.p}, {"needed", v.needed}, {"available", v.available}});
  }
  return out;
}

}  // namespace

json to_json(const DivisibilityResult& r) {
  return {{"n", r.n},
          {"binom_divisible", r.binom_divisible},
          {"witness_prime", r.witness_prime ? json(*r.witness_prime) : json(nullptr)},
          {"valuations", valuations_json(r.valuations)}};
}

json to_json(const PermIntegrality& r) {
  return {{"n", r.n},
          {"div_by_9", r.div_by_9},
          {"div_by_9n2", r.div_by_9n2},
          {"valuations", valuations_json(r.valuations)}};
}

json to_json(const FamilyValidation& r) {
  json witness = nullptr;
  if (r.witness) {
    const auto& w = *r.witness;
    witness = {{"a", to_json(w.a)},
               {"b", to_json(w.b)},
               {"pairing_sum", w.pairing_sum},
               {"allowed_lo", w.allowed_lo},
               {"allowed_hi", w.allowed_hi},
               {"i", w.index_i ? json(*w.index_i) : json(nullptr)},
               {"t", w.index_t ? json(*w.index_t) : json(nullptr)},
               {"weight", w.weight}};
  }
  return {{"passed", r.passed},
          {"points_checked", r.points_checked},
          {"min_slack", r.min_slack},
          {"max_slack", r.max_slack},
          {"witness", witness},
          {"message", r.message}};
}

json to_json(const CensusReport& r) {
  return {{"n", r.n},
          {"family", r.family},
          {"a", to_json(r.a)},
          {"b", to_json(r.b)},
          {"census_E_A", r.census_E_A},
          {"formula_E_A", to_json(r.formula_E_A)},
          {"consistent", r.consistent},
          {"block_invariance_checked", r.block_invariance_checked},
          {"blocks_checked", r.blocks_checked},
          {"in_block", r.in_block},
          {"out_of_block", r.out_of_block}};
}

json to_json(const CoverageTable& t) {
  return {{"grid_side", t.grid_side},
          {"select", t.select},
          {"selections", t.selections},
          {"expected_per_slot", t.expected_per_slot},
          {"uniform", t.uniform},
          {"counts", t.counts},
          {"per_cell_total", t.per_cell_total},
          {"per_cell_class", t.per_cell_class}};
}

json to_json(const MomentEstimate& m) {
  return {{"a", to_json(m.a)},
          {"b", to_json(m.b)},
          {"trials", m.trials},
          {"empirical", {{"A", m.mean_a}, {"B", m.mean_b}, {"AB", m.mean_ab}}},
          {"exact",
           {{"A", m.exact_a}, {"A_interval", to_json(m.exact.alpha)}, {"B", m.exact.beta},
            {"AB", m.exact.gamma}}},
          {"standard_error", {{"A", m.se_a}, {"B", m.se_b}, {"AB", m.se_ab}}},
          {"z", {{"A", m.z_a}, {"B", m.z_b}, {"AB", m.z_ab}}}};
}

std::string moments_csv(const std::vector<MomentEstimate>& rows) {
  std::ostringstream out;
  out << "ax,ay,az,bx,by,bz,trials,emp_A,emp_B,emp_AB,exact_A,exact_B,exact_AB,z_A,z_B,z_AB\n";
  for (const auto& m : rows) {
    out << format_double(m.a.x()) << ',' << format_double(m.a.y()) << ','
        << format_double(m.a.z()) << ',' << format_double(m.b.x()) << ','
        << format_double(m.b.y()) << ',' << format_double(m.b.z()) << ',' << m.trials << ','
        << format_double(m.mean_a) << ',' << format_double(m.mean_b) << ','
        << format_double(m.mean_ab) << ',' << format_double(m.exact_a) << ','
        << format_double(m.exact.beta) << ',' << format_double(m.exact.gamma) << ','
        << format_double(m.z_a) << ',' << format_double(m.z_b) << ',' << format_double(m.z_ab)
        << '\n';
  }
  return out.str();
}

std::string audit_csv_header() {
  return "condition,model,station,lambda,a_index,b_index,alt_index,quantity,outcome,lhs,rhs,"
         "violation\n";
}

std::string audit_csv_rows(const AuditReport& r) {
  std::ostringstream out;
  for (const auto& row : r.rows) {
    out << r.condition << ',' << r.model << ',' << row.station << ',' << row.lambda_index << ','
        << row.a_index << ',' << row.b_index << ','
        << (row.alt_index ? std::to_string(*row.alt_index) : std::string()) << ','
        << row.quantity << ',' << row.outcome << ',' << format_double(row.lhs) << ','
        << format_double(row.rhs) << ',' << format_double(row.violation) << '\n';
  }
  return out.str();
}

std::string scan_csv(const std::vector<DivisibilityResult>& table) {
  std::ostringstream out;
  out << "n,divisible,worst_prime,needed,available\n";
  for (const auto& r : table) {
    // Worst prime: the witness when divisibility fails, otherwise the prime
    // with the smallest valuation margin.
    const PrimeValuation* worst = nullptr;
    for (const auto& v : r.valuations) {
      if (r.witness_prime) {
        if (v.p == *r.witness_prime) worst = &v;
        continue;
      }
      const auto margin = static_cast<long long>(v.available) - static_cast<long long>(v.needed);
      if (worst == nullptr ||
          margin < static_cast<long long>(worst->available) - static_cast<long long>(worst->needed)) {
        worst = &v;
      }
    }
    out << r.n << ',' << (r.binom_divisible ? "true" : "false") << ',';
    if (worst != nullptr) {
      out << worst->p << ',' << worst->needed << ',' << worst->available;
    } else {
      out << ",,";
    }
    out << '\n';
  }
  return out.str();
}

std::string census_csv(const std::vector<CensusReport>& reports) {
  std::ostringstream out;
  out << "family,n,ax,ay,az,bx,by,bz,census_E_A,formula_lo,formula_hi,consistent\n";
  for (const auto& r : reports) {
    out << r.family << ',' << r.n << ',' << format_double(r.a.x()) << ','
        << format_double(r.a.y()) << ',' << format_double(r.a.z()) << ','
        << format_double(r.b.x()) << ',' << format_double(r.b.y()) << ','
        << format_double(r.b.z()) << ',' << format_double(r.census_E_A) << ','
        << format_double(r.formula_E_A.lo) << ',' << format_double(r.formula_E_A.hi) << ','
        << (r.consistent ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string channel_table(const ChannelReport& r) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%4s %12s %14s %14s %10s\n", "k", "trials", "empirical",
                "analytic", "z-score");
  out += line;
  std::snprintf(line, sizeof line, "%4d %12llu %14.6e %14.6e %10.4f\n", r.config.k,
                static_cast<unsigned long long>(r.config.trials), r.empirical_error_rate,
                r.analytic_error_rate, r.z_score);
  out += line;
  return out;
}

}  // namespace hpaudit
