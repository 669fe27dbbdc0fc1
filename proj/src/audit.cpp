#include "hpaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hpaudit/error.hpp"

namespace hpaudit {

namespace {

std::string describe(const Direction& d) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g,%.6g,%.6g)", d.x(), d.y(), d.z());
  return buf;
}

// Re-raises a model error with the settings that triggered it.
template <typename Fn>
auto with_context(const Direction& a, const Direction& b, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), e.detail() + " at a=" + describe(a) + " b=" + describe(b));
  }
}

AuditReport make_report(std::string condition, const HiddenVariableModel& model,
                        const SettingGrid& grid, std::span<const HiddenSource> lambdas) {
  grid.validate();
  AuditReport r;
  r.condition = std::move(condition);
  r.model = model.name();
  r.grid = grid.directions;
  r.grid_descriptor = grid.descriptor;
  r.lambdas.assign(lambdas.begin(), lambdas.end());
  return r;
}

// Max with first-row tie breaking.
void finalize(AuditReport& r) {
  r.max_violation = 0.0;
  r.witness_row.reset();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const AuditRow& row = r.rows[i];
    if (!r.witness_row || row.violation > r.max_violation) {
      r.max_violation = row.violation;
      r.witness_row = i;
    }
  }
}

void finalize_by_station(AuditReport& r) {
  r.partial_max["station1"] = 0.0;
  r.partial_max["station2"] = 0.0;
  for (const auto& row : r.rows) {
    auto& slot = r.partial_max[row.station == 1 ? "station1" : "station2"];
    slot = std::max(slot, row.violation);
  }
  finalize(r);
}

// values[v] are the marginals at one station with the local setting and the
// source state held fixed while the distant setting runs over the grid.
AuditRow best_pair(std::span<const MarginalResult> values) {
  AuditRow best;
  bool first = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      for (int outcome : {1, -1}) {
        const double lhs = values[i].p.at(outcome);
        const double rhs = values[j].p.at(outcome);
        const double v = std::fabs(lhs - rhs);
        if (first || v > best.violation) {
          first = false;
          best.a_index = i;
          best.alt_index = j;
          best.outcome = outcome;
          best.lhs = lhs;
          best.rhs = rhs;
          best.violation = v;
        }
      }
    }
  }
  return best;
}

// Builds station rows from marginal tables indexed [lambda][a][b].
void difference_rows(AuditReport& r, const std::vector<MarginalResult>& station1,
                     const std::vector<MarginalResult>& station2, std::size_t lambda_count,
                     std::size_t g, bool conditional) {
  auto at = [g](std::size_t l, std::size_t a, std::size_t b) { return (l * g + a) * g + b; };
  std::vector<MarginalResult> scratch(g);

  for (std::size_t l = 0; l < lambda_count; ++l) {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = 0; b < g; ++b) scratch[b] = station1[at(l, a, b)];
      AuditRow row = best_pair(scratch);
      // best_pair indexes the varied setting; for station 1 that is b.
      row.b_index = row.a_index;
      row.a_index = a;
      row.station = 1;
      row.lambda_index = conditional ? static_cast<int>(l) : -1;
      row.quantity = "p1";
      r.rows.push_back(row);
    }
  }
  for (std::size_t l = 0; l < lambda_count; ++l) {
    for (std::size_t b = 0; b < g; ++b) {
      for (std::size_t a = 0; a < g; ++a) scratch[a] = station2[at(l, a, b)];
      AuditRow row = best_pair(scratch);
      row.b_index = b;
      row.station = 2;
      row.lambda_index = conditional ? static_cast<int>(l) : -1;
      row.quantity = "p2";
      r.rows.push_back(row);
    }
  }

  for (std::size_t l = 0; l < lambda_count; ++l) {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = 0; b < g; ++b) {
        for (int s = 1; s <= 2; ++s) {
          const auto& m = (s == 1 ? station1 : station2)[at(l, a, b)];
          if (m.clamped > 0.0) {
            r.clamp_log.push_back({"station" + std::to_string(s) + " lambda=" +
                                       (conditional ? std::to_string(l) : std::string("-")) +
                                       " a=" + std::to_string(a) + " b=" + std::to_string(b),
                                   m.clamped});
          }
        }
      }
    }
  }
}

}  // namespace

double AuditReport::partial(const std::string& key) const {
  const auto it = partial_max.find(key);
  return it == partial_max.end() ? 0.0 : it->second;
}

const AuditRow* AuditReport::witness() const {
  return witness_row ? &rows[*witness_row] : nullptr;
}

AuditReport audit_parameter_independence(const HiddenVariableModel& model,
                                         const SettingGrid& grid,
                                         std::span<const HiddenSource> lambdas,
                                         unsigned threads) {
  AuditReport r = make_report("parameter_independence", model, grid, lambdas);
  const std::size_t g = grid.size();
  const std::size_t cells = lambdas.size() * g * g;
  std::vector<MarginalResult> p1(cells), p2(cells);
  parallel_for(cells, threads, [&](std::size_t idx) {
    const std::size_t l = idx / (g * g);
    const Direction& a = grid.directions[(idx / g) % g];
    const Direction& b = grid.directions[idx % g];
    with_context(a, b, [&] {
      p1[idx] = model.cond_marginal_1(a, b, lambdas[l]);
      p2[idx] = model.cond_marginal_2(a, b, lambdas[l]);
      return 0;
    });
  });
  difference_rows(r, p1, p2, lambdas.size(), g, true);
  finalize_by_station(r);
  return r;
}

AuditReport audit_signal_locality(const HiddenVariableModel& model, const SettingGrid& grid,
                                  unsigned threads) {
  AuditReport r = make_report("signal_locality", model, grid, {});
  const std::size_t g = grid.size();
  const std::size_t cells = g * g;
  std::vector<MarginalResult> p1(cells), p2(cells);
  parallel_for(cells, threads, [&](std::size_t idx) {
    const Direction& a = grid.directions[idx / g];
    const Direction& b = grid.directions[idx % g];
    with_context(a, b, [&] {
      p1[idx] = model.uncond_marginal_1(a, b);
      p2[idx] = model.uncond_marginal_2(a, b);
      return 0;
    });
  });
  difference_rows(r, p1, p2, 1, g, false);
  finalize_by_station(r);
  return r;
}

AuditReport audit_outcome_independence(const HiddenVariableModel& model,
                                       const SettingGrid& grid,
                                       std::span<const HiddenSource> lambdas,
                                       unsigned threads) {
  AuditReport r = make_report("outcome_independence", model, grid, lambdas);
  const std::size_t g = grid.size();
  const std::size_t cells = lambdas.size() * g * g;
  std::vector<JointResult> joints(cells);
  parallel_for(cells, threads, [&](std::size_t idx) {
    const std::size_t l = idx / (g * g);
    const Direction& a = grid.directions[(idx / g) % g];
    const Direction& b = grid.directions[idx % g];
    joints[idx] = with_context(a, b, [&] { return model.cond_joint(a, b, lambdas[l]); });
  });

  for (std::size_t idx = 0; idx < cells; ++idx) {
    const std::size_t l = idx / (g * g);
    const std::size_t ai = (idx / g) % g;
    const std::size_t bi = idx % g;
    const Joint4& j = joints[idx].p;
    const std::string where =
        "lambda=" + std::to_string(l) + " a=" + std::to_string(ai) + " b=" + std::to_string(bi);
    if (joints[idx].clamped > 0.0) r.clamp_log.push_back({"joint " + where, joints[idx].clamped});

    for (int station = 1; station <= 2; ++station) {
      // Station 1 conditions A on B; station 2 conditions B on A.
      const ProbPair distant = station == 1 ? j.marginal_b() : j.marginal_a();
      const double cond_plus = distant.p_plus;
      const double cond_minus = distant.p_minus;
      if (cond_plus < kConditioningThreshold || cond_minus < kConditioningThreshold) {
        r.skip_log.push_back({"station" + std::to_string(station) + " " + where + " distant=" +
                                  (cond_plus < kConditioningThreshold ? "+1" : "-1"),
                              std::min(cond_plus, cond_minus)});
        continue;
      }
      AuditRow row;
      row.station = station;
      row.lambda_index = static_cast<int>(l);
      row.a_index = ai;
      row.b_index = bi;
      row.quantity = station == 1 ? "p(A|B)" : "p(B|A)";
      bool first = true;
      for (int outcome : {1, -1}) {
        const double lhs = station == 1 ? j.at(outcome, 1) / cond_plus : j.at(1, outcome) / cond_plus;
        const double rhs =
            station == 1 ? j.at(outcome, -1) / cond_minus : j.at(-1, outcome) / cond_minus;
        const double v = std::fabs(lhs - rhs);
        if (first || v > row.violation) {
          first = false;
          row.outcome = outcome;
          row.lhs = lhs;
          row.rhs = rhs;
          row.violation = v;
        }
      }
      r.rows.push_back(row);
    }
  }
  finalize_by_station(r);
  return r;
}

AuditReport compare_to_qm(const HiddenVariableModel& model, const SettingGrid& grid,
                          unsigned threads) {
  AuditReport r = make_report("compare_to_qm", model, grid, {});
  const std::size_t g = grid.size();
  std::vector<CondExpectations> moments(g * g);
  parallel_for(g * g, threads, [&](std::size_t idx) {
    const Direction& a = grid.directions[idx / g];
    const Direction& b = grid.directions[idx % g];
    moments[idx] = with_context(a, b, [&] { return model.uncond_moments(a, b); });
  });

  r.partial_max = {{"E(A)", 0.0}, {"E(B)", 0.0}, {"E(AB)", 0.0}};
  for (std::size_t idx = 0; idx < g * g; ++idx) {
    const std::size_t ai = idx / g;
    const std::size_t bi = idx % g;
    const auto& m = moments[idx];
    const double qm_gamma = qm_reference(grid.directions[ai], grid.directions[bi]).gamma;

    AuditRow row;
    row.a_index = ai;
    row.b_index = bi;

    // E(A) deviation uses the interval endpoint farthest from zero.
    row.station = 1;
    row.quantity = "E(A)";
    row.lhs = std::fabs(m.alpha.hi) >= std::fabs(m.alpha.lo) ? m.alpha.hi : m.alpha.lo;
    row.rhs = 0.0;
    row.violation = std::fabs(row.lhs);
    r.rows.push_back(row);

    row.station = 2;
    row.quantity = "E(B)";
    row.lhs = m.beta;
    row.violation = std::fabs(m.beta);
    r.rows.push_back(row);

    row.station = 0;
    row.quantity = "E(AB)";
    row.lhs = m.gamma;
    row.rhs = qm_gamma;
    row.violation = std::fabs(m.gamma - qm_gamma);
    r.rows.push_back(row);
  }
  for (const auto& row : r.rows) {
    auto& slot = r.partial_max[row.quantity];
    slot = std::max(slot, row.violation);
  }
  finalize(r);
  return r;
}

double chsh(const HiddenVariableModel& model, const Direction& a, const Direction& a_alt,
            const Direction& b, const Direction& b_alt) {
  const auto e = [&](const Direction& x, const Direction& y) {
    return model.uncond_moments(x, y).gamma;
  };
  return e(a, b) - e(a, b_alt) + e(a_alt, b) + e(a_alt, b_alt);
}

}  // namespace hpaudit
