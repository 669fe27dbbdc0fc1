#pragma once

// Locality auditors over any HiddenVariableModel.
//
// Every audit evaluates a finite grid of settings and reports the largest
// violation found together with the grid point that attains it. Rows are
// produced in a fixed order and the maximum keeps the first row on ties, so
// results do not depend on the number of worker threads.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpaudit/core_model.hpp"
#include "hpaudit/models.hpp"
#include "hpaudit/parallel.hpp"
#include "hpaudit/setting_grid.hpp"

namespace hpaudit {

inline constexpr double kConditioningThreshold = 1e-9;

/// One evaluated grid point.
///
/// Parameter independence / signal locality: `a_index`/`b_index` are the
/// settings of the first comparison and `alt_index` is the distant setting
/// swapped in (b' for station 1, a' for station 2); lhs and rhs are the two
/// probabilities of `outcome`.
/// Outcome independence: lhs/rhs are p(outcome | distant = +1) and
/// p(outcome | distant = -1).
/// QM comparison: lhs is the model value, rhs the singlet value.
struct AuditRow {
  int station = 0;
  int lambda_index = -1;
  std::size_t a_index = 0;
  std::size_t b_index = 0;
  std::optional<std::size_t> alt_index;
  std::string quantity;
  int outcome = 1;
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;
};

struct LogEntry {
  std::string context;
  double value = 0.0;
};

struct AuditReport {
  std::string condition;
  std::string model;
  double max_violation = 0.0;
  /// Partial maxima: "station1"/"station2", or "E(A)"/"E(B)"/"E(AB)".
  std::map<std::string, double> partial_max;
  std::optional<std::size_t> witness_row;
  std::vector<AuditRow> rows;
  std::vector<Direction> grid;
  std::string grid_descriptor;
  std::vector<HiddenSource> lambdas;
  std::vector<LogEntry> clamp_log;
  std::vector<LogEntry> skip_log;

  double partial(const std::string& key) const;
  const AuditRow* witness() const;
};

AuditReport audit_parameter_independence(const HiddenVariableModel& model,
                                         const SettingGrid& grid,
                                         std::span<const HiddenSource> lambdas,
                                         unsigned threads = 1);

AuditReport audit_signal_locality(const HiddenVariableModel& model, const SettingGrid& grid,
                                  unsigned threads = 1);

AuditReport audit_outcome_independence(const HiddenVariableModel& model,
                                       const SettingGrid& grid,
                                       std::span<const HiddenSource> lambdas,
                                       unsigned threads = 1);

AuditReport compare_to_qm(const HiddenVariableModel& model, const SettingGrid& grid,
                          unsigned threads = 1);

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') from unconditioned correlations.
double chsh(const HiddenVariableModel& model, const Direction& a, const Direction& a_alt,
            const Direction& b, const Direction& b_alt);

}  // namespace hpaudit
