#pragma once

// Counting arguments behind the measure-family construction: divisibility
// of C(9n^2, 3n) by 9n^2, integrality of the permutation count
// P(9n^2, 3n), and a counting-level census of E_lambda(A).
//
// Divisibility is decided from prime valuations; no binomial coefficient is
// ever materialized.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpaudit/core_model.hpp"
#include "hpaudit/error.hpp"
#include "hpaudit/setting_grid.hpp"

namespace hpaudit {

inline constexpr long long kMaxDivisibilityN = 1'000'000;

/// Distinct prime factors of m in ascending order (m >= 1).
std::vector<std::uint64_t> prime_factors(std::uint64_t m);

/// v_p(m) for m >= 1.
std::uint64_t valuation(std::uint64_t m, std::uint64_t p);

/// v_p(m!) by Legendre's formula.
std::uint64_t legendre_valuation(std::uint64_t m, std::uint64_t p);

/// v_p(C(top, k)) as the number of carries when adding k and top - k in base p.
std::uint64_t kummer_binomial_valuation(std::uint64_t top, std::uint64_t k, std::uint64_t p);

struct PrimeValuation {
  std::uint64_t p = 0;
  std::uint64_t needed = 0;
  std::uint64_t available = 0;
};

struct DivisibilityResult {
  long long n = 0;
  bool binom_divisible = false;
  /// Smallest prime whose valuation falls short.
  std::optional<std::uint64_t> witness_prime;
  std::vector<PrimeValuation> valuations;
};

/// Throws Error(InvalidN) unless n is even and 2 <= n <= 10^6.
DivisibilityResult binom_divisibility(long long n);

/// Full per-n table for even n in [2, limit]. Throws Error(InvalidArgument) for limit < 2.
std::vector<DivisibilityResult> scan_table(long long limit, unsigned threads = 1);

/// Even n <= limit for which C(9n^2, 3n) is divisible by 9n^2, ascending.
std::vector<long long> scan_even_n(long long limit, unsigned threads = 1);

struct PermIntegrality {
  long long n = 0;
  bool div_by_9 = false;
  bool div_by_9n2 = false;
  std::vector<PrimeValuation> valuations;
};

/// Checks that L = P(9n^2, 3n) = (9n^2)! / (9n^2 - 3n)! is divisible by 9 and by 9n^2.
PermIntegrality perm_integrality(long long n);

/// Stand-in for the functions N_i, psi_i that build the measure family.
///
/// weight(i, t, |a_t|, |b_t|) is the measure weight (1/2) N_i(|a_t|) psi_i(|b_t|)
/// for i = 1..n and t = 1..3. The pairing sum is
///   S(a, b) = sum_t sum_i N_i(|a_t|) psi_i(|b_t|) = 2 * sum_t sum_i weight
/// and the contract requires S = 2 (1 - |a|.|b|) + theta / (4 n^2), 0 <= theta <= 1.
class PartitionFamily {
 public:
  using WeightFn = std::function<double(int i, int t, double a_abs, double b_abs)>;

  PartitionFamily(int n, WeightFn weight, std::string provenance);

  int n() const noexcept { return n_; }
  const std::string& provenance() const noexcept { return provenance_; }
  double weight(int i, int t, double a_abs, double b_abs) const { return weight_(i, t, a_abs, b_abs); }

  /// Sum of all 3n square weights for settings (a, b).
  double weight_sum(const Direction& a, const Direction& b) const;
  /// S(a, b) = 2 * weight_sum(a, b).
  double pairing_sum(const Direction& a, const Direction& b) const;

 private:
  int n_;
  WeightFn weight_;
  std::string provenance_;
};

/// Synthetic families meeting the contract with theta = 0, 1/2 and 1.
/// Names: "fixture-0", "fixture-half", "fixture-1".
PartitionFamily fixture_family(std::string_view name, int n);
std::vector<std::string> fixture_family_names();

struct FamilyWitness {
  Direction a = make_direction({1.0, 0.0, 0.0});
  Direction b = make_direction({1.0, 0.0, 0.0});
  double pairing_sum = 0.0;
  double allowed_lo = 0.0;
  double allowed_hi = 0.0;
  /// Set when the failure is a negative weight.
  std::optional<int> index_i;
  std::optional<int> index_t;
  double weight = 0.0;
};

struct FamilyValidation {
  bool passed = true;
  std::size_t points_checked = 0;
  /// Extremes of S - 2 (1 - |a|.|b|) over the grid.
  double min_slack = 0.0;
  double max_slack = 0.0;
  std::optional<FamilyWitness> witness;
  std::string message;
};

class FamilyContractError : public Error {
 public:
  explicit FamilyContractError(FamilyValidation report)
      : Error(ErrorCode::FamilyContractViolated, report.message), report_(std::move(report)) {}
  const FamilyValidation& report() const noexcept { return report_; }

 private:
  FamilyValidation report_;
};

/// Checks nonnegativity and 0 <= S - 2(1 - |a|.|b|) <= 1/(4n^2) on grid x grid.
/// Returns the report on success; throws FamilyContractError carrying the
/// worst offender otherwise.
FamilyValidation validate_family(const PartitionFamily& fam, const SettingGrid& grid);

struct CensusReport {
  int n = 0;
  Direction a = make_direction({1.0, 0.0, 0.0});
  Direction b = make_direction({1.0, 0.0, 0.0});
  std::string family;
  double census_E_A = 0.0;
  BoundedValue formula_E_A;
  bool consistent = false;
  bool block_invariance_checked = false;
  std::size_t blocks_checked = 0;
  /// Per-block contributions normalized by L.
  double in_block = 0.0;
  double out_of_block = 0.0;
};

/// Counting-level evaluation of E_lambda(A): every 3x3 block Q_jk of the
/// (3n+3)^2 unit-square grid contributes a.|b| from its own squares and
/// (1/2)(sum of weights) from the half of the remaining 9n^2 squares where
/// A = 1, each weight counted with multiplicity 1/(9n^2) of L. Summing
/// over the (n+1)^2 blocks and dividing by (n+1)^2 L gives the estimate.
/// Throws FamilyContractError if the family breaks the contract at (a, b).
CensusReport census_E_A(const PartitionFamily& fam, const Direction& a, const Direction& b);

struct CoverageTable {
  int grid_side = 0;
  int select = 0;
  std::uint64_t selections = 0;
  /// counts[cell][slot]: how often `cell` occupies position `slot`.
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::uint64_t> per_cell_total;
  /// counts per cell and round-robin weight class (slot mod 3).
  std::vector<std::array<std::uint64_t, 3>> per_cell_class;
  std::uint64_t expected_per_slot = 0;
  bool uniform = false;
};

inline constexpr std::uint64_t kMaxToySelections = 10'000'000;

/// Enumerates all ordered selections of `select` distinct cells of a
/// grid_side x grid_side grid; slot s carries weight class s mod 3.
/// Throws Error(TooLarge) above 10^7 selections, Error(InvalidArgument) on
/// nonpositive sizes or select > grid_side^2.
CoverageTable toy_census_enumeration(int grid_side, int select);

}  // namespace hpaudit
