#include "hpaudit/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hpaudit/parallel.hpp"

namespace hpaudit {

namespace {

constexpr double kContractTol = 1e-12;
constexpr double kConsistencyTol = 1e-12;

void require_valid_n(long long n) {
  if (n < 2 || n % 2 != 0 || n > kMaxDivisibilityN) {
    throw Error(ErrorCode::InvalidN,
                "n must be even with 2 <= n <= 1000000, got " + std::to_string(n));
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::uint64_t> prime_factors(std::uint64_t m) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p == 0) {
      primes.push_back(p);
      while (m % p == 0) m /= p;
    }
  }
  if (m > 1) primes.push_back(m);
  return primes;
}

std::uint64_t valuation(std::uint64_t m, std::uint64_t p) {
  std::uint64_t v = 0;
  while (m != 0 && m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

std::uint64_t legendre_valuation(std::uint64_t m, std::uint64_t p) {
  std::uint64_t v = 0;
  while (m >= p) {
    m /= p;
    v += m;
  }
  return v;
}

std::uint64_t kummer_binomial_valuation(std::uint64_t top, std::uint64_t k, std::uint64_t p) {
  if (k > top) return 0;
  std::uint64_t x = k;
  std::uint64_t y = top - k;
  std::uint64_t carry = 0;
  std::uint64_t carries = 0;
  while (x != 0 || y != 0 || carry != 0) {
    const std::uint64_t digit_sum = x % p + y % p + carry;
    carry = digit_sum >= p ? 1 : 0;
    carries += carry;
    x /= p;
    y /= p;
  }
  return carries;
}

DivisibilityResult binom_divisibility(long long n) {
  require_valid_n(n);
  const auto nn = static_cast<std::uint64_t>(n);
  const std::uint64_t top = 9 * nn * nn;
  const std::uint64_t k = 3 * nn;

  DivisibilityResult r;
  r.n = n;
  r.binom_divisible = true;
  for (std::uint64_t p : prime_factors(top)) {
    const PrimeValuation pv{p, valuation(top, p), kummer_binomial_valuation(top, k, p)};
    if (pv.available < pv.needed && r.binom_divisible) {
      r.binom_divisible = false;
      r.witness_prime = p;
    }
    r.valuations.push_back(pv);
  }
  return r;
}

std::vector<DivisibilityResult> scan_table(long long limit, unsigned threads) {
  if (limit < 2) {
    throw Error(ErrorCode::InvalidArgument, "scan limit must be >= 2, got " + std::to_string(limit));
  }
  if (limit > kMaxDivisibilityN) {
    throw Error(ErrorCode::InvalidArgument, "scan limit must be <= 1000000");
  }
  const auto count = static_cast<std::size_t>(limit / 2);
  std::vector<DivisibilityResult> table(count);
  parallel_for(count, threads, [&](std::size_t i) {
    table[i] = binom_divisibility(2 * static_cast<long long>(i + 1));
  });
  return table;
}

std::vector<long long> scan_even_n(long long limit, unsigned threads) {
  std::vector<long long> out;
  for (const auto& r : scan_table(limit, threads)) {
    if (r.binom_divisible) out.push_back(r.n);
  }
  return out;
}

PermIntegrality perm_integrality(long long n) {
  require_valid_n(n);
  const auto nn = static_cast<std::uint64_t>(n);
  const std::uint64_t top = 9 * nn * nn;
  const std::uint64_t rest = top - 3 * nn;

  PermIntegrality r;
  r.n = n;
  r.div_by_9 = true;
  r.div_by_9n2 = true;
  for (std::uint64_t p : prime_factors(top)) {
    const std::uint64_t available = legendre_valuation(top, p) - legendre_valuation(rest, p);
    const PrimeValuation pv{p, valuation(top, p), available};
    if (available < pv.needed) r.div_by_9n2 = false;
    if (p == 3 && available < 2) r.div_by_9 = false;
    r.valuations.push_back(pv);
  }
  return r;
}

// --- partition families ---

PartitionFamily::PartitionFamily(int n, WeightFn weight, std::string provenance)
    : n_(n), weight_(std::move(weight)), provenance_(std::move(provenance)) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::InvalidN, "partition family needs even n >= 2, got " + std::to_string(n));
  }
  if (!weight_) throw Error(ErrorCode::InvalidArgument, "partition family needs a weight function");
}

double PartitionFamily::weight_sum(const Direction& a, const Direction& b) const {
  double total = 0.0;
  for (int t = 1; t <= 3; ++t) {
    const double x = std::fabs(a[t - 1]);
    const double y = std::fabs(b[t - 1]);
    for (int i = 1; i <= n_; ++i) total += weight_(i, t, x, y);
  }
  return total;
}

double PartitionFamily::pairing_sum(const Direction& a, const Direction& b) const {
  return 2.0 * weight_sum(a, b);
}

std::vector<std::string> fixture_family_names() {
  return {"fixture-0", "fixture-half", "fixture-1"};
}

PartitionFamily fixture_family(std::string_view name, int n) {
  // Using sum_t |a_t|^2 = sum_t |b_t|^2 = 1 for unit vectors,
  //   2 (1 - |a|.|b|) = sum_t (|a_t| - |b_t|)^2,
  // which is split across i by shares summing to one. theta/(4n^2) is
  // spread evenly over t and by the same shares over i.
  double theta = 0.0;
  bool uneven = false;
  bool reversed = false;
  if (name == "fixture-0") {
  } else if (name == "fixture-half") {
    theta = 0.5;
    uneven = true;
  } else if (name == "fixture-1") {
    theta = 1.0;
    uneven = true;
    reversed = true;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown partition family '" + std::string(name) + "'");
  }
  const double nn = static_cast<double>(n);
  auto share = [=](int i) {
    if (!uneven) return 1.0 / nn;
    const double rank = reversed ? nn + 1.0 - i : double(i);
    return 2.0 * rank / (nn * (nn + 1.0));
  };
  const double slack = theta / (4.0 * nn * nn);
  auto weight = [=](int i, int, double a_abs, double b_abs) {
    const double d = a_abs - b_abs;
    return 0.5 * share(i) * (d * d + slack / 3.0);
  };
  return PartitionFamily(n, weight, std::string(name));
}

namespace {

// Returns a failure description for one (a, b), or nothing when the contract holds.
std::optional<std::pair<FamilyWitness, double>> check_point(const PartitionFamily& fam,
                                                            const Direction& a,
                                                            const Direction& b, double& slack) {
  const double nn = static_cast<double>(fam.n());
  const double base = 2.0 * (1.0 - dot(abs(a), abs(b)));
  const double allowed = 1.0 / (4.0 * nn * nn);
  FamilyWitness w{a, b, 0.0, base, base + allowed, std::nullopt, std::nullopt, 0.0};

  for (int t = 1; t <= 3; ++t) {
    for (int i = 1; i <= fam.n(); ++i) {
      const double v = fam.weight(i, t, std::fabs(a[t - 1]), std::fabs(b[t - 1]));
      if (!(v >= 0.0)) {
        w.index_i = i;
        w.index_t = t;
        w.weight = v;
        w.pairing_sum = fam.pairing_sum(a, b);
        return std::make_pair(w, std::isnan(v) ? INFINITY : -v);
      }
    }
  }
  w.pairing_sum = fam.pairing_sum(a, b);
  slack = w.pairing_sum - base;
  if (slack < -kContractTol) return std::make_pair(w, -slack);
  if (slack > allowed + kContractTol) return std::make_pair(w, slack - allowed);
  if (!std::isfinite(slack)) return std::make_pair(w, INFINITY);
  return std::nullopt;
}

std::string describe_failure(const FamilyWitness& w) {
  auto dir = [](const Direction& d) {
    return "(" + fmt(d.x()) + "," + fmt(d.y()) + "," + fmt(d.z()) + ")";
  };
  std::string where = " at a=" + dir(w.a) + " b=" + dir(w.b);
  if (w.index_i) {
    return "negative weight " + fmt(w.weight) + " for i=" + std::to_string(*w.index_i) +
           " t=" + std::to_string(*w.index_t) + where;
  }
  return "pairing sum " + fmt(w.pairing_sum) + " outside [" + fmt(w.allowed_lo) + ", " +
         fmt(w.allowed_hi) + "]" + where;
}

}  // namespace

FamilyValidation validate_family(const PartitionFamily& fam, const SettingGrid& grid) {
  if (grid.directions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "validation grid is empty");
  }
  FamilyValidation report;
  double worst = -1.0;
  bool first_slack = true;
  for (const auto& a : grid.directions) {
    for (const auto& b : grid.directions) {
      ++report.points_checked;
      double slack = 0.0;
      if (auto failure = check_point(fam, a, b, slack)) {
        if (failure->second > worst) {
          worst = failure->second;
          report.witness = failure->first;
        }
        continue;
      }
      if (first_slack) {
        report.min_slack = report.max_slack = slack;
        first_slack = false;
      }
      report.min_slack = std::min(report.min_slack, slack);
      report.max_slack = std::max(report.max_slack, slack);
    }
  }
  if (report.witness) {
    report.passed = false;
    report.message = "family '" + fam.provenance() + "' violates the summation contract: " +
                     describe_failure(*report.witness);
    throw FamilyContractError(report);
  }
  report.message = "ok";
  return report;
}

CensusReport census_E_A(const PartitionFamily& fam, const Direction& a, const Direction& b) {
  double slack = 0.0;
  if (auto failure = check_point(fam, a, b, slack)) {
    FamilyValidation report;
    report.passed = false;
    report.points_checked = 1;
    report.witness = failure->first;
    report.message = "family '" + fam.provenance() + "' violates the summation contract: " +
                     describe_failure(failure->first);
    throw FamilyContractError(report);
  }

  const int n = fam.n();
  const int side = 3 * (n + 1);
  const int blocks_per_side = n + 1;
  const double out_multiplicity = 1.0 / (9.0 * n * n);
  const double weights = fam.weight_sum(a, b);
  const AbsVector abs_b = abs(b);

  // Every measure of Q_jk puts |a_t b_t| on one of its squares with A = sign(a_t);
  // each square receives each t from L/9 of the measures.
  double in_block = 0.0;
  for (int square = 0; square < 9; ++square) {
    for (int t = 0; t < 3; ++t) in_block += (a[t] * abs_b[t]) / 9.0;
  }

  auto block_value = [&](int j, int k) {
    // A = 1 on the squares of S_jk whose row and column ranks have even sum.
    std::int64_t a_one = 0;
    int row_rank = 0;
    for (int row = 0; row < side; ++row) {
      if (row / 3 == j) continue;
      int col_rank = 0;
      for (int col = 0; col < side; ++col) {
        if (col / 3 == k) continue;
        if ((row_rank + col_rank) % 2 == 0) ++a_one;
        ++col_rank;
      }
      ++row_rank;
    }
    return std::make_pair(in_block, static_cast<double>(a_one) * out_multiplicity * weights);
  };

  std::vector<std::pair<int, int>> blocks;
  const double enumeration_cost =
      double(blocks_per_side) * blocks_per_side * (9.0 * n * n);
  if (enumeration_cost <= 2e7) {
    for (int j = 0; j < blocks_per_side; ++j) {
      for (int k = 0; k < blocks_per_side; ++k) blocks.emplace_back(j, k);
    }
  } else {
    const int last = blocks_per_side - 1;
    blocks = {{0, 0}, {0, last}, {last, 0}, {last, last}, {last / 2, last / 2}};
  }

  CensusReport r;
  r.n = n;
  r.a = a;
  r.b = b;
  r.family = fam.provenance();
  const auto [in0, out0] = block_value(blocks.front().first, blocks.front().second);
  r.in_block = in0;
  r.out_of_block = out0;
  bool invariant = true;
  double total = 0.0;
  for (const auto& [j, k] : blocks) {
    const auto [in, out] = block_value(j, k);
    invariant = invariant && std::fabs((in + out) - (in0 + out0)) <= kConsistencyTol;
    total += in + out;
  }
  r.blocks_checked = blocks.size();
  r.block_invariance_checked = invariant;
  // Blocks are identical, so averaging over the checked ones equals the full
  // (n+1)^2 sum divided by (n+1)^2 L.
  r.census_E_A = total / static_cast<double>(blocks.size());

  const double lo = dot(a, abs_b) + 0.5 * (1.0 - dot(abs(a), abs_b));
  r.formula_E_A = {lo, lo + 1.0 / (16.0 * n * n)};
  r.consistent = r.formula_E_A.contains(r.census_E_A, kConsistencyTol);
  return r;
}

CoverageTable toy_census_enumeration(int grid_side, int select) {
  if (grid_side < 1 || select < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid_side and select must be positive");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(grid_side) * grid_side;
  if (static_cast<std::uint64_t>(select) > cells) {
    throw Error(ErrorCode::InvalidArgument, "cannot select more cells than the grid holds");
  }
  std::uint64_t selections = 1;
  for (int s = 0; s < select; ++s) {
    selections *= cells - s;
    if (selections > kMaxToySelections) {
      throw Error(ErrorCode::TooLarge, "enumeration exceeds 10^7 ordered selections");
    }
  }

  CoverageTable table;
  table.grid_side = grid_side;
  table.select = select;
  table.counts.assign(cells, std::vector<std::uint64_t>(select, 0));
  table.per_cell_total.assign(cells, 0);
  table.per_cell_class.assign(cells, {0, 0, 0});

  std::vector<std::uint64_t> chosen(select);
  std::vector<bool> used(cells, false);
  // Depth-first enumeration of ordered selections without repetition.
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == select) {
      ++table.selections;
      for (int s = 0; s < select; ++s) {
        ++table.counts[chosen[s]][s];
        ++table.per_cell_total[chosen[s]];
        ++table.per_cell_class[chosen[s]][s % 3];
      }
      return;
    }
    for (std::uint64_t c = 0; c < cells; ++c) {
      if (used[c]) continue;
      used[c] = true;
      chosen[depth] = c;
      self(self, depth + 1);
      used[c] = false;
    }
  };
  recurse(recurse, 0);

  table.expected_per_slot = table.selections / cells;
  table.uniform = table.selections % cells == 0;
  for (std::uint64_t c = 0; c < cells && table.uniform; ++c) {
    for (int s = 0; s < select; ++s) {
      table.uniform = table.uniform && table.counts[c][s] == table.expected_per_slot;
    }
    table.uniform = table.uniform &&
                    table.per_cell_total[c] == table.expected_per_slot * select;
  }
  return table;
}

}  // namespace hpaudit
