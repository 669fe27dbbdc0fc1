#include <cmath>

#include <gmp.h>
#include <gtest/gtest.h>

#include "hpaudit/combinatorics.hpp"
#include "hpaudit/random_stream.hpp"
#include "test_util.hpp"

namespace hpaudit {
namespace {

class Mpz {
 public:
  Mpz() { mpz_init(v_); }
  ~Mpz() { mpz_clear(v_); }
  Mpz(const Mpz&) = delete;
  Mpz& operator=(const Mpz&) = delete;
  mpz_ptr get() { return v_; }

 private:
  mpz_t v_;
};

bool gmp_binom_divisible(unsigned long n, unsigned long* residue = nullptr) {
  Mpz c, m;
  mpz_bin_uiui(c.get(), 9 * n * n, 3 * n);
  mpz_set_ui(m.get(), 9 * n * n);
  if (residue) *residue = mpz_fdiv_ui(c.get(), 9 * n * n);
  return mpz_divisible_p(c.get(), m.get()) != 0;
}

bool gmp_perm_divisible(unsigned long n, unsigned long by) {
  Mpz top, low, perm;
  mpz_fac_ui(top.get(), 9 * n * n);
  mpz_fac_ui(low.get(), 9 * n * n - 3 * n);
  mpz_divexact(perm.get(), top.get(), low.get());
  return mpz_divisible_ui_p(perm.get(), by) != 0;
}

TEST(Valuations, KummerMatchesLegendre) {
  RandomStream rng(31);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t top = 1 + rng.next_u64() % 5'000'000;
    const std::uint64_t k = rng.next_u64() % (top + 1);
    for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 101u}) {
      const auto expect =
          legendre_valuation(top, p) - legendre_valuation(k, p) - legendre_valuation(top - k, p);
      ASSERT_EQ(kummer_binomial_valuation(top, k, p), expect) << top << " " << k << " " << p;
    }
  }
}

TEST(Valuations, Basics) {
  EXPECT_EQ(prime_factors(324), (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(prime_factors(1), std::vector<std::uint64_t>{});
  EXPECT_EQ(valuation(324, 3), 4u);
  EXPECT_EQ(legendre_valuation(10, 2), 8u);
}

TEST(BinomDivisibility, SmallestCase) {
  unsigned long residue = 0;
  EXPECT_FALSE(gmp_binom_divisible(2, &residue));
  EXPECT_EQ(residue, 12u);

  const auto r = binom_divisibility(2);
  EXPECT_FALSE(r.binom_divisible);
  ASSERT_TRUE(r.witness_prime.has_value());
  EXPECT_EQ(*r.witness_prime, 3u);
}

TEST(BinomDivisibility, AgreesWithBigIntegersUpTo40) {
  for (unsigned long n = 2; n <= 40; n += 2) {
    EXPECT_EQ(binom_divisibility(static_cast<long long>(n)).binom_divisible,
              gmp_binom_divisible(n))
        << "n=" << n;
  }
}

TEST(BinomDivisibility, ValuationsAreMeaningful) {
  const auto r = binom_divisibility(10);
  EXPECT_TRUE(r.binom_divisible);
  EXPECT_FALSE(r.witness_prime.has_value());
  for (const auto& v : r.valuations) {
    EXPECT_GE(v.available, v.needed);
    EXPECT_EQ(v.needed, valuation(900, v.p));
  }
}

TEST(BinomDivisibility, InvalidN) {
  for (long long n : {0LL, 1LL, 3LL, -4LL, 1'000'002LL}) {
    EXPECT_EQ(test::error_code([n] { binom_divisibility(n); }), ErrorCode::InvalidN) << n;
  }
}

TEST(ScanEvenN, Examples) {
  EXPECT_EQ(scan_even_n(100), (std::vector<long long>{10, 40, 44, 84}));
  EXPECT_EQ(scan_even_n(9), std::vector<long long>{});
  EXPECT_EQ(scan_even_n(10), std::vector<long long>{10});
  EXPECT_EQ(test::error_code([] { scan_even_n(1); }), ErrorCode::InvalidArgument);
}

TEST(ScanEvenN, ThreadIndependentAndMonotone) {
  const auto one = scan_even_n(2000, 1);
  EXPECT_EQ(one, scan_even_n(2000, 4));
  EXPECT_TRUE(std::is_sorted(one.begin(), one.end()));
  const auto small = scan_even_n(1000);
  EXPECT_TRUE(std::equal(small.begin(), small.end(), one.begin()));
}

TEST(PermIntegrality, AlwaysDivisible) {
  for (long long n = 2; n <= 200; n += 2) {
    const auto r = perm_integrality(n);
    EXPECT_TRUE(r.div_by_9) << n;
    EXPECT_TRUE(r.div_by_9n2) << n;
  }
  for (unsigned long n : {2ul, 4ul, 6ul}) {
    EXPECT_TRUE(gmp_perm_divisible(n, 9));
    EXPECT_TRUE(gmp_perm_divisible(n, 9 * n * n));
  }
}

TEST(ValidateFamily, FixturesPass) {
  const auto grid = SettingGrid::cube26();
  for (int n : {2, 4, 10}) {
    for (const auto& name : fixture_family_names()) {
      const auto report = validate_family(fixture_family(name, n), grid);
      EXPECT_TRUE(report.passed);
      EXPECT_EQ(report.points_checked, 26u * 26u);
      EXPECT_GE(report.min_slack, -1e-12);
      EXPECT_LE(report.max_slack, 1.0 / (4.0 * n * n) + 1e-12);
    }
  }
  const auto zero = validate_family(fixture_family("fixture-0", 4), grid);
  EXPECT_NEAR(zero.max_slack, 0.0, 1e-12);
  const auto one = validate_family(fixture_family("fixture-1", 4), grid);
  EXPECT_NEAR(one.min_slack, 1.0 / 64.0, 1e-12);
}

TEST(ValidateFamily, ExcessSlackFails) {
  const int n = 4;
  const auto base = fixture_family("fixture-0", n);
  // Adds 1/(2n^2) to S, twice the allowed slack.
  const PartitionFamily bad(
      n,
      [base, n](int i, int t, double a, double b) {
        return base.weight(i, t, a, b) + 1.0 / (4.0 * n * n) / (3.0 * n);
      },
      "too-much");
  try {
    validate_family(bad, SettingGrid::axes());
    FAIL() << "expected FamilyContractViolated";
  } catch (const FamilyContractError& e) {
    EXPECT_EQ(e.code(), ErrorCode::FamilyContractViolated);
    EXPECT_FALSE(e.report().passed);
    ASSERT_TRUE(e.report().witness.has_value());
    EXPECT_NEAR(e.report().witness->pairing_sum - e.report().witness->allowed_hi,
                1.0 / (4.0 * n * n), 1e-12);
  }
}

TEST(ValidateFamily, NegativeWeightFails) {
  const PartitionFamily bad(
      2, [](int i, int t, double, double) { return (i == 1 && t == 1) ? -0.01 : 0.5; }, "neg");
  try {
    validate_family(bad, SettingGrid::axes());
    FAIL() << "expected FamilyContractViolated";
  } catch (const FamilyContractError& e) {
    ASSERT_TRUE(e.report().witness.has_value());
    EXPECT_EQ(e.report().witness->index_i, 1);
    EXPECT_EQ(e.report().witness->index_t, 1);
    EXPECT_EQ(e.report().witness->weight, -0.01);
  }
}

TEST(Census, Examples) {
  const Direction x = make_direction({1, 0, 0});
  const Direction y = make_direction({0, 1, 0});
  const auto fam = fixture_family("fixture-0", 2);
  const auto orth = census_E_A(fam, x, y);
  EXPECT_NEAR(orth.census_E_A, 0.5, 1e-12);
  EXPECT_TRUE(orth.consistent);
  EXPECT_TRUE(orth.block_invariance_checked);
  EXPECT_EQ(orth.blocks_checked, 9u);

  const auto same = census_E_A(fam, x, x);
  EXPECT_NEAR(same.census_E_A, 1.0, 1e-12);
  EXPECT_TRUE(same.consistent);
}

TEST(Census, ConsistentAcrossFamiliesAndSettings) {
  const auto grid = SettingGrid::cube26();
  for (const auto& name : fixture_family_names()) {
    const auto fam = fixture_family(name, 4);
    for (std::size_t i = 0; i < grid.size(); i += 5) {
      for (std::size_t j = 0; j < grid.size(); j += 3) {
        const auto r = census_E_A(fam, grid.directions[i], grid.directions[j]);
        EXPECT_TRUE(r.consistent) << name << " " << i << " " << j;
        EXPECT_TRUE(r.formula_E_A.contains(r.census_E_A, 1e-12));
        EXPECT_NEAR(r.in_block + r.out_of_block, r.census_E_A, 1e-12);
      }
    }
  }
}

TEST(Census, LargeNSamplesBlocks) {
  const auto r = census_E_A(fixture_family("fixture-half", 60), make_direction({1, 2, 2}),
                            make_direction({2, -1, 0}));
  EXPECT_TRUE(r.consistent);
  EXPECT_LT(r.blocks_checked, 61u * 61u);
}

TEST(ToyCensus, Examples) {
  const auto t21 = toy_census_enumeration(2, 1);
  EXPECT_EQ(t21.selections, 4u);
  EXPECT_EQ(t21.expected_per_slot, 1u);
  EXPECT_TRUE(t21.uniform);

  const auto t32 = toy_census_enumeration(3, 2);
  EXPECT_EQ(t32.selections, 72u);
  EXPECT_TRUE(t32.uniform);
  for (std::size_t cell = 0; cell < 9; ++cell) {
    EXPECT_EQ(t32.counts[cell][0], 8u);
    EXPECT_EQ(t32.counts[cell][1], 8u);
    EXPECT_EQ(t32.per_cell_total[cell], 16u);
  }

  EXPECT_EQ(toy_census_enumeration(4, 2).expected_per_slot, 15u);
  const auto t63 = toy_census_enumeration(6, 3);
  EXPECT_EQ(t63.selections, 36u * 35u * 34u);
  EXPECT_EQ(t63.expected_per_slot, 35u * 34u);
  EXPECT_TRUE(t63.uniform);
  for (const auto& cls : t63.per_cell_class) {
    EXPECT_EQ(cls[0], cls[1]);
    EXPECT_EQ(cls[1], cls[2]);
  }
}

TEST(ToyCensus, Limits) {
  EXPECT_EQ(test::error_code([] { toy_census_enumeration(10, 8); }), ErrorCode::TooLarge);
  EXPECT_EQ(test::error_code([] { toy_census_enumeration(0, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(test::error_code([] { toy_census_enumeration(2, 5); }), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace hpaudit
