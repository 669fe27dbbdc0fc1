#include <cmath>

#include <gtest/gtest.h>

#include "hpaudit/serialize.hpp"
#include "hpaudit/signaling.hpp"
#include "test_util.hpp"

namespace hpaudit {
namespace {

ChannelConfig config(int version, int k, std::uint64_t trials, std::uint64_t seed = 1) {
  ChannelConfig c;
  c.version = version;
  c.k = k;
  c.trials = trials;
  c.seed = seed;
  return c;
}

TEST(AnalyticError, Examples) {
  EXPECT_EQ(analytic_error(1, 0.5), 0.25);
  EXPECT_EQ(analytic_error(10, 0.5), std::ldexp(1.0, -11));
  EXPECT_EQ(analytic_error(4, 0.0), 0.0);
  EXPECT_EQ(analytic_error(3, 1.0), 0.125);
  for (int k = 1; k < 40; ++k) {
    EXPECT_EQ(analytic_error(k + 1, 0.3), analytic_error(k, 0.3) / 2.0);
  }
}

TEST(AnalyticError, WithheldDecoderIsUseless) {
  for (int k : {1, 5, 20}) {
    EXPECT_NEAR(analytic_error_withheld(k, 0.5), 0.5, 1e-15);
  }
  EXPECT_NEAR(analytic_error_withheld(2, 0.2), 0.2 * 0.25 + 0.8 * 0.75, 1e-15);
}

TEST(ChannelConfig, Validation) {
  EXPECT_EQ(test::error_code([] { config(1, 0, 10).validate(); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(test::error_code([] { config(1, 3, 0).validate(); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(test::error_code([] { config(3, 3, 10).validate(); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(test::error_code([] {
              auto c = config(1, 3, 10);
              c.prior_bit1 = 1.5;
              c.validate();
            }),
            ErrorCode::InvalidArgument);
}

TEST(RunProtocol, Version1MatchesAnalytic) {
  // Ten independent seeds pooled: ~490 expected errors.
  std::uint64_t errors = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = run_protocol(config(1, 10, 100'000, seed));
    EXPECT_EQ(r.analytic_error_rate, std::ldexp(1.0, -11));
    EXPECT_EQ(r.confusion[0][1], 0u);
    EXPECT_EQ(r.confusion[0][0] + r.confusion[0][1] + r.confusion[1][0] + r.confusion[1][1],
              100'000u);
    errors += r.errors();
    total += 100'000;
  }
  const double p = std::ldexp(1.0, -11);
  const double z = (double(errors) / total - p) / std::sqrt(p * (1 - p) / total);
  EXPECT_LT(std::fabs(z), 3.0);
}

TEST(RunProtocol, BitZeroIsDeterministic) {
  for (int version : {1, 2}) {
    const auto r = run_protocol(config(version, 7, 20'000, 9));
    EXPECT_GT(r.bit0_outcomes, 0u);
    EXPECT_EQ(r.bit0_plus_outcomes, r.bit0_outcomes) << "version " << version;
    EXPECT_EQ(r.confusion[0][1], 0u);
  }
}

TEST(RunProtocol, Version2WithDisclosureMatchesVersion1) {
  for (int k : {1, 3, 6}) {
    const auto v1 = run_protocol(config(1, k, 100'000, 5));
    const auto v2 = run_protocol(config(2, k, 100'000, 6));
    EXPECT_EQ(v1.analytic_error_rate, v2.analytic_error_rate);
    EXPECT_LT(std::fabs(v2.z_score), 3.0) << "k=" << k;
    const double diff = v1.empirical_error_rate - v2.empirical_error_rate;
    EXPECT_LT(std::fabs(diff), 3.0 * std::sqrt(2.0) * v1.standard_error) << "k=" << k;
  }
}

TEST(RunProtocol, WithheldSignCarriesNoInformation) {
  auto c = config(2, 4, 100'000, 8);
  c.withhold_r = true;
  const auto r = run_protocol(c);
  EXPECT_NEAR(r.analytic_error_rate, 0.5, 1e-15);
  EXPECT_LT(std::fabs(r.z_score), 3.0);
  EXPECT_LT(mutual_information(r.confusion), 1e-3);

  const auto disclosed = run_protocol(config(2, 4, 100'000, 8));
  EXPECT_GT(mutual_information(disclosed.confusion), 0.5);
}

TEST(RunProtocol, ErrorHalvesPerExtraPair) {
  const auto k2 = run_protocol(config(1, 2, 200'000, 3));
  const auto k3 = run_protocol(config(1, 3, 200'000, 4));
  const double ratio = k3.empirical_error_rate / k2.empirical_error_rate;
  EXPECT_NEAR(ratio, 0.5, 0.03);
}

TEST(RunProtocol, PriorZeroNeverErrs) {
  auto c = config(1, 2, 5'000);
  c.prior_bit1 = 0.0;
  EXPECT_EQ(run_protocol(c).errors(), 0u);
}

TEST(RunProtocol, ThreadCountDoesNotChangeResult) {
  const auto c = config(2, 5, 50'000, 77);
  EXPECT_EQ(to_json(run_protocol(c, 1)).dump(), to_json(run_protocol(c, 4)).dump());
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(mutual_information({{{50, 0}, {0, 50}}}), 1.0, 1e-12);
  EXPECT_NEAR(mutual_information({{{25, 25}, {25, 25}}}), 0.0, 1e-12);
  EXPECT_EQ(mutual_information({{{0, 0}, {0, 0}}}), 0.0);
}

}  // namespace
}  // namespace hpaudit
