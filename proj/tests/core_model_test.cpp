#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hpaudit/core_model.hpp"
#include "hpaudit/error.hpp"
#include "test_util.hpp"

namespace hpaudit {
namespace {

constexpr double kTol = 1e-12;

const Direction kX = make_direction({1, 0, 0});
const Direction kY = make_direction({0, 1, 0});
const Direction kMinusX = make_direction({-1, 0, 0});

ModelParams params(int n = 4, ThetaPolicy theta = ThetaPolicy::lower()) {
  ModelParams p;
  p.n = n;
  p.theta = theta;
  return p;
}

TEST(MakeDirection, Normalizes) {
  const Direction d = make_direction({2, 0, 0});
  EXPECT_EQ(d.x(), 1.0);
  EXPECT_EQ(d.y(), 0.0);
  EXPECT_EQ(d.z(), 0.0);

  const Direction e = make_direction({1, 1, 0});
  EXPECT_NEAR(e.x(), 1.0 / std::numbers::sqrt2, kTol);
  EXPECT_NEAR(e.y(), 1.0 / std::numbers::sqrt2, kTol);
  EXPECT_EQ(e.z(), 0.0);
}

TEST(MakeDirection, RejectsZeroVector) {
  EXPECT_EQ(test::error_code([] { make_direction({0, 0, 0}); }), ErrorCode::ZeroVector);
  EXPECT_EQ(test::error_code([] { make_direction({1e-13, 0, 0}); }), ErrorCode::ZeroVector);
}

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(params(2).validate());
  EXPECT_EQ(test::error_code([] { params(3).validate(); }), ErrorCode::InvalidParams);
  EXPECT_EQ(test::error_code([] { params(0).validate(); }), ErrorCode::InvalidParams);
  EXPECT_EQ(test::error_code([] { ThetaPolicy::fixed(1.5); }), ErrorCode::InvalidParams);
  EXPECT_EQ(ThetaPolicy::parse("fixed:0.25").t, 0.25);
  EXPECT_EQ(test::error_code([] { ThetaPolicy::parse("middle"); }), ErrorCode::InvalidParams);
  EXPECT_EQ(test::error_code([] { ThetaPolicy::parse("fixed:x"); }), ErrorCode::InvalidParams);
}

TEST(CondExpectations, Version1ParallelSettings) {
  const auto c = cond_expectations(Version::V1, params(), kX, kX, HiddenSource{1, 0.0, 7});
  EXPECT_EQ(c.gamma, -1.0);
  EXPECT_EQ(c.beta, -1.0);
  EXPECT_EQ(c.alpha.lo, 1.0);
  EXPECT_NEAR(c.alpha.hi, 1.0 + 1.0 / (16.0 * 16.0), 1e-15);
}

TEST(CondExpectations, Version1OrthogonalSettings) {
  const auto c = cond_expectations(Version::V1, params(), kX, kY, HiddenSource{});
  EXPECT_EQ(c.gamma, 0.0);
  EXPECT_EQ(c.beta, 0.0);
  EXPECT_EQ(c.alpha.lo, 0.5);
  EXPECT_NEAR(c.alpha.hi, 0.5 + 1.0 / 256.0, 1e-15);
}

TEST(CondExpectations, Version2NegativeSign) {
  const auto c = cond_expectations(Version::V2, params(), kX, kMinusX, HiddenSource{-1, 0.0, 0});
  EXPECT_EQ(c.beta, -1.0);
  EXPECT_EQ(c.gamma, 1.0);
  // alpha flips with r; theta = 0 still maps to -(a.|b| + (1 - |a|.|b|)/2).
  EXPECT_EQ(resolve(c.alpha, ThetaPolicy::lower()), -1.0);
  EXPECT_NEAR(resolve(c.alpha, ThetaPolicy::upper()), -1.0 - 1.0 / 256.0, 1e-15);
  EXPECT_LE(c.alpha.lo, c.alpha.hi);
}

TEST(CondExpectations, RejectsInvalidSign) {
  EXPECT_EQ(test::error_code([] {
              cond_expectations(Version::V2, params(), kX, kY, HiddenSource{0, 0.0, 0});
            }),
            ErrorCode::InvalidParams);
}

TEST(UncondExpectations, Examples) {
  EXPECT_EQ(uncond_expectations(Version::V1, params(), kX, kMinusX).beta, 1.0);
  EXPECT_EQ(uncond_expectations(Version::V1, params(), kY, kMinusX).beta, 0.0);

  const auto v2 = uncond_expectations(Version::V2, params(), kX, kY);
  EXPECT_EQ(v2.alpha.lo, 0.0);
  EXPECT_EQ(v2.alpha.hi, 0.0);
  EXPECT_EQ(v2.beta, 0.0);
  EXPECT_EQ(v2.gamma, 0.0);
}

TEST(QmReference, Examples) {
  EXPECT_EQ(qm_reference(kX, kX).gamma, -1.0);
  EXPECT_EQ(qm_reference(kX, kY).gamma, 0.0);
  const auto c = qm_reference(make_direction({1, 2, 3}), make_direction({-3, 1, 0}));
  EXPECT_EQ(c.alpha.lo, 0.0);
  EXPECT_EQ(c.alpha.hi, 0.0);
  EXPECT_EQ(c.beta, 0.0);
}

TEST(MarginalProb, DeterministicBranch) {
  const double e = uncond_expectations(Version::V1, params(), kX, kMinusX).beta;
  const auto m = marginal_prob(e, 4);
  EXPECT_EQ(m.p.p_plus, 1.0);
  EXPECT_EQ(m.p.p_minus, 0.0);
  EXPECT_EQ(m.clamped, 0.0);
}

TEST(MarginalProb, Symmetric) {
  const auto m = marginal_prob(0.0, 4);
  EXPECT_EQ(m.p.p_plus, 0.5);
  EXPECT_EQ(m.p.p_minus, 0.5);
}

TEST(MarginalProb, UpperEndpointClamps) {
  // e = 1 + 1/(16 * 4^2) gives p_plus = 1 + 1/512 before clamping.
  const BoundedValue e{1.0, 1.0 + 1.0 / 256.0, false};
  const auto m = marginal_prob(e, ThetaPolicy::upper(), 4);
  EXPECT_EQ(m.p.p_plus, 1.0);
  EXPECT_EQ(m.p.p_minus, 0.0);
  EXPECT_NEAR(m.clamped, 1.0 / 512.0, 1e-15);
  EXPECT_LE(m.clamped, 1.0 / (32.0 * 16.0) + 1e-15);
}

TEST(MarginalProb, OutOfRange) {
  EXPECT_EQ(test::error_code([] { marginal_prob(1.0 + 1.0 / 256.0 + 1e-9, 4); }),
            ErrorCode::ExpectationOutOfRange);
  EXPECT_EQ(test::error_code([] { marginal_prob(-1.5, 4); }), ErrorCode::ExpectationOutOfRange);
  EXPECT_NO_THROW(marginal_prob(-1.0 - 1.0 / 256.0, 4));
}

TEST(JointPmf, Examples) {
  const auto c = cond_expectations(Version::V1, params(), kX, kX, HiddenSource{});
  const auto j = joint_pmf(c, ThetaPolicy::lower()).p;
  EXPECT_NEAR(j.p_pp, 0.0, kTol);
  EXPECT_NEAR(j.p_pm, 1.0, kTol);
  EXPECT_NEAR(j.p_mp, 0.0, kTol);
  EXPECT_NEAR(j.p_mm, 0.0, kTol);

  const auto u = joint_pmf(CondExpectations{}, ThetaPolicy::lower()).p;
  for (double v : {u.p_pp, u.p_pm, u.p_mp, u.p_mm}) EXPECT_EQ(v, 0.25);

  const auto o = joint_pmf(cond_expectations(Version::V1, params(), kX, kY, HiddenSource{}),
                           ThetaPolicy::lower())
                     .p;
  EXPECT_NEAR(o.p_pp, 0.375, kTol);
  EXPECT_NEAR(o.p_pm, 0.375, kTol);
  EXPECT_NEAR(o.p_mp, 0.125, kTol);
  EXPECT_NEAR(o.p_mm, 0.125, kTol);
}

TEST(JointPmf, InfeasibleMomentsThrow) {
  // The theta = 1 endpoint at a = b pushes p(-,+) to -1/1024.
  const auto c = cond_expectations(Version::V1, params(), kX, kX, HiddenSource{});
  EXPECT_EQ(test::error_code([&] { joint_pmf(c, ThetaPolicy::upper()); }),
            ErrorCode::JointInconsistency);
}

TEST(JointPmf, NegativeDustIsClamped) {
  CondExpectations c;
  c.alpha = BoundedValue::exact(1.0 + 2e-10);
  c.beta = -1.0;
  c.gamma = -1.0;
  const auto j = joint_pmf(c, ThetaPolicy::lower());
  EXPECT_GT(j.clamped, 0.0);
  EXPECT_GE(j.p.p_mp, 0.0);
  EXPECT_NEAR(j.p.sum(), 1.0, 1e-15);
}

TEST(SamplePair, DeterministicJoint) {
  RandomStream rng(99);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_pair(Version::V1, params(), kX, kX, HiddenSource{}, rng), (Outcome{1, -1}));
  }
}

TEST(SamplePair, SameSeedSameSequence) {
  RandomStream r1(5, 2), r2(5, 2);
  const auto lam = HiddenSource{-1, 0.0, 0};
  const Direction a = make_direction({1, 2, 3});
  const Direction b = make_direction({0, -1, 2});
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(sample_pair(Version::V2, params(), a, b, lam, r1),
              sample_pair(Version::V2, params(), a, b, lam, r2));
  }
}

TEST(SamplePair, OrthogonalCorrelationMonteCarlo) {
  RandomStream rng(2024);
  const std::size_t trials = 1'000'000;
  const auto lambdas = sample_lambda(rng, trials);
  long long sum = 0;
  for (const auto& lam : lambdas) {
    const Outcome o = sample_pair(Version::V1, params(), kX, kY, lam, rng);
    sum += o.a * o.b;
  }
  const double mean = static_cast<double>(sum) / trials;
  EXPECT_LT(std::fabs(mean), 3.0 / std::sqrt(double(trials)));
}

TEST(SampleLambda, PairsAndTimes) {
  RandomStream rng(1);
  const auto two = sample_lambda(rng, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].r + two[1].r, 0);

  const auto batch = sample_lambda(rng, 10'000);
  long long sum = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sum += batch[i].r;
    EXPECT_TRUE(batch[i].r == 1 || batch[i].r == -1);
    if (i > 0) EXPECT_GT(batch[i].emission_time, batch[i - 1].emission_time);
  }
  EXPECT_EQ(sum, 0);
  EXPECT_EQ(test::error_code([&] { sample_lambda(rng, 3); }), ErrorCode::OddBatch);
}

// --- properties over random settings ---

class CoreModelProperty : public ::testing::TestWithParam<int> {};

TEST_P(CoreModelProperty, Version1IsLambdaIndependent) {
  const ModelParams p = params(GetParam());
  test::for_random_settings(200, 11, [&](const Direction& a, const Direction& b) {
    const auto u = uncond_expectations(Version::V1, p, a, b);
    for (int r : {-1, 1}) {
      const auto c = cond_expectations(Version::V1, p, a, b, HiddenSource{r, 1.5, 3});
      EXPECT_EQ(c.alpha.lo, u.alpha.lo);
      EXPECT_EQ(c.alpha.hi, u.alpha.hi);
      EXPECT_EQ(c.beta, u.beta);
      EXPECT_EQ(c.gamma, u.gamma);
    }
  });
}

TEST_P(CoreModelProperty, Version2AveragesToUnconditioned) {
  const ModelParams p = params(GetParam(), ThetaPolicy::fixed(0.3));
  RandomStream rng(17);
  const auto batch = sample_lambda(rng, 64);
  test::for_random_settings(200, 12, [&](const Direction& a, const Direction& b) {
    double alpha = 0.0, beta = 0.0;
    for (const auto& lam : batch) {
      const auto c = cond_expectations(Version::V2, p, a, b, lam);
      const auto c1 = cond_expectations(Version::V1, p, a, b, lam);
      EXPECT_EQ(c.gamma, c1.gamma);
      alpha += resolve(c.alpha, p.theta);
      beta += c.beta;
    }
    const auto u = uncond_expectations(Version::V2, p, a, b);
    EXPECT_EQ(alpha / batch.size(), resolve(u.alpha, p.theta));
    EXPECT_EQ(beta / batch.size(), u.beta);
  });
}

TEST_P(CoreModelProperty, AlphaIntervalBounds) {
  const ModelParams p = params(GetParam());
  const double width = 1.0 / (16.0 * p.n * p.n);
  test::for_random_settings(500, 13, [&](const Direction& a, const Direction& b) {
    const auto c = cond_expectations(Version::V1, p, a, b, HiddenSource{});
    EXPECT_GE(c.alpha.lo, -1.0 - 1e-15);
    EXPECT_LE(c.alpha.lo, 1.0 + 1e-15);
    EXPECT_NEAR(c.alpha.width(), width, 1e-15);
    EXPECT_LE(std::fabs(c.beta), 1.0 + 1e-15);
    EXPECT_LE(std::fabs(c.gamma), 1.0 + 1e-15);
  });
}

TEST_P(CoreModelProperty, MarginalsAndJointReproduceMoments) {
  const ModelParams p = params(GetParam());
  test::for_random_settings(500, 14, [&](const Direction& a, const Direction& b) {
    for (Version v : {Version::V1, Version::V2}) {
      for (int r : {-1, 1}) {
        const auto c = cond_expectations(v, p, a, b, HiddenSource{r, 0.0, 0});
        const auto m = marginal_prob(c.alpha, p.theta, p.n);
        EXPECT_EQ(m.p.p_plus + m.p.p_minus, 1.0);
        const auto j = joint_pmf(c, p.theta);
        EXPECT_NEAR(j.p.sum(), 1.0, 1e-12);
        if (j.clamped == 0.0) {
          EXPECT_NEAR(j.p.p_pp + j.p.p_pm - j.p.p_mp - j.p.p_mm, resolve(c.alpha, p.theta), 1e-12);
          EXPECT_NEAR(j.p.p_pp - j.p.p_pm + j.p.p_mp - j.p.p_mm, c.beta, 1e-12);
          EXPECT_NEAR(j.p.correlation(), c.gamma, 1e-12);
        }
      }
    }
  });
}

INSTANTIATE_TEST_SUITE_P(EvenN, CoreModelProperty, ::testing::Values(2, 4, 8, 20));

}  // namespace
}  // namespace hpaudit
