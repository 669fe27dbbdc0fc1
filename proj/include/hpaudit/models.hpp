#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hpaudit/core_model.hpp"

namespace hpaudit {

/// Anything the locality auditors can interrogate: conditional (given a
/// source state) and unconditioned outcome probabilities at both stations.
class HiddenVariableModel {
 public:
  virtual ~HiddenVariableModel() = default;

  virtual std::string name() const = 0;

  virtual MarginalResult cond_marginal_1(const Direction& a, const Direction& b,
                                         const HiddenSource& lam) const = 0;
  virtual MarginalResult cond_marginal_2(const Direction& a, const Direction& b,
                                         const HiddenSource& lam) const = 0;
  virtual JointResult cond_joint(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const = 0;

  virtual MarginalResult uncond_marginal_1(const Direction& a, const Direction& b) const = 0;
  virtual MarginalResult uncond_marginal_2(const Direction& a, const Direction& b) const = 0;
  virtual JointResult uncond_joint(const Direction& a, const Direction& b) const = 0;

  /// Unconditioned moments; E(A) may be an interval.
  virtual CondExpectations uncond_moments(const Direction& a, const Direction& b) const = 0;

  /// Source states the auditors quantify over. Models whose state space is
  /// finite return it exhaustively and ignore the stream.
  virtual std::vector<HiddenSource> audit_lambdas(RandomStream& rng) const = 0;
};

/// Either version of the Hess-Philipp model. The source enters only through
/// r(lambda), so audits enumerate r = +1 and r = -1.
class HessPhilippModel final : public HiddenVariableModel {
 public:
  HessPhilippModel(Version version, ModelParams params);

  std::string name() const override;
  Version version() const noexcept { return version_; }
  const ModelParams& params() const noexcept { return params_; }

  MarginalResult cond_marginal_1(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const override;
  MarginalResult cond_marginal_2(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const override;
  JointResult cond_joint(const Direction& a, const Direction& b,
                         const HiddenSource& lam) const override;
  MarginalResult uncond_marginal_1(const Direction& a, const Direction& b) const override;
  MarginalResult uncond_marginal_2(const Direction& a, const Direction& b) const override;
  JointResult uncond_joint(const Direction& a, const Direction& b) const override;
  CondExpectations uncond_moments(const Direction& a, const Direction& b) const override;
  std::vector<HiddenSource> audit_lambdas(RandomStream& rng) const override;

 private:
  Version version_;
  ModelParams params_;
};

/// Singlet-state predictions with no dependence on the source state.
class QmReferenceModel final : public HiddenVariableModel {
 public:
  std::string name() const override { return "qm"; }

  MarginalResult cond_marginal_1(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const override;
  MarginalResult cond_marginal_2(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const override;
  JointResult cond_joint(const Direction& a, const Direction& b,
                         const HiddenSource& lam) const override;
  MarginalResult uncond_marginal_1(const Direction& a, const Direction& b) const override;
  MarginalResult uncond_marginal_2(const Direction& a, const Direction& b) const override;
  JointResult uncond_joint(const Direction& a, const Direction& b) const override;
  CondExpectations uncond_moments(const Direction& a, const Direction& b) const override;
  std::vector<HiddenSource> audit_lambdas(RandomStream& rng) const override;
};

/// Negative control: A = sign(a.h), B = -sign(b.h) with h a uniformly
/// distributed unit vector carried by the source. h is derived
/// deterministically from HiddenSource::seed_tag. Unconditioned marginals
/// are exactly 1/2; the correlation is a Monte Carlo estimate over a fixed
/// sample of h drawn at construction.
class LocalFixtureModel final : public HiddenVariableModel {
 public:
  explicit LocalFixtureModel(std::size_t mc_samples = 1'000'000, std::uint64_t seed = 0,
                             std::size_t audit_lambda_count = 64);

  std::string name() const override { return "local-fixture"; }

  static Vec3 hidden_axis(const HiddenSource& lam) noexcept;
  static int outcome_a(const Direction& a, const Vec3& h) noexcept;
  static int outcome_b(const Direction& b, const Vec3& h) noexcept;

  MarginalResult cond_marginal_1(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const override;
  MarginalResult cond_marginal_2(const Direction& a, const Direction& b,
                                 const HiddenSource& lam) const override;
  JointResult cond_joint(const Direction& a, const Direction& b,
                         const HiddenSource& lam) const override;
  MarginalResult uncond_marginal_1(const Direction& a, const Direction& b) const override;
  MarginalResult uncond_marginal_2(const Direction& a, const Direction& b) const override;
  JointResult uncond_joint(const Direction& a, const Direction& b) const override;
  CondExpectations uncond_moments(const Direction& a, const Direction& b) const override;
  std::vector<HiddenSource> audit_lambdas(RandomStream& rng) const override;

  /// Monte Carlo estimate of E(AB) and its standard error.
  struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
  };
  Estimate correlation(const Direction& a, const Direction& b) const;

  /// CHSH combination evaluated on the shared sample, so each hidden state
  /// contributes exactly +/-2.
  double chsh_sample(const Direction& a, const Direction& a_alt, const Direction& b,
                     const Direction& b_alt) const;

  std::size_t mc_samples() const noexcept { return axes_.size(); }

 private:
  std::vector<Vec3> axes_;
  std::size_t audit_lambda_count_;
};

/// Builds a model from a selector: hp-v1, hp-v2, qm or local-fixture.
/// Throws Error(InvalidArgument) for unknown selectors.
std::unique_ptr<HiddenVariableModel> make_model(const std::string& selector,
                                                const ModelParams& params,
                                                std::size_t mc_samples = 1'000'000,
                                                std::uint64_t seed = 0);

}  // namespace hpaudit
