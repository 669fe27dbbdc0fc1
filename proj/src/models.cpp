#include "hpaudit/models.hpp"

#include <cmath>
#include <numbers>

#include "hpaudit/error.hpp"

namespace hpaudit {

HessPhilippModel::HessPhilippModel(Version version, ModelParams params)
    : version_(version), params_(params) {
  params_.validate();
}

std::string HessPhilippModel::name() const {
  return version_ == Version::V1 ? "hp-v1" : "hp-v2";
}

MarginalResult HessPhilippModel::cond_marginal_1(const Direction& a, const Direction& b,
                                                 const HiddenSource& lam) const {
  const auto c = cond_expectations(version_, params_, a, b, lam);
  return marginal_prob(c.alpha, params_.theta, params_.n);
}

MarginalResult HessPhilippModel::cond_marginal_2(const Direction& a, const Direction& b,
                                                 const HiddenSource& lam) const {
  const auto c = cond_expectations(version_, params_, a, b, lam);
  return marginal_prob(c.beta, params_.n);
}

JointResult HessPhilippModel::cond_joint(const Direction& a, const Direction& b,
                                         const HiddenSource& lam) const {
  return joint_pmf(cond_expectations(version_, params_, a, b, lam), params_.theta);
}

MarginalResult HessPhilippModel::uncond_marginal_1(const Direction& a, const Direction& b) const {
  const auto c = uncond_expectations(version_, params_, a, b);
  return marginal_prob(c.alpha, params_.theta, params_.n);
}

MarginalResult HessPhilippModel::uncond_marginal_2(const Direction& a, const Direction& b) const {
  const auto c = uncond_expectations(version_, params_, a, b);
  return marginal_prob(c.beta, params_.n);
}

JointResult HessPhilippModel::uncond_joint(const Direction& a, const Direction& b) const {
  return joint_pmf(uncond_expectations(version_, params_, a, b), params_.theta);
}

CondExpectations HessPhilippModel::uncond_moments(const Direction& a, const Direction& b) const {
  return uncond_expectations(version_, params_, a, b);
}

std::vector<HiddenSource> HessPhilippModel::audit_lambdas(RandomStream&) const {
  return {HiddenSource{1, 0.0, 0}, HiddenSource{-1, 0.0, 1}};
}

// --- QM reference ---

MarginalResult QmReferenceModel::cond_marginal_1(const Direction& a, const Direction& b,
                                                 const HiddenSource&) const {
  return uncond_marginal_1(a, b);
}

MarginalResult QmReferenceModel::cond_marginal_2(const Direction& a, const Direction& b,
                                                 const HiddenSource&) const {
  return uncond_marginal_2(a, b);
}

JointResult QmReferenceModel::cond_joint(const Direction& a, const Direction& b,
                                         const HiddenSource&) const {
  return uncond_joint(a, b);
}

MarginalResult QmReferenceModel::uncond_marginal_1(const Direction&, const Direction&) const {
  return {{0.5, 0.5}, 0.0};
}

MarginalResult QmReferenceModel::uncond_marginal_2(const Direction&, const Direction&) const {
  return {{0.5, 0.5}, 0.0};
}

JointResult QmReferenceModel::uncond_joint(const Direction& a, const Direction& b) const {
  return joint_pmf(qm_reference(a, b), ThetaPolicy::lower());
}

CondExpectations QmReferenceModel::uncond_moments(const Direction& a, const Direction& b) const {
  return qm_reference(a, b);
}

std::vector<HiddenSource> QmReferenceModel::audit_lambdas(RandomStream&) const {
  return {HiddenSource{}};
}

// --- local fixture ---

LocalFixtureModel::LocalFixtureModel(std::size_t mc_samples, std::uint64_t seed,
                                     std::size_t audit_lambda_count)
    : audit_lambda_count_(audit_lambda_count + audit_lambda_count % 2) {
  if (mc_samples == 0) {
    throw Error(ErrorCode::InvalidArgument, "local fixture needs at least one Monte Carlo sample");
  }
  RandomStream rng(seed, 0x10CA1);
  const auto lambdas = sample_lambda(rng, mc_samples + mc_samples % 2);
  axes_.reserve(mc_samples);
  for (std::size_t i = 0; i < mc_samples; ++i) axes_.push_back(hidden_axis(lambdas[i]));
}

Vec3 LocalFixtureModel::hidden_axis(const HiddenSource& lam) noexcept {
  RandomStream rng(lam.seed_tag, 0xA715);
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

int LocalFixtureModel::outcome_a(const Direction& a, const Vec3& h) noexcept {
  return a[0] * h[0] + a[1] * h[1] + a[2] * h[2] >= 0.0 ? 1 : -1;
}

int LocalFixtureModel::outcome_b(const Direction& b, const Vec3& h) noexcept {
  return -outcome_a(b, h);
}

namespace {

MarginalResult point_mass(int outcome) {
  return outcome > 0 ? MarginalResult{{1.0, 0.0}, 0.0} : MarginalResult{{0.0, 1.0}, 0.0};
}

}  // namespace

MarginalResult LocalFixtureModel::cond_marginal_1(const Direction& a, const Direction&,
                                                  const HiddenSource& lam) const {
  return point_mass(outcome_a(a, hidden_axis(lam)));
}

MarginalResult LocalFixtureModel::cond_marginal_2(const Direction&, const Direction& b,
                                                  const HiddenSource& lam) const {
  return point_mass(outcome_b(b, hidden_axis(lam)));
}

JointResult LocalFixtureModel::cond_joint(const Direction& a, const Direction& b,
                                          const HiddenSource& lam) const {
  const Vec3 h = hidden_axis(lam);
  const int oa = outcome_a(a, h);
  const int ob = outcome_b(b, h);
  Joint4 j{0.0, 0.0, 0.0, 0.0};
  if (oa > 0) {
    (ob > 0 ? j.p_pp : j.p_pm) = 1.0;
  } else {
    (ob > 0 ? j.p_mp : j.p_mm) = 1.0;
  }
  return {j, 0.0};
}

MarginalResult LocalFixtureModel::uncond_marginal_1(const Direction&, const Direction&) const {
  return {{0.5, 0.5}, 0.0};
}

MarginalResult LocalFixtureModel::uncond_marginal_2(const Direction&, const Direction&) const {
  return {{0.5, 0.5}, 0.0};
}

JointResult LocalFixtureModel::uncond_joint(const Direction& a, const Direction& b) const {
  return joint_pmf(uncond_moments(a, b), ThetaPolicy::lower());
}

CondExpectations LocalFixtureModel::uncond_moments(const Direction& a, const Direction& b) const {
  CondExpectations c;
  c.alpha = BoundedValue::exact(0.0);
  c.beta = 0.0;
  c.gamma = correlation(a, b).mean;
  return c;
}

LocalFixtureModel::Estimate LocalFixtureModel::correlation(const Direction& a,
                                                           const Direction& b) const {
  long long sum = 0;
  for (const auto& h : axes_) sum += outcome_a(a, h) * outcome_b(b, h);
  const double n = static_cast<double>(axes_.size());
  const double mean = static_cast<double>(sum) / n;
  return {mean, std::sqrt(std::max(0.0, 1.0 - mean * mean) / n)};
}

double LocalFixtureModel::chsh_sample(const Direction& a, const Direction& a_alt,
                                      const Direction& b, const Direction& b_alt) const {
  long long sum = 0;
  for (const auto& h : axes_) {
    const int x = outcome_a(a, h);
    const int x_alt = outcome_a(a_alt, h);
    const int y = outcome_b(b, h);
    const int y_alt = outcome_b(b_alt, h);
    sum += x * y - x * y_alt + x_alt * y + x_alt * y_alt;
  }
  return static_cast<double>(sum) / static_cast<double>(axes_.size());
}

std::vector<HiddenSource> LocalFixtureModel::audit_lambdas(RandomStream& rng) const {
  return sample_lambda(rng, audit_lambda_count_);
}

std::unique_ptr<HiddenVariableModel> make_model(const std::string& selector,
                                                const ModelParams& params,
                                                std::size_t mc_samples, std::uint64_t seed) {
  if (selector == "hp-v1") return std::make_unique<HessPhilippModel>(Version::V1, params);
  if (selector == "hp-v2") return std::make_unique<HessPhilippModel>(Version::V2, params);
  if (selector == "qm") return std::make_unique<QmReferenceModel>();
  if (selector == "local-fixture") return std::make_unique<LocalFixtureModel>(mc_samples, seed);
  throw Error(ErrorCode::InvalidArgument,
              "unknown model '" + selector + "' (expected hp-v1, hp-v2, qm or local-fixture)");
}

}  // namespace hpaudit
