#include "hpaudit/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hpaudit/error.hpp"

namespace hpaudit {

namespace {

constexpr double kZeroNorm = 1e-12;
constexpr double kRangeSlack = 1e-12;
constexpr double kJointTolerance = 1e-9;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Direction Direction::from_vector(const Vec3& v) {
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(norm >= kZeroNorm)) {
    throw Error(ErrorCode::ZeroVector, "cannot normalize a vector of length " + fmt_double(norm));
  }
  return Direction({v[0] / norm, v[1] / norm, v[2] / norm});
}

Direction make_direction(const Vec3& v) { return Direction::from_vector(v); }

AbsVector abs(const Direction& d) noexcept {
  return {{std::fabs(d.x()), std::fabs(d.y()), std::fabs(d.z())}};
}

double dot(const Direction& a, const Direction& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
double dot(const Direction& a, const AbsVector& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
double dot(const AbsVector& a, const Direction& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
double dot(const AbsVector& a, const AbsVector& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Version version_from_int(int v) {
  if (v == 1) return Version::V1;
  if (v == 2) return Version::V2;
  throw Error(ErrorCode::InvalidParams, "model version must be 1 or 2, got " + std::to_string(v));
}

ThetaPolicy ThetaPolicy::fixed(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "fixed theta must lie in [0, 1], got " + fmt_double(t));
  }
  return {Kind::Fixed, t};
}

ThetaPolicy ThetaPolicy::parse(const std::string& text) {
  if (text == "lower") return lower();
  if (text == "upper") return upper();
  constexpr std::string_view prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string value = text.substr(prefix.size());
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw Error(ErrorCode::InvalidParams, "bad theta value '" + value + "'");
    }
    return fixed(t);
  }
  throw Error(ErrorCode::InvalidParams,
              "theta policy must be lower, upper or fixed:<t>, got '" + text + "'");
}

std::string ThetaPolicy::to_string() const {
  switch (kind) {
    case Kind::Lower: return "lower";
    case Kind::Upper: return "upper";
    case Kind::Fixed: return "fixed:" + fmt_double(t);
  }
  return "lower";
}

double ThetaPolicy::theta() const noexcept {
  switch (kind) {
    case Kind::Lower: return 0.0;
    case Kind::Upper: return 1.0;
    case Kind::Fixed: return t;
  }
  return 0.0;
}

double resolve(const BoundedValue& v, const ThetaPolicy& policy) noexcept {
  const double theta = policy.theta();
  if (theta == 0.0) return v.theta_descending ? v.hi : v.lo;
  if (theta == 1.0) return v.theta_descending ? v.lo : v.hi;
  return v.theta_descending ? v.hi - theta * (v.hi - v.lo) : v.lo + theta * (v.hi - v.lo);
}

void ModelParams::validate() const {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::InvalidParams, "n must be an even integer >= 2, got " + std::to_string(n));
  }
  if (theta.kind == ThetaPolicy::Kind::Fixed && !(theta.t >= 0.0 && theta.t <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "fixed theta must lie in [0, 1]");
  }
}

double ModelParams::remainder() const noexcept {
  const double nn = static_cast<double>(n);
  return 1.0 / (16.0 * nn * nn);
}

double Joint4::at(int a, int b) const noexcept {
  if (a > 0) return b > 0 ? p_pp : p_pm;
  return b > 0 ? p_mp : p_mm;
}

CondExpectations cond_expectations(Version version, const ModelParams& params, const Direction& a,
                                   const Direction& b, const HiddenSource& lam) {
  params.validate();
  const AbsVector abs_a = abs(a);
  const AbsVector abs_b = abs(b);

  // E(A) = a.|b| + (1 - |a|.|b|)/2 + theta/(16 n^2), 0 <= theta <= 1
  const double alpha_lo = dot(a, abs_b) + 0.5 * (1.0 - dot(abs_a, abs_b));
  CondExpectations c;
  c.alpha = {alpha_lo, alpha_lo + params.remainder(), false};
  c.beta = -dot(abs_a, b);
  c.gamma = -dot(a, b);

  if (version == Version::V2) {
    if (lam.r != 1 && lam.r != -1) {
      throw Error(ErrorCode::InvalidParams, "r(lambda) must be +1 or -1");
    }
    const double r = static_cast<double>(lam.r);
    if (r < 0) c.alpha = {-c.alpha.hi, -c.alpha.lo, true};
    c.beta *= r;
  }
  return c;
}

CondExpectations uncond_expectations(Version version, const ModelParams& params,
                                     const Direction& a, const Direction& b) {
  if (version == Version::V1) {
    return cond_expectations(version, params, a, b, HiddenSource{});
  }
  params.validate();
  // The source sign averages to zero, leaving only the correlation.
  CondExpectations c;
  c.alpha = BoundedValue::exact(0.0);
  c.beta = 0.0;
  c.gamma = -dot(a, b);
  return c;
}

CondExpectations qm_reference(const Direction& a, const Direction& b) noexcept {
  CondExpectations c;
  c.alpha = BoundedValue::exact(0.0);
  c.beta = 0.0;
  c.gamma = -dot(a, b);
  return c;
}

MarginalResult marginal_prob(const BoundedValue& e, const ThetaPolicy& policy, int n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidParams, "n must be positive");
  }
  const double value = resolve(e, policy);
  const double nn = static_cast<double>(n);
  const double limit = 1.0 + 1.0 / (16.0 * nn * nn) + kRangeSlack;
  if (!(std::fabs(value) <= limit)) {
    throw Error(ErrorCode::ExpectationOutOfRange,
                "expectation " + fmt_double(value) + " exceeds 1 + 1/(16 n^2) for n = " +
                    std::to_string(n));
  }
  double p_plus = 0.5 * (1.0 + value);
  MarginalResult result;
  if (p_plus > 1.0) {
    result.clamped = p_plus - 1.0;
    p_plus = 1.0;
  } else if (p_plus < 0.0) {
    result.clamped = -p_plus;
    p_plus = 0.0;
  }
  result.p = {p_plus, 1.0 - p_plus};
  return result;
}

MarginalResult marginal_prob(double e, int n) {
  return marginal_prob(BoundedValue::exact(e), ThetaPolicy::lower(), n);
}

JointResult joint_pmf(const CondExpectations& c, const ThetaPolicy& policy) {
  const double alpha = resolve(c.alpha, policy);
  const double beta = c.beta;
  const double gamma = c.gamma;
  std::array<double, 4> p = {
      0.25 * (1.0 + alpha + beta + gamma),
      0.25 * (1.0 + alpha - beta - gamma),
      0.25 * (1.0 - alpha + beta - gamma),
      0.25 * (1.0 - alpha - beta + gamma),
  };
  const double worst = *std::min_element(p.begin(), p.end());
  if (worst < -kJointTolerance) {
    throw Error(ErrorCode::JointInconsistency,
                "moments (alpha=" + fmt_double(alpha) + ", beta=" + fmt_double(beta) +
                    ", gamma=" + fmt_double(gamma) + ") admit no joint distribution; entry " +
                    fmt_double(worst));
  }
  JointResult result;
  if (worst < 0.0) {
    double total = 0.0;
    for (double& v : p) {
      if (v < 0.0) {
        result.clamped += -v;
        v = 0.0;
      }
      total += v;
    }
    for (double& v : p) v /= total;
  }
  result.p = {p[0], p[1], p[2], p[3]};
  return result;
}

Outcome sample_from(const Joint4& joint, RandomStream& rng) noexcept {
  const double u = rng.uniform();
  double acc = joint.p_pp;
  if (u < acc) return {1, 1};
  acc += joint.p_pm;
  if (u < acc) return {1, -1};
  acc += joint.p_mp;
  if (u < acc) return {-1, 1};
  if (joint.p_mm > 0.0) return {-1, -1};
  // Rounding left u above the last nonzero cumulative entry.
  if (joint.p_mp > 0.0) return {-1, 1};
  if (joint.p_pm > 0.0) return {1, -1};
  return {1, 1};
}

Outcome sample_pair(Version version, const ModelParams& params, const Direction& a,
                    const Direction& b, const HiddenSource& lam, RandomStream& rng) {
  const CondExpectations c = cond_expectations(version, params, a, b, lam);
  return sample_from(joint_pmf(c, params.theta).p, rng);
}

std::vector<HiddenSource> sample_lambda(RandomStream& rng, std::size_t batch_size) {
  if (batch_size % 2 != 0) {
    throw Error(ErrorCode::OddBatch,
                "lambda batches are antithetic pairs; got batch size " + std::to_string(batch_size));
  }
  std::vector<HiddenSource> batch;
  batch.reserve(batch_size);
  double time = 0.0;
  auto next_time = [&] {
    // Exponential gaps with a 1 us mean plus a floor keep times strictly increasing.
    time += 1e-6 * -std::log1p(-rng.uniform()) + 1e-9;
    return time;
  };
  for (std::size_t i = 0; i < batch_size; i += 2) {
    const int first = rng.sign();
    HiddenSource s1{first, next_time(), rng.next_u64()};
    HiddenSource s2{-first, next_time(), rng.next_u64()};
    batch.push_back(s1);
    batch.push_back(s2);
  }
  return batch;
}

}  // namespace hpaudit
