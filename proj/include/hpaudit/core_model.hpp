#pragma once

// Closed-form probability engine for the two published variants of the
// Hess-Philipp hidden-variable model, plus the singlet-state reference.
//
// Everything the detectors contribute has already been integrated out, so
// the model is fully described by the conditional moments
//   E_lambda(A), E_lambda(B), E_lambda(AB)
// as functions of the settings a, b and the source sign r(lambda).

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hpaudit/random_stream.hpp"

namespace hpaudit {

using Vec3 = std::array<double, 3>;

/// Unit vector in R^3 (a detector setting).
class Direction {
 public:
  /// Normalizes v; throws Error(ZeroVector) when |v| < 1e-12.
  static Direction from_vector(const Vec3& v);

  double x() const noexcept { return v_[0]; }
  double y() const noexcept { return v_[1]; }
  double z() const noexcept { return v_[2]; }
  const Vec3& components() const noexcept { return v_; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  explicit Direction(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

Direction make_direction(const Vec3& v);

/// Componentwise absolute value |a| of a setting.
struct AbsVector {
  Vec3 c{};
  double operator[](std::size_t i) const noexcept { return c[i]; }
};

AbsVector abs(const Direction& d) noexcept;

double dot(const Direction& a, const Direction& b) noexcept;
double dot(const Direction& a, const AbsVector& b) noexcept;
double dot(const AbsVector& a, const Direction& b) noexcept;
double dot(const AbsVector& a, const AbsVector& b) noexcept;

enum class Version { V1 = 1, V2 = 2 };

Version version_from_int(int v);

/// How the unknown remainder theta in [0, 1] of E_lambda(A) is resolved.
struct ThetaPolicy {
  enum class Kind { Lower, Upper, Fixed };

  Kind kind = Kind::Lower;
  double t = 0.0;

  static ThetaPolicy lower() noexcept { return {Kind::Lower, 0.0}; }
  static ThetaPolicy upper() noexcept { return {Kind::Upper, 1.0}; }
  static ThetaPolicy fixed(double t);

  /// Parses "lower", "upper" or "fixed:<t>".
  static ThetaPolicy parse(const std::string& text);
  std::string to_string() const;

  double theta() const noexcept;
};

/// Closed interval. When produced from the theta remainder, theta = 0 sits at
/// `lo` unless `theta_descending` is set (the interval was negated by r = -1).
struct BoundedValue {
  double lo = 0.0;
  double hi = 0.0;
  bool theta_descending = false;

  static BoundedValue exact(double v) noexcept { return {v, v, false}; }
  double width() const noexcept { return hi - lo; }
  bool contains(double v, double tol = 0.0) const noexcept {
    return v >= lo - tol && v <= hi + tol;
  }
};

/// Value of the interval at the policy's theta.
double resolve(const BoundedValue& v, const ThetaPolicy& policy) noexcept;

struct ModelParams {
  int n = 4;
  ThetaPolicy theta = ThetaPolicy::lower();

  /// Throws Error(InvalidParams) unless n >= 2, n even and theta valid.
  void validate() const;

  /// 1 / (16 n^2), the width of the E_lambda(A) interval.
  double remainder() const noexcept;
};

/// Hidden state of an emitted pair.
struct HiddenSource {
  int r = 1;
  double emission_time = 0.0;
  std::uint64_t seed_tag = 0;

  friend bool operator==(const HiddenSource&, const HiddenSource&) = default;
};

/// alpha = E_lambda(A) (interval), beta = E_lambda(B), gamma = E_lambda(AB).
struct CondExpectations {
  BoundedValue alpha;
  double beta = 0.0;
  double gamma = 0.0;
};

struct ProbPair {
  double p_plus = 0.5;
  double p_minus = 0.5;

  double at(int outcome) const noexcept { return outcome > 0 ? p_plus : p_minus; }
};

/// Joint pmf over (A, B) in {(+,+), (+,-), (-,+), (-,-)}.
struct Joint4 {
  double p_pp = 0.25;
  double p_pm = 0.25;
  double p_mp = 0.25;
  double p_mm = 0.25;

  double at(int a, int b) const noexcept;
  double sum() const noexcept { return p_pp + p_pm + p_mp + p_mm; }
  ProbPair marginal_a() const noexcept { return {p_pp + p_pm, p_mp + p_mm}; }
  ProbPair marginal_b() const noexcept { return {p_pp + p_mp, p_pm + p_mm}; }
  double correlation() const noexcept { return p_pp - p_pm - p_mp + p_mm; }
};

/// Probabilities plus the amount removed by clamping (0 when none fired).
struct MarginalResult {
  ProbPair p;
  double clamped = 0.0;
};

struct JointResult {
  Joint4 p;
  double clamped = 0.0;
};

struct Outcome {
  int a = 1;
  int b = 1;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

CondExpectations cond_expectations(Version version, const ModelParams& params, const Direction& a,
                                   const Direction& b, const HiddenSource& lam);

CondExpectations uncond_expectations(Version version, const ModelParams& params,
                                     const Direction& a, const Direction& b);

/// Singlet-state prediction: zero marginals, correlation -a.b.
CondExpectations qm_reference(const Direction& a, const Direction& b) noexcept;

/// p_(+/-) = (1 +/- e*) / 2 with e* resolved per policy, clamped to [0, 1].
/// Throws Error(ExpectationOutOfRange) if |e*| > 1 + 1/(16 n^2) + 1e-12.
MarginalResult marginal_prob(const BoundedValue& e, const ThetaPolicy& policy, int n);
MarginalResult marginal_prob(double e, int n);

/// Unique pmf on {+1,-1}^2 with first moments (alpha*, beta) and correlation
/// gamma. Entries below -1e-9 throw Error(JointInconsistency); smaller
/// negative dust is clamped to zero and the table renormalized.
JointResult joint_pmf(const CondExpectations& c, const ThetaPolicy& policy);

/// Draws an outcome from a joint pmf using one uniform from the stream.
Outcome sample_from(const Joint4& joint, RandomStream& rng) noexcept;

Outcome sample_pair(Version version, const ModelParams& params, const Direction& a,
                    const Direction& b, const HiddenSource& lam, RandomStream& rng);

/// Antithetic batch of source states: every consecutive pair carries r = +1
/// and r = -1 in random order, emission times strictly increase.
/// Throws Error(OddBatch) for odd batch sizes.
std::vector<HiddenSource> sample_lambda(RandomStream& rng, std::size_t batch_size);

}  // namespace hpaudit
