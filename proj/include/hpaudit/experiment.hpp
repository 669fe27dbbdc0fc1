#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hpaudit/core_model.hpp"
#include "hpaudit/models.hpp"

namespace hpaudit {

/// Empirical moments of (A, B) from sampled runs next to the closed form.
struct MomentEstimate {
  Direction a = make_direction({1.0, 0.0, 0.0});
  Direction b = make_direction({1.0, 0.0, 0.0});
  std::uint64_t trials = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_ab = 0.0;
  CondExpectations exact;
  /// E(A) resolved with the theta policy used for sampling.
  double exact_a = 0.0;
  /// Binomial standard errors sqrt((1 - mu^2) / trials) at the exact means.
  double se_a = 0.0;
  double se_b = 0.0;
  double se_ab = 0.0;
  double z_a = 0.0;
  double z_b = 0.0;
  double z_ab = 0.0;
};

/// Samples `trials` runs: source states come from the antithetic sampler in
/// fixed-size chunks, each chunk with its own counter-based stream
/// (seed, stream, chunk), and outcomes from the model's conditional joint.
/// The result is independent of `threads`.
MomentEstimate estimate_moments(const HiddenVariableModel& model, const Direction& a,
                                const Direction& b, std::uint64_t trials, std::uint64_t seed,
                                std::uint64_t stream, const ThetaPolicy& theta,
                                unsigned threads = 1);

/// `count` setting pairs drawn uniformly on the sphere.
std::vector<std::pair<Direction, Direction>> random_setting_pairs(std::uint64_t seed,
                                                                  std::size_t count);

}  // namespace hpaudit
