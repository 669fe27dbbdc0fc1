#include "hpaudit/experiment.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hpaudit/error.hpp"
#include "hpaudit/parallel.hpp"

namespace hpaudit {

namespace {

constexpr std::uint64_t kChunk = 4096;

struct Sums {
  long long a = 0;
  long long b = 0;
  long long ab = 0;
};

double z_score(double empirical, double exact, double se) {
  const double diff = empirical - exact;
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

double binomial_se(double mean, double trials) {
  return std::sqrt(std::max(0.0, 1.0 - mean * mean) / trials);
}

}  // namespace

MomentEstimate estimate_moments(const HiddenVariableModel& model, const Direction& a,
                                const Direction& b, std::uint64_t trials, std::uint64_t seed,
                                std::uint64_t stream, const ThetaPolicy& theta,
                                unsigned threads) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");

  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Sums> sums(chunks);
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    RandomStream rng(seed, stream, chunk);
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t len = std::min(trials, begin + kChunk) - begin;
    const auto lambdas = sample_lambda(rng, static_cast<std::size_t>(len + len % 2));
    Sums& s = sums[chunk];
    for (std::uint64_t i = 0; i < len; ++i) {
      const Outcome o = sample_from(model.cond_joint(a, b, lambdas[i]).p, rng);
      s.a += o.a;
      s.b += o.b;
      s.ab += o.a * o.b;
    }
  });

  Sums total;
  for (const auto& s : sums) {
    total.a += s.a;
    total.b += s.b;
    total.ab += s.ab;
  }
  const double n = static_cast<double>(trials);
  MomentEstimate m;
  m.a = a;
  m.b = b;
  m.trials = trials;
  m.mean_a = static_cast<double>(total.a) / n;
  m.mean_b = static_cast<double>(total.b) / n;
  m.mean_ab = static_cast<double>(total.ab) / n;
  m.exact = model.uncond_moments(a, b);
  m.exact_a = resolve(m.exact.alpha, theta);
  m.se_a = binomial_se(m.exact_a, n);
  m.se_b = binomial_se(m.exact.beta, n);
  m.se_ab = binomial_se(m.exact.gamma, n);
  m.z_a = z_score(m.mean_a, m.exact_a, m.se_a);
  m.z_b = z_score(m.mean_b, m.exact.beta, m.se_b);
  m.z_ab = z_score(m.mean_ab, m.exact.gamma, m.se_ab);
  return m;
}

std::vector<std::pair<Direction, Direction>> random_setting_pairs(std::uint64_t seed,
                                                                  std::size_t count) {
  RandomStream rng(seed, 0x5E77);
  auto draw = [&] {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return make_direction({rho * std::cos(phi), rho * std::sin(phi), z});
  };
  std::vector<std::pair<Direction, Direction>> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Direction a = draw();
    const Direction b = draw();
    pairs.emplace_back(a, b);
  }
  return pairs;
}

}  // namespace hpaudit
