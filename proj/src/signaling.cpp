#include "hpaudit/signaling.hpp"

#include <cmath>
#include <vector>

#include "hpaudit/error.hpp"
#include "hpaudit/parallel.hpp"

namespace hpaudit {

namespace {

constexpr std::uint64_t kChunk = 1024;

struct ChunkCounts {
  std::array<std::array<std::uint64_t, 2>, 2> confusion{};
  std::uint64_t bit0_outcomes = 0;
  std::uint64_t bit0_plus_outcomes = 0;
};

}  // namespace

void ChannelConfig::validate() const {
  if (version != 1 && version != 2) {
    throw Error(ErrorCode::InvalidArgument, "version must be 1 or 2");
  }
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "repetition length k must be >= 1");
  if (k > 62) throw Error(ErrorCode::InvalidArgument, "repetition length k must be <= 62");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(prior_bit1 >= 0.0 && prior_bit1 <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "prior_bit1 must lie in [0, 1]");
  }
  params.validate();
}

double analytic_error(int k, double prior_bit1) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "repetition length k must be >= 1");
  return prior_bit1 * std::ldexp(1.0, -k);
}

double analytic_error_withheld(int k, double prior_bit1) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "repetition length k must be >= 1");
  const double all_plus = std::ldexp(1.0, -k);
  return prior_bit1 * all_plus + (1.0 - prior_bit1) * (1.0 - all_plus);
}

ChannelReport run_protocol(const ChannelConfig& cfg, unsigned threads) {
  cfg.validate();
  const Version version = version_from_int(cfg.version);
  const Direction bob = make_direction({-1.0, 0.0, 0.0});
  const std::array<Direction, 2> alice = {make_direction({1.0, 0.0, 0.0}),
                                          make_direction({0.0, 1.0, 0.0})};

  // p(B = +1 | bit, r) from the closed-form station-2 marginal; index r as (r > 0).
  std::array<std::array<double, 2>, 2> p_plus{};
  for (int bit = 0; bit < 2; ++bit) {
    for (int r : {-1, 1}) {
      const HiddenSource lam{r, 0.0, 0};
      const auto c = cond_expectations(version, cfg.params, alice[bit], bob, lam);
      p_plus[bit][r > 0] = marginal_prob(c.beta, cfg.params.n).p.p_plus;
    }
  }
  const bool disclose = version == Version::V2 && !cfg.withhold_r;

  const std::uint64_t chunks = (cfg.trials + kChunk - 1) / kChunk;
  std::vector<ChunkCounts> counts(chunks);
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    RandomStream rng(cfg.seed, 0x5167, chunk);
    ChunkCounts& out = counts[chunk];
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(cfg.trials, begin + kChunk);
    // Each antithetic pair of source states is split across two neighbouring
    // trials, so the k signs seen within one trial are independent fair coins
    // while every pair of trials still averages r to zero.
    const std::size_t batch = 2 * static_cast<std::size_t>(cfg.k);
    std::vector<HiddenSource> lambdas;
    for (std::uint64_t t = begin; t < end; ++t) {
      const std::uint64_t half = (t - begin) % 2;
      if (version == Version::V2 && half == 0) lambdas = sample_lambda(rng, batch);
      const int bit = rng.uniform() < cfg.prior_bit1 ? 1 : 0;
      bool all_plus = true;
      for (int rep = 0; rep < cfg.k; ++rep) {
        const int r = version == Version::V2 ? lambdas[2 * rep + half].r : 1;
        const int outcome = rng.uniform() < p_plus[bit][r > 0] ? 1 : -1;
        const int decoded = disclose ? r * outcome : outcome;
        if (bit == 0) {
          ++out.bit0_outcomes;
          if (decoded > 0) ++out.bit0_plus_outcomes;
        }
        all_plus = all_plus && decoded > 0;
      }
      const int decision = all_plus ? 0 : 1;
      ++out.confusion[bit][decision];
    }
  });

  ChannelReport report;
  report.config = cfg;
  for (const auto& c : counts) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) report.confusion[i][j] += c.confusion[i][j];
    }
    report.bit0_outcomes += c.bit0_outcomes;
    report.bit0_plus_outcomes += c.bit0_plus_outcomes;
  }
  const double trials = static_cast<double>(cfg.trials);
  report.empirical_error_rate = static_cast<double>(report.errors()) / trials;
  report.analytic_error_rate = version == Version::V2 && cfg.withhold_r
                                   ? analytic_error_withheld(cfg.k, cfg.prior_bit1)
                                   : analytic_error(cfg.k, cfg.prior_bit1);
  const double p = report.analytic_error_rate;
  report.standard_error = std::sqrt(p * (1.0 - p) / trials);
  const double diff = report.empirical_error_rate - p;
  report.z_score = report.standard_error > 0.0 ? diff / report.standard_error : 0.0;
  return report;
}

double mutual_information(const std::array<std::array<std::uint64_t, 2>, 2>& confusion) {
  double total = 0.0;
  for (const auto& row : confusion) {
    for (auto v : row) total += static_cast<double>(v);
  }
  if (total == 0.0) return 0.0;
  double mi = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double pij = static_cast<double>(confusion[i][j]) / total;
      if (pij == 0.0) continue;
      const double pi = static_cast<double>(confusion[i][0] + confusion[i][1]) / total;
      const double pj = static_cast<double>(confusion[0][j] + confusion[1][j]) / total;
      mi += pij * std::log2(pij / (pi * pj));
    }
  }
  return mi;
}

}  // namespace hpaudit
