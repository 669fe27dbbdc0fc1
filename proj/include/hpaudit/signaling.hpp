#pragma once

// Superluminal signaling protocols built on the closed-form station-2
// marginals.
//
// Alice encodes bit 0 as a = (1,0,0) and bit 1 as a = (0,1,0); Bob always
// measures b = (-1,0,0) on k pairs and decodes bit 0 iff all k outcomes are
// +1. In version 2 each pair carries its own source sign r, which a third
// party discloses to Bob; Bob multiplies each outcome by r before decoding.

#include <array>
#include <cstdint>

#include "hpaudit/core_model.hpp"

namespace hpaudit {

struct ChannelConfig {
  int version = 1;
  int k = 1;
  std::uint64_t trials = 1;
  double prior_bit1 = 0.5;
  std::uint64_t seed = 0;
  /// Diagnostic: Bob does not learn r and decodes the raw outcomes.
  bool withhold_r = false;
  ModelParams params;

  /// Throws Error(InvalidArgument) on k < 1, trials < 1 or a prior outside [0, 1].
  void validate() const;
};

struct ChannelReport {
  ChannelConfig config;
  double empirical_error_rate = 0.0;
  double analytic_error_rate = 0.0;
  /// sqrt(p (1 - p) / trials) at the analytic error rate.
  double standard_error = 0.0;
  double z_score = 0.0;
  /// confusion[sent][decoded]
  std::array<std::array<std::uint64_t, 2>, 2> confusion{};
  /// Decoded outcomes observed by Bob while bit 0 was being sent.
  std::uint64_t bit0_outcomes = 0;
  std::uint64_t bit0_plus_outcomes = 0;
  std::uint64_t errors() const noexcept { return confusion[0][1] + confusion[1][0]; }
};

/// prior_bit1 * 2^-k: only bit 1 can be misread, and only when all k of its
/// fair outcomes come up +1.
double analytic_error(int k, double prior_bit1);

/// Error of the same decoder when r is withheld in version 2: the raw
/// outcomes are fair coins under both bits, so bit 0 is misread unless all
/// k come up +1.
double analytic_error_withheld(int k, double prior_bit1);

ChannelReport run_protocol(const ChannelConfig& cfg, unsigned threads = 1);

/// Mutual information (bits) between sent and decoded bit from a confusion table.
double mutual_information(const std::array<std::array<std::uint64_t, 2>, 2>& confusion);

}  // namespace hpaudit
