#pragma once

#include <string>
#include <vector>

#include "hpaudit/core_model.hpp"

namespace hpaudit {

/// Finite set of detector settings that audits range over.
struct SettingGrid {
  std::vector<Direction> directions;
  std::string descriptor;

  std::size_t size() const noexcept { return directions.size(); }

  /// The six signed coordinate axes.
  static SettingGrid axes();
  /// All 26 nonzero points of {-1,0,1}^3, normalized.
  static SettingGrid cube26();
  /// `count` near-uniform points on the sphere (golden-angle spiral).
  static SettingGrid fibonacci(std::size_t count);
  static SettingGrid explicit_list(std::vector<Direction> dirs);
  /// Six signed axes, the planar 45/135 degree settings used by CHSH, then
  /// 16 Fibonacci points; duplicates removed.
  static SettingGrid standard();

  /// Parses "standard", "axes", "cube26", "fibonacci:<count>" or
  /// "list:x,y,z;x,y,z;...". Throws Error(InvalidArgument) on bad input.
  static SettingGrid parse(const std::string& text);

  /// Throws Error(InvalidArgument) when fewer than two settings are present.
  void validate() const;
};

}  // namespace hpaudit
