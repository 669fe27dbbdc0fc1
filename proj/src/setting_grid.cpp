#include "hpaudit/setting_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hpaudit/error.hpp"

namespace hpaudit {

namespace {

void append_unique(std::vector<Direction>& out, const Direction& d) {
  for (const auto& e : out) {
    if (std::fabs(e.x() - d.x()) < 1e-12 && std::fabs(e.y() - d.y()) < 1e-12 &&
        std::fabs(e.z() - d.z()) < 1e-12) {
      return;
    }
  }
  out.push_back(d);
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad number '" + text + "' in grid list");
  }
  return v;
}

}  // namespace

SettingGrid SettingGrid::axes() {
  SettingGrid g;
  g.descriptor = "axes";
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      Vec3 v{0.0, 0.0, 0.0};
      v[axis] = sign;
      g.directions.push_back(make_direction(v));
    }
  }
  return g;
}

SettingGrid SettingGrid::cube26() {
  SettingGrid g;
  g.descriptor = "cube26";
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        g.directions.push_back(make_direction({double(i), double(j), double(k)}));
      }
    }
  }
  return g;
}

SettingGrid SettingGrid::fibonacci(std::size_t count) {
  if (count < 2) {
    throw Error(ErrorCode::InvalidArgument, "fibonacci grid needs at least 2 points");
  }
  SettingGrid g;
  g.descriptor = "fibonacci:" + std::to_string(count);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * double(i) + 1.0) / double(count);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * double(i);
    g.directions.push_back(make_direction({rho * std::cos(phi), rho * std::sin(phi), z}));
  }
  return g;
}

SettingGrid SettingGrid::explicit_list(std::vector<Direction> dirs) {
  SettingGrid g;
  g.descriptor = "list";
  g.directions = std::move(dirs);
  return g;
}

SettingGrid SettingGrid::standard() {
  SettingGrid g;
  g.descriptor = "standard";
  for (const auto& d : axes().directions) append_unique(g.directions, d);
  append_unique(g.directions, make_direction({1.0, 1.0, 0.0}));
  append_unique(g.directions, make_direction({-1.0, 1.0, 0.0}));
  for (const auto& d : fibonacci(16).directions) append_unique(g.directions, d);
  return g;
}

SettingGrid SettingGrid::parse(const std::string& text) {
  if (text == "standard") return standard();
  if (text == "axes") return axes();
  if (text == "cube26") return cube26();
  if (text.rfind("fibonacci:", 0) == 0) {
    const std::string count = text.substr(10);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count.size() || v < 2) {
      throw Error(ErrorCode::InvalidArgument, "bad fibonacci grid size '" + count + "'");
    }
    return fibonacci(static_cast<std::size_t>(v));
  }
  if (text.rfind("list:", 0) == 0) {
    std::vector<Direction> dirs;
    std::stringstream points(text.substr(5));
    std::string point;
    while (std::getline(points, point, ';')) {
      std::stringstream comps(point);
      std::string comp;
      std::vector<double> v;
      while (std::getline(comps, comp, ',')) v.push_back(parse_number(comp));
      if (v.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "grid point '" + point + "' needs 3 components");
      }
      try {
        dirs.push_back(make_direction({v[0], v[1], v[2]}));
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, e.detail());
      }
    }
    SettingGrid g = explicit_list(std::move(dirs));
    g.descriptor = text;
    g.validate();
    return g;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown grid '" + text + "'");
}

void SettingGrid::validate() const {
  if (directions.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a setting grid needs at least two directions");
  }
}

}  // namespace hpaudit
