#pragma once

// Shared fixtures for the test binaries: the example systems and closed-form
// flows used as independent oracles.

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arcert/config.hpp"
#include "arcert/dynamics.hpp"

namespace testing_support {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline arcert::SystemConfig load_config(const std::string& name) {
  return arcert::parse_config(read_file(std::string(ARCERT_CONFIG_DIR) + "/" + name + ".cfg"));
}

inline arcert::MapConfig map_config(const arcert::SystemConfig& cfg) {
  return arcert::resolve(cfg).map_config(cfg);
}

inline arcert::BoxMapGraph build(const arcert::SystemConfig& cfg) {
  return arcert::build_graph(map_config(cfg));
}

/// Cells (of the set's grid) containing the point.
inline bool point_in_set(const arcert::BoxSet& set, const std::vector<double>& x) {
  for (auto id : set.grid().cells_containing(x)) {
    if (set.contains(id)) return true;
  }
  return false;
}

// ---- closed-form flows ----------------------------------------------------

/// A sampled solution: whether it stays in the domain on [0, t] and x(t).
struct Sample {
  bool stays = false;
  std::vector<double> end;
  bool undecided = false;  // grazes the boundary too closely to classify
};

/// x' = 1 on [lo, hi].
inline Sample translation_flow(double x0, double t, double lo, double hi) {
  const double x = x0 + t;
  return {x0 >= lo && x <= hi, {x}};
}

/// Switching example: x' = 0 for x < 0, x' in [0, 1] at 0, x' = 1 - x for x > 0.
/// From x0 = 0 a solution may rest for any dwell time before leaving.
inline Sample switching_flow(double x0, double t, double dwell) {
  if (x0 < 0.0) return {true, {x0}};
  if (x0 == 0.0) {
    if (t <= dwell) return {true, {0.0}};
    return {true, {1.0 - std::exp(-(t - dwell))}};
  }
  return {true, {1.0 - (1.0 - x0) * std::exp(-t)}};
}

/// x' = x^2 + lambda, lambda >= 0, on [-1, 1]; solutions increase.
inline Sample quadratic_flow(double x0, double t, double lambda) {
  double x;
  if (lambda == 0.0) {
    if (x0 * t >= 1.0) return {false, {}};
    x = x0 / (1.0 - x0 * t);
  } else {
    const double s = std::sqrt(lambda);
    const double arg = s * t + std::atan(x0 / s);
    if (arg >= M_PI / 2) return {false, {}};
    x = s * std::tan(arg);
  }
  return {x <= 1.0, {x}};
}

/// r' = r (a - r^2) with a = 1 + lambda, theta' = 1.
inline std::vector<double> circle_point(double x0, double y0, double t, double lambda) {
  const double a = 1.0 + lambda;
  const double r0sq = x0 * x0 + y0 * y0;
  if (r0sq == 0.0) return {0.0, 0.0};
  const double e = std::exp(2.0 * a * t);
  const double rsq = a * r0sq * e / (a + r0sq * (e - 1.0));
  const double r = std::sqrt(rsq);
  const double th = std::atan2(y0, x0) + t;
  return {r * std::cos(th), r * std::sin(th)};
}

/// Follows the path through [-half, half]^2 at fine time samples. A sample
/// outside proves the exit; paths that only come within the sampling margin
/// of the boundary are left undecided.
inline Sample circle_flow(double x0, double y0, double t, double lambda, double half) {
  const int steps = 1000;
  const double margin = 1e-3;
  bool close = false;
  for (int k = 0; k <= steps; ++k) {
    const auto p = circle_point(x0, y0, t * k / steps, lambda);
    const double m = std::max(std::fabs(p[0]), std::fabs(p[1]));
    if (m > half) return {false, {}};
    close = close || m > half - margin;
  }
  if (close) return {false, {}, true};
  return {true, circle_point(x0, y0, t, lambda)};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace testing_support
