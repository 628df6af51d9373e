#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "fracop/core.hpp"

namespace testing {

using fracop::Field;
using fracop::GridSpec;
using fracop::Point;

inline double rel_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// Random trigonometric polynomial with modes 1..kmax on each axis, mean zero.
inline Field random_band_limited(const GridSpec& g, int kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const double w = std::numbers::pi / g.extent;
  struct Mode {
    int k[3];
    double a, b;
  };
  std::vector<Mode> modes;
  for (int m = 0; m < 8; ++m) {
    Mode md{{0, 0, 0}, gauss(rng), gauss(rng)};
    std::uniform_int_distribution<int> pick(-kmax, kmax);
    do {
      for (int a = 0; a < g.n; ++a) md.k[a] = pick(rng);
    } while (md.k[0] == 0 && md.k[1] == 0 && md.k[2] == 0);
    modes.push_back(md);
  }
  return fracop::sample(g, [&](const Point& x) {
    double v = 0.0;
    for (const auto& md : modes) {
      double ph = 0.0;
      for (int a = 0; a < g.n; ++a) ph += md.k[a] * w * x[a];
      v += md.a * std::cos(ph) + md.b * std::sin(ph);
    }
    return v;
  });
}

// Smooth bump supported in |x|_inf < r.
inline double bump(const Point& x, int n, double r) {
  double v = 1.0;
  for (int a = 0; a < n; ++a) {
    double t = x[a] / r;
    if (std::fabs(t) >= 1.0) return 0.0;
    v *= std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  return v;
}

}  // namespace testing
