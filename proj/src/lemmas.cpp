#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fracop/error.hpp"
#include "fracop/singquad.hpp"

namespace fracop {

namespace {

constexpr std::size_t kEarlyDraws = 10000;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  // Random direction in R^n scaled to the given length.
  Point vector(int n, double length) {
    Point p{0.0, 0.0, 0.0};
    if (n == 1) {
      p[0] = uniform(0.0, 1.0) < 0.5 ? -length : length;
      return p;
    }
    double t = uniform(0.0, 2.0 * std::numbers::pi);
    p[0] = length * std::cos(t);
    p[1] = length * std::sin(t);
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

double norm(const Point& a, int n) { return distance(a, Point{0.0, 0.0, 0.0}, n); }

Point add(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

class MaxTracker {
 public:
  explicit MaxTracker(const char* name) { out_.name = name; }

  void add(double lhs, double rhs) {
    ++out_.draws;
    if (!(rhs > 0.0)) {
      ++out_.skipped;
    } else {
      double ratio = lhs / rhs;
      if (!std::isfinite(ratio)) finite_ = false;
      else out_.empirical_constant = std::max(out_.empirical_constant, ratio);
    }
    if (out_.draws == kEarlyDraws) out_.constant_at_1e4 = out_.empirical_constant;
  }

  LemmaSample finish() {
    if (out_.draws < kEarlyDraws) out_.constant_at_1e4 = out_.empirical_constant;
    out_.finite = finite_ && std::isfinite(out_.empirical_constant);
    out_.growth = out_.constant_at_1e4 > 0.0 ? out_.empirical_constant / out_.constant_at_1e4 : 1.0;
    return out_;
  }

 private:
  LemmaSample out_;
  bool finite_ = true;
};

}  // namespace

LemmaSample sample_fundamental_theorem(std::uint64_t seed, std::size_t draws) {
  if (draws == 0) throw ParamError("sample_fundamental_theorem: draws must be positive");
  Sampler rng(seed);
  MaxTracker track("fundamental_theorem");
  for (std::size_t k = 0; k < draws; ++k) {
    int n = rng.uniform(0.0, 1.0) < 0.5 ? 1 : 2;
    double r = rng.uniform(-3.0, 3.0);
    double sigma = rng.uniform(0.0, 1.0);
    double ma = rng.log_uniform(1e-3, 1e3);
    Point a = rng.vector(n, ma);
    Point b;
    double mb, dab;
    do {
      // Half the draws sit near the admissible edge |a - b| = min(|a|, |b|), where the ratio peaks.
      double rho = rng.uniform(0.0, 1.0) < 0.5 ? rng.log_uniform(1e-8, 1.0) : rng.uniform(0.5, 1.0);
      b = add(a, rng.vector(n, rho * ma));
      mb = norm(b, n);
      dab = distance(a, b, n);
    } while (!(mb > 0.0) || dab > std::min(ma, mb));
    double lhs = std::fabs(stable_power_diff(a, b, r, n));
    double rhs = std::pow(dab, sigma) * std::min(std::pow(ma, r - sigma), std::pow(mb, r - sigma));
    track.add(lhs, rhs);
  }
  return track.finish();
}

LemmaSample sample_mean_value(int which_case, std::uint64_t seed, std::size_t draws) {
  if (which_case != 1 && which_case != 2) throw ParamError("sample_mean_value: case must be 1 or 2");
  if (draws == 0) throw ParamError("sample_mean_value: draws must be positive");
  Sampler rng(seed);
  MaxTracker track(which_case == 1 ? "mean_value_case1" : "mean_value_case2");
  for (std::size_t k = 0; k < draws; ++k) {
    int n = rng.uniform(0.0, 1.0) < 0.5 ? 1 : 2;
    double s = rng.uniform(0.05, 0.95);
    double alpha = rng.uniform(0.0, 1.0);
    double sigma = rng.uniform(0.0, 1.0);
    Point a, b, h, ah, bh;
    double ma, mb, mh, mah, mbh;
    for (;;) {
      ma = rng.log_uniform(1e-2, 1e2);
      a = rng.vector(n, ma);
      // Near pairs, independent pairs, and pairs of almost equal length (the extremal corner).
      double mode = rng.uniform(0.0, 1.0);
      if (mode < 1.0 / 3.0) b = add(a, rng.vector(n, rng.log_uniform(1e-6, 1.0) * ma));
      else if (mode < 2.0 / 3.0) b = rng.vector(n, rng.log_uniform(1e-2, 1e2));
      else b = rng.vector(n, ma * (1.0 + rng.log_uniform(1e-6, 1.0)));
      mb = norm(b, n);
      double m = std::min(ma, mb);
      mh = which_case == 1 ? 0.5 * m * rng.log_uniform(1e-4, 1.0) : 0.5 * m * rng.log_uniform(1.0, 1e4);
      h = rng.vector(n, mh);
      ah = add(a, h);
      bh = add(b, h);
      mah = norm(ah, n);
      mbh = norm(bh, n);
      if (!(mb > 0.0 && mah > 0.0 && mbh > 0.0)) continue;
      bool near = mh < 0.5 * std::min(ma, mb) || mh < 0.5 * std::min(mah, mbh);
      bool far = mh > 0.5 * std::min(ma, mb) && mh > 0.5 * std::min(mah, mbh);
      if (which_case == 1 ? near : far) break;
    }
    const double r = s - n, ra = s - alpha - n;
    double lhs, rhs;
    double shifted_low = std::fabs(stable_power_diff(ah, bh, ra, n));
    double plain_low = std::fabs(stable_power_diff(a, b, ra, n));
    double ha = std::pow(mh, alpha);
    if (which_case == 1) {
      lhs = std::fabs(stable_power_diff(ah, bh, r, n) - stable_power_diff(a, b, r, n));
      double tail = std::min(std::pow(ma, ra - sigma), std::pow(mb, ra - sigma)) * std::pow(distance(a, b, n), sigma);
      rhs = ha * (shifted_low + plain_low) + ha * tail;
    } else {
      lhs = std::fabs(stable_power_diff(ah, bh, r, n)) + std::fabs(stable_power_diff(a, b, r, n));
      rhs = ha * shifted_low + ha * plain_low;
    }
    track.add(lhs, rhs);
  }
  return track.finish();
}

}  // namespace fracop
