#include "fracop/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/special_functions/zeta.hpp>

#include "fracop/error.hpp"
#include "fracop/nonlocal.hpp"
#include "fracop/parallel.hpp"

namespace fracop {

ExponentFit fit_decay_exponent(const std::vector<std::pair<double, double>>& sweep, double target_slope,
                               double tolerance) {
  if (sweep.size() < 4) throw ParamError("fit_decay_exponent: need at least 4 sweep points");
  double dmin = INFINITY, dmax = 0.0;
  ExponentFit fit;
  fit.target_slope = target_slope;
  fit.tolerance = tolerance;
  for (auto [d, v] : sweep) {
    if (!(d > 0.0)) throw DomainError("fit_decay_exponent: sweep abscissae must be positive");
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("fit_decay_exponent: values must be positive and finite");
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    fit.points.emplace_back(std::log(d), std::log(v));
  }
  if (dmax < 10.0 * dmin * (1.0 - 1e-12)) throw ParamError("fit_decay_exponent: sweep must span at least one decade");
  const double m = static_cast<double>(fit.points.size());
  double sx = 0, sy = 0;
  for (auto [x, y] : fit.points) {
    sx += x;
    sy += y;
  }
  double mx = sx / m, my = sy / m, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (auto [x, y] : fit.points) {
    double r = y - (fit.intercept + fit.slope * x);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.pass = std::fabs(fit.slope - target_slope) <= tolerance;
  return fit;
}

double gagliardo_seminorm(const Field& f, double s, double p, const QuadConfig& cfg) {
  if (!(s > 0.0 && s < 1.0)) throw ParamError("gagliardo_seminorm: s must lie in (0, 1)");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParamError("gagliardo_seminorm: p must lie in [1, inf)");
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericError("gagliardo_seminorm: non-finite sample");
  const int n = f.grid.n;
  if (p == 2.0) {
    FracParams fp{n, s, s, s};
    double e = bilinear_form(constant_kernel(1.0), fp, f, f, cfg);
    return std::sqrt(std::max(e, 0.0));
  }
  const double beta = s * p;
  if (beta == 2.0) throw ParamError("gagliardo_seminorm: s*p = 2 is not supported for p != 2");
  LatticeKernel lk(f.grid, beta, 0.0);
  const GridSpec& g = f.grid;
  const std::size_t N = g.points, total = g.size();
  const auto& W = lk.weights();
  double sum = deterministic_sum(total, [&](std::size_t i) {
    auto ii = g.unflatten(i);
    double acc = 0.0;
    for (std::size_t r = 1; r < total; ++r) {
      auto rr = g.unflatten(r);
      std::array<std::size_t, kMaxDim> jj{0, 0, 0};
      for (int a = 0; a < n; ++a) jj[a] = (ii[a] + rr[a]) % N;
      acc += W[r] * std::pow(std::fabs(f[i] - f[g.flatten(jj)]), p);
    }
    return acc;
  });
  sum *= g.cell_volume();
  if (n == 1) {
    // Remove the zeta-regularised lattice sum of the leading |f'|^p |z|^{p−1−sp} term.
    const double h = g.spacing();
    double grad = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double d = (f[(i + 1) % N] - f[(i + N - 1) % N]) / (2.0 * h);
      grad += std::pow(std::fabs(d), p);
    }
    grad *= h;
    sum -= grad * std::pow(h, p - beta) * 2.0 * boost::math::zeta(1.0 + beta - p);
  }
  return std::pow(std::max(sum, 0.0), 1.0 / p);
}

OpNormEstimate estimate_opnorm_L2(const CoeffKernel& K, const FracParams& p, const GridSpec& grid,
                                  const QuadConfig& cfg, int iters, std::uint64_t seed) {
  if (iters < 8) throw ParamError("estimate_opnorm_L2: iters must be >= 8");
  if (grid.n != p.n) throw DomainError("estimate_opnorm_L2: grid dimension differs from n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Field v(grid, "power-iterate");
  for (double& x : v.values) x = normal(rng);
  v = remove_mean(v);
  v = scaled(v, 1.0 / field_norms(v, 2.0));
  FracParams adj{p.n, p.s, p.s2, p.s1};
  OpNormEstimate est;
  for (int k = 0; k < iters; ++k) {
    Field w = apply_T_composite(K, p, v, cfg);
    Field x = remove_mean(apply_T_composite(K, adj, w, cfg));
    double lambda = inner(v, x);
    est.history.push_back(std::sqrt(std::max(lambda, 0.0)));
    double nx = field_norms(x, 2.0);
    if (nx == 0.0) {
      est.value = 0.0;
      return est;
    }
    v = scaled(x, 1.0 / nx);
  }
  std::size_t m = est.history.size();
  double last = est.history[m - 1], prev = est.history[m - 2];
  if (std::fabs(last - prev) > 0.1 * std::max(last, prev))
    throw NumericError("estimate_opnorm_L2: Rayleigh quotient still oscillating (" + format_double(prev) + " -> " +
                       format_double(last) + ")");
  est.value = last;
  return est;
}

double bmo_seminorm(const Field& f) {
  const GridSpec& g = f.grid;
  const int n = g.n;
  const std::size_t N = g.points;
  double best = 0.0;
  for (std::size_t side = 2; side <= N; side *= 2) {
    std::size_t per_axis = N / side, cubes = 1, cells = 1;
    for (int a = 0; a < n; ++a) {
      cubes *= per_axis;
      cells *= side;
    }
    std::vector<double> osc(cubes);
    parallel_for(cubes, [&](std::size_t c) {
      std::array<std::size_t, kMaxDim> corner{0, 0, 0};
      std::size_t rem = c;
      for (int a = n - 1; a >= 0; --a) {
        corner[a] = (rem % per_axis) * side;
        rem /= per_axis;
      }
      auto cell_index = [&](std::size_t t) {
        std::array<std::size_t, kMaxDim> idx{0, 0, 0};
        for (int a = n - 1; a >= 0; --a) {
          idx[a] = corner[a] + t % side;
          t /= side;
        }
        return g.flatten(idx);
      };
      double m = 0.0;
      for (std::size_t t = 0; t < cells; ++t) m += f[cell_index(t)];
      m /= static_cast<double>(cells);
      double dev = 0.0;
      for (std::size_t t = 0; t < cells; ++t) dev += std::fabs(f[cell_index(t)] - m);
      osc[c] = dev / static_cast<double>(cells);
    });
    for (double o : osc) best = std::max(best, o);
  }
  return best;
}

double weak_l1_quasinorm(const Field& f) {
  std::vector<double> mags(f.values.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::fabs(f[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double hn = f.grid.cell_volume();
  double best = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    if (k + 1 < mags.size() && mags[k + 1] == mags[k]) continue;
    // Left limit at λ = mags[k]: every sample with |f| ≥ λ counts.
    best = std::max(best, mags[k] * hn * static_cast<double>(k + 1));
  }
  return best;
}

}  // namespace fracop
