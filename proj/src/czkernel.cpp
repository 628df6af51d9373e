#include "fracop/czkernel.hpp"

#include <algorithm>
#include <cmath>

#include "fracop/error.hpp"

namespace fracop {

EstimateConfig make_estimate_config(const FracParams& p, double theta, double alpha, double sigma) {
  if (!(theta > 0.0 && theta < 0.1)) throw ParamError("estimate: theta must lie in (0, 1/10)");
  for (double v : {p.s, p.s1, p.s2}) {
    if (!(10.0 * theta < v)) throw ParamError("estimate: need 10*theta < s, s1, s2");
    if (!(v < 1.0 - 10.0 * theta)) throw ParamError("estimate: need s, s1, s2 < 1 - 10*theta");
  }
  if (!(alpha >= 0.0 && alpha < theta / 10.0)) throw ParamError("estimate: alpha must lie in [0, theta/10)");
  if (!(sigma > p.s1 + theta && sigma < 2.0 * p.s)) throw ParamError("estimate: sigma must lie in (s1 + theta, 2s)");
  return {theta, alpha, sigma};
}

EstimateConfig default_estimate_config(const FracParams& p) {
  double lo = std::min({p.s, p.s1, p.s2}), hi = std::max({p.s, p.s1, p.s2});
  double theta = std::min({0.1, lo / 10.0, (1.0 - hi) / 10.0}) * (1.0 - 1e-3);
  double alpha = theta / 20.0;
  double sigma = 0.5 * (p.s1 + theta + 2.0 * p.s);
  return make_estimate_config(p, theta, alpha, sigma);
}

namespace {

Point minus(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

void require_distinct(const Point& z1, const Point& z2, int n, const char* who) {
  if (distance(z1, z2, n) == 0.0) throw DomainError(std::string(who) + ": z1 = z2");
}

void require_box(const QuadConfig& cfg, const Point& z1, const Point& z2, int n) {
  double reach = 0.0;
  for (int a = 0; a < n; ++a) reach = std::max({reach, std::fabs(z1[a]), std::fabs(z2[a])});
  if (cfg.trunc_radius < 4.0 * reach)
    throw ParamError("quad: trunc_radius must be at least 4*max(|z1|,|z2|)");
}

// Far-field decay exponent of the κ-type integrands outside a box of radius R.
double tail_exponent(const FracParams& p) { return std::min<double>(p.n, 2.0 * p.s); }

bool inside(const Point& x, int n, double r) {
  for (int a = 0; a < n; ++a)
    if (std::fabs(x[a]) > r) return false;
  return true;
}

// Bound on the part of ∫∫ κ outside the box from the shell between R/2 and R,
// assuming R^{−p} decay, with a safety factor of 2.
double shell_tail(double full, double half_box, const FracParams& p) {
  double shell = std::fabs(full - half_box);
  return 2.0 * shell / (std::pow(2.0, tail_exponent(p)) - 1.0);
}

}  // namespace

double kernel_integrand(const FracParams& p, const Point& x, const Point& y, const Point& z1, const Point& z2) {
  const int n = p.n;
  double d1 = stable_power_diff(minus(x, z1), minus(y, z1), p.s1 - n, n);
  double d2 = stable_power_diff(minus(x, z2), minus(y, z2), p.s2 - n, n);
  return d1 * d2 * std::pow(distance(x, y, n), -(n + 2.0 * p.s));
}

QuadConfig kernel_quad_config(const CoeffKernel& K, const QuadConfig& base) {
  QuadConfig c = base;
  if (c.jump_lattice == 0.0) c.jump_lattice = K.jump_lattice();
  if (c.max_cell == 0.0) c.max_cell = K.feature_scale();
  return c;
}

KernelValue eval_A(const CoeffKernel& K, const FracParams& p, const Point& z1, const Point& z2, const QuadConfig& cfg,
                   bool center_kernel) {
  const int n = p.n;
  require_distinct(z1, z2, n, "eval_A");
  require_box(cfg, z1, z2, n);
  if (K.is_constant() && (center_kernel || K.lower() == 0.0)) return {};
  CoeffKernel Kc = center_kernel ? K.affine(1.0, -K.midpoint()) : K;
  QuadConfig qc = kernel_quad_config(K, cfg);
  const double half = 0.5 * qc.trunc_radius;
  const double kappa_exp = -(n + 2.0 * p.s);
  Point pts[2] = {z1, z2};
  auto res = integrate_pairs(
      [&](const Point& x, const Point& y, double* out) {
        double d1 = stable_power_diff(minus(x, z1), minus(y, z1), p.s1 - n, n);
        double d2 = stable_power_diff(minus(x, z2), minus(y, z2), p.s2 - n, n);
        double base = d1 * d2 * std::pow(distance(x, y, n), kappa_exp);
        out[0] = Kc(x, y) * base;
        out[1] = std::fabs(base);
        out[2] = inside(x, n, half) && inside(y, n, half) ? out[1] : 0.0;
      },
      3, n, pts, true, qc);
  KernelValue v;
  v.value = res[0].value;
  v.est_error = res[0].est_error;
  v.tail_bound = Kc.sup_norm() * shell_tail(res[1].value, res[2].value, p);
  return v;
}

double eval_kappa(int l, const FracParams& p, const EstimateConfig& est, const Point& x, const Point& y,
                  const Point& z1, const Point& z2) {
  const int n = p.n;
  if (l != 1 && l != 2) throw ParamError("eval_kappa: l must be 1 or 2");
  double xz1 = distance(x, z1, n), yz1 = distance(y, z1, n);
  if (xz1 == 0.0 || yz1 == 0.0 || distance(x, z2, n) == 0.0 || distance(y, z2, n) == 0.0)
    throw DomainError("eval_kappa: x or y coincides with z1 or z2");
  double xy = distance(x, y, n);
  if (xy == 0.0) throw DomainError("eval_kappa: x = y");
  double d2 = std::fabs(stable_power_diff(minus(x, z2), minus(y, z2), p.s2 - n, n));
  if (l == 1) {
    double d1 = std::fabs(stable_power_diff(minus(x, z1), minus(y, z1), p.s1 - est.alpha - n, n));
    return d1 * d2 * std::pow(xy, -(n + 2.0 * p.s));
  }
  double e = p.s1 - est.alpha - est.sigma - n;
  double m = std::min(std::pow(xz1, e), std::pow(yz1, e));
  return m * d2 * std::pow(xy, -(n + 2.0 * p.s - est.sigma));
}

KernelValue eval_M(int l, const CoeffKernel& K, const FracParams& p, const EstimateConfig& est, const Point& z1,
                   const Point& z2, const QuadConfig& cfg) {
  const int n = p.n;
  if (l != 1 && l != 2) throw ParamError("eval_M: l must be 1 or 2");
  require_distinct(z1, z2, n, "eval_M");
  require_box(cfg, z1, z2, n);
  QuadConfig qc = kernel_quad_config(K, cfg);
  const double half = 0.5 * qc.trunc_radius;
  Point pts[2] = {z1, z2};
  auto res = integrate_pairs(
      [&](const Point& x, const Point& y, double* out) {
        double kap = eval_kappa(l, p, est, x, y, z1, z2);
        out[0] = K(x, y) * kap;
        out[1] = kap;
        out[2] = inside(x, n, half) && inside(y, n, half) ? kap : 0.0;
      },
      3, n, pts, true, qc);
  KernelValue v;
  v.value = res[0].value;
  v.est_error = res[0].est_error;
  v.tail_bound = K.sup_norm() * shell_tail(res[1].value, res[2].value, p);
  return v;
}

std::array<KernelValue, 27> region_contributions(int l, const CoeffKernel& K, const FracParams& p,
                                                 const EstimateConfig& est, const Point& z1, const Point& z2,
                                                 const QuadConfig& cfg) {
  const int n = p.n;
  if (l != 1 && l != 2) throw ParamError("region_contribution: l must be 1 or 2");
  require_distinct(z1, z2, n, "region_contribution");
  require_box(cfg, z1, z2, n);
  QuadConfig qc = kernel_quad_config(K, cfg);
  Point pts[2] = {z1, z2};
  auto res = integrate_pairs(
      [&](const Point& x, const Point& y, double* out) {
        std::fill(out, out + 27, 0.0);
        double v = K(x, y) * eval_kappa(l, p, est, x, y, z1, z2);
        RegionLabel r = classify_region(x, y, z1, z2, n);
        for (int i = 0; i < 3; ++i)
          if ((r.a_set >> i) & 1u)
            for (int j = 0; j < 3; ++j)
              if ((r.b_set >> j) & 1u)
                for (int k = 0; k < 3; ++k)
                  if ((r.i_set >> k) & 1u) out[i * 9 + j * 3 + k] = v;
      },
      27, n, pts, true, qc);
  std::array<KernelValue, 27> out{};
  for (int c = 0; c < 27; ++c) out[c] = {res[c].value, res[c].est_error, 0.0};
  return out;
}

KernelValue region_contribution(int i, int j, int k, int l, const CoeffKernel& K, const FracParams& p,
                                const EstimateConfig& est, const Point& z1, const Point& z2, const QuadConfig& cfg) {
  if (i < 1 || i > 3 || j < 1 || j > 3 || k < 1 || k > 3)
    throw ParamError("region_contribution: indices must lie in {1, 2, 3}");
  return region_contributions(l, K, p, est, z1, z2, cfg)[(i - 1) * 9 + (j - 1) * 3 + (k - 1)];
}

}  // namespace fracop
