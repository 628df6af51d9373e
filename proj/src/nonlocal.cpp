#include "fracop/nonlocal.hpp"

#include <cmath>
#include <numbers>

#include "fracop/error.hpp"
#include "fracop/parallel.hpp"
#include "fracop/special.hpp"
#include "fracop/spectral.hpp"

namespace fracop {

namespace {

struct Offset {
  std::array<long, kMaxDim> j{0, 0, 0};
  Point z{0, 0, 0};
  double w = 0.0;  // h^n |z|^{−n−β}
};

std::vector<Offset> offsets_within(const GridSpec& g, double beta, double R) {
  const double h = g.spacing();
  const long J = static_cast<long>(std::floor(R / h));
  const double hn = g.cell_volume();
  std::vector<Offset> out;
  long lo1 = g.n >= 2 ? -J : 0, hi1 = g.n >= 2 ? J : 0;
  long lo2 = g.n >= 3 ? -J : 0, hi2 = g.n >= 3 ? J : 0;
  for (long a = -J; a <= J; ++a)
    for (long b = lo1; b <= hi1; ++b)
      for (long c = lo2; c <= hi2; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        Offset o;
        o.j = {a, b, c};
        o.z = {a * h, b * h, c * h};
        double r = std::sqrt(o.z[0] * o.z[0] + o.z[1] * o.z[1] + o.z[2] * o.z[2]);
        if (r >= R) continue;
        o.w = hn * std::pow(r, -(g.n + beta));
        out.push_back(o);
      }
  return out;
}

std::size_t wrap_index(const GridSpec& g, std::size_t i, const std::array<long, kMaxDim>& j) {
  auto idx = g.unflatten(i);
  const long N = static_cast<long>(g.points);
  for (int a = 0; a < g.n; ++a) idx[a] = static_cast<std::size_t>(((static_cast<long>(idx[a]) + j[a]) % N + N) % N);
  return g.flatten(idx);
}

struct Split {
  double k0 = 0.0;
  bool variable = false;
  CoeffKernel rest;  // K − k0
};

Split split_kernel(const CoeffKernel& K) {
  if (!K.symmetric()) throw DomainError("nonlocal operator: kernel '" + K.name() + "' is not symmetric");
  Split s;
  s.k0 = K.midpoint();
  s.variable = !K.is_constant();
  if (s.variable) s.rest = K.affine(1.0, -s.k0);
  return s;
}

void check_finite(const Field& f, const char* who) {
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericError(std::string(who) + ": non-finite input sample");
}

// Σ_z K'(x_i, x_i+z)(u_i − u_{i+z}) h^n |z|^{−n−β} for |z| < R.
Field variable_sum(const CoeffKernel& Kp, const Field& u, const std::vector<Offset>& offs) {
  const GridSpec& g = u.grid;
  Field out(g, u.label);
  parallel_for(g.size(), [&](std::size_t i) {
    Point x = g.node(i);
    double acc = 0.0;
    for (const Offset& o : offs) {
      Point y{x[0] + o.z[0], x[1] + o.z[1], x[2] + o.z[2]};
      acc += o.w * Kp(x, y) * (u[i] - u[wrap_index(g, i, o.j)]);
    }
    out[i] = acc;
  });
  return out;
}

double variable_pair_sum(const CoeffKernel& Kp, const Field& u, const Field& phi, const std::vector<Offset>& offs) {
  const GridSpec& g = u.grid;
  double s = deterministic_sum(g.size(), [&](std::size_t i) {
    Point x = g.node(i);
    double acc = 0.0;
    for (const Offset& o : offs) {
      Point y{x[0] + o.z[0], x[1] + o.z[1], x[2] + o.z[2]};
      std::size_t j = wrap_index(g, i, o.j);
      acc += o.w * Kp(x, y) * (u[i] - u[j]) * (phi[i] - phi[j]);
    }
    return acc;
  });
  return s * g.cell_volume();
}

}  // namespace

Field apply_LK(const CoeffKernel& K, const FracParams& p, const Field& u, const QuadConfig& cfg) {
  if (u.grid.n != p.n) throw DomainError("apply_LK: grid dimension differs from n");
  check_finite(u, "apply_LK");
  Split sp = split_kernel(K);
  const double beta = 2.0 * p.s;
  LatticeKernel lk(u.grid, beta, 0.0);
  Field out = lk.difference_sum(u);
  Field lap = laplacian4(u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sp.k0 * (out[i] + 0.5 * lk.correction() * lap[i]);
  if (sp.variable) {
    auto offs = offsets_within(u.grid, beta, cfg.trunc_radius);
    Field var = variable_sum(sp.rest, u, offs);
    const CoeffKernel& Kp = sp.rest;
    Field div = divergence_form(u, [&](const Point& x) { return Kp(x, x); });
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += var[i] + 0.5 * lk.correction() * div[i];
  }
  for (double& v : out.values) v *= 2.0;
  return out;
}

OperatorResult apply_LK_checked(const CoeffKernel& K, const FracParams& p, const Field& u, const QuadConfig& cfg) {
  OperatorResult r;
  r.value = apply_LK(K, p, u, cfg);
  Field coarse = apply_LK(K, p, subsample(u), cfg);
  Field fine = subsample(r.value);
  for (std::size_t i = 0; i < coarse.size(); ++i) r.est_error = std::max(r.est_error, std::fabs(coarse[i] - fine[i]));
  if (!K.is_constant()) {
    double umax = field_norms(u, INFINITY);
    double rest = 0.5 * (K.upper() - K.lower());
    r.tail_bound = 2.0 * rest * 2.0 * umax * sphere_area(p.n) * std::pow(cfg.trunc_radius, -2.0 * p.s) / (2.0 * p.s);
  }
  return r;
}

double bilinear_form(const CoeffKernel& K, const FracParams& p, const Field& u, const Field& phi,
                     const QuadConfig& cfg) {
  if (!(u.grid == phi.grid)) throw DomainError("bilinear_form: u and phi live on different grids");
  if (u.grid.n != p.n) throw DomainError("bilinear_form: grid dimension differs from n");
  check_finite(u, "bilinear_form");
  check_finite(phi, "bilinear_form");
  Split sp = split_kernel(K);
  const double beta = 2.0 * p.s;
  LatticeKernel lk(u.grid, beta, 0.0);
  double total = sp.k0 * (lk.pair_sum(u, phi) + lk.correction() * inner(laplacian4(u), phi));
  if (sp.variable) {
    auto offs = offsets_within(u.grid, beta, cfg.trunc_radius);
    const CoeffKernel& Kp = sp.rest;
    total += variable_pair_sum(Kp, u, phi, offs) -
             lk.correction() * divergence_form_energy(u, phi, [&](const Point& x) { return Kp(x, x); });
  }
  return total;
}

Field apply_T_composite(const CoeffKernel& K, const FracParams& p, const Field& f, const QuadConfig& cfg) {
  double scale = field_norms(f, INFINITY);
  if (std::fabs(mean(f)) > 1e-10 * std::max(scale, 1e-300) && scale > 0.0)
    throw DomainError("apply_T_composite: input must be mean-zero");
  if (K.is_constant() && K.lower() == 0.0) return Field(f.grid, f.label);
  Field v = apply_multiplier(riesz_potential(p.s1), f);
  Field Lv = apply_LK(K, p, v, cfg);
  Field out = apply_multiplier(riesz_potential(p.s2), Lv);
  for (double& x : out.values) x *= 0.5;
  return out;
}

OperatorResult apply_T_composite_checked(const CoeffKernel& K, const FracParams& p, const Field& f,
                                         const QuadConfig& cfg) {
  OperatorResult r;
  r.value = apply_T_composite(K, p, f, cfg);
  Field coarse = apply_T_composite(K, p, remove_mean(subsample(f)), cfg);
  Field fine = subsample(r.value);
  for (std::size_t i = 0; i < coarse.size(); ++i) r.est_error = std::max(r.est_error, std::fabs(coarse[i] - fine[i]));
  if (!K.is_constant()) {
    // Far-field bound for L_K(I^{s1} f), carried through ½ I^{s2} on the torus
    // where |ξ|^{−s2} ≤ (L/π)^{s2}.
    Field v = apply_multiplier(riesz_potential(p.s1), f);
    double rest = 0.5 * (K.upper() - K.lower());
    double lk_tail = 2.0 * rest * 2.0 * field_norms(v, INFINITY) * sphere_area(p.n) *
                     std::pow(cfg.trunc_radius, -2.0 * p.s) / (2.0 * p.s);
    r.tail_bound = 0.5 * std::pow(f.grid.extent / std::numbers::pi, p.s2) * lk_tail;
  }
  return r;
}

KernelRouteResult apply_T_kernel(const CoeffKernel& K, const FracParams& p, const Field& f,
                                 const std::vector<Point>& points, const QuadConfig& cfg,
                                 std::size_t max_evaluations) {
  if (f.grid.n != p.n) throw DomainError("apply_T_kernel: grid dimension differs from n");
  check_finite(f, "apply_T_kernel");
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f[j] != 0.0) support.push_back(j);
  KernelRouteResult r;
  r.points = points;
  r.value.assign(points.size(), 0.0);
  r.est_error.assign(points.size(), 0.0);
  r.tail_bound.assign(points.size(), 0.0);
  if (support.empty() || (K.is_constant())) return r;
  if (points.size() * support.size() > max_evaluations)
    throw ParamError("apply_T_kernel: " + std::to_string(points.size() * support.size()) +
                     " kernel evaluations exceed the cost guard of " + std::to_string(max_evaluations));
  const double scale = 0.5 * riesz_potential_constant(p.n, p.s1) * riesz_potential_constant(p.n, p.s2) *
                       f.grid.cell_volume();
  for (std::size_t o = 0; o < points.size(); ++o)
    for (std::size_t j : support)
      if (distance(points[o], f.grid.node(j), p.n) == 0.0)
        throw DomainError("apply_T_kernel: output point lies on a support node of f");
  const std::size_t S = support.size();
  std::vector<KernelValue> vals(points.size() * S);
  // eval_A parallelises internally; the outer loop stays sequential.
  for (std::size_t o = 0; o < points.size(); ++o)
    for (std::size_t t = 0; t < S; ++t) vals[o * S + t] = eval_A(K, p, f.grid.node(support[t]), points[o], cfg);
  r.kernel_evaluations = vals.size();
  // Nodes with all-even indices carry the Riemann sum of the grid with
  // spacing 2h; its deviation estimates the discretisation error in w.
  std::vector<char> even(S, 1);
  for (std::size_t t = 0; t < S; ++t) {
    auto idx = f.grid.unflatten(support[t]);
    for (int a = 0; a < p.n; ++a)
      if (idx[a] % 2) even[t] = 0;
  }
  const double coarse_weight = std::ldexp(1.0, p.n);
  for (std::size_t o = 0; o < points.size(); ++o) {
    std::vector<double> v(S), c(S), e(S), tl(S);
    for (std::size_t t = 0; t < S; ++t) {
      double w = scale * f[support[t]];
      v[t] = w * vals[o * S + t].value;
      c[t] = even[t] ? coarse_weight * v[t] : 0.0;
      e[t] = std::fabs(w) * vals[o * S + t].est_error;
      tl[t] = std::fabs(w) * vals[o * S + t].tail_bound;
    }
    r.value[o] = pairwise_sum(v);
    r.est_error[o] = pairwise_sum(e) + std::fabs(r.value[o] - pairwise_sum(c));
    r.tail_bound[o] = pairwise_sum(tl);
  }
  return r;
}

SolveReport neumann_solve(const CoeffKernel& K, const FracParams& p, const Field& g, double tol, int max_iter,
                          const QuadConfig& cfg) {
  if (!(tol > 0.0)) throw ParamError("neumann_solve: tol must be positive");
  if (max_iter < 1) throw ParamError("neumann_solve: max_iter must be >= 1");
  if (!(K.lower() >= 0.0) || !(K.upper() > 0.0)) throw ParamError("neumann_solve: need 0 <= inf K and sup K > 0");
  check_finite(g, "neumann_solve");
  double gmax = field_norms(g, INFINITY);
  if (std::fabs(mean(g)) > 1e-10 * std::max(gmax, 1e-300) && gmax > 0.0)
    throw DomainError("neumann_solve: right-hand side must be mean-zero");

  const double supK = K.upper();
  const double c = frac_laplacian_constant(p.n, 2.0 * p.s);
  CoeffKernel Kt = K.affine(1.0 / supK, -1.0);

  SolveReport rep;
  rep.sup_K = supK;
  rep.calibration = 0.5 * c;
  Field rhs = scaled(apply_multiplier(riesz_potential(p.s2), g), c / (2.0 * supK));
  rep.rhs_norm = field_norms(rhs, 2.0);
  Field v = rhs;
  bool converged = false;
  for (int k = 1; k <= max_iter; ++k) {
    Field next = combine(1.0, rhs, -c, apply_T_composite(Kt, p, v, cfg));
    double res = field_norms(combine(1.0, next, -1.0, v), 2.0);
    rep.residual_history.push_back(res);
    v = std::move(next);
    rep.iterations = k;
    std::size_t m = rep.residual_history.size();
    if (m >= 2 && rep.residual_history[m - 2] > 0.0)
      rep.contraction_est = std::max(rep.contraction_est, res / rep.residual_history[m - 2]);
    if (!std::isfinite(res)) throw ConvergenceError("neumann_solve: non-finite residual", rep.residual_history);
    if (res <= tol * rep.rhs_norm) {
      converged = true;
      break;
    }
    if (k >= 5 && rep.contraction_est >= 1.0)
      throw ConvergenceError("neumann_solve: diverging (contraction estimate " + format_double(rep.contraction_est) +
                                 " >= 1); the coefficient is too far from constant",
                             rep.residual_history);
  }
  if (!converged)
    throw ConvergenceError("neumann_solve: no convergence within " + std::to_string(max_iter) + " iterations",
                           rep.residual_history);
  rep.solution = v;
  rep.u = apply_multiplier(riesz_potential(p.s1), v);
  return rep;
}

}  // namespace fracop
