#include <cmath>

#include "fracop/error.hpp"
#include "fracop/parallel.hpp"
#include "fracop/singquad.hpp"
#include "fracop/special.hpp"

namespace fracop {

namespace {

// Signed offset of index r on a periodic axis of N points, in [−N/2, N/2).
long wrapped(std::size_t r, std::size_t N) {
  long v = static_cast<long>(r);
  return v < static_cast<long>(N / 2) ? v : v - static_cast<long>(N);
}

}  // namespace

LatticeKernel::LatticeKernel(const GridSpec& g, double beta, double trunc_radius)
    : grid_(g), beta_(beta), trunc_(trunc_radius > 0.0 ? trunc_radius : 0.0) {
  if (!(beta > 0.0) || beta == 2.0 || !std::isfinite(beta)) throw ParamError("lattice rule: need beta > 0, beta != 2");
  const int n = g.n;
  const double h = g.spacing(), L = g.extent, period = 2.0 * L;
  const double p = n + beta;
  const double hn = g.cell_volume();
  weights_.assign(g.size(), 0.0);

  int mmax;
  if (trunc_ > 0.0) {
    mmax = static_cast<int>(std::ceil(trunc_ / period)) + 1;
  } else {
    mmax = n == 1 ? 0 : (n == 2 ? 12 : 4);
  }
  const double far_tail =
      (trunc_ > 0.0 || n == 1) ? 0.0 : std::pow(period, -p) * std::pow(mmax + 0.5, -beta) * cube_exterior_moment(n, beta);

  parallel_for(g.size(), [&](std::size_t flat) {
    if (flat == 0) return;
    auto idx = g.unflatten(flat);
    Point z{0, 0, 0};
    for (int a = 0; a < n; ++a) z[a] = wrapped(idx[a], g.points) * h;
    double w = 0.0;
    if (trunc_ <= 0.0 && n == 1) {
      double t = std::fabs(z[0]) / period;
      w = std::pow(period, -p) * (hurwitz_zeta(p, t) + hurwitz_zeta(p, 1.0 - t));
    } else {
      int lo = -mmax, hi = mmax;
      int m1lo = n >= 2 ? lo : 0, m1hi = n >= 2 ? hi : 0;
      int m2lo = n >= 3 ? lo : 0, m2hi = n >= 3 ? hi : 0;
      for (int m0 = lo; m0 <= hi; ++m0)
        for (int m1 = m1lo; m1 <= m1hi; ++m1)
          for (int m2 = m2lo; m2 <= m2hi; ++m2) {
            double y0 = z[0] + period * m0, y1 = z[1] + period * m1, y2 = z[2] + period * m2;
            double r = std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
            if (trunc_ > 0.0 && r >= trunc_) continue;
            w += std::pow(r, -p);
          }
      w += far_tail;
    }
    weights_[flat] = hn * w;
  });
  weight_sum_ = pairwise_sum(weights_);
  correction_ = epstein_zeta(n, n + beta - 2.0) * std::pow(h, 2.0 - beta) / n;
  tail_measure_ = trunc_ > 0.0 ? sphere_area(n) * std::pow(trunc_, -beta) / beta : 0.0;
}

Field LatticeKernel::difference_sum(const Field& u) const {
  if (!(u.grid == grid_)) throw DomainError("lattice rule: field grid mismatch");
  const GridSpec& g = grid_;
  const std::size_t N = g.points, total = g.size();
  Field out(g, u.label);
  parallel_for(total, [&](std::size_t i) {
    auto ii = g.unflatten(i);
    double acc = 0.0;
    for (std::size_t r = 1; r < total; ++r) {
      double w = weights_[r];
      if (w == 0.0) continue;
      auto rr = g.unflatten(r);
      std::array<std::size_t, kMaxDim> jj{0, 0, 0};
      for (int a = 0; a < g.n; ++a) jj[a] = (ii[a] + rr[a]) % N;
      acc += w * (u[i] - u[g.flatten(jj)]);
    }
    out[i] = acc;
  });
  return out;
}

double LatticeKernel::pair_sum(const Field& u, const Field& phi) const {
  if (!(u.grid == grid_) || !(phi.grid == grid_)) throw DomainError("lattice rule: field grid mismatch");
  const GridSpec& g = grid_;
  const std::size_t N = g.points, total = g.size();
  double s = deterministic_sum(total, [&](std::size_t i) {
    auto ii = g.unflatten(i);
    double acc = 0.0;
    for (std::size_t r = 1; r < total; ++r) {
      double w = weights_[r];
      if (w == 0.0) continue;
      auto rr = g.unflatten(r);
      std::array<std::size_t, kMaxDim> jj{0, 0, 0};
      for (int a = 0; a < g.n; ++a) jj[a] = (ii[a] + rr[a]) % N;
      std::size_t j = g.flatten(jj);
      acc += w * (u[i] - u[j]) * (phi[i] - phi[j]);
    }
    return acc;
  });
  return s * g.cell_volume();
}

namespace {

std::size_t shifted(const GridSpec& g, std::size_t flat, int axis, long by) {
  auto idx = g.unflatten(flat);
  long N = static_cast<long>(g.points);
  idx[axis] = static_cast<std::size_t>(((static_cast<long>(idx[axis]) + by) % N + N) % N);
  return g.flatten(idx);
}

}  // namespace

Field divergence_form(const Field& u, const std::function<double(const Point&)>& k) {
  const GridSpec& g = u.grid;
  const double h = g.spacing();
  Field out(g, u.label);
  for (int a = 0; a < g.n; ++a) {
    // Edge (i, i+e_a) carries k(x_i + h/2 e_a).
    std::vector<double> edge(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      Point p = g.node(i);
      p[a] += 0.5 * h;
      edge[i] = k(p);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::size_t ip = shifted(g, i, a, 1), im = shifted(g, i, a, -1);
      out[i] += (edge[i] * (u[ip] - u[i]) - edge[im] * (u[i] - u[im])) / (h * h);
    }
  }
  return out;
}

double divergence_form_energy(const Field& u, const Field& phi, const std::function<double(const Point&)>& k) {
  if (!(u.grid == phi.grid)) throw DomainError("divergence_form_energy: grid mismatch");
  const GridSpec& g = u.grid;
  const double h = g.spacing();
  double s = 0.0;
  for (int a = 0; a < g.n; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) {
      Point p = g.node(i);
      p[a] += 0.5 * h;
      std::size_t ip = shifted(g, i, a, 1);
      s += k(p) * (u[ip] - u[i]) * (phi[ip] - phi[i]);
    }
  return s * g.cell_volume() / (h * h);
}

Field laplacian4(const Field& u) {
  const GridSpec& g = u.grid;
  const double h2 = g.spacing() * g.spacing();
  Field out(g, u.label);
  for (int a = 0; a < g.n; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) {
      double v = -u[shifted(g, i, a, 2)] + 16.0 * u[shifted(g, i, a, 1)] - 30.0 * u[i] +
                 16.0 * u[shifted(g, i, a, -1)] - u[shifted(g, i, a, -2)];
      out[i] += v / (12.0 * h2);
    }
  return out;
}

}  // namespace fracop
