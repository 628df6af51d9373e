#include "fracop/core.hpp"

#include <cmath>
#include <limits>

#include "fracop/error.hpp"

namespace fracop {

FracParams make_params(int n, double s, double s1) {
  if (n < 1 || n > kMaxDim) throw ParamError("make_params: n must be in [1, 3], got " + std::to_string(n));
  if (!(s > 0.0)) throw ParamError("make_params: s must satisfy s > 0, got " + format_double(s));
  if (!(s < 1.0)) throw ParamError("make_params: s must satisfy s < 1, got " + format_double(s));
  if (!(s1 > 0.0)) throw ParamError("make_params: s1 must satisfy s1 > 0, got " + format_double(s1));
  if (!(s1 < 1.0)) throw ParamError("make_params: s1 must satisfy s1 < 1, got " + format_double(s1));
  double s2 = 2.0 * s - s1;
  if (!(s2 > 0.0)) throw ParamError("make_params: s2 = 2s - s1 must satisfy s2 > 0, got " + format_double(s2));
  if (!(s2 < 1.0)) throw ParamError("make_params: s2 = 2s - s1 must satisfy s2 < 1, got " + format_double(s2));
  return FracParams{n, s, s1, s2};
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= points;
  return total;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), n); }

std::array<std::size_t, kMaxDim> GridSpec::unflatten(std::size_t flat) const {
  std::array<std::size_t, kMaxDim> idx{0, 0, 0};
  for (int a = n - 1; a >= 0; --a) {
    idx[a] = flat % points;
    flat /= points;
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<std::size_t, kMaxDim>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < n; ++a) flat = flat * points + idx[a];
  return flat;
}

Point GridSpec::node(std::size_t flat) const {
  auto idx = unflatten(flat);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) p[a] = coord(idx[a]);
  return p;
}

GridSpec make_grid(int n, double extent, std::size_t points) {
  if (n < 1 || n > kMaxDim) throw ParamError("grid: n must be in [1, 3]");
  if (!(extent > 0.0) || !std::isfinite(extent)) throw ParamError("grid: extent must be positive and finite");
  if (points < 2 || (points & (points - 1)) != 0) throw ParamError("grid: points must be a power of two >= 2");
  return GridSpec{n, extent, points};
}

Field::Field(const GridSpec& g, std::string name) : grid(g), values(g.size(), 0.0), label(std::move(name)) {}

Field::Field(const GridSpec& g, std::vector<double> v, std::string name)
    : grid(g), values(std::move(v)), label(std::move(name)) {
  if (values.size() != grid.size()) throw DomainError("field: value count does not match grid");
}

Field sample(const GridSpec& g, const std::function<double(const Point&)>& fn, std::string label) {
  Field f(g, std::move(label));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g.node(i));
  return f;
}

double mean(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return f.values.empty() ? 0.0 : s / static_cast<double>(f.values.size());
}

Field remove_mean(const Field& f) {
  Field out = f;
  double m = mean(f);
  for (double& v : out.values) v -= m;
  return out;
}

static void require_same_grid(const Field& a, const Field& b, const char* who) {
  if (!(a.grid == b.grid)) throw DomainError(std::string(who) + ": fields live on different grids");
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid.cell_volume();
}

Field combine(double a, const Field& x, double b, const Field& y) {
  require_same_grid(x, y, "combine");
  Field out(x.grid, x.label);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

Field scaled(const Field& f, double a) {
  Field out = f;
  for (double& v : out.values) v *= a;
  return out;
}

Field subsample(const Field& f) {
  if (f.grid.points < 4) throw DomainError("subsample: grid too coarse");
  GridSpec coarse{f.grid.n, f.grid.extent, f.grid.points / 2};
  Field out(coarse, f.label);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto idx = coarse.unflatten(i);
    for (int a = 0; a < coarse.n; ++a) idx[a] *= 2;
    out[i] = f[f.grid.flatten(idx)];
  }
  return out;
}

double field_norms(const Field& f, double p) {
  if (!(p >= 1.0)) throw ParamError("field_norms: p must be >= 1");
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericError("field_norms: non-finite sample");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::fabs(v));
    return m;
  }
  double s = 0.0;
  if (p == 2.0) {
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.cell_volume());
  }
  for (double v : f.values) s += std::pow(std::fabs(v), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace fracop
