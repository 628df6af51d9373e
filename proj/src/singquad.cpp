#include "fracop/singquad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "fracop/error.hpp"
#include "fracop/parallel.hpp"

namespace fracop {

double distance(const Point& a, const Point& b, int n) {
  if (n == 1) return std::fabs(a[0] - b[0]);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

namespace {

double norm(const Point& a, int n) {
  if (n == 1) return std::fabs(a[0]);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += a[k] * a[k];
  return std::sqrt(s);
}

// Orders pairs so that stable_power_diff(a,b) and (b,a) run the same
// arithmetic; the result is then negated for the swapped call.
bool canonical_less(const Point& a, const Point& b, int n, double na, double nb) {
  if (na != nb) return na < nb;
  for (int k = 0; k < n; ++k)
    if (a[k] != b[k]) return a[k] < b[k];
  return false;
}

}  // namespace

double stable_power_diff(const Point& a, const Point& b, double r, int n) {
  double na = norm(a, n), nb = norm(b, n);
  if (na == 0.0 || nb == 0.0) throw DomainError("stable_power_diff: zero vector");
  if (canonical_less(b, a, n, nb, na)) return -stable_power_diff(b, a, r, n);
  double dab = distance(a, b, n);
  if (dab == 0.0) return 0.0;
  double lo = std::min(na, nb);
  if (dab <= 0.1 * lo) {
    // |a| − |b| without cancellation.
    double diff;
    if (n == 1 && (a[0] > 0) == (b[0] > 0)) {
      diff = std::fabs(a[0]) - std::fabs(b[0]);
    } else {
      double dot = 0.0;
      for (int k = 0; k < n; ++k) dot += (a[k] - b[k]) * (a[k] + b[k]);
      diff = dot / (na + nb);
    }
    return std::pow(nb, r) * std::expm1(r * std::log1p(diff / nb));
  }
  return std::pow(na, r) - std::pow(nb, r);
}

double stable_power_diff(double a, double b, double r) {
  return stable_power_diff(Point{a, 0.0, 0.0}, Point{b, 0.0, 0.0}, r, 1);
}

RegionLabel classify_region(const Point& x, const Point& y, const Point& z1, const Point& z2, int n) {
  double delta = distance(z1, z2, n);
  if (delta == 0.0) throw DomainError("classify_region: z1 = z2");
  double xz1 = distance(x, z1, n), xz2 = distance(x, z2, n);
  double yz1 = distance(y, z1, n), yz2 = distance(y, z2, n);
  if (xz1 == 0.0 || xz2 == 0.0 || yz1 == 0.0 || yz2 == 0.0)
    throw DomainError("classify_region: x or y coincides with z1 or z2");
  double xy = distance(x, y, n);
  RegionLabel r;
  auto cover = [&](double xz, double yz) {
    unsigned m = 0;
    if (xy <= 10.0 * std::min(xz, yz)) m |= 1u;
    if (xz <= 10.0 * std::min(yz, xy)) m |= 2u;
    if (yz <= 10.0 * std::min(xz, xy)) m |= 4u;
    return m;
  };
  r.a_set = cover(xz1, yz1);
  r.b_set = cover(xz2, yz2);
  auto near_split = [&](double pz1, double pz2) {
    unsigned m = 0;
    if (pz1 <= 10.0 * delta && pz2 >= delta / 10.0) m |= 1u;
    if (pz2 <= 10.0 * delta && pz1 >= delta / 10.0) m |= 2u;
    if (pz2 / 100.0 <= pz1 && pz1 <= 100.0 * pz2 && pz1 >= delta / 100.0) m |= 4u;
    return m;
  };
  r.i_set = near_split(xz1, xz2);
  r.j_set = near_split(yz1, yz2);
  return r;
}

// ---------------------------------------------------------------------------
// Meshes

void validate(const QuadConfig& cfg) {
  if (!(cfg.trunc_radius > 0.0) || !std::isfinite(cfg.trunc_radius)) throw ParamError("quad: trunc_radius must be positive");
  if (cfg.base_cells < 2) throw ParamError("quad: base_cells must be >= 2");
  if (cfg.refine_depth < 1 || cfg.refine_depth > 40) throw ParamError("quad: refine_depth must be in [1, 40]");
  if (!(cfg.ring_growth >= 1.0)) throw ParamError("quad: ring_growth must be >= 1");
  if (cfg.order < 1 || cfg.order > 20) throw ParamError("quad: order must be in [1, 20]");
  if (!(cfg.excision >= 0.0)) throw ParamError("quad: excision must be >= 0");
  if (cfg.core_radius < 0.0 || cfg.max_cell < 0.0 || cfg.jump_lattice < 0.0)
    throw ParamError("quad: core_radius, max_cell and jump_lattice must be >= 0");
}

std::vector<double> axis_breakpoints(std::span<const double> singular_coords, const QuadConfig& cfg) {
  validate(cfg);
  const double R = cfg.trunc_radius;
  double reach = 0.0;
  for (double c : singular_coords) reach = std::max(reach, std::fabs(c));
  double core = cfg.core_radius > 0.0 ? cfg.core_radius : (reach > 0.0 ? 4.0 * reach : R);
  core = std::min(core, R);
  const double H = 2.0 * core / cfg.base_cells;
  if (cfg.excision >= H * std::ldexp(1.0, -cfg.refine_depth))
    throw ParamError("quad: excision must be smaller than the finest refinement spacing");

  std::vector<double> b;
  for (int k = 0; k <= cfg.base_cells; ++k) b.push_back(-core + k * H);
  double w = H, x = core;
  while (x < R) {
    w *= cfg.ring_growth;
    if (cfg.max_cell > 0.0) w = std::min(w, cfg.max_cell);
    x = std::min(x + w, R);
    b.push_back(x);
    b.push_back(-x);
  }
  b.push_back(R);
  b.push_back(-R);
  b.push_back(0.5 * R);
  b.push_back(-0.5 * R);
  for (double c : singular_coords) {
    b.push_back(c);
    for (int k = 1; k <= cfg.refine_depth; ++k) {
      double d = H * std::ldexp(1.0, -k);
      b.push_back(c - d);
      b.push_back(c + d);
    }
  }
  if (cfg.jump_lattice > 0.0) {
    long kmax = static_cast<long>(std::floor(R / cfg.jump_lattice));
    if (kmax > 100000) throw ParamError("quad: jump lattice too fine for the truncation box");
    for (long k = -kmax; k <= kmax; ++k) b.push_back(k * cfg.jump_lattice);
  }
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  const double tol = 1e-14 * R;
  for (double v : b) {
    if (v < -R || v > R) continue;
    if (!out.empty() && v - out.back() <= tol) {
      // Keep singular coordinates bit-exact; the engine grades toward them.
      if (std::find(singular_coords.begin(), singular_coords.end(), v) != singular_coords.end()) out.back() = v;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

namespace {

struct Rule {
  std::vector<double> x, w;  // on [−1, 1]
};

template <std::size_t Q>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, Q>;
  Rule r;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t k = 0; k < ab.size(); ++k) {
    if (ab[k] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wt[k]);
    } else {
      r.x.push_back(-ab[k]);
      r.w.push_back(wt[k]);
      r.x.push_back(ab[k]);
      r.w.push_back(wt[k]);
    }
  }
  return r;
}

template <std::size_t... I>
Rule rule_dispatch(int q, std::index_sequence<I...>) {
  Rule r;
  ((q == static_cast<int>(I + 1) ? (r = make_rule<I + 1>(), 0) : 0), ...);
  return r;
}

const Rule& gauss_rule(int q) {
  static const std::vector<Rule> rules = [] {
    std::vector<Rule> v(21);
    for (int k = 1; k <= 20; ++k) v[k] = rule_dispatch(k, std::make_index_sequence<20>{});
    return v;
  }();
  return rules.at(q);
}

// Power map x = lo + w·t^m near a singular endpoint; turns |x − lo|^{γ}
// into t^{m(γ+1)−1}, smooth for γ ≥ 1/m − 1.
constexpr int kGradePower = 4;

struct AxisNodes {
  std::vector<double> x, w;
};

AxisNodes axis_nodes(double lo, double hi, bool grade_lo, bool grade_hi, const Rule& rule) {
  AxisNodes out;
  auto plain = [&](double a, double b) {
    double half = 0.5 * (b - a);
    for (std::size_t j = 0; j < rule.x.size(); ++j) {
      out.x.push_back(a + half * (1.0 + rule.x[j]));
      out.w.push_back(half * rule.w[j]);
    }
  };
  // sign = +1 grades toward a, −1 toward b.
  auto graded = [&](double a, double b, double sign) {
    double width = b - a, origin = sign > 0 ? a : b;
    for (std::size_t j = 0; j < rule.x.size(); ++j) {
      double u = 0.5 * (1.0 + rule.x[j]);
      double t = std::pow(u, kGradePower);
      out.x.push_back(origin + sign * width * t);
      out.w.push_back(width * kGradePower * std::pow(u, kGradePower - 1) * 0.5 * rule.w[j]);
    }
  };
  if (grade_lo && grade_hi) {
    double mid = 0.5 * (lo + hi);
    graded(lo, mid, 1.0);
    graded(mid, hi, -1.0);
  } else if (grade_lo) {
    graded(lo, hi, 1.0);
  } else if (grade_hi) {
    graded(lo, hi, -1.0);
  } else {
    plain(lo, hi);
  }
  return out;
}

struct Box {
  Point lo{0, 0, 0}, hi{0, 0, 0};
};

struct Nodes {
  std::vector<Point> x;
  std::vector<double> w;
};

class PairEngine {
 public:
  PairEngine(const MultiPairIntegrand& g, int channels, int n, std::span<const Point> points, bool diagonal,
             int order, double excision)
      : g_(g), m_(channels), n_(n), points_(points.begin(), points.end()), diag_(diagonal),
        rule_(gauss_rule(order)), eps_(excision) {}

  void accumulate(const Box& X, const Box& Y, int depth, double* acc) const {
    if (!diag_) {
      gauss_block(X, Y, acc);
      return;
    }
    double d = box_distance(X, Y), size = std::max(diameter(X), diameter(Y));
    if (d >= size) {
      gauss_block(X, Y, acc);
      return;
    }
    if (n_ == 1) {
      diagonal_1d(X, Y, depth, acc);
      return;
    }
    if (depth == 0) {
      if (d > 0.0) gauss_block(X, Y, acc);
      return;  // touching cells at the finest level are excised
    }
    auto cx = split(X), cy = split(Y);
    for (const Box& a : cx)
      for (const Box& b : cy) accumulate(a, b, depth - 1, acc);
  }

 private:
  // Near-diagonal pair in one dimension: substitute y = x + t and grade t
  // geometrically toward 0, where the integrand is singular.
  void diagonal_1d(const Box& X, const Box& Y, int depth, double* acc) const {
    const double a = X.lo[0], b = X.hi[0], c = Y.lo[0], d = Y.hi[0];
    std::vector<double> br{c - b, d - a, c - a, d - b};
    if (c - b < 0.0 && d - a > 0.0) br.push_back(0.0);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    std::vector<double> val(m_);
    auto strip = [&](double t0, double t1, bool grade_lo, bool grade_hi) {
      AxisNodes tn = axis_nodes(t0, t1, grade_lo, grade_hi, rule_);
      for (std::size_t jt = 0; jt < tn.x.size(); ++jt) {
        const double t = tn.x[jt];
        const double lo = std::max(a, c - t), hi = std::min(b, d - t);
        if (!(hi > lo)) continue;
        const bool slo = lo == a ? singular_coord(0, a) : singular_coord(0, c);
        const bool shi = hi == b ? singular_coord(0, b) : singular_coord(0, d);
        AxisNodes xn = axis_nodes(lo, hi, slo, shi, rule_);
        for (std::size_t jx = 0; jx < xn.x.size(); ++jx) {
          Point x{xn.x[jx], 0.0, 0.0};
          Point y{x[0] + t, 0.0, 0.0};
          if (excised(x) || excised(y) || std::fabs(t) < eps_) continue;
          eval(x, y, tn.w[jt] * xn.w[jx], val.data(), acc);
        }
      }
    };
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      const double t0 = br[k], t1 = br[k + 1];
      if (t0 == 0.0 || t1 == 0.0) {
        const double len = t1 - t0, sign = t0 == 0.0 ? 1.0 : -1.0, base = t0 == 0.0 ? t0 : t1;
        for (int l = 0; l <= depth; ++l) {
          double outer = len * std::ldexp(1.0, -l), inner = l == depth ? 0.0 : 0.5 * outer;
          double u0 = base + sign * inner, u1 = base + sign * outer;
          bool innermost = l == depth;
          strip(std::min(u0, u1), std::max(u0, u1), innermost && sign > 0, innermost && sign < 0);
        }
      } else {
        strip(t0, t1, false, false);
      }
    }
  }

  void eval(const Point& x, const Point& y, double w, double* val, double* acc) const {
    g_(x, y, val);
    for (int c = 0; c < m_; ++c) {
      if (!std::isfinite(val[c])) {
        std::string where = "x=(";
        for (int k = 0; k < n_; ++k) where += (k ? "," : "") + format_double(x[k]);
        where += ") y=(";
        for (int k = 0; k < n_; ++k) where += (k ? "," : "") + format_double(y[k]);
        throw NumericError("integrate_singular: non-finite integrand at " + where + ")");
      }
      acc[c] += w * val[c];
    }
  }

  double box_distance(const Box& X, const Box& Y) const {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) {
      double gap = std::max({0.0, Y.lo[k] - X.hi[k], X.lo[k] - Y.hi[k]});
      s += gap * gap;
    }
    return std::sqrt(s);
  }

  double diameter(const Box& X) const {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s = std::max(s, X.hi[k] - X.lo[k]);
    return s;
  }

  std::vector<Box> split(const Box& X) const {
    std::vector<Box> out(std::size_t{1} << n_);
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = X;
      for (int k = 0; k < n_; ++k) {
        double mid = 0.5 * (X.lo[k] + X.hi[k]);
        if ((c >> k) & 1u)
          out[c].lo[k] = mid;
        else
          out[c].hi[k] = mid;
      }
    }
    return out;
  }

  bool singular_coord(int k, double v) const {
    for (const Point& z : points_)
      if (z[k] == v) return true;
    return false;
  }

  AxisNodes axis(int k, double lo, double hi) const {
    return axis_nodes(lo, hi, singular_coord(k, lo), singular_coord(k, hi), rule_);
  }

  Nodes nodes(const Box& X) const {
    std::array<AxisNodes, kMaxDim> ax;
    std::size_t total = 1;
    for (int k = 0; k < n_; ++k) {
      ax[k] = axis(k, X.lo[k], X.hi[k]);
      total *= ax[k].x.size();
    }
    Nodes out;
    out.x.resize(total);
    out.w.resize(total);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rem = t;
      Point p{0, 0, 0};
      double w = 1.0;
      for (int k = 0; k < n_; ++k) {
        std::size_t j = rem % ax[k].x.size();
        rem /= ax[k].x.size();
        p[k] = ax[k].x[j];
        w *= ax[k].w[j];
      }
      out.x[t] = p;
      out.w[t] = w;
    }
    return out;
  }

  bool excised(const Point& p) const {
    if (eps_ <= 0.0) return false;
    for (const Point& z : points_)
      if (distance(p, z, n_) < eps_) return true;
    return false;
  }

  void gauss_block(const Box& X, const Box& Y, double* acc) const {
    Nodes nx = nodes(X), ny = nodes(Y);
    std::vector<double> val(m_);
    for (std::size_t i = 0; i < nx.x.size(); ++i) {
      if (excised(nx.x[i])) continue;
      for (std::size_t j = 0; j < ny.x.size(); ++j) {
        if (excised(ny.x[j])) continue;
        if (diag_ && eps_ > 0.0 && distance(nx.x[i], ny.x[j], n_) < eps_) continue;
        eval(nx.x[i], ny.x[j], nx.w[i] * ny.w[j], val.data(), acc);
      }
    }
  }

  const MultiPairIntegrand& g_;
  int m_;
  int n_;
  std::vector<Point> points_;
  bool diag_;
  const Rule& rule_;
  double eps_;
};

std::vector<Box> tensor_boxes(const std::vector<double>& b, int n) {
  const std::size_t c = b.size() - 1;
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= c;
  std::vector<Box> boxes(total);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    for (int k = n - 1; k >= 0; --k) {
      std::size_t j = rem % c;
      rem /= c;
      boxes[t].lo[k] = b[j];
      boxes[t].hi[k] = b[j + 1];
    }
  }
  return boxes;
}

std::vector<double> singular_coords(std::span<const Point> points, int n) {
  std::vector<double> c;
  for (const Point& p : points)
    for (int k = 0; k < n; ++k) c.push_back(p[k]);
  return c;
}

QuadConfig coarser(const QuadConfig& cfg) {
  QuadConfig c = cfg;
  c.base_cells = std::max(2, cfg.base_cells / 2);
  c.refine_depth = std::max(1, cfg.refine_depth - 1);
  return c;
}

std::vector<double> pair_level(const MultiPairIntegrand& g, int channels, int n, std::span<const Point> points,
                               bool diagonal, const QuadConfig& cfg) {
  auto b = axis_breakpoints(singular_coords(points, n), cfg);
  auto boxes = tensor_boxes(b, n);
  // Near-diagonal recursion grows like 4^depth per level for n >= 2.
  int depth = n == 1 ? cfg.refine_depth : std::min(cfg.refine_depth, 3);
  PairEngine engine(g, channels, n, points, diagonal, cfg.order, cfg.excision);
  const std::size_t rows = boxes.size();
  std::vector<double> slots(rows * channels, 0.0);
  parallel_for(rows, [&](std::size_t i) {
    std::vector<double> acc(channels, 0.0);
    for (std::size_t j = 0; j < rows; ++j) engine.accumulate(boxes[i], boxes[j], depth, acc.data());
    for (int c = 0; c < channels; ++c) slots[c * rows + i] = acc[c];
  });
  std::vector<double> out(channels);
  for (int c = 0; c < channels; ++c)
    out[c] = pairwise_sum(std::span<const double>(slots).subspan(c * rows, rows));
  return out;
}

}  // namespace

std::vector<QuadResult> integrate_pairs(const MultiPairIntegrand& g, int channels, int n,
                                        std::span<const Point> singular_points, bool diagonal_singular,
                                        const QuadConfig& cfg) {
  if (n < 1 || n > kMaxDim) throw ParamError("integrate_pairs: n must be in [1, 3]");
  if (channels < 1) throw ParamError("integrate_pairs: need at least one channel");
  auto fine = pair_level(g, channels, n, singular_points, diagonal_singular, cfg);
  auto coarse = pair_level(g, channels, n, singular_points, diagonal_singular, coarser(cfg));
  std::vector<QuadResult> out(channels);
  for (int c = 0; c < channels; ++c) out[c] = {fine[c], std::fabs(fine[c] - coarse[c])};
  return out;
}

QuadResult integrate_singular(const PairIntegrand& g, int n, std::span<const Point> singular_points,
                              bool diagonal_singular, const QuadConfig& cfg) {
  MultiPairIntegrand mg = [&g](const Point& x, const Point& y, double* out) { out[0] = g(x, y); };
  return integrate_pairs(mg, 1, n, singular_points, diagonal_singular, cfg)[0];
}

QuadResult integrate_singular(const PointIntegrand& g, int n, std::span<const Point> singular_points,
                              const QuadConfig& cfg) {
  if (n < 1 || n > kMaxDim) throw ParamError("integrate_singular: n must be in [1, 3]");
  auto level = [&](const QuadConfig& c) {
    auto b = axis_breakpoints(singular_coords(singular_points, n), c);
    auto boxes = tensor_boxes(b, n);
    const Rule& rule = gauss_rule(c.order);
    auto singular = [&](int k, double v) {
      for (const Point& z : singular_points)
        if (z[k] == v) return true;
      return false;
    };
    return deterministic_sum(boxes.size(), [&](std::size_t t) {
      const Box& X = boxes[t];
      std::array<AxisNodes, kMaxDim> ax;
      std::size_t total = 1;
      for (int k = 0; k < n; ++k) {
        ax[k] = axis_nodes(X.lo[k], X.hi[k], singular(k, X.lo[k]), singular(k, X.hi[k]), rule);
        total *= ax[k].x.size();
      }
      double acc = 0.0;
      for (std::size_t u = 0; u < total; ++u) {
        std::size_t rem = u;
        Point p{0, 0, 0};
        double w = 1.0;
        for (int k = 0; k < n; ++k) {
          std::size_t j = rem % ax[k].x.size();
          rem /= ax[k].x.size();
          p[k] = ax[k].x[j];
          w *= ax[k].w[j];
        }
        bool skip = false;
        for (const Point& z : singular_points)
          if (c.excision > 0.0 && distance(p, z, n) < c.excision) skip = true;
        if (skip) continue;
        double v = g(p);
        if (!std::isfinite(v)) {
          std::string where;
          for (int k = 0; k < n; ++k) where += (k ? "," : "") + format_double(p[k]);
          throw NumericError("integrate_singular: non-finite integrand at x=(" + where + ")");
        }
        acc += w * v;
      }
      return acc;
    });
  };
  double fine = level(cfg), coarse = level(coarser(cfg));
  return {fine, std::fabs(fine - coarse)};
}

}  // namespace fracop
