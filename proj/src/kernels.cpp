#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fracop/core.hpp"
#include "fracop/error.hpp"

namespace fracop {

CoeffKernel::CoeffKernel(std::string name, Fn fn, double lower, double upper, bool symmetric)
    : name_(std::move(name)), fn_(std::move(fn)), lower_(lower), upper_(upper), symmetric_(symmetric) {
  if (!(lower <= upper)) throw ParamError("kernel '" + name_ + "': lower bound exceeds upper bound");
}

double CoeffKernel::sup_norm() const { return std::max(std::fabs(lower_), std::fabs(upper_)); }

CoeffKernel CoeffKernel::affine(double a, double b) const {
  Fn f = fn_;
  double lo = a * lower_ + b, hi = a * upper_ + b;
  if (lo > hi) std::swap(lo, hi);
  CoeffKernel k(format_double(a) + "*" + name_ + "+" + format_double(b),
                [f, a, b](const Point& x, const Point& y) { return a * f(x, y) + b; }, lo, hi, symmetric_);
  k.jump_lattice_ = jump_lattice_;
  k.feature_scale_ = a == 0.0 ? 0.0 : feature_scale_;
  return k;
}

CoeffKernel CoeffKernel::combination(double a, const CoeffKernel& k1, double b, const CoeffKernel& k2) {
  Fn f1 = k1.fn_, f2 = k2.fn_;
  double lo = std::min(a * k1.lower_, a * k1.upper_) + std::min(b * k2.lower_, b * k2.upper_);
  double hi = std::max(a * k1.lower_, a * k1.upper_) + std::max(b * k2.lower_, b * k2.upper_);
  CoeffKernel k(format_double(a) + "*" + k1.name_ + "+" + format_double(b) + "*" + k2.name_,
                [f1, f2, a, b](const Point& x, const Point& y) { return a * f1(x, y) + b * f2(x, y); }, lo,
                hi, k1.symmetric_ && k2.symmetric_);
  auto pick = [](double u, double v) {
    if (u == 0.0) return v;
    if (v == 0.0) return u;
    return std::min(u, v);
  };
  k.jump_lattice_ = pick(k1.jump_lattice_, k2.jump_lattice_);
  k.feature_scale_ = pick(k1.feature_scale_, k2.feature_scale_);
  return k;
}

CoeffKernel constant_kernel(double c) {
  return CoeffKernel("constant:" + format_double(c), [c](const Point&, const Point&) { return c; }, c, c, true);
}

CoeffKernel smooth_perturbation_kernel(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ParamError("smooth_perturbation: need 0 <= eps < 1");
  CoeffKernel k(
      "smooth_perturbation:" + format_double(eps),
      [eps](const Point& x, const Point& y) { return 1.0 + eps * (std::cos(x[0]) * std::cos(y[0])); },
      1.0 - eps, 1.0 + eps, true);
  if (eps > 0.0) k.set_feature_scale(1.0);
  return k;
}

namespace {

long cell_of(double v) { return static_cast<long>(std::floor(v)); }

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CoeffKernel checkerboard_kernel(double lambda, double Lambda) {
  if (!(lambda >= 0.0)) throw ParamError("checkerboard: need lambda >= 0");
  if (lambda > Lambda) throw ParamError("checkerboard: lambda exceeds Lambda");
  CoeffKernel k(
      "checkerboard:" + format_double(lambda) + "," + format_double(Lambda),
      [lambda, Lambda](const Point& x, const Point& y) {
        long parity = 0;
        for (int a = 0; a < kMaxDim; ++a) parity += cell_of(x[a]) + cell_of(y[a]);
        return (parity & 1) == 0 ? lambda : Lambda;
      },
      lambda, Lambda, true);
  k.set_jump_lattice(1.0).set_feature_scale(1.0);
  return k;
}

CoeffKernel random_bounded_kernel(double lambda, double Lambda, std::uint64_t seed) {
  if (!(lambda >= 0.0)) throw ParamError("random_bounded: need lambda >= 0");
  if (lambda > Lambda) throw ParamError("random_bounded: lambda exceeds Lambda");
  CoeffKernel k(
      "random_bounded:" + format_double(lambda) + "," + format_double(Lambda) + "," + std::to_string(seed),
      [lambda, Lambda, seed](const Point& x, const Point& y) {
        std::array<long, kMaxDim> cx{}, cy{};
        for (int a = 0; a < kMaxDim; ++a) {
          cx[a] = cell_of(x[a]);
          cy[a] = cell_of(y[a]);
        }
        if (cy < cx) std::swap(cx, cy);
        std::uint64_t h = splitmix64(seed);
        for (int a = 0; a < kMaxDim; ++a) h = splitmix64(h ^ static_cast<std::uint64_t>(cx[a]));
        for (int a = 0; a < kMaxDim; ++a) h = splitmix64(h ^ static_cast<std::uint64_t>(cy[a]));
        double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        return lambda + (Lambda - lambda) * u;
      },
      lambda, Lambda, true);
  k.set_jump_lattice(1.0).set_feature_scale(1.0);
  return k;
}

namespace {

std::vector<double> parse_args(std::string_view body, std::string_view spec) {
  std::vector<double> out;
  std::string s(body);
  if (!s.empty() && s.back() == ')') s.pop_back();
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw ParamError("kernel spec '" + std::string(spec) + "': bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

CoeffKernel builtin_kernel(std::string_view spec) {
  auto pos = spec.find_first_of(":(");
  std::string name(spec.substr(0, pos));
  std::vector<double> args = pos == std::string_view::npos ? std::vector<double>{} : parse_args(spec.substr(pos + 1), spec);
  auto need = [&](std::size_t count) {
    if (args.size() != count)
      throw ParamError("kernel spec '" + std::string(spec) + "': expected " + std::to_string(count) + " argument(s)");
  };
  if (name == "constant") {
    if (args.empty()) args.push_back(1.0);
    need(1);
    return constant_kernel(args[0]);
  }
  if (name == "smooth_perturbation") {
    need(1);
    return smooth_perturbation_kernel(args[0]);
  }
  if (name == "checkerboard") {
    need(2);
    return checkerboard_kernel(args[0], args[1]);
  }
  if (name == "random_bounded") {
    need(3);
    if (!(args[2] >= 0.0) || args[2] != std::floor(args[2])) throw ParamError("random_bounded: seed must be a non-negative integer");
    return random_bounded_kernel(args[0], args[1], static_cast<std::uint64_t>(args[2]));
  }
  throw ParamError("unknown kernel '" + name + "'");
}

}  // namespace fracop
