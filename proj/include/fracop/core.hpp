#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracop {

constexpr int kMaxDim = 3;

// A point in R^n, n ≤ 3; unused trailing coordinates are zero.
using Point = std::array<double, kMaxDim>;

struct FracParams {
  int n = 1;
  double s = 0.5;
  double s1 = 0.5;
  double s2 = 0.5;
};

// Validates 0 < s, s1, 2s − s1 < 1 and 1 ≤ n ≤ 3; s2 = 2s − s1.
FracParams make_params(int n, double s, double s1);

// Isotropic grid on [−L, L)^n with N points per axis; node i sits at −L + i·h.
struct GridSpec {
  int n = 1;
  double extent = 3.141592653589793;
  std::size_t points = 256;

  double spacing() const { return 2.0 * extent / static_cast<double>(points); }
  std::size_t size() const;
  double cell_volume() const;
  double coord(std::size_t i) const { return -extent + static_cast<double>(i) * spacing(); }
  // Multi-index of a flat row-major index (last axis fastest).
  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<std::size_t, kMaxDim>& idx) const;
  Point node(std::size_t flat) const;
  bool operator==(const GridSpec& o) const {
    return n == o.n && extent == o.extent && points == o.points;
  }
};

GridSpec make_grid(int n, double extent, std::size_t points);

struct Field {
  GridSpec grid;
  std::vector<double> values;
  std::string label;

  Field() = default;
  explicit Field(const GridSpec& g, std::string name = {});
  Field(const GridSpec& g, std::vector<double> v, std::string name = {});

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Samples fn at every grid node.
Field sample(const GridSpec& g, const std::function<double(const Point&)>& fn, std::string label = {});

double mean(const Field& f);
Field remove_mean(const Field& f);
// Riemann-sum inner product h^n Σ f g.
double inner(const Field& f, const Field& g);
// out = a·x + b·y
Field combine(double a, const Field& x, double b, const Field& y);
Field scaled(const Field& f, double a);
// Every other node per axis (grid with N/2 points, same extent).
Field subsample(const Field& f);

// Riemann-sum L^p norm (h^n Σ|f|^p)^{1/p}; p = +inf gives the max norm.
double field_norms(const Field& f, double p);

// Binary field file: one JSON header line {n, extent, points, label}, then
// N^n little-endian IEEE-754 doubles in row-major order.
void write_field(std::ostream& os, const Field& f);
Field read_field(std::istream& is);
void save_field(const std::string& path, const Field& f);
Field load_field(const std::string& path);
// CSV with index columns, coordinate columns and the value.
void write_field_csv(std::ostream& os, const Field& f);

// Bounded measurable coefficient K(x, y) with declared bounds.
class CoeffKernel {
 public:
  using Fn = std::function<double(const Point& x, const Point& y)>;

  CoeffKernel() = default;
  CoeffKernel(std::string name, Fn fn, double lower, double upper, bool symmetric);

  double operator()(const Point& x, const Point& y) const { return fn_(x, y); }
  const std::string& name() const { return name_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool symmetric() const { return symmetric_; }
  double sup_norm() const;
  double midpoint() const { return 0.5 * (lower_ + upper_); }
  bool is_constant() const { return lower_ == upper_; }
  // Spacing of the lattice of hyperplanes across which K may jump (0: none).
  double jump_lattice() const { return jump_lattice_; }
  // Length scale on which K varies (0: no variation).
  double feature_scale() const { return feature_scale_; }

  CoeffKernel& set_jump_lattice(double h) { jump_lattice_ = h; return *this; }
  CoeffKernel& set_feature_scale(double h) { feature_scale_ = h; return *this; }

  // a·K + b, with bounds mapped accordingly.
  CoeffKernel affine(double a, double b) const;
  // a·K1 + b·K2
  static CoeffKernel combination(double a, const CoeffKernel& k1, double b, const CoeffKernel& k2);

 private:
  std::string name_;
  Fn fn_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  bool symmetric_ = true;
  double jump_lattice_ = 0.0;
  double feature_scale_ = 0.0;
};

CoeffKernel constant_kernel(double c);
CoeffKernel smooth_perturbation_kernel(double eps);
CoeffKernel checkerboard_kernel(double lambda, double Lambda);
CoeffKernel random_bounded_kernel(double lambda, double Lambda, std::uint64_t seed);

// Parses "constant:1", "smooth_perturbation:0.05", "checkerboard:1,2",
// "random_bounded:1,2,7" (parentheses are accepted in place of the colon).
CoeffKernel builtin_kernel(std::string_view spec);

}  // namespace fracop
