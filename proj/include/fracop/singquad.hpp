#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fracop/core.hpp"

namespace fracop {

struct QuadConfig {
  double trunc_radius = 64.0;  // box half-width R for x and y
  double excision = 1e-12;     // nodes closer than this to a singular set are dropped
  int base_cells = 16;         // uniform cells per axis across the core box
  int refine_depth = 12;       // dyadic levels toward singular points and the diagonal
  double ring_growth = 1.5;    // geometric growth of cell width outside the core
  int order = 8;               // Gauss-Legendre points per cell and axis
  double core_radius = 0.0;    // half-width of the uniform core (0: automatic)
  double max_cell = 0.0;       // cap on cell width outside the core (0: none)
  double jump_lattice = 0.0;   // extra breakpoints at integer multiples of this spacing
};

// Throws ParamError if cfg is unusable (also checks excision against the finest cell).
void validate(const QuadConfig& cfg);

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;  // |finest − next coarser refinement level|
};

// |a|^r − |b|^r without cancellation when a ≈ b; exactly antisymmetric.
double stable_power_diff(const Point& a, const Point& b, double r, int n);
double stable_power_diff(double a, double b, double r);

// Membership flags of (x, y) in the cover sets A_k(z1), B_k(z2), I_k, J_k;
// bit k−1 is set when the pair belongs to set k.
struct RegionLabel {
  unsigned a_set = 0;
  unsigned b_set = 0;
  unsigned i_set = 0;
  unsigned j_set = 0;
  bool a(int k) const { return (a_set >> (k - 1)) & 1u; }
  bool b(int k) const { return (b_set >> (k - 1)) & 1u; }
  bool i(int k) const { return (i_set >> (k - 1)) & 1u; }
  bool j(int k) const { return (j_set >> (k - 1)) & 1u; }
};

RegionLabel classify_region(const Point& x, const Point& y, const Point& z1, const Point& z2, int n);

double distance(const Point& a, const Point& b, int n);

using PointIntegrand = std::function<double(const Point& x)>;
using PairIntegrand = std::function<double(const Point& x, const Point& y)>;
// Writes `channels` values for one node pair; all channels share the mesh.
using MultiPairIntegrand = std::function<void(const Point& x, const Point& y, double* out)>;

// ∫_{[−R,R]^n} g(x) dx with grading toward the singular points.
QuadResult integrate_singular(const PointIntegrand& g, int n, std::span<const Point> singular_points,
                              const QuadConfig& cfg);

// ∫∫_{[−R,R]^{2n}} g(x,y) dx dy with grading toward x or y at a singular
// point and, when diagonal_singular, toward x = y.
QuadResult integrate_singular(const PairIntegrand& g, int n, std::span<const Point> singular_points,
                              bool diagonal_singular, const QuadConfig& cfg);

std::vector<QuadResult> integrate_pairs(const MultiPairIntegrand& g, int channels, int n,
                                        std::span<const Point> singular_points, bool diagonal_singular,
                                        const QuadConfig& cfg);

// Per-axis breakpoints used by the tensor meshes (exposed for diagnostics).
std::vector<double> axis_breakpoints(std::span<const double> singular_coords, const QuadConfig& cfg);

// Corrected lattice rule for periodic grid functions against |z|^{−n−β},
// β > 0, β ≠ 2. With u extended periodically,
//   ∫ (u(x) − u(x+z)) |z|^{−n−β} dz
//     ≈ Σ_r W_r (u_i − u_{i+r}) + correction()·Δu(x_i)/2,
// where W_r = h^n Σ_m |z_r + 2Lm|^{−n−β} over images inside the cut-off.
class LatticeKernel {
 public:
  // trunc_radius ≤ 0 selects the full periodisation (no cut-off).
  LatticeKernel(const GridSpec& g, double beta, double trunc_radius);

  const GridSpec& grid() const { return grid_; }
  double beta() const { return beta_; }
  double trunc_radius() const { return trunc_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight_sum() const { return weight_sum_; }
  // F(n+β−2)·h^{2−β}/n with F the Epstein zeta of Z^n.
  double correction() const { return correction_; }
  // |S^{n−1}| R^{−β}/β, the far-field measure beyond the cut-off (0 if none).
  double tail_measure() const { return tail_measure_; }

  // out_i = Σ_r W_r (u_i − u_{i+r})
  Field difference_sum(const Field& u) const;
  // Σ_i h^n Σ_r W_r (u_i − u_{i+r})(φ_i − φ_{i+r})
  double pair_sum(const Field& u, const Field& phi) const;

 private:
  GridSpec grid_;
  double beta_;
  double trunc_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
  double correction_ = 0.0;
  double tail_measure_ = 0.0;
};

// Second-order conservative ∇·(k∇u) on the periodic grid, with k sampled at
// the half-way points between neighbouring nodes.
Field divergence_form(const Field& u, const std::function<double(const Point&)>& k);
// Σ_i h^n Σ_a k_{i+½e_a} (u_{i+e_a} − u_i)(φ_{i+e_a} − φ_i)/h², the matching
// discrete energy (summation by parts of −⟨∇·(k∇u), φ⟩).
double divergence_form_energy(const Field& u, const Field& phi, const std::function<double(const Point&)>& k);
// Fourth-order periodic Laplacian.
Field laplacian4(const Field& u);

// Samplers for the two elementary inequalities behind the kernel estimates.
struct LemmaSample {
  const char* name = "";
  std::size_t draws = 0;
  double constant_at_1e4 = 0.0;  // sample max over the first 10^4 draws
  double empirical_constant = 0.0;
  double growth = 0.0;  // empirical_constant / constant_at_1e4
  std::size_t skipped = 0;
  bool finite = false;
};

// ||a|^r − |b|^r| ≤ C |a−b|^σ min(|a|^{r−σ}, |b|^{r−σ}) for |a−b| ≤ min(|a|,|b|).
LemmaSample sample_fundamental_theorem(std::uint64_t seed, std::size_t draws);
// The two cases of the mean-value estimate for |a+h|^{s−n} − |b+h|^{s−n}.
LemmaSample sample_mean_value(int which_case, std::uint64_t seed, std::size_t draws);

}  // namespace fracop
