#pragma once

#include <vector>

#include "fracop/core.hpp"
#include "fracop/czkernel.hpp"
#include "fracop/singquad.hpp"

namespace fracop {

// Fields are periodic on the grid torus. K is split into its midpoint k0 and
// K − k0: the constant part uses the fully periodised lattice rule, the
// remainder a direct lattice sum over |x − y| < trunc_radius.

struct OperatorResult {
  Field value;
  double est_error = 0.0;   // max deviation between grids N and N/2 at shared nodes
  double tail_bound = 0.0;  // sup bound on the dropped far field of K − k0
};

// L_K u(x) = 2 ∫ K(x,y)(u(x) − u(y))/|x−y|^{n+2s} dy at every node.
Field apply_LK(const CoeffKernel& K, const FracParams& p, const Field& u, const QuadConfig& cfg);
OperatorResult apply_LK_checked(const CoeffKernel& K, const FracParams& p, const Field& u, const QuadConfig& cfg);

// ∫∫ K(x,y)(u(x)−u(y))(φ(x)−φ(y))/|x−y|^{n+2s}, x over the torus, y over R^n.
double bilinear_form(const CoeffKernel& K, const FracParams& p, const Field& u, const Field& phi,
                     const QuadConfig& cfg);

// T f = ½ I^{s2}(L_K(I^{s1} f)); K ≡ 1 gives c_{n,2s}^{-1} f. f must be mean-zero.
Field apply_T_composite(const CoeffKernel& K, const FracParams& p, const Field& f, const QuadConfig& cfg);
OperatorResult apply_T_composite_checked(const CoeffKernel& K, const FracParams& p, const Field& f,
                                         const QuadConfig& cfg);

struct KernelRouteResult {
  std::vector<Point> points;
  std::vector<double> value;
  std::vector<double> est_error;
  std::vector<double> tail_bound;
  std::size_t kernel_evaluations = 0;
};

// T f(z) = ½ c'_{n,s1} c'_{n,s2} ∫ A_{K,s1,s2}(w, z) f(w) dw by eval_A at every
// node w with f(w) ≠ 0, in free space. Output points must lie off supp f.
// est_error adds the quadrature errors of A to the change of the Riemann sum
// in w when the spacing is doubled.
KernelRouteResult apply_T_kernel(const CoeffKernel& K, const FracParams& p, const Field& f,
                                 const std::vector<Point>& points, const QuadConfig& cfg,
                                 std::size_t max_evaluations = 4096);

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;
  double contraction_est = 0.0;
  Field solution;  // v = (−Δ)^{s1/2} u, mean-zero
  Field u;         // I^{s1} v
  double rhs_norm = 0.0;
  double calibration = 0.0;  // c_{n,2s}/2, the constant tying L_K u = g to T v = rhs
  double sup_K = 0.0;
};

// Solves L_K u = g for mean-zero g by v ← rhs − c_{n,2s} T_{K̃} v with
// K̃ = K/sup K − 1 and rhs = c_{n,2s}/(2 sup K) · I^{s2} g.
SolveReport neumann_solve(const CoeffKernel& K, const FracParams& p, const Field& g, double tol, int max_iter,
                          const QuadConfig& cfg);

}  // namespace fracop
