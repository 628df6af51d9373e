#pragma once

#include <array>

#include "fracop/core.hpp"
#include "fracop/singquad.hpp"

namespace fracop {

struct EstimateConfig {
  double theta = 0.05;
  double alpha = 0.0025;
  double sigma = 0.775;
};

// Checks θ ∈ (0, 1/10), 10θ < s, s1, s2 < 1 − 10θ, α ∈ [0, θ/10), σ ∈ (s1 + θ, 2s).
EstimateConfig make_estimate_config(const FracParams& p, double theta, double alpha, double sigma);
// Largest admissible θ (shrunk by a relative margin), α at the midpoint of
// [0, θ/10) and σ at the midpoint of (s1 + θ, 2s).
EstimateConfig default_estimate_config(const FracParams& p);

struct KernelValue {
  double value = 0.0;
  double est_error = 0.0;   // refinement-level difference
  double tail_bound = 0.0;  // bound on the part outside the truncation box
  double error_bar() const { return est_error + tail_bound; }
};

// Integrand of A_{K,s1,s2}(z1, z2) without the coefficient:
// Δ1·Δ2/|x−y|^{n+2s} with Δi = |x−zi|^{si−n} − |y−zi|^{si−n}.
double kernel_integrand(const FracParams& p, const Point& x, const Point& y, const Point& z1, const Point& z2);

// A_{K,s1,s2}(z1, z2) = ∫∫ K(x,y) Δ1 Δ2 / |x−y|^{n+2s} dx dy.
// The integral of any constant coefficient vanishes identically, so the
// quadrature runs on K − (λ+Λ)/2 unless center_kernel is false.
KernelValue eval_A(const CoeffKernel& K, const FracParams& p, const Point& z1, const Point& z2,
                   const QuadConfig& cfg, bool center_kernel = true);

// Quadrature settings used by eval_A for a given kernel and separation.
QuadConfig kernel_quad_config(const CoeffKernel& K, const QuadConfig& base);

// κ_1^{α,σ} and κ_2^{α,σ} at one point.
double eval_kappa(int l, const FracParams& p, const EstimateConfig& est, const Point& x, const Point& y,
                  const Point& z1, const Point& z2);

// M_l^{α,σ}(z1, z2) = ∫∫ K κ_l over the truncation box.
KernelValue eval_M(int l, const CoeffKernel& K, const FracParams& p, const EstimateConfig& est, const Point& z1,
                   const Point& z2, const QuadConfig& cfg);

// ∫∫ K κ_l restricted to A_i ∩ B_j ∩ I_k (diagnostic; the cover overlaps).
KernelValue region_contribution(int i, int j, int k, int l, const CoeffKernel& K, const FracParams& p,
                                const EstimateConfig& est, const Point& z1, const Point& z2, const QuadConfig& cfg);
// All 27 contributions in one pass, index (i−1)·9 + (j−1)·3 + (k−1).
std::array<KernelValue, 27> region_contributions(int l, const CoeffKernel& K, const FracParams& p,
                                                 const EstimateConfig& est, const Point& z1, const Point& z2,
                                                 const QuadConfig& cfg);

}  // namespace fracop
