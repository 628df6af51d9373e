#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fracop/core.hpp"
#include "fracop/czkernel.hpp"
#include "fracop/singquad.hpp"

namespace fracop {

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log δ, log value)
  double target_slope = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Least-squares line through (log δ, log value); needs ≥ 4 points spanning a decade.
ExponentFit fit_decay_exponent(const std::vector<std::pair<double, double>>& sweep, double target_slope,
                               double tolerance);

// (∫∫ |f(x)−f(y)|^p/|x−y|^{n+sp})^{1/p}, x over the torus and y over R^n with
// f extended periodically.
double gagliardo_seminorm(const Field& f, double s, double p, const QuadConfig& cfg);

struct OpNormEstimate {
  double value = 0.0;
  std::vector<double> history;  // sqrt of the Rayleigh quotient per iteration
};

// Power iteration on T*T, T = apply_T_composite, T* = composite with s1 ↔ s2.
OpNormEstimate estimate_opnorm_L2(const CoeffKernel& K, const FracParams& p, const GridSpec& grid,
                                  const QuadConfig& cfg, int iters, std::uint64_t seed);

// Max over grid-aligned dyadic cubes of the mean absolute deviation.
double bmo_seminorm(const Field& f);

// sup_λ λ·|{|f| > λ}|, exact over the left limits at attained sample values.
double weak_l1_quasinorm(const Field& f);

}  // namespace fracop
