#pragma once

namespace fracop {

// c_{n,s} = 2^s Γ((n+s)/2) / (π^{n/2} |Γ(−s/2)|), 0 < s < 2: the constant for
// which c·P.V.∫(f(x)−f(y))/|x−y|^{n+s} dy has Fourier symbol |ξ|^s.
double frac_laplacian_constant(int n, double s);

// Γ((n−s)/2) / (2^s π^{n/2} Γ(s/2)), 0 < s < n: kernel constant of the Riesz
// potential, I^s f = const·∫ f(y)/|x−y|^{n−s} dy.
double riesz_potential_constant(int n, double s);

// Surface measure of the unit sphere in R^n.
double sphere_area(int n);

// Σ_{k≥0} (q+k)^{−s} for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

// Σ'_{j∈Z^n} |j|^{−σ}, analytically continued in σ (σ ≠ n).
double epstein_zeta(int n, double sigma);

// ∫_{|x|_∞ > 1} |x|^{−n−β} dx for β > 0.
double cube_exterior_moment(int n, double beta);

}  // namespace fracop
