#pragma once

#include <complex>
#include <functional>

#include "fracop/core.hpp"
#include "fracop/singquad.hpp"

namespace fracop {

enum class MultiplierKind { frac_laplacian, riesz_potential, riesz_transform };

struct MultiplierOp {
  MultiplierKind kind = MultiplierKind::frac_laplacian;
  double s = 0.5;  // order for frac_laplacian / riesz_potential
  int axis = 0;    // component for riesz_transform
};

MultiplierOp frac_laplacian(double s);
MultiplierOp riesz_potential(double s);
MultiplierOp riesz_transform(int axis);

// Periodic Fourier multiplier on frequencies k·π/L. The zero mode is mapped
// to 0 for every kind; odd symbols also drop the Nyquist mode.
Field apply_multiplier(const MultiplierOp& op, const Field& f);

// Generic symbol hook used by the operators above; symbol(ξ) is evaluated at
// every non-zero frequency.
Field apply_symbol(const Field& f, const std::function<std::complex<double>(const Point& xi)>& symbol,
                   bool odd);

struct PvResult {
  Field value;
  double est_error = 0.0;   // max deviation between the h and 2h lattice rules
  double tail_bound = 0.0;  // bound on the far field dropped beyond trunc_radius
};

// c_{n,s}·P.V.∫ (f(x) − f(y))/|x−y|^{n+s} dy for the periodic extension of f,
// 0 < s < 2, by the corrected lattice rule; y is cut off at |x−y| = R.
PvResult pv_frac_laplacian(const Field& f, double s, const QuadConfig& cfg);

}  // namespace fracop
