#include "fracop/special.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "fracop/error.hpp"

namespace fracop {

using std::numbers::pi;

double frac_laplacian_constant(int n, double s) {
  if (n < 1 || !(s > 0.0 && s < 2.0)) throw ParamError("frac_laplacian_constant: need n >= 1 and 0 < s < 2");
  return std::pow(2.0, s) * std::tgamma(0.5 * (n + s)) /
         (std::pow(pi, 0.5 * n) * std::fabs(std::tgamma(-0.5 * s)));
}

double riesz_potential_constant(int n, double s) {
  if (n < 1 || !(s > 0.0 && s < n)) throw ParamError("riesz_potential_constant: need 0 < s < n");
  return std::tgamma(0.5 * (n - s)) / (std::pow(2.0, s) * std::pow(pi, 0.5 * n) * std::tgamma(0.5 * s));
}

double sphere_area(int n) { return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n); }

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw ParamError("hurwitz_zeta: need s > 1, q > 0");
  // Euler-Maclaurin after shifting the argument past M.
  constexpr int M = 12;
  static constexpr double b2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
                                   -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
  double sum = 0.0;
  for (int k = 0; k < M; ++k) sum += std::pow(q + k, -s);
  double a = q + M;
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  double rising = s;  // s(s+1)...(s+2j-2)
  double fact = 2.0;  // (2j)!
  double apow = std::pow(a, -s - 1.0);
  for (int j = 1; j <= 8; ++j) {
    sum += b2k[j - 1] / fact * rising * apow;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2 * j + 1) * (2 * j + 2);
    apow /= a * a;
  }
  return sum;
}

namespace {

double upper_gamma(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (a == 0.0) return boost::math::expint(1, x);
  // Γ(a,x) = (Γ(a+1,x) − x^a e^{−x}) / a
  return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

}  // namespace

double epstein_zeta(int n, double sigma) {
  if (n < 1 || n > 3) throw ParamError("epstein_zeta: n must be 1, 2 or 3");
  if (n == 1) return 2.0 * boost::math::zeta(sigma);
  if (std::fabs(sigma - n) < 1e-14) throw DomainError("epstein_zeta: pole at sigma = n");
  if (std::fabs(sigma) < 1e-14) return -1.0;
  // Theta-function splitting at t = 1.
  constexpr int J = 7;
  double a1 = 0.5 * sigma, a2 = 0.5 * (n - sigma);
  double sum = 0.0;
  int jz_lo = n == 3 ? -J : 0, jz_hi = n == 3 ? J : 0;
  for (int jx = -J; jx <= J; ++jx)
    for (int jy = -J; jy <= J; ++jy)
      for (int jz = jz_lo; jz <= jz_hi; ++jz) {
        int r2 = jx * jx + jy * jy + jz * jz;
        if (r2 == 0) continue;
        double x = pi * r2;
        sum += upper_gamma(a1, x) * std::pow(x, -a1) + upper_gamma(a2, x) * std::pow(x, -a2);
      }
  sum -= 2.0 / sigma + 2.0 / (n - sigma);
  return sum * std::pow(pi, a1) / std::tgamma(a1);
}

double cube_exterior_moment(int n, double beta) {
  if (!(beta > 0.0)) throw ParamError("cube_exterior_moment: need beta > 0");
  // Project each face of the unit cube onto the sphere:
  // (1/β)·2n·∫_{[−1,1]^{n−1}} (1+|u|²)^{−(n+β)/2} du.
  using boost::math::quadrature::gauss;
  double e = -0.5 * (n + beta);
  double face = 0.0;
  if (n == 1) {
    face = 1.0;
  } else if (n == 2) {
    face = gauss<double, 30>::integrate([&](double u) { return std::pow(1.0 + u * u, e); }, -1.0, 1.0);
  } else if (n == 3) {
    face = gauss<double, 30>::integrate(
        [&](double u) {
          return gauss<double, 30>::integrate([&](double v) { return std::pow(1.0 + u * u + v * v, e); },
                                              -1.0, 1.0);
        },
        -1.0, 1.0);
  } else {
    throw ParamError("cube_exterior_moment: n must be 1, 2 or 3");
  }
  return 2.0 * n * face / beta;
}

}  // namespace fracop
