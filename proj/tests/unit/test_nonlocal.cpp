#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracop/error.hpp"
#include "fracop/nonlocal.hpp"
#include "fracop/special.hpp"
#include "fracop/spectral.hpp"
#include "helpers.hpp"

using namespace fracop;
using testing::rel_l2;

namespace {

constexpr double pi = std::numbers::pi;

GridSpec line(std::size_t N = 256) { return make_grid(1, pi, N); }

Field wave(const GridSpec& g, int k) {
  return sample(g, [k](const Point& x) { return std::cos(k * x[0]); });
}

}  // namespace

TEST_SUITE("nonlocal") {
  TEST_CASE("bilinear form basics") {
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.5);
    CoeffKernel K = checkerboard_kernel(1.0, 2.0);
    QuadConfig q;
    Field one = sample(g, [](const Point&) { return 3.0; });
    Field u = wave(g, 2);
    Field phi = sample(g, [](const Point& x) { return std::sin(x[0]) + 0.3 * std::cos(5 * x[0]); });
    CHECK(bilinear_form(K, p, one, phi, q) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(bilinear_form(K, p, u, phi, q) == doctest::Approx(bilinear_form(K, p, phi, u, q)).epsilon(1e-12));
    CHECK_THROWS_AS(bilinear_form(K, p, u, wave(line(128), 1), q), DomainError);
  }

  TEST_CASE("bilinear form of a plane wave follows Plancherel") {
    FracParams p = make_params(1, 0.5, 0.5);
    GridSpec g = make_grid(1, 8 * pi, 1024);
    const double c = frac_laplacian_constant(1, 2 * p.s);
    for (int k : {1, 3}) {
      Field u = sample(g, [k](const Point& x) { return std::cos(k * x[0]); });
      double expect = 2.0 / c * std::pow(k, 2 * p.s) * inner(u, u);
      CHECK(bilinear_form(constant_kernel(1.0), p, u, u, QuadConfig{}) == doctest::Approx(expect).epsilon(0.05));
    }
  }

  TEST_CASE("L_K with K = 1 matches the spectral operator") {
    std::mt19937_64 rng(21);
    GridSpec g = line(512);
    for (double s : {0.3, 0.5, 0.8}) {
      FracParams p = make_params(1, s, s);
      Field u = testing::random_band_limited(g, 8, rng);
      Field spectral = scaled(apply_multiplier(frac_laplacian(2 * s), u), 2.0 / frac_laplacian_constant(1, 2 * s));
      CHECK(rel_l2(apply_LK(constant_kernel(1.0), p, u, QuadConfig{}), spectral) < 1e-2);
    }
  }

  TEST_CASE("L_K annihilates constants and requires symmetry") {
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.5);
    Field one = sample(g, [](const Point&) { return 2.0; });
    CHECK(field_norms(apply_LK(checkerboard_kernel(1.0, 2.0), p, one, QuadConfig{}), INFINITY) < 1e-10);
    CoeffKernel asym("asym", [](const Point& x, const Point&) { return 1.0 + 0.5 * std::sin(x[0]); }, 0.5, 1.5, false);
    CHECK_THROWS_AS(apply_LK(asym, p, wave(g, 1), QuadConfig{}), DomainError);
  }

  TEST_CASE("strong and weak forms are dual for kernels periodic on the box") {
    std::mt19937_64 rng(22);
    FracParams p = make_params(1, 0.4, 0.4);
    // checkerboard has period 2, so it needs a box whose period is a multiple of 2
    for (auto [spec, extent] : {std::pair{"checkerboard:1,2", 4.0}, std::pair{"smooth_perturbation:0.3", pi}}) {
      GridSpec g = make_grid(1, extent, 256);
      CoeffKernel K = builtin_kernel(spec);
      Field u = testing::random_band_limited(g, 6, rng), phi = testing::random_band_limited(g, 6, rng);
      double strong = inner(apply_LK(K, p, u, QuadConfig{}), phi);
      double weak = bilinear_form(K, p, u, phi, QuadConfig{});
      INFO(std::string(spec));
      CHECK(strong == doctest::Approx(weak).epsilon(1e-8));
    }
  }

  TEST_CASE("energy is non-negative") {
    std::mt19937_64 rng(23);
    GridSpec g = line(128);
    FracParams p = make_params(1, 0.5, 0.5);
    CoeffKernel K = builtin_kernel("random_bounded:0,1,5");
    for (int k = 0; k < 10; ++k) {
      Field u = testing::random_band_limited(g, 10, rng);
      CHECK(bilinear_form(K, p, u, u, QuadConfig{}) >= 0.0);
    }
  }

  TEST_CASE("T with K = 1 is the calibrated identity") {
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.5);
    Field f = wave(g, 3);
    Field Tf = apply_T_composite(constant_kernel(1.0), p, f, QuadConfig{});
    CHECK(rel_l2(Tf, scaled(f, 1.0 / frac_laplacian_constant(1, 1.0))) < 1e-2);
    CHECK(field_norms(apply_T_composite(constant_kernel(1.0), p, Field(g), QuadConfig{}), INFINITY) == 0.0);
    Field shifted = sample(g, [](const Point& x) { return 1.0 + std::cos(x[0]); });
    CHECK_THROWS_AS(apply_T_composite(constant_kernel(1.0), p, shifted, QuadConfig{}), DomainError);
  }

  TEST_CASE("T is linear in f") {
    std::mt19937_64 rng(24);
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.4);
    CoeffKernel K = checkerboard_kernel(1.0, 2.0);
    Field f = testing::random_band_limited(g, 8, rng), h = testing::random_band_limited(g, 8, rng);
    Field lhs = apply_T_composite(K, p, combine(2.0, f, -3.0, h), QuadConfig{});
    Field rhs = combine(2.0, apply_T_composite(K, p, f, QuadConfig{}), -3.0, apply_T_composite(K, p, h, QuadConfig{}));
    CHECK(rel_l2(lhs, rhs) < 1e-12);
  }

  TEST_CASE("kernel route trivial cases and cost guard") {
    GridSpec g = make_grid(1, 4 * pi, 64);
    FracParams p = make_params(1, 0.5, 0.5);
    std::vector<Point> pts{{0.1, 0, 0}, {1.1, 0, 0}};
    KernelRouteResult z = apply_T_kernel(smooth_perturbation_kernel(0.1), p, Field(g), pts, QuadConfig{});
    CHECK(z.value == std::vector<double>{0.0, 0.0});
    Field f = sample(g, [](const Point& x) { return testing::bump(x, 1, 1.0); });
    KernelRouteResult k0 = apply_T_kernel(constant_kernel(0.0), p, f, pts, QuadConfig{});
    CHECK(k0.value == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(apply_T_kernel(smooth_perturbation_kernel(0.1), p, f, pts, QuadConfig{}, 3), ParamError);
  }

  TEST_CASE("Neumann solve with K = 1 takes one iteration") {
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.5);
    Field gfield = wave(g, 2);
    SolveReport r = neumann_solve(constant_kernel(1.0), p, gfield, 1e-8, 64, QuadConfig{});
    CHECK(r.iterations == 1);
    Field rhs = scaled(apply_multiplier(riesz_potential(p.s2), gfield), r.calibration);
    CHECK(rel_l2(r.solution, rhs) < 1e-14);
    CHECK(rel_l2(r.u, apply_multiplier(riesz_potential(p.s1), rhs)) < 1e-14);
  }

  TEST_CASE("Neumann residuals contract and the solution satisfies the weak form") {
    std::mt19937_64 rng(25);
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.5);
    CoeffKernel K = smooth_perturbation_kernel(0.05);
    Field gfield = testing::random_band_limited(g, 6, rng);
    SolveReport r = neumann_solve(K, p, gfield, 1e-10, 64, QuadConfig{});
    CHECK(r.contraction_est < 0.5);
    for (std::size_t k = 1; k < r.residual_history.size(); ++k)
      CHECK(r.residual_history[k] <= 1.05 * r.contraction_est * r.residual_history[k - 1]);
    for (int k = 1; k <= 8; ++k) {
      Field phi = sample(g, [k](const Point& x) { return k % 2 ? std::cos(k * x[0]) : std::sin(k * x[0]); });
      double lhs = bilinear_form(K, p, r.u, phi, QuadConfig{});
      double rhs = inner(gfield, phi);
      CHECK(lhs == doctest::Approx(rhs).scale(field_norms(gfield, 2)).epsilon(1e-6));
    }
  }

  TEST_CASE("Neumann solve reports non-convergence with its history") {
    GridSpec g = line();
    FracParams p = make_params(1, 0.5, 0.5);
    try {
      neumann_solve(smooth_perturbation_kernel(0.5), p, wave(g, 1), 1e-12, 2, QuadConfig{});
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(e.history().size() == 2);
    }
    CHECK_THROWS_AS(neumann_solve(constant_kernel(1.0), p, wave(g, 1), 0.0, 4, QuadConfig{}), ParamError);
  }
}
