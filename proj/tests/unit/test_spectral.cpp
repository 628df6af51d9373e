#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracop/error.hpp"
#include "fracop/spectral.hpp"
#include "helpers.hpp"

using namespace fracop;
using testing::rel_l2;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("plane waves are eigenfunctions") {
    GridSpec g = make_grid(1, pi, 64);
    Field f = sample(g, [](const Point& x) { return std::cos(3 * x[0]); });
    Field out = apply_multiplier(frac_laplacian(0.6), f);
    CHECK(std::pow(3.0, 0.6) == doctest::Approx(1.93318).epsilon(1e-5));
    CHECK(max_abs_diff(out, scaled(f, std::pow(3.0, 0.6))) < 1e-13);
    Field pot = apply_multiplier(riesz_potential(0.6), f);
    CHECK(max_abs_diff(pot, scaled(f, std::pow(3.0, -0.6))) < 1e-13);

    // Non-trivial extent: frequencies scale with pi / L.
    GridSpec g2 = make_grid(1, 2 * pi, 64);
    Field f2 = sample(g2, [](const Point& x) { return std::sin(1.5 * x[0]); });
    CHECK(max_abs_diff(apply_multiplier(frac_laplacian(1.0), f2), scaled(f2, 1.5)) < 1e-13);
  }

  TEST_CASE("constants are annihilated") {
    GridSpec g = make_grid(2, pi, 32);
    Field one = sample(g, [](const Point&) { return 1.0; });
    for (const MultiplierOp& op : {frac_laplacian(0.3), riesz_potential(0.7), riesz_transform(1)})
      CHECK(field_norms(apply_multiplier(op, one), INFINITY) < 1e-15);
  }

  TEST_CASE("Riesz potential inverts the fractional Laplacian on mean-zero fields") {
    std::mt19937_64 rng(5);
    for (int n : {1, 2}) {
      GridSpec g = make_grid(n, pi, n == 1 ? 256 : 64);
      for (double s : {0.3, 0.5, 0.7}) {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
          Field f = testing::random_band_limited(g, 20, rng);
          Field back = apply_multiplier(riesz_potential(s), apply_multiplier(frac_laplacian(s), f));
          worst = std::max(worst, rel_l2(back, f));
        }
        CHECK(worst <= 1e-12);
      }
    }
  }

  TEST_CASE("applying laps(s) twice equals laps(2s)") {
    std::mt19937_64 rng(6);
    GridSpec g = make_grid(2, pi, 64);
    for (double s : {0.2, 0.45}) {
      Field f = testing::random_band_limited(g, 12, rng);
      Field twice = apply_multiplier(frac_laplacian(s), apply_multiplier(frac_laplacian(s), f));
      CHECK(rel_l2(twice, apply_multiplier(frac_laplacian(2 * s), f)) < 1e-13);
    }
  }

  TEST_CASE("Riesz transforms are contractions with equality on axis-aligned spectra") {
    std::mt19937_64 rng(8);
    GridSpec g2 = make_grid(2, pi, 64);
    for (int k = 0; k < 5; ++k) {
      Field f = testing::random_band_limited(g2, 10, rng);
      for (int axis : {0, 1}) CHECK(field_norms(apply_multiplier(riesz_transform(axis), f), 2) <= field_norms(f, 2));
      Field r0 = apply_multiplier(riesz_transform(0), f), r1 = apply_multiplier(riesz_transform(1), f);
      // R_0^2 + R_1^2 = -Id on mean-zero fields.
      Field sum = combine(1.0, apply_multiplier(riesz_transform(0), r0), 1.0, apply_multiplier(riesz_transform(1), r1));
      CHECK(rel_l2(scaled(sum, -1.0), f) < 1e-12);
    }
    Field ax = sample(g2, [](const Point& x) { return std::cos(3 * x[0]) + std::sin(5 * x[0]); });
    CHECK(field_norms(apply_multiplier(riesz_transform(0), ax), 2) ==
          doctest::Approx(field_norms(ax, 2)).epsilon(1e-13));
    // R_0 cos(3x) = -sin(3x) with symbol i xi / |xi|.
    GridSpec g1 = make_grid(1, pi, 32);
    Field c = sample(g1, [](const Point& x) { return std::cos(3 * x[0]); });
    Field s = sample(g1, [](const Point& x) { return -std::sin(3 * x[0]); });
    CHECK(max_abs_diff(apply_multiplier(riesz_transform(0), c), s) < 1e-14);
  }

  TEST_CASE("principal value backend reproduces the symbol on plane waves") {
    GridSpec g = make_grid(1, pi, 512);
    QuadConfig q;
    for (double s : {0.5, 1.0}) {
      for (int k : {1, 3}) {
        Field f = sample(g, [k](const Point& x) { return std::cos(k * x[0]); });
        PvResult r = pv_frac_laplacian(f, s, q);
        double at0 = r.value[g.points / 2];
        CHECK(at0 == doctest::Approx(std::pow(k, s)).epsilon(1e-2));
      }
    }
  }

  TEST_CASE("principal value of zero is zero") {
    GridSpec g = make_grid(1, pi, 64);
    PvResult r = pv_frac_laplacian(Field(g), 0.5, QuadConfig{});
    CHECK(field_norms(r.value, INFINITY) == 0.0);
    CHECK(r.est_error == 0.0);
  }

  TEST_CASE("principal value agrees with the multiplier on bumps") {
    GridSpec g = make_grid(1, 4 * pi, 512);
    Field f = sample(g, [](const Point& x) { return testing::bump(x, 1, 2.0); });
    for (double s : {0.5, 1.0}) {
      PvResult r = pv_frac_laplacian(f, s, QuadConfig{});
      CHECK(rel_l2(r.value, apply_multiplier(frac_laplacian(s), f)) < 1e-2);
    }
  }

  TEST_CASE("doubling the truncation radius stays within the tail bound") {
    GridSpec g = make_grid(1, pi, 256);
    Field f = sample(g, [](const Point& x) { return testing::bump(x, 1, 1.0); });
    QuadConfig q;
    q.trunc_radius = 16.0;
    PvResult a = pv_frac_laplacian(f, 0.5, q);
    q.trunc_radius = 32.0;
    PvResult b = pv_frac_laplacian(f, 0.5, q);
    CHECK(max_abs_diff(a.value, b.value) <= a.tail_bound);
    CHECK(a.tail_bound > 0.0);
  }

  TEST_CASE("principal value input checks") {
    GridSpec g = make_grid(1, pi, 64);
    CHECK_THROWS_AS(pv_frac_laplacian(Field(g), 2.0, QuadConfig{}), ParamError);
    Field bad(g);
    bad[1] = INFINITY;
    CHECK_THROWS_AS(pv_frac_laplacian(bad, 0.5, QuadConfig{}), NumericError);
  }
}
