#include <cmath>
#include <random>

#include "doctest.h"
#include "fracop/czkernel.hpp"
#include "fracop/error.hpp"

using namespace fracop;

namespace {

Point p1(double v) { return {v, 0.0, 0.0}; }

// Midpoint rule on an M x M grid over [-R, R]^2 with the diagonal cells dropped, n = 1, K = 1.
double brute_force_A(double s, double s1, double s2, double z1, double z2, double R, int M) {
  const double h = 2.0 * R / M;
  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    double x = -R + (i + 0.5) * h;
    double row = 0.0;
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      double y = -R + (j + 0.5) * h;
      double d1 = std::pow(std::fabs(x - z1), s1 - 1.0) - std::pow(std::fabs(y - z1), s1 - 1.0);
      double d2 = std::pow(std::fabs(x - z2), s2 - 1.0) - std::pow(std::fabs(y - z2), s2 - 1.0);
      row += d1 * d2 / std::pow(std::fabs(x - y), 1.0 + 2.0 * s);
    }
    total += row;
  }
  return total * h * h;
}

QuadConfig kernel_cfg() {
  QuadConfig q;
  q.trunc_radius = 16.0;
  return q;
}

}  // namespace

TEST_SUITE("czkernel") {
  TEST_CASE("estimate window") {
    FracParams p = make_params(1, 0.5, 0.5);
    EstimateConfig d = default_estimate_config(p);
    CHECK(d.theta == doctest::Approx(0.04995));
    CHECK(d.alpha == doctest::Approx(d.theta / 20.0));
    CHECK(d.sigma == doctest::Approx(0.5 * (0.5 + d.theta + 1.0)));
    CHECK_THROWS_AS(make_estimate_config(p, 0.1, 0.0, 0.8), ParamError);
    CHECK_THROWS_AS(make_estimate_config(p, 0.06, 0.0, 0.8), ParamError);  // 10 theta > s
    CHECK_THROWS_AS(make_estimate_config(p, 0.04, 0.004, 0.8), ParamError);
    CHECK_THROWS_AS(make_estimate_config(p, 0.04, 0.001, 0.5), ParamError);
    CHECK_THROWS_AS(make_estimate_config(p, 0.04, 0.001, 1.0), ParamError);
  }

  TEST_CASE("kappa values") {
    FracParams p = make_params(1, 0.5, 0.5);
    EstimateConfig est = make_estimate_config(p, 0.045, 0.004, 0.6);
    // 60-digit transcription of the two displayed majorants at (x, y, z1, z2) = (0.3, 0.7, 0, 1).
    CHECK(eval_kappa(1, p, est, p1(0.3), p1(0.7), p1(0.0), p1(1.0)) ==
          doctest::Approx(2.512676396586401).epsilon(1e-13));
    CHECK(eval_kappa(2, p, est, p1(0.3), p1(0.7), p1(0.0), p1(1.0)) ==
          doctest::Approx(3.37149090791535).epsilon(1e-13));
    CHECK(eval_kappa(1, p, est, p1(0.3), p1(-0.3), p1(0.0), p1(1.0)) == 0.0);
    CHECK_THROWS_AS(eval_kappa(1, p, est, p1(0.0), p1(0.7), p1(0.0), p1(1.0)), DomainError);
    CHECK_THROWS_AS(eval_kappa(2, p, est, p1(0.4), p1(0.4), p1(0.0), p1(1.0)), DomainError);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    FracParams p2 = make_params(2, 0.5, 0.45);
    EstimateConfig e2 = default_estimate_config(p2);
    bool nonneg = true;
    for (int k = 0; k < 10000; ++k) {
      Point x{u(rng), u(rng), 0}, y{u(rng), u(rng), 0}, z2{u(rng), u(rng), 0};
      nonneg = nonneg && eval_kappa(2, p2, e2, x, y, Point{0, 0, 0}, z2) >= 0.0;
    }
    CHECK(nonneg);
  }

  TEST_CASE("A of the zero kernel vanishes") {
    FracParams p = make_params(1, 0.5, 0.5);
    KernelValue a = eval_A(constant_kernel(0.0), p, p1(-0.5), p1(0.5), kernel_cfg());
    CHECK(a.value == 0.0);
    CHECK_THROWS_AS(eval_A(constant_kernel(1.0), p, p1(0.5), p1(0.5), kernel_cfg()), DomainError);
  }

  TEST_CASE("A against a brute-force double Riemann sum") {
    // K = 1 without centering on the box [-4, 4]^2.
    FracParams p = make_params(1, 0.5, 0.5);
    QuadConfig q;
    q.trunc_radius = 4.0;
    KernelValue a = eval_A(constant_kernel(1.0), p, p1(0.0), p1(1.0), q, false);
    double f1 = brute_force_A(0.5, 0.5, 0.5, 0.0, 1.0, 4.0, 400);
    double f2 = brute_force_A(0.5, 0.5, 0.5, 0.0, 1.0, 4.0, 800);
    double f3 = brute_force_A(0.5, 0.5, 0.5, 0.0, 1.0, 4.0, 1600);
    // Aitken extrapolation over the three levels; its bar is the last correction.
    double ratio = (f2 - f1) / (f3 - f2);
    REQUIRE(ratio > 1.0);
    double extrapolated = f3 + (f3 - f2) / (ratio - 1.0);
    double oracle_bar = std::fabs(extrapolated - f3);
    MESSAGE("engine " << a.value << " +- " << a.est_error << ", oracle " << extrapolated << " +- " << oracle_bar);
    CHECK(std::fabs(a.value - extrapolated) <= a.est_error + oracle_bar);
  }

  TEST_CASE("A is invariant under swapping (z1, s1) and (z2, s2)") {
    FracParams p = make_params(1, 0.5, 0.4), q = make_params(1, 0.5, 0.6);
    CoeffKernel K = smooth_perturbation_kernel(0.3);
    KernelValue a = eval_A(K, p, p1(-0.3), p1(0.9), kernel_cfg());
    KernelValue b = eval_A(K, q, p1(0.9), p1(-0.3), kernel_cfg());
    CHECK(std::fabs(a.value - b.value) <= a.est_error + b.est_error + 1e-12 * std::fabs(a.value));
  }

  TEST_CASE("A is linear in K") {
    FracParams p = make_params(1, 0.5, 0.5);
    CoeffKernel k1 = checkerboard_kernel(1.0, 2.0), k2 = smooth_perturbation_kernel(0.3);
    CoeffKernel mix = CoeffKernel::combination(2.0, k1, -0.5, k2);
    QuadConfig q = kernel_cfg();
    double a1 = eval_A(k1, p, p1(-0.5), p1(0.5), q).value;
    double a2 = eval_A(k2, p, p1(-0.5), p1(0.5), q).value;
    double am = eval_A(mix, p, p1(-0.5), p1(0.5), q).value;
    CHECK(am == doctest::Approx(2.0 * a1 - 0.5 * a2).epsilon(1e-10));
  }

  TEST_CASE("|A| is majorized by sup|K| times M_1 with alpha = 0") {
    FracParams p = make_params(1, 0.5, 0.5);
    EstimateConfig est = make_estimate_config(p, 0.045, 0.0, 0.6);
    CoeffKernel K = checkerboard_kernel(1.0, 2.0);
    QuadConfig q = kernel_cfg();
    for (double d : {0.5, 2.0}) {
      KernelValue a = eval_A(K, p, p1(-0.5 * d), p1(0.5 * d), q);
      KernelValue m = eval_M(1, constant_kernel(1.0), p, est, p1(-0.5 * d), p1(0.5 * d), q);
      CHECK(std::fabs(a.value) <= K.sup_norm() * (m.value + m.est_error) + a.est_error);
    }
  }

  TEST_CASE("M is linear in K and vanishes for K = 0") {
    FracParams p = make_params(1, 0.5, 0.5);
    EstimateConfig est = default_estimate_config(p);
    QuadConfig q = kernel_cfg();
    for (int l : {1, 2}) {
      double m1 = eval_M(l, constant_kernel(1.0), p, est, p1(-0.5), p1(0.5), q).value;
      double m2 = eval_M(l, constant_kernel(2.0), p, est, p1(-0.5), p1(0.5), q).value;
      CHECK(m2 == 2.0 * m1);
      CHECK(m1 > 0.0);
      CHECK(eval_M(l, constant_kernel(0.0), p, est, p1(-0.5), p1(0.5), q).value == 0.0);
    }
    CHECK_THROWS_AS(eval_M(3, constant_kernel(1.0), p, est, p1(-0.5), p1(0.5), q), ParamError);
  }

  TEST_CASE("region contributions over-count M") {
    FracParams p = make_params(1, 0.5, 0.5);
    EstimateConfig est = default_estimate_config(p);
    QuadConfig q = kernel_cfg();
    for (int l : {1, 2}) {
      KernelValue m = eval_M(l, constant_kernel(1.0), p, est, p1(-0.5), p1(0.5), q);
      auto parts = region_contributions(l, constant_kernel(1.0), p, est, p1(-0.5), p1(0.5), q);
      double sum = 0.0;
      bool nonneg = true;
      for (const auto& r : parts) {
        sum += r.value;
        nonneg = nonneg && r.value >= 0.0;
      }
      CHECK(nonneg);
      CHECK(sum >= m.value - m.est_error);
      KernelValue one = region_contribution(1, 1, 1, l, constant_kernel(1.0), p, est, p1(-0.5), p1(0.5), q);
      CHECK(one.value == doctest::Approx(parts[0].value).epsilon(1e-12));
    }
    CHECK_THROWS_AS(region_contribution(0, 1, 1, 1, constant_kernel(1.0), p, est, p1(-0.5), p1(0.5), q), ParamError);
  }

  TEST_CASE("truncation box must cover the poles") {
    FracParams p = make_params(1, 0.5, 0.5);
    QuadConfig q;
    q.trunc_radius = 3.0;
    CHECK_THROWS_AS(eval_A(constant_kernel(1.0), p, p1(0.0), p1(1.0), q), ParamError);
  }
}
