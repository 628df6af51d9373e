#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fracop/core.hpp"
#include "fracop/error.hpp"
#include "helpers.hpp"

using namespace fracop;

TEST_SUITE("core") {
  TEST_CASE("make_params derives s2") {
    FracParams p = make_params(1, 0.5, 0.5);
    CHECK(p.s2 == 0.5);
    FracParams q = make_params(2, 0.4, 0.6);
    CHECK(q.s2 == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(q.n == 2);
  }

  TEST_CASE("make_params rejects out-of-range exponents and names the bound") {
    try {
      make_params(1, 0.5, 1.1);
      FAIL("expected ParamError");
    } catch (const ParamError& e) {
      CHECK(std::string(e.what()).find("s1") != std::string::npos);
    }
    CHECK_THROWS_AS(make_params(1, 0.0, 0.5), ParamError);
    CHECK_THROWS_AS(make_params(1, 1.0, 0.5), ParamError);
    CHECK_THROWS_AS(make_params(1, 0.3, 0.7), ParamError);  // s2 = -0.1
    CHECK_THROWS_AS(make_params(1, 0.7, 0.3), ParamError);  // s2 = 1.1
    CHECK_THROWS_AS(make_params(0, 0.5, 0.5), ParamError);
    CHECK_THROWS_AS(make_params(4, 0.5, 0.5), ParamError);
  }

  TEST_CASE("make_params keeps s1 + s2 = 2s on random valid inputs") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    int made = 0;
    for (int k = 0; k < 10000; ++k) {
      double s = u(rng), s1 = u(rng);
      if (!(2 * s - s1 > 0.0 && 2 * s - s1 < 1.0)) continue;
      FracParams p = make_params(1, s, s1);
      CHECK(std::fabs(p.s1 + p.s2 - 2 * p.s) <= 4e-16);
      ++made;
    }
    CHECK(made > 1000);
  }

  TEST_CASE("grid requires a power of two") {
    CHECK_THROWS_AS(make_grid(1, std::numbers::pi, 100), ParamError);
    CHECK_THROWS_AS(make_grid(1, -1.0, 64), ParamError);
    GridSpec g = make_grid(2, 2.0, 8);
    CHECK(g.size() == 64);
    CHECK(g.spacing() == 0.5);
    CHECK(g.coord(0) == -2.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.flatten(g.unflatten(i)) == i);
  }

  TEST_CASE("field_norms examples") {
    GridSpec g = make_grid(1, std::numbers::pi, 256);
    Field one = sample(g, [](const Point&) { return 1.0; });
    CHECK(field_norms(one, 1.0) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-14));
    Field zero(g);
    for (double p : {1.0, 2.0, 3.5, HUGE_VAL}) CHECK(field_norms(zero, p) == 0.0);
    Field s = sample(g, [](const Point& x) { return std::sin(x[0]); });
    CHECK(field_norms(s, 2.0) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(field_norms(s, INFINITY) == doctest::Approx(1.0));
    CHECK_THROWS_AS(field_norms(s, 0.5), ParamError);
    Field bad = s;
    bad[3] = NAN;
    CHECK_THROWS_AS(field_norms(bad, 2.0), NumericError);
  }

  TEST_CASE("field_norms homogeneity and triangle inequality") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    GridSpec g = make_grid(2, 1.0, 16);
    for (int trial = 0; trial < 50; ++trial) {
      Field f(g), h(g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        f[i] = gauss(rng);
        h[i] = gauss(rng);
      }
      double c = gauss(rng);
      for (double p : {1.0, 2.0, 3.0, HUGE_VAL}) {
        CHECK(field_norms(scaled(f, c), p) == doctest::Approx(std::fabs(c) * field_norms(f, p)).epsilon(1e-12));
        CHECK(field_norms(combine(1.0, f, 1.0, h), p) <= field_norms(f, p) + field_norms(h, p) + 1e-12);
      }
    }
  }

  TEST_CASE("builtin kernels") {
    CoeffKernel c = builtin_kernel("constant:1");
    CHECK(c.lower() == 1.0);
    CHECK(c.upper() == 1.0);
    CHECK(c.symmetric());
    CHECK(c(Point{0.3, 0, 0}, Point{-2, 0, 0}) == 1.0);

    CoeffKernel sp = builtin_kernel("smooth_perturbation:0.05");
    CHECK(sp.lower() == doctest::Approx(0.95));
    CHECK(sp.upper() == doctest::Approx(1.05));
    CHECK(1.0 - sp.lower() / sp.upper() == doctest::Approx(0.0952380952).epsilon(1e-9));
    CHECK(sp(Point{0, 0, 0}, Point{0, 0, 0}) == doctest::Approx(1.05));

    CoeffKernel cb = builtin_kernel("checkerboard:1,2");
    CHECK(cb(Point{0.5, 0, 0}, Point{0.5, 0, 0}) == 1.0);  // cells 0 and 0
    CHECK(cb(Point{0.5, 0, 0}, Point{1.5, 0, 0}) == 2.0);  // cells 0 and 1
    CHECK(cb(Point{-0.5, 0, 0}, Point{1.5, 0, 0}) == 1.0);  // cells -1 and 1

    CHECK_THROWS_AS(builtin_kernel("nope:1"), ParamError);
    CHECK_THROWS_AS(builtin_kernel("checkerboard:2,1"), ParamError);
    CHECK_THROWS_AS(builtin_kernel("checkerboard:1"), ParamError);
    CHECK_THROWS_AS(builtin_kernel("random_bounded:1,2,0.5"), ParamError);
  }

  TEST_CASE("builtin kernels respect their bounds and symmetry on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (const char* spec : {"constant:1", "smooth_perturbation:0.05", "smooth_perturbation:0.9", "checkerboard:1,2",
                             "random_bounded:0.5,3,42"}) {
      CoeffKernel K = builtin_kernel(spec);
      bool ok = true;
      for (int k = 0; k < 10000; ++k) {
        Point x{u(rng), u(rng), u(rng)}, y{u(rng), u(rng), u(rng)};
        double v = K(x, y);
        ok = ok && v >= K.lower() && v <= K.upper() && v == K(y, x);
      }
      INFO(std::string(spec));
      CHECK(ok);
    }
  }

  TEST_CASE("kernel algebra keeps bounds") {
    CoeffKernel cb = checkerboard_kernel(1.0, 2.0);
    CoeffKernel a = cb.affine(-2.0, 1.0);
    CHECK(a.lower() == -3.0);
    CHECK(a.upper() == -1.0);
    CoeffKernel m = CoeffKernel::combination(2.0, cb, 3.0, constant_kernel(1.0));
    CHECK(m.lower() == 5.0);
    CHECK(m.upper() == 7.0);
    CHECK(m.jump_lattice() == 1.0);
  }

  TEST_CASE("field serialization round trip") {
    GridSpec g = make_grid(2, 1.5, 8);
    Field f = sample(g, [](const Point& x) { return std::sin(3 * x[0]) * x[1] + 1e-300; }, "probe");
    std::stringstream ss;
    write_field(ss, f);
    std::string bytes = ss.str();
    CHECK(bytes.substr(0, bytes.find('\n')) == R"({"n":2,"extent":1.5,"points":8,"label":"probe"})");
    CHECK(bytes.size() == bytes.find('\n') + 1 + 8 * g.size());
    Field back = read_field(ss);
    CHECK(back.grid == g);
    CHECK(back.label == "probe");
    CHECK(back.values == f.values);

    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_field(cut), ParamError);
    std::stringstream junk("not json\n");
    CHECK_THROWS_AS(read_field(junk), ParamError);
  }

  TEST_CASE("field CSV export") {
    GridSpec g = make_grid(1, 1.0, 4);
    Field f = sample(g, [](const Point& x) { return x[0]; });
    std::stringstream ss;
    write_field_csv(ss, f);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "i0,x0,value");
    int rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == 4);
  }

  TEST_CASE("mean, remove_mean and subsample") {
    GridSpec g = make_grid(1, std::numbers::pi, 64);
    Field f = sample(g, [](const Point& x) { return 2.0 + std::cos(x[0]); });
    CHECK(mean(f) == doctest::Approx(2.0));
    CHECK(std::fabs(mean(remove_mean(f))) < 1e-15);
    Field c = subsample(f);
    CHECK(c.grid.points == 32);
    CHECK(c[5] == f[10]);
  }
}
