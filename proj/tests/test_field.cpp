#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdlab/errors.hpp"
#include "sdlab/field.hpp"

using namespace sdlab;

namespace {

ScalarField sample() {
  ScalarField f(2);
  f.add_term({0.7, {2, 1}, {}, Trig::none});
  f.add_term({-1.3, {0, 3}, {}, Trig::none});
  f.add_term({0.4, {1, 0}, {0.5, -1.25}, Trig::cos});
  f.add_term({0.9, {0, 0}, {2.0, 0.3}, Trig::sin});
  return f;
}

double central(const ScalarField& f, std::vector<double> x, int i, double h) {
  x[i] += h;
  const double fp = f.value(x);
  x[i] -= 2 * h;
  return (fp - f.value(x)) / (2 * h);
}

}  // namespace

TEST_CASE("exact partials agree with central differences") {
  const ScalarField f = sample();
  const std::vector<double> x{0.31, -0.42};
  const ScalarJet j = f.jet(x);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    CHECK(j.dx(i) == doctest::Approx(central(f, x, i, h)).epsilon(1e-8));
    for (int k = 0; k < 2; ++k) {
      std::vector<double> xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (f.jet(xp).dx(i) - f.jet(xm).dx(i)) / (2 * h);
      CHECK(j.dxx(i, k) == doctest::Approx(fd).epsilon(1e-7));
      for (int l = 0; l < 2; ++l) {
        const double fd3 = (f.jet(xp).dxx(i, l) - f.jet(xm).dxx(i, l)) / (2 * h);
        CHECK(j.dxxx(i, l, k) == doctest::Approx(fd3).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("product and sum are pointwise") {
  const ScalarField f = sample();
  ScalarField g(2);
  g.add_term({1.5, {1, 1}, {}, Trig::none});
  g.add_term({0.2, {0, 0}, {1.0, 1.0}, Trig::cos});
  const std::vector<double> x{-0.2, 0.65};
  CHECK((f * g).value(x) == doctest::Approx(f.value(x) * g.value(x)).epsilon(1e-13));
  CHECK((f + g).value(x) == doctest::Approx(f.value(x) + g.value(x)).epsilon(1e-13));
  CHECK((2.5 * f).value(x) == doctest::Approx(2.5 * f.value(x)).epsilon(1e-13));
  CHECK((f * g).simplified().value(x) == doctest::Approx(f.value(x) * g.value(x)).epsilon(1e-13));
}

TEST_CASE("terms with the wrong arity are rejected") {
  ScalarField f(2);
  CHECK_THROWS_AS(f.add_term({1.0, {1, 0, 0}, {}, Trig::none}), Error);
  CHECK_THROWS_AS(f.add_term({1.0, {-1, 0}, {}, Trig::none}), Error);
}
