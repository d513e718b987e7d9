#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"
#include "sdlab/tensor_geometry.hpp"

using namespace sdlab;

namespace {

// g = w(x) Id on R^2 with w = 1 + c1 x + c2 (x^2 + y^2), A = (b/2)(x dy - y dx)
ChartField conformal(double c1, double c2, double b) {
  ChartField f = ChartField::zero(1);
  for (int i = 0; i < 2; ++i) {
    f.g_entry(i, i).add_term({1.0, {0, 0}, {}, Trig::none});
    f.g_entry(i, i).add_term({c1, {1, 0}, {}, Trig::none});
    f.g_entry(i, i).add_term({c2, {2, 0}, {}, Trig::none});
    f.g_entry(i, i).add_term({c2, {0, 2}, {}, Trig::none});
  }
  f.A[0].add_term({-0.5 * b, {0, 1}, {}, Trig::none});
  f.A[1].add_term({0.5 * b, {1, 0}, {}, Trig::none});
  return f;
}

}  // namespace

TEST_CASE("Christoffel symbols of a conformally flat metric") {
  const double c1 = 0.3, c2 = 0.7;
  const ChartField f = conformal(c1, c2, 1.0);
  const std::vector<double> x{0.4, -0.25};
  const double w = 1 + c1 * x[0] + c2 * (x[0] * x[0] + x[1] * x[1]);
  const double dw[2] = {c1 + 2 * c2 * x[0], 2 * c2 * x[1]};
  const Christoffel G = christoffel(f, x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double want =
            0.5 / w * ((k == i) * dw[j] + (k == j) * dw[i] - (i == j) * dw[k]);
        CHECK(G(k, i, j) == doctest::Approx(want).epsilon(1e-13));
      }
}

TEST_CASE("Gaussian curvature of w = 1 + |x|^2 is -2 / (1 + |x|^2)^3") {
  const ChartField f = conformal(0.0, 1.0, 1.0);
  for (const std::vector<double>& x : {std::vector<double>{0.0, 0.0}, {0.5, -0.3}, {-1.1, 0.8}}) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double w = 1 + r2;
    const Riemann R = riemann(f, x);
    const Mat g = Mat::Identity(2, 2) * w;
    const double K = R.lowered(g, 0, 1, 0, 1) / (w * w);
    CHECK(K == doctest::Approx(-2.0 / std::pow(1 + r2, 3)).epsilon(1e-12));
  }
}

TEST_CASE("first covariant derivative of J against finite differences, second order") {
  const ChartField f = fields::random_local(2, 3);
  const std::vector<double>& x = f.x0;
  const ChartJet jet = chart_jet(f, x);
  const Christoffel G = christoffel(f, x);
  auto error = [&](double h) {
    double e = 0.0;
    for (int i = 0; i < f.dim(); ++i) {
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const Mat dJ = (endos_at(f, xp).J - endos_at(f, xm).J) / (2 * h);
      const Mat cov = dJ + G.conn[i] * jet.J.value - jet.J.value * G.conn[i];
      e = std::max(e, (cov - jet.J.cov1[i]).cwiseAbs().maxCoeff());
    }
    return e;
  };
  const double e1 = error(2e-2), e2 = error(1e-2);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.9);
  CHECK(e2 < 1e-3);
}

TEST_CASE("J is g-orthogonal with J^2 = -1 and |cal J| is g-self-adjoint") {
  const ChartField f = fields::random_local(3, 8);
  const PointEndos e = endos_at(f, f.x0);
  const int d = f.dim();
  CHECK((e.J * e.J + Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((e.J.transpose() * e.g * e.J - e.g).cwiseAbs().maxCoeff() < 1e-12);
  const Mat ga = e.g * e.absJ;
  CHECK((ga - ga.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((e.absJ * e.J - e.J * e.absJ).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mu0 estimates") {
  const double pi = std::acos(-1.0);
  std::vector<std::vector<double>> grid;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 4; ++j) grid.push_back({2 * pi * i / 16, 0.25 * j});
  CHECK(mu0_estimate(fields::constant_2d(1.5), grid) == doctest::Approx(1.5).epsilon(1e-14));
  // b = 2 + 0.5 cos x on a flat metric: minimum at x = pi, which is on the grid
  CHECK(mu0_estimate(fields::cosine_2d(2.0, 0.5), grid) == doctest::Approx(1.5).epsilon(1e-13));
  // conformal metric: |cal J| = b / w
  const ChartField f = conformal(0.0, 1.0, 2.0);
  CHECK(mu0_estimate(f, std::vector<std::vector<double>>{{0.0, 0.0}, {1.0, 0.0}}) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("validation rejects degenerate input") {
  ChartField f = fields::constant_2d(1.0);
  CHECK_NOTHROW(f.validate());
  ChartField flat = ChartField::zero(1);
  flat.g_entry(0, 0).add_term({1.0, {0, 0}, {}, Trig::none});
  flat.g_entry(1, 1).add_term({1.0, {0, 0}, {}, Trig::none});
  CHECK_THROWS_AS(flat.validate(), Error);  // B = 0
  ChartField indefinite = fields::constant_2d(1.0);
  indefinite.g_entry(1, 1) = ScalarField::constant(2, -1.0);
  CHECK_THROWS_AS(indefinite.validate(), Error);
}
