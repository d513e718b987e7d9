#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"
#include "sdlab/reports.hpp"
#include "sdlab/rho_formula.hpp"

using namespace sdlab;

namespace {

// Haar-ish random unitary from the QR of a complex Gaussian matrix
CMat random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  CMat Z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Z(i, j) = cplx(N(rng), N(rng));
  Eigen::HouseholderQR<CMat> qr(Z);
  return qr.householderQ() * CMat::Identity(n, n);
}

}  // namespace

TEST_CASE("constant field has zero density") {
  const GeometryJet jet = field_jet(fields::constant_2d(2.5));
  CHECK(std::abs(rho_closed(jet).rho) < 1e-14);
  CHECK(std::abs(rho_polar(jet).rho) < 1e-14);
}

TEST_CASE("the density vanishes identically in real dimension two") {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const GeometryJet jet = field_jet(fields::random_local(1, s));
    CHECK(std::abs(rho_closed(jet).rho) < 1e-12);
    CHECK(std::abs(rho_polar(jet).rho) < 1e-12);
  }
  CHECK(std::abs(rho_closed(field_jet(fields::cosine_2d(2.0, 0.5, {0.3, 0.1}))).rho) < 1e-12);
}

TEST_CASE("closed and polar forms agree on a seeded battery") {
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t s = 100; s < 110; ++s) {
      const GeometryJet jet = field_jet(fields::random_local(n, s));
      const double c = rho_closed(jet).rho;
      CHECK(std::abs(rho_polar(jet).rho - c) <= 1e-7 * (1 + std::abs(c)));
    }
}

TEST_CASE("frozen closed-form values, cross-checked against the polar form") {
  const double want2 = -0.05318352763023762, want3 = -0.54996077722300274;
  CHECK(rho_closed(field_jet(fields::random_local(2, 11))).rho == doctest::Approx(want2).epsilon(1e-12));
  CHECK(rho_closed(field_jet(fields::random_local(3, 11))).rho == doctest::Approx(want3).epsilon(1e-12));
  CHECK(rho_polar(field_jet(fields::random_local(2, 11))).rho == doctest::Approx(want2).epsilon(1e-12));
}

TEST_CASE("B = 2 pi J: closed form equals |nabla J|^2 / 24") {
  for (int n = 2; n <= 3; ++n)
    for (std::uint64_t s = 1; s <= 4; ++s) {
      const GeometryJet jet = field_jet(fields::almost_kahler(n, s));
      const double want = rho_almost_kahler(jet);
      CHECK(want > 1e-4);
      CHECK(rho_closed(jet).rho == doctest::Approx(want).epsilon(1e-7));
    }
  CHECK_THROWS_AS(rho_almost_kahler(field_jet(fields::random_local(2, 1))), Error);
}

TEST_CASE("nabla J = 0 jets: the two-group display evaluates to minus the closed form") {
  for (int n = 2; n <= 3; ++n)
    for (std::uint64_t s = 1; s <= 4; ++s) {
      const GeometryJet jet = field_jet(fields::kahler_potential(n, s));
      const double closed = rho_closed(jet).rho;
      CHECK(std::abs(closed) > 1e-4);
      CHECK(rho_kahler_case(jet) == doctest::Approx(-closed).epsilon(1e-9));
    }
  CHECK_THROWS_AS(rho_kahler_case(field_jet(fields::random_local(2, 1))), Error);
}

TEST_CASE("closed form is invariant under unitary regauging of degenerate eigenspaces") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const ChartField f = fields::degenerate(n, 30 + trial);
    const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
    const double base = rho_closed(covariant_jet(f, fr)).rho;
    const double moved = rho_closed(covariant_jet(f, fr.regauged(random_unitary(n, rng)))).rho;
    CHECK(std::abs(moved - base) <= 1e-9 * (1 + std::abs(base)));
  }
}

TEST_CASE("closed form is invariant under per-vector phases") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3.14, 3.14);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const ChartField f = fields::random_local(3, s);
    const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
    CMat U = CMat::Zero(3, 3);
    for (int j = 0; j < 3; ++j) U(j, j) = std::polar(1.0, u(rng));
    const double base = rho_closed(covariant_jet(f, fr)).rho;
    CHECK(rho_closed(covariant_jet(f, fr.regauged(U))).rho ==
          doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("gradient norm of J in the real frame") {
  // |nabla J|^2 is independent of the frame and vanishes for a constant field
  CHECK(grad_J_norm_sq(field_jet(fields::constant_2d(1.0))) < 1e-28);
  const ChartField f = fields::almost_kahler(2, 2);
  const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
  CMat U = CMat::Identity(2, 2);
  U(1, 1) = std::polar(1.0, 0.4);
  CHECK(grad_J_norm_sq(covariant_jet(f, fr.regauged(U))) ==
        doctest::Approx(grad_J_norm_sq(covariant_jet(f, fr))).epsilon(1e-10));
}
