#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "sdlab/fields.hpp"
#include "sdlab/frame_spectral.hpp"

using namespace sdlab;

TEST_CASE("frame of a constant field in two dimensions") {
  const ChartField f = fields::constant_2d(1.75);
  const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
  REQUIRE(fr.a.size() == 1);
  CHECK(fr.a[0] == doctest::Approx(1.75).epsilon(1e-14));
  CHECK((fr.e.transpose() * fr.e - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  // d/dz and d/dzbar are complex conjugate
  const CMat v = fr.complex_vectors();
  CHECK((v.col(0).conjugate() - v.col(1)).cwiseAbs().maxCoeff() < 1e-14);
  const GeometryJet jet = covariant_jet(f, fr);
  for (const auto& m : jet.dJc) CHECK(m.cwiseAbs().maxCoeff() < 1e-14);
  for (const auto& m : jet.ddJc) CHECK(m.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("eigenvalues are ascending and match |cal J| on T^(1,0)") {
  const ChartField f = fields::random_local(3, 21);
  const PointEndos e = endos_at(f, f.x0);
  const DiagonalFrame fr = build_frame(e);
  for (std::size_t j = 1; j < fr.a.size(); ++j) CHECK(fr.a[j - 1] <= fr.a[j]);
  // |cal J| w_j = a_j w_j
  for (int j = 0; j < 3; ++j) {
    const CVec w = fr.w.col(j);
    CHECK((e.absJ.cast<cplx>() * w - fr.a[j] * w).norm() < 1e-12 * (1 + fr.a[j]));
  }
}

TEST_CASE("jets of seeded random fields satisfy the structural identities") {
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const ChartField f = fields::random_local(n, s);
      const GeometryJet jet = covariant_jet(f, build_frame(endos_at(f, f.x0)));
      CHECK(jet_residuals(jet).max() < 1e-10);
      CHECK(q_residuals(q_coefficients(jet)).max() < 1e-10);
    }
}

TEST_CASE("degenerate family has equal eigenvalues at the basepoint") {
  const ChartField f = fields::degenerate(3, 4);
  const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
  CHECK(fr.a[0] == doctest::Approx(fr.a[2]).epsilon(1e-12));
}

TEST_CASE("q coefficients transform covariantly under per-vector phases") {
  const ChartField f = fields::random_local(2, 9);
  const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
  const double t0 = 0.7, t1 = -1.9;
  CMat U = CMat::Zero(2, 2);
  U(0, 0) = std::polar(1.0, t0);
  U(1, 1) = std::polar(1.0, t1);
  const QCoeffs q = q_coefficients(covariant_jet(f, fr));
  const QCoeffs qr = q_coefficients(covariant_jet(f, fr.regauged(U)));
  // |q| tables are phase invariant
  for (std::size_t i = 0; i < q.hol.size(); ++i) {
    CHECK(std::abs(qr.hol[i]) == doctest::Approx(std::abs(q.hol[i])).epsilon(1e-10));
    CHECK(std::abs(qr.mix[i]) == doctest::Approx(std::abs(q.mix[i])).epsilon(1e-10));
    CHECK(std::abs(qr.anti[i]) == doctest::Approx(std::abs(q.anti[i])).epsilon(1e-10));
  }
}
