#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "sdlab/errors.hpp"
#include "sdlab/torus_lab.hpp"

using namespace sdlab;

namespace {

constexpr double kPi = std::numbers::pi;

TorusConfig constant_torus(int N, int n_flux, std::vector<int> p_list) {
  TorusConfig c;
  c.Nx = c.Ny = N;
  c.Lx = c.Ly = 2 * kPi;
  c.b0 = n_flux / (2 * kPi);
  c.p_list = std::move(p_list);
  return c;
}

TorusConfig cosine_torus() {
  TorusConfig c;
  c.Nx = 96;
  c.Ny = 24;
  c.Lx = 2 * kPi;
  c.Ly = 1.0;
  c.b0 = 2.0;
  c.b_modes = {{1, 0, 0.5, 0.0}};
  c.p_list = {4};
  return c;
}

}  // namespace

TEST_CASE("flux integrality and resolution are validated") {
  TorusConfig c = constant_torus(48, 1, {4});
  CHECK_NOTHROW(c.validate());
  c.b0 *= 1.01;
  CHECK_THROWS_AS(c.validate(), Error);
  TorusConfig coarse = constant_torus(16, 2, {24});
  try {
    coarse.validate();
    FAIL("coarse grid accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("edge integrals reproduce the cell flux exactly") {
  const TorusConfig c = cosine_torus();
  const LatticeOperator op = assemble(c, 3);
  CHECK(op.max_plaquette_error < 1e-12);
  CHECK(op.total_plaquette_flux == doctest::Approx(2 * kPi * 3 * c.n_flux()).epsilon(1e-12));
  CHECK(op.hermiticity_residual() < 1e-14);
  const double flux = torus_cell_flux(c, 0.3, 0.2, 0.1, 0.05);
  // midpoint estimate of the same cell
  CHECK(flux == doctest::Approx(c.b(0.35, 0.225) * 0.005).epsilon(1e-3));
}

TEST_CASE("spectrum is invariant under lattice gauge transformations") {
  const TorusConfig c = cosine_torus();
  const LatticeOperator op = assemble(c, 4);
  const LatticeOperator g = gauge_transformed(op, 17);
  const Spectrum a = low_spectrum(op.matrix, 12), b = low_spectrum(g.matrix, 12);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10);
}

TEST_CASE("Lanczos agrees with a dense solve") {
  const TorusConfig c = constant_torus(24, 1, {2});
  const LatticeOperator op = assemble(c, 2);
  REQUIRE(op.dim() > 256);
  const Spectrum lz = low_spectrum(op.matrix, 10);
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(op.matrix));
  for (int i = 0; i < 10; ++i) {
    CHECK(lz.values[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-10));
    CHECK(lz.residuals[i] < 1e-8 * op.norm_estimate());
  }
}

TEST_CASE("constant field: cluster of size p N_flux near zero, gap near 2 p b") {
  for (int nf : {1, 2}) {
    const TorusConfig c = constant_torus(48, nf, {4, 6});
    const DensityQuadrature quad = density_quadrature(c);
    CHECK(quad.mu0 == doctest::Approx(c.b0).epsilon(1e-12));
    CHECK(std::abs(quad.rho_mean) < 1e-14);
    for (int p : c.p_list) {
      const ClusterReport r = cluster_report(c, p, quad);
      CHECK(r.d_p == p * nf);
      const double h = c.hx();
      CHECK(r.max_abs_cluster <= 5 * (p * c.b0) * (p * c.b0) * h * h);
      CHECK(r.gap_hi == doctest::Approx(2 * p * quad.mu0).epsilon(0.1));
    }
  }
}

TEST_CASE("cluster detection uses the largest gap in the window") {
  const std::vector<double> ev{-0.01, 0.0, 0.02, 3.9, 4.1, 4.2};
  const Cluster cl = detect_cluster(ev, 2, 1.0);
  CHECK(cl.d == 3);
  CHECK(cl.gap_hi == doctest::Approx(3.9));
  CHECK_THROWS_AS(detect_cluster({0.0, 0.1, 0.2}, 2, 1.0), Error);
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isnan(loglog_slope({1}, {1})));
}
