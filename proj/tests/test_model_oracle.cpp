#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"
#include "sdlab/model_oracle.hpp"
#include "sdlab/reports.hpp"
#include "sdlab/rho_formula.hpp"
#include "sdlab/selfcheck.hpp"

using namespace sdlab;

TEST_CASE("Gaussian normalization") {
  const ModelContext ctx({1.5, 2.5});
  const PolyGauss G = PolyGauss::constant(2);
  const double pi = std::numbers::pi;
  CHECK(norm_sq(ctx, G) == doctest::Approx(2 * pi / 1.5 * 2 * pi / 2.5).epsilon(1e-14));
  CHECK(ctx.bergman_origin() * norm_sq(ctx, G) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ctx.moment_quadrature_deviation() < 1e-12);
}

TEST_CASE("ladder operators respect the truncation degree") {
  const ModelContext ctx({1.0}, 6);
  const PolyGauss top = PolyGauss::monomial(1, {3}, {3});
  CHECK_THROWS_AS(apply_b(ctx, 0, top), Error);
  CHECK_NOTHROW(apply_b_plus(ctx, 0, top));
}

TEST_CASE("inverse_L rejects kernel components") {
  const ModelContext ctx({1.0, 2.0});
  CHECK_THROWS_AS(inverse_L(ctx, PolyGauss::monomial(2, {1, 0}, {0, 0})), Error);
  const PolyGauss f = apply_b(ctx, 1, PolyGauss::monomial(2, {1, 0}, {0, 0}));
  CHECK(norm_sq(ctx, inverse_L(ctx, f) - cplx(0.25) * f) < 1e-28);
}

TEST_CASE("flat jet gives zero") {
  const GeometryJet jet = GeometryJet::flat({1.0, 2.0, 3.0});
  const OracleBreakdown o = rho_oracle(jet, q_coefficients(jet));
  CHECK(std::abs(o.rho) < 1e-15);
}

TEST_CASE("frozen oracle values, cross-checked against the amended closed form") {
  const double want2 = -0.034536431282785093, want3 = -0.12353186267131711;
  for (auto [n, want] : {std::pair{2, want2}, std::pair{3, want3}}) {
    const GeometryJet jet = field_jet(fields::random_local(n, 11));
    const double o = rho_oracle(jet, q_coefficients(jet)).rho;
    CHECK(o == doctest::Approx(want).epsilon(1e-12));
    CHECK(rho_closed(jet, ClosedVariant::amended_j1).rho == doctest::Approx(o).epsilon(1e-12));
  }
}

TEST_CASE("A0 and A1 agree with the closed form; A3 decomposes into the four pieces") {
  for (int n = 1; n <= 3; ++n)
    for (std::uint64_t s = 40; s < 45; ++s) {
      const GeometryJet jet = field_jet(fields::random_local(n, s));
      const QCoeffs q = q_coefficients(jet);
      const OracleBreakdown o = rho_oracle(jet, q);
      const RhoBreakdown c = rho_closed(jet);
      CHECK(c.A0 == doctest::Approx(o.A0).epsilon(1e-10));
      CHECK(c.A1 == doctest::Approx(o.A1).epsilon(1e-10));
      const A3Pieces pieces = a3_pieces(ModelContext(jet.a), q);
      const double sum = 4.0 / 9.0 * (pieces.I[0] + pieces.I[1] + pieces.I[2] + pieces.I[3]);
      CHECK(std::abs(sum - o.A3) <= 1e-10 * (1 + std::abs(o.A3)));
      CHECK(o.A3 >= -1e-14);
      const DisplayedPartials d = displayed_partials(q, jet.a);
      CHECK(d.I1 == doctest::Approx(pieces.I[0]).epsilon(1e-10));
      CHECK(d.I2 == doctest::Approx(pieces.I[1]).epsilon(1e-10));
      CHECK(d.I4 == doctest::Approx(pieces.I[3]).epsilon(1e-10));
      // the displayed A2 and I3 omit the same cross terms, so A2 - A3 is unaffected
      CHECK(d.A2 - d.A3() == doctest::Approx(o.A2 - o.A3).epsilon(1e-10));
    }
}

TEST_CASE("truncation D = 6 and D = 8 agree") {
  for (int n = 1; n <= 3; ++n) {
    const GeometryJet jet = field_jet(fields::random_local(n, 77));
    const QCoeffs q = q_coefficients(jet);
    const OracleBreakdown a = rho_oracle(jet, q, 6), b = rho_oracle(jet, q, 8);
    CHECK(std::abs(a.rho - b.rho) <= 1e-10 * (1 + std::abs(a.rho)));
    CHECK(std::abs(a.A3 - b.A3) <= 1e-10 * (1 + std::abs(a.A3)));
  }
}

TEST_CASE("identity suite passes and the perturbed moment table is flagged") {
  const SelfcheckReport rep = run_selfcheck();
  for (const auto& c : rep.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  CHECK(rep.negative_control_flagged);
  CHECK(rep.all_pass());

  const ModelContext ctx({1.2, 2.1});
  bool flagged = false;
  for (const auto& c : norm_formula_checks(ctx.with_perturbed_moment(1, 3, 1.0 + 1e-6), 1e-9))
    flagged = flagged || !c.pass;
  CHECK(flagged);
}
