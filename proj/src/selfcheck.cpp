#include "sdlab/selfcheck.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "sdlab/fields.hpp"

namespace sdlab {

namespace {

using MultiIndex = std::vector<int>;

// all beta in Z_+^n with |beta| <= d
std::vector<MultiIndex> multi_indices(int n, int d) {
  std::vector<MultiIndex> out;
  MultiIndex cur(n, 0);
  auto rec = [&](auto&& self, int j, int left) -> void {
    if (j == n) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[j] = v;
      self(self, j + 1, left - v);
    }
    cur[j] = 0;
  };
  rec(rec, 0, d);
  return out;
}

int total(const MultiIndex& b) {
  int s = 0;
  for (int v : b) s += v;
  return s;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// 2^{|beta|} beta! / a^beta
double norm_weight(const std::vector<double>& a, const MultiIndex& beta) {
  double w = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    w *= std::pow(2.0 / a[j], beta[j]) * factorial(beta[j]);
  return w;
}

MultiIndex unit(int n, int j) {
  MultiIndex e(n, 0);
  e[j] = 1;
  return e;
}

PolyGauss zpow(int n, const MultiIndex& beta, cplx c = 1.0) {
  return PolyGauss::monomial(n, beta, MultiIndex(n, 0), c);
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  cplx coeff() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double re = u(rng_);
    return {re, u(rng_)};
  }

  PolyGauss poly(int n, int d, bool z_only = false) {
    PolyGauss p(n);
    for (const auto& b : multi_indices(n, d))
      for (const auto& g : multi_indices(n, z_only ? 0 : d - total(b)))
        p += PolyGauss::monomial(n, b, g, coeff());
    return p;
  }

 private:
  std::mt19937_64 rng_;
};

double l2(const ModelContext& ctx, const PolyGauss& f) {
  return std::sqrt(std::max(norm_sq(ctx, f), 0.0));
}

// ||lhs - rhs|| / max(1, ||rhs||)
double rel(const ModelContext& ctx, const PolyGauss& lhs, const PolyGauss& rhs) {
  return l2(ctx, lhs - rhs) / std::max(1.0, l2(ctx, rhs));
}

// d/dz_j (dz = true) or d/dzbar_j of the polynomial part
PolyGauss derivative(const PolyGauss& f, int j, bool dz) {
  PolyGauss out(f.n());
  for (const auto& [m, c] : f.terms()) {
    const int e = dz ? m.z[j] : m.zb[j];
    if (e == 0) continue;
    Monomial d = m;
    (dz ? d.z[j] : d.zb[j]) -= 1;
    out.add(d, c * static_cast<double>(e));
  }
  return out;
}

class Recorder {
 public:
  explicit Recorder(double tol) : tol_(tol) {}

  void add(const std::string& name, const std::string& statement, double residual) {
    for (auto& c : out_)
      if (c.name == name) {
        c.residual = std::max(c.residual, residual);
        c.pass = c.residual <= c.tolerance;
        return;
      }
    out_.push_back({name, statement, residual, tol_, residual <= tol_});
  }

  std::vector<IdentityCheck> take() { return std::move(out_); }

 private:
  double tol_;
  std::vector<IdentityCheck> out_;
};

}  // namespace

std::vector<IdentityCheck> norm_formula_checks(const ModelContext& ctx, double tol) {
  const int n = ctx.n();
  const auto& a = ctx.a();
  const double p00 = ctx.bergman_origin();
  Recorder r(tol);
  // P(., 0) = P(0, 0) G
  for (const auto& beta : multi_indices(n, 3)) {
    const double w = norm_weight(a, beta) * p00;
    const PolyGauss zP = zpow(n, beta, p00);
    r.add("norm_z_beta", "||z^beta P(., 0)||^2 = 2^|beta| beta! / a^beta P(0, 0)",
          std::abs(norm_sq(ctx, zP) - w) / w);
    for (const auto& gam : multi_indices(n, 3 - total(beta))) {
      MultiIndex bg(n);
      for (int j = 0; j < n; ++j) bg[j] = beta[j] + gam[j];
      const double wbg = norm_weight(a, bg) * p00;
      r.add("norm_z_beta_zbar_gamma",
            "||z^beta zbar^gamma P(., 0)||^2 = 2^|beta+gamma| (beta+gamma)! / a^(beta+gamma) P(0, 0)",
            std::abs(norm_sq(ctx, PolyGauss::monomial(n, beta, gam, p00)) - wbg) / wbg);
    }
    if (total(beta) > 2) continue;
    for (int j = 0; j < n; ++j) {
      const PolyGauss bz = apply_b(ctx, j, zP);
      r.add("norm_b_z_beta", "||b_j z^beta P(., 0)||^2 = 2 a_j 2^|beta| beta! / a^beta P(0, 0)",
            std::abs(norm_sq(ctx, bz) - 2.0 * a[j] * w) / (2.0 * a[j] * w));
      for (int k = 0; k < n; ++k) {
        const double want = 4.0 * (j == k ? 2.0 : 1.0) * a[j] * a[k] * w;
        r.add("norm_bb_z_beta",
              "||b_j b_k z^beta P(., 0)||^2 = 4 (1 + delta_jk) a_j a_k 2^|beta| beta! / a^beta P(0, 0)",
              std::abs(norm_sq(ctx, apply_b(ctx, k, bz)) - want) / want);
      }
    }
  }

  return r.take();
}

std::vector<IdentityCheck> model_space_checks(const ModelContext& ctx, std::uint64_t seed,
                                              double tol) {
  const int n = ctx.n();
  const auto& a = ctx.a();
  const double p00 = ctx.bergman_origin();
  const PolyGauss G = PolyGauss::constant(n);
  Sampler s(seed);
  Recorder r(tol);
  std::vector<IdentityCheck> out;

  // ladder algebra on degree <= 3 data (degree headroom 3 for D = 6)
  const PolyGauss f = s.poly(n, 3);
  const PolyGauss f2 = s.poly(n, 2);
  const PolyGauss g2 = s.poly(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = i == j ? 1.0 : 0.0;
      r.add("ladder_b_bplus", "[b_i, b_j^+] = -2 a_i delta_ij",
            rel(ctx, apply_b(ctx, i, apply_b_plus(ctx, j, f)) - apply_b_plus(ctx, j, apply_b(ctx, i, f)),
                cplx(-2.0 * a[i] * d) * f));
      r.add("ladder_b_b", "[b_i, b_j] = 0",
            rel(ctx, apply_b(ctx, i, apply_b(ctx, j, f)), apply_b(ctx, j, apply_b(ctx, i, f))));
      r.add("ladder_bplus_bplus", "[b_i^+, b_j^+] = 0",
            rel(ctx, apply_b_plus(ctx, i, apply_b_plus(ctx, j, f)),
                apply_b_plus(ctx, j, apply_b_plus(ctx, i, f))));
    }
  for (int j = 0; j < n; ++j) {
    const PolyGauss gb = apply_b(ctx, j, f2).times_polynomial(g2) - apply_b(ctx, j, f2.times_polynomial(g2));
    r.add("multiplier_b", "[g, b_j] = 2 dg/dz_j",
          rel(ctx, gb, cplx(2.0) * f2.times_polynomial(derivative(g2, j, true))));
    const PolyGauss gbp =
        apply_b_plus(ctx, j, f2).times_polynomial(g2) - apply_b_plus(ctx, j, f2.times_polynomial(g2));
    r.add("multiplier_bplus", "[g, b_j^+] = -2 dg/dzbar_j",
          rel(ctx, gbp, cplx(-2.0) * f2.times_polynomial(derivative(g2, j, false))));
  }

  // kernel actions
  const PolyGauss hol = s.poly(n, 3, true);
  for (int j = 0; j < n; ++j) {
    r.add("b_on_kernel_origin", "b_j P(., 0) = a_j zbar_j P(., 0)",
          rel(ctx, apply_b(ctx, j, cplx(p00) * G),
              PolyGauss::monomial(n, MultiIndex(n, 0), unit(n, j), a[j] * p00)));
    r.add("bplus_on_kernel", "b_j^+ (z^beta P(., 0)) = 0", l2(ctx, apply_b_plus(ctx, j, hol)));
    r.add("projection_kills_b", "P b_j g P = 0",
          l2(ctx, project_P(ctx, apply_b(ctx, j, g2))) / std::max(1.0, l2(ctx, g2)));
  }

  // eigen-cases of L and L^{-1}
  for (const auto& beta : multi_indices(n, 2)) {
    const PolyGauss zb = zpow(n, beta);
    r.add("L_kernel", "L (z^beta G) = 0", l2(ctx, apply_L(ctx, zb)));
    for (int k = 0; k < n; ++k) {
      const PolyGauss phi1 = apply_b(ctx, k, zb);
      r.add("L_first_level", "L b_k z^beta G = 2 a_k b_k z^beta G",
            rel(ctx, apply_L(ctx, phi1), cplx(2.0 * a[k]) * phi1));
      r.add("L_inverse_first_level", "L^{-1} b_k z^beta G = b_k z^beta G / (2 a_k)",
            rel(ctx, inverse_L(ctx, phi1), cplx(0.5 / a[k]) * phi1));
      for (int j = 0; j < n; ++j) {
        const PolyGauss phi2 = apply_b(ctx, j, phi1);
        r.add("L_second_level", "L b_j b_k z^beta G = 2 (a_j + a_k) b_j b_k z^beta G",
              rel(ctx, apply_L(ctx, phi2), cplx(2.0 * (a[j] + a[k])) * phi2));
        r.add("L_inverse_second_level",
              "L^{-1} b_j b_k z^beta G = b_j b_k z^beta G / (2 (a_j + a_k))",
              rel(ctx, inverse_L(ctx, phi2), cplx(0.5 / (a[j] + a[k])) * phi2));
      }
    }
  }

  // spectrum of L on polynomials of degree <= 4
  {
    std::vector<Monomial> basis;
    std::map<Monomial, int> index;
    for (const auto& b : multi_indices(n, 4))
      for (const auto& g : multi_indices(n, 4 - total(b))) {
        const PolyGauss m = PolyGauss::monomial(n, b, g);
        index[m.terms().begin()->first] = static_cast<int>(basis.size());
        basis.push_back(m.terms().begin()->first);
      }
    const int N = static_cast<int>(basis.size());
    CMat L = CMat::Zero(N, N);
    for (int c = 0; c < N; ++c) {
      PolyGauss m(n);
      m.add(basis[c], 1.0);
      const PolyGauss Lm = apply_L(ctx, m);
      for (const auto& [mono, v] : Lm.terms()) L(index.at(mono), c) = v;
    }
    Eigen::ComplexEigenSolver<CMat> es(L, false);
    std::vector<double> allowed;
    for (const auto& al : multi_indices(n, 4)) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += 2.0 * al[j] * a[j];
      allowed.push_back(v);
    }
    double amax = *std::max_element(a.begin(), a.end());
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
      double best = INFINITY;
      for (double v : allowed) best = std::min(best, std::abs(es.eigenvalues()(i) - v));
      worst = std::max(worst, best / amax);
    }
    r.add("L_spectrum", "spec L = {2 sum alpha_i a_i}", worst);
  }

  // orthonormal kernel basis
  {
    const auto betas = multi_indices(n, 3);
    double worst = 0.0;
    std::vector<PolyGauss> phi;
    for (const auto& beta : betas) {
      double c = p00 / norm_weight(a, beta);
      phi.push_back(zpow(n, beta, std::sqrt(c)));
    }
    for (std::size_t x = 0; x < phi.size(); ++x)
      for (std::size_t y = 0; y < phi.size(); ++y)
        worst = std::max(worst, std::abs(inner(ctx, phi[x], phi[y]) - (x == y ? 1.0 : 0.0)));
    r.add("kernel_basis_orthonormal", "(phi_beta, phi_gamma) = delta_beta_gamma", worst);
  }

  merge_checks(out, norm_formula_checks(ctx, tol));

  // projection values
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const PolyGauss zkzl = PolyGauss::monomial(n, [&] {
        MultiIndex e = unit(n, k);
        e[l] += 1;
        return e;
      }(), MultiIndex(n, 0));
      const PolyGauss zkzbl = PolyGauss::monomial(n, unit(n, k), unit(n, l));
      const PolyGauss zbzb = PolyGauss::monomial(n, MultiIndex(n, 0), [&] {
        MultiIndex e = unit(n, k);
        e[l] += 1;
        return e;
      }());
      r.add("projection_z_zbar", "P z_k zbar_l P = (2 / a_l) delta_kl P",
            rel(ctx, project_P(ctx, zkzbl), cplx(k == l ? 2.0 / a[l] : 0.0) * G));
      r.add("projection_z_z_origin", "(P z_k z_l P)(0, 0) = 0",
            std::abs(value_at_origin(project_P(ctx, zkzl))));
      r.add("projection_zbar_zbar", "P zbar_k zbar_l P = 0", l2(ctx, project_P(ctx, zbzb)));
    }
  {
    // [P q P](0, 0) for a random quadratic q
    PolyGauss q(n);
    cplx want = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const cplx cm = s.coeff();
        q += PolyGauss::monomial(n, unit(n, k), unit(n, l), cm);
        if (k == l) want += 2.0 / a[k] * cm * p00;
        MultiIndex e = unit(n, k);
        e[l] += 1;
        q += PolyGauss::monomial(n, e, MultiIndex(n, 0), s.coeff());
        q += PolyGauss::monomial(n, MultiIndex(n, 0), e, s.coeff());
      }
    const cplx got = p00 * p00 * inner(ctx, q, G);
    r.add("projected_quadratic_origin", "[P q P](0, 0) = sum_j (2 / a_j) q_{j jbar} P(0, 0)",
          std::abs(got - want) / std::max(1.0, std::abs(want)));
  }

  // reproducing property and idempotency
  {
    const PolyGauss h = s.poly(n, 3);
    const cplx lhs = inner(ctx, h, cplx(p00) * G);
    r.add("reproducing_property", "(f, P(., 0)) = (P f)(0)",
          std::abs(lhs - value_at_origin(project_P(ctx, h))) / std::max(1.0, std::abs(lhs)));
    const PolyGauss ph = project_P(ctx, h);
    r.add("projection_idempotent", "P P = P", rel(ctx, project_P(ctx, ph), ph));
  }
  std::vector<IdentityCheck> all = r.take();
  merge_checks(all, out);
  return all;
}

std::vector<IdentityCheck> jet_checks(const GeometryJet& jet, double tol) {
  Recorder r(tol);
  const QCoeffs q = q_coefficients(jet);
  const QResiduals qr = q_residuals(q);
  double qscale = 1.0;
  for (const auto* v : {&q.hol, &q.mix, &q.anti})
    for (const cplx& c : *v) qscale = std::max(qscale, std::abs(c));
  r.add("q_antisymmetry", "q_{j, kbar lbar} = -q_{j, lbar kbar}", qr.antisym / qscale);
  r.add("q_diagonal", "q_{j, kbar kbar} = 0", qr.diagonal / qscale);
  r.add("q_cyclic", "cyclic sum of q_{j, kbar lbar} vanishes", qr.cyclic / qscale);
  r.add("q_quadratic_cross", "quadratic cross identity for q_{j, kbar lbar}",
        qr.quad_cross / (qscale * qscale));
  r.add("q_quadratic_sum", "quadratic sum identity for q_{j, kbar lbar}",
        qr.quad_sum / (qscale * qscale));

  const JetResiduals jr = jet_residuals(jet);
  double jscale = 1.0;
  for (const auto& m : jet.ddJc) jscale = std::max(jscale, m.cwiseAbs().maxCoeff());
  r.add("curvature_commutator", "(nabla nabla A)_(U,V) - (nabla nabla A)_(V,U) = [R(U,V), A]",
        jr.commutator / jscale);
  r.add("nabla_J_skew", "nabla cal J is skew-adjoint", jr.skew / jscale);
  r.add("nabla_J_closed", "cyclic sum of <(nabla_U cal J) V, W> vanishes", jr.closedness / jscale);
  r.add("riemann_symmetries", "Riemann antisymmetries, pair symmetry, first Bianchi",
        jr.riemann / jscale);

  const ModelContext ctx(jet.a, 6);
  const A3Pieces pieces = a3_pieces(ctx, q);
  r.add("a3_u_orthogonal", "the four u-terms are mutually orthogonal", pieces.max_offdiag_gram);
  r.add("a3_v_orthogonal", "the four v-terms are mutually orthogonal", pieces.max_offdiag_gram_v);
  double worst = 0.0;
  for (int j = 0; j < jet.n; ++j) {
    PolyGauss sum(jet.n);
    for (const auto& u : pieces.u[j]) sum += u;
    worst = std::max(worst, rel(ctx, sum, apply_b(ctx, j, q_polynomial(q, j))));
  }
  r.add("a3_u_sum", "u_1 + u_2 + u_3 + u_4 = b_j q_j G", worst);

  const OracleBreakdown o6 = rho_oracle(jet, q, 6);
  const OracleBreakdown o8 = rho_oracle(jet, q, 8);
  const double scale = std::max({1.0, std::abs(o6.A0), std::abs(o6.A1), std::abs(o6.A2),
                                 std::abs(o6.A3)});
  const double dt = std::max({std::abs(o6.A0 - o8.A0), std::abs(o6.A1 - o8.A1),
                              std::abs(o6.A2 - o8.A2), std::abs(o6.A3 - o8.A3),
                              std::abs(o6.rho - o8.rho)});
  r.add("truncation_D6_D8", "oracle A-terms agree between D = 6 and D = 8", dt / scale);
  return r.take();
}

void merge_checks(std::vector<IdentityCheck>& into, const std::vector<IdentityCheck>& more) {
  for (const auto& m : more) {
    bool found = false;
    for (auto& c : into)
      if (c.name == m.name) {
        c.residual = std::max(c.residual, m.residual);
        c.pass = c.pass && m.pass;
        found = true;
        break;
      }
    if (!found) into.push_back(m);
  }
}

bool SelfcheckReport::all_pass() const {
  if (!negative_control_flagged) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

SelfcheckReport run_selfcheck(const SelfcheckOptions& opt) {
  SelfcheckReport rep;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> ua(0.5, 3.0);

  std::vector<std::vector<double>> avecs = {{ua(rng)}, {ua(rng), ua(rng)},
                                            {ua(rng), ua(rng), ua(rng)}};
  avecs.push_back({1.5, 1.5, ua(rng)});  // degenerate pair
  for (const auto& a : avecs)
    for (int D : {6, 8}) {
      const ModelContext ctx(a, D);
      merge_checks(rep.checks, model_space_checks(ctx, rng(), opt.tol));
      rep.moment_quadrature_deviation =
          std::max(rep.moment_quadrature_deviation, ctx.moment_quadrature_deviation());
    }
  rep.checks.push_back({"moment_table_quadrature",
                        "factorial moment table agrees with adaptive quadrature",
                        rep.moment_quadrature_deviation, opt.tol,
                        rep.moment_quadrature_deviation <= opt.tol});

  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < opt.fields_per_n; ++i) {
      const ChartField field = fields::random_local(n, rng());
      const GeometryJet jet = covariant_jet(field, build_frame(endos_at(field, field.x0)));
      merge_checks(rep.checks, jet_checks(jet, opt.tol));
    }

  const ModelContext base(avecs[1], 6);
  for (const auto& c : norm_formula_checks(base.with_perturbed_moment(0, 2, 1.001), opt.tol))
    if (c.name == "norm_z_beta") {
      rep.negative_control_residual = c.residual;
      rep.negative_control_flagged = !c.pass;
    }
  return rep;
}

}  // namespace sdlab
