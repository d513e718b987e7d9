#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"
#include "sdlab/reports.hpp"
#include "sdlab/selfcheck.hpp"
#include "sdlab/torus_lab.hpp"

using namespace sdlab;

namespace {

// pinned tolerances and budgets
constexpr int kFieldsPerN = 20;
constexpr std::uint64_t kBatterySeed = 1;
constexpr double kOracleTol = 1e-6;
constexpr double kOracleBudget = 60.0;
constexpr double kPolarTol = 1e-7;
constexpr double kIdentityTol = 1e-9;
constexpr double kSelfcheckBudget = 10.0;
constexpr double kExampleTol = 1e-7;
constexpr int kExampleSeeds = 10;
constexpr double kClusterBoundFactor = 5.0;
constexpr double kGapRelTol = 0.10;
constexpr double kConstantBudget = 300.0;
constexpr double kDensityFraction = 0.25;
constexpr double kCosineBudget = 900.0;
constexpr double kGaugeTol = 1e-9;
constexpr int kGaugeTrials = 50;
constexpr double kTruncationTol = 1e-10;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double rel(double x, double y) { return std::abs(x - y) / (1.0 + std::abs(y)); }

std::vector<FieldComparison> battery(int degree = 6) {
  std::vector<FieldComparison> out;
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < kFieldsPerN; ++i) {
      const std::uint64_t s = battery_seed(kBatterySeed, n, i);
      FieldComparison c = compare_field(fields::random_local(n, s), degree, 1e-8);
      c.seed = s;
      out.push_back(c);
    }
  return out;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto all = battery();
  const double dt = seconds_since(t0);
  double worst[4] = {0, 0, 0, 0};
  double t_a0 = 0, t_a1 = 0, t_a2 = 0, t_a23 = 0, amended = 0;
  int skipped = 0;
  for (const auto& c : all) {
    if (c.skipped) {
      ++skipped;
      continue;
    }
    worst[c.n] = std::max(worst[c.n], c.d_rho);
    t_a0 = std::max(t_a0, c.d_A0);
    t_a1 = std::max(t_a1, c.d_A1);
    t_a2 = std::max(t_a2, c.d_A2);
    t_a23 = std::max(t_a23, c.d_A2_minus_A3);
    amended = std::max(amended, c.d_amended);
  }
  const bool rho_ok = std::max({worst[1], worst[2], worst[3]}) <= kOracleTol;
  const bool terms_ok = t_a0 <= kOracleTol && t_a1 <= kOracleTol && t_a2 <= kOracleTol &&
                        t_a23 <= kOracleTol;
  Outcome o;
  o.pass = rho_ok && terms_ok && skipped == 0 && dt < kOracleBudget;
  o.detail = "max rel |closed-oracle| n=1 " + sci(worst[1]) + ", n=2 " + sci(worst[2]) + ", n=3 " +
             sci(worst[3]) + "; terms A0 " + sci(t_a0) + ", A1 " + sci(t_a1) + ", A2 " + sci(t_a2) +
             ", A2-A3 " + sci(t_a23) + " (tol " + sci(kOracleTol) + "); skipped " +
             std::to_string(skipped) + "; " + sci(dt) + " s; diagnostic: J1 weight 8/(a_k(a_j+a_l)) gives " +
             sci(amended);
  return o;
}

Outcome criterion2() {
  double worst = 0.0;
  for (const auto& c : battery())
    if (!c.skipped) worst = std::max(worst, c.d_polar);
  return {worst <= kPolarTol, "max rel |polar-closed| " + sci(worst) + " (tol " + sci(kPolarTol) + ")"};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  SelfcheckOptions opt;
  opt.tol = kIdentityTol;
  const SelfcheckReport rep = run_selfcheck(opt);
  const double dt = seconds_since(t0);
  double worst = 0.0;
  int exact = 0;
  std::string failed;
  for (const auto& c : rep.checks) {
    worst = std::max(worst, c.residual);
    exact += c.residual <= kExactTarget;
    if (!c.pass) failed += " " + c.name;
  }
  Outcome o;
  o.pass = rep.all_pass() && dt < kSelfcheckBudget;
  o.detail = std::to_string(rep.checks.size()) + " identities, worst residual " + sci(worst) +
             " (tol " + sci(kIdentityTol) + "), " + std::to_string(exact) + " at <= 1e-12; " +
             "negative control " + (rep.negative_control_flagged ? "flagged" : "NOT flagged") + "; " +
             sci(dt) + " s" + (failed.empty() ? "" : "; failing:" + failed);
  return o;
}

Outcome criterion4() {
  double ak = 0.0, kc = 0.0;
  for (int n = 2; n <= 3; ++n)
    for (int s = 1; s <= kExampleSeeds; ++s) {
      const GeometryJet a = field_jet(fields::almost_kahler(n, s));
      const double want = rho_almost_kahler(a);
      ak = std::max(ak, std::abs(rho_closed(a).rho - want) / std::abs(want));
      const GeometryJet k = field_jet(fields::kahler_potential(n, s));
      const double closed = rho_closed(k).rho;
      kc = std::max(kc, std::abs(rho_kahler_case(k) - closed) / std::abs(closed));
    }
  return {ak <= kExampleTol && kc <= kExampleTol,
          "B = 2 pi J: rel |closed - |nabla J|^2/24| " + sci(ak) + "; nabla J = 0: rel |closed - display| " +
              sci(kc) + " (tol " + sci(kExampleTol) + ")"};
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_bound = 0.0, worst_gap = 0.0;
  std::string counts;
  for (int nf : {1, 2}) {
    TorusConfig c;
    c.Nx = c.Ny = 96;
    c.Lx = c.Ly = 2 * kPi;
    c.b0 = nf / (2 * kPi);
    c.p_list = {4, 8, 12, 16, 20, 24};
    const DensityQuadrature quad = density_quadrature(c);
    const double h = c.hx();
    for (int p : c.p_list) {
      const ClusterReport r = cluster_report(c, p, quad);
      const double bound = kClusterBoundFactor * (p * c.b0) * (p * c.b0) * h * h;
      worst_bound = std::max(worst_bound, r.max_abs_cluster / bound);
      const double gap = std::abs(r.gap_hi - 2 * p * quad.mu0) / (2 * p * quad.mu0);
      worst_gap = std::max(worst_gap, gap);
      ok = ok && r.max_abs_cluster <= bound && r.d_p == p * nf && gap <= kGapRelTol;
      if (r.d_p != p * nf)
        counts += " d_" + std::to_string(p) + "=" + std::to_string(r.d_p) + "!=" + std::to_string(p * nf);
    }
  }
  const double dt = seconds_since(t0);
  return {ok && dt < kConstantBudget,
          "max|lambda|/bound " + sci(worst_bound) + ", d_p = p N_flux" + (counts.empty() ? " all" : counts) +
              ", gap edge rel dev " + sci(worst_gap) + " (tol " + sci(kGapRelTol) + "); " + sci(dt) + " s"};
}

bool monotone_one_inversion(const std::vector<double>& v) {
  int inversions = 0;
  for (std::size_t i = 1; i < v.size(); ++i) inversions += v[i] > v[i - 1];
  return inversions <= 1;
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  TorusConfig c;
  c.Nx = 174;
  c.Ny = 28;
  c.Lx = 2 * kPi;
  c.Ly = 1.0;  // b0 Lx Ly = 2 pi N_flux with N_flux = 2
  c.b0 = 2.0;
  c.b_modes = {{1, 0, 0.5, 0.0}};
  c.p_list = {6, 12, 18, 24, 30};
  const auto rows = density_compare(c);
  const double dt = seconds_since(t0);
  std::vector<double> dm, ds;
  for (const auto& r : rows) {
    dm.push_back(std::abs(r.disc_mean));
    ds.push_back(std::abs(r.disc_sq));
  }
  const double target_m = kDensityFraction * std::abs(rows.front().quad_rho_mean);
  const double target_s = kDensityFraction * std::abs(rows.front().quad_rho_sq_mean);
  const bool ok = monotone_one_inversion(dm) && monotone_one_inversion(ds) && dm.back() <= target_m &&
                  ds.back() <= target_s && dt < kCosineBudget;
  std::string seq;
  for (std::size_t i = 0; i < rows.size(); ++i)
    seq += (i ? ", " : "") + std::to_string(rows[i].p) + ":" + sci(dm[i]);
  return {ok, "|mean - int rho/vol| by p {" + seq + "}; final " + sci(dm.back()) + " vs target " +
                  sci(target_m) + "; lambda^2: final " + sci(ds.back()) + " vs target " + sci(target_s) +
                  "; monotone " + (monotone_one_inversion(dm) ? "yes" : "no") + "; " + sci(dt) + " s"};
}

Outcome criterion7() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  std::normal_distribution<double> N;
  double worst = 0.0;
  for (int t = 0; t < kGaugeTrials; ++t) {
    const int n = 2 + t % 2;
    const bool degenerate = t % 2 == 0;
    const ChartField f = degenerate ? fields::degenerate(n, 500 + t) : fields::random_local(n, 500 + t);
    const DiagonalFrame fr = build_frame(endos_at(f, f.x0));
    CMat U = CMat::Zero(n, n);
    if (degenerate) {
      CMat Z(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Z(i, j) = cplx(N(rng), N(rng));
      U = Eigen::HouseholderQR<CMat>(Z).householderQ() * CMat::Identity(n, n);
    }
    for (int j = 0; j < n; ++j) {
      if (degenerate) U.col(j) *= std::polar(1.0, ph(rng));
      else U(j, j) = std::polar(1.0, ph(rng));
    }
    const double base = rho_closed(covariant_jet(f, fr)).rho;
    worst = std::max(worst, rel(rho_closed(covariant_jet(f, fr.regauged(U))).rho, base));
  }
  return {worst <= kGaugeTol, std::to_string(kGaugeTrials) + " trials, max rel change " + sci(worst) +
                                  " (tol " + sci(kGaugeTol) + ")"};
}

Outcome criterion8() {
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < kFieldsPerN; ++i) {
      const GeometryJet jet = field_jet(fields::random_local(n, battery_seed(kBatterySeed, n, i)));
      const QCoeffs q = q_coefficients(jet);
      const OracleBreakdown a = rho_oracle(jet, q, 6), b = rho_oracle(jet, q, 8);
      for (auto [x, y] : {std::pair{a.A0, b.A0}, {a.A1, b.A1}, {a.A2, b.A2}, {a.A3, b.A3}, {a.rho, b.rho}})
        worst = std::max(worst, rel(x, y));
    }
  return {worst <= kTruncationTol,
          "max rel D=6 vs D=8 " + sci(worst) + " (tol " + sci(kTruncationTol) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one line each"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed form vs operator-calculus oracle", criterion1},
      {"polar form vs closed form", criterion2},
      {"identity suite", criterion3},
      {"B = 2 pi J and nabla J = 0 special cases", criterion4},
      {"torus, constant field", criterion5},
      {"torus, b = 2 + 0.5 cos x", criterion6},
      {"frame-gauge invariance", criterion7},
      {"truncation independence", criterion8}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %zu [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
