#include "sdlab/reports.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"
#include "sdlab/selfcheck.hpp"
#include "sdlab/torus_lab.hpp"

namespace sdlab {

namespace {

double reldiff(double x, double y) { return std::abs(x - y) / (1.0 + std::abs(y)); }

json header(const std::string& command, const RunConfig& rc) {
  json h;
  h["command"] = command;
  h["config_hash"] = config_hash(rc.canonical);
  h["seed"] = rc.seed;
  h["tolerances"] = tolerances_json(rc.tol);
  return h;
}

const ChartField& need_field(const RunConfig& rc, const std::string& command) {
  if (!rc.field) throw Error(ErrorKind::config, "cli_reports", command + " needs field or field_file");
  return *rc.field;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

std::uint64_t battery_seed(std::uint64_t seed, int n, int index) {
  // splitmix64 over (seed, n, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(n) * 1000003ull +
                                                   static_cast<std::uint64_t>(index) + 1ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

ChartField battery_field(const std::string& family, int n, std::uint64_t seed) {
  if (family == "random_local") return fields::random_local(n, seed);
  if (family == "almost_kahler") return fields::almost_kahler(n, seed);
  if (family == "kahler_potential") return fields::kahler_potential(n, seed);
  if (family == "degenerate") return fields::degenerate(n, seed);
  throw Error(ErrorKind::config, "cli_reports", "unknown field family '" + family + "'");
}

GeometryJet field_jet(const ChartField& field) {
  return covariant_jet(field, build_frame(endos_at(field, field.x0)));
}

FieldComparison compare_field(const ChartField& field, int degree, double jet_tol) {
  FieldComparison c;
  c.n = field.n;
  const GeometryJet jet = field_jet(field);
  c.a = jet.a;
  double scale = 1.0;
  for (const auto& m : jet.ddJc) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  c.jet_residual = jet_residuals(jet).max() / scale;
  const QCoeffs q = q_coefficients(jet);
  double qscale = 1.0;
  for (const auto* v : {&q.hol, &q.mix, &q.anti})
    for (const cplx& x : *v) qscale = std::max(qscale, std::abs(x));
  c.q_residual = q_residuals(q).max() / (qscale * qscale);
  if (c.jet_residual > jet_tol || c.q_residual > jet_tol) {
    c.skipped = true;
    return c;
  }
  c.closed = rho_closed(jet);
  c.polar = rho_polar(jet);
  c.amended = rho_closed(jet, ClosedVariant::amended_j1);
  c.oracle = rho_oracle(jet, q, degree);
  c.displayed = displayed_partials(q, jet.a);
  c.d_rho = reldiff(c.closed.rho, c.oracle.rho);
  c.d_polar = reldiff(c.polar.rho, c.closed.rho);
  c.d_amended = reldiff(c.amended.rho, c.oracle.rho);
  c.d_A0 = reldiff(c.closed.A0, c.oracle.A0);
  c.d_A1 = reldiff(c.closed.A1, c.oracle.A1);
  c.d_A2 = reldiff(c.displayed.A2, c.oracle.A2);
  c.d_A2_minus_A3 = reldiff(c.closed.J1 + c.closed.J2, c.oracle.A2 - c.oracle.A3);
  return c;
}

json breakdown_json(const RhoBreakdown& b) {
  json o;
  o["provenance"] = to_string(b.provenance);
  if (b.provenance == Provenance::closed_form) {
    o["A0"] = b.A0;
    o["A1"] = b.A1;
    o["J1"] = b.J1;
    o["J2"] = b.J2;
  } else {
    o["groups"] = b.groups;
  }
  o["rho"] = b.rho;
  o["im_residue"] = b.im_residue;
  return o;
}

json oracle_json(const OracleBreakdown& b) {
  return {{"A0", b.A0}, {"A1", b.A1}, {"A2", b.A2}, {"A3", b.A3},
          {"rho", b.rho}, {"im_residue", b.im_residue}, {"degree", b.degree}};
}

json comparison_json(const FieldComparison& c) {
  json o;
  o["n"] = c.n;
  o["seed"] = c.seed;
  o["a"] = c.a;
  o["jet_residual"] = c.jet_residual;
  o["q_residual"] = c.q_residual;
  o["skipped"] = c.skipped;
  if (c.skipped) return o;
  o["closed"] = breakdown_json(c.closed);
  o["polar"] = breakdown_json(c.polar);
  o["oracle"] = oracle_json(c.oracle);
  o["displayed"] = {{"A2", c.displayed.A2}, {"I1", c.displayed.I1}, {"I2", c.displayed.I2},
                    {"I3", c.displayed.I3}, {"I4", c.displayed.I4}, {"A3", c.displayed.A3()}};
  o["amended_j1_rho"] = c.amended.rho;
  o["diff"] = {{"rho", c.d_rho},   {"polar", c.d_polar}, {"A0", c.d_A0},
               {"A1", c.d_A1},     {"A2", c.d_A2},       {"A2_minus_A3", c.d_A2_minus_A3},
               {"amended_j1_rho", c.d_amended}};
  return o;
}

json tolerances_json(const Tolerances& t) {
  return {{"rho_agreement", t.rho_agreement},
          {"polar_agreement", t.polar_agreement},
          {"identity", t.identity},
          {"jet_invariants", t.jet_invariants}};
}

CommandResult cmd_rho(const RunConfig& rc) {
  const ChartField& field = need_field(rc, "rho");
  const GeometryJet jet = field_jet(field);
  CommandResult r;
  r.report = header("rho", rc);
  r.report["a"] = jet.a;
  r.report["tau"] = jet.tau0;
  const RhoBreakdown closed = rho_closed(jet);
  const RhoBreakdown polar = rho_polar(jet);
  r.report["closed"] = breakdown_json(closed);
  r.report["polar"] = breakdown_json(polar);
  const double diff = std::abs(closed.rho - polar.rho);
  r.report["difference"] = diff;
  r.report["relative_difference"] = diff / (1.0 + std::abs(closed.rho));
  const bool ok = diff <= rc.tol.polar_agreement * (1.0 + std::abs(closed.rho));
  r.report["pass"] = ok;
  r.exit_code = ok ? 0 : exit_code(ErrorKind::numerical);
  r.summary.push_back("rho (closed) = " + fmt(closed.rho, 12));
  r.summary.push_back("rho (polar)  = " + fmt(polar.rho, 12));
  r.summary.push_back("|closed - polar| = " + fmt(diff) + (ok ? "  ok" : "  FAIL"));
  return r;
}

CommandResult cmd_identities(const RunConfig& rc) {
  const ChartField& field = need_field(rc, "identities");
  const GeometryJet jet = field_jet(field);
  CommandResult r;
  r.report = header("identities", rc);
  r.report["a"] = jet.a;
  json checks = json::array();
  bool ok = true;
  for (const auto& c : jet_checks(jet, rc.tol.identity)) {
    checks.push_back({{"name", c.name}, {"statement", c.statement}, {"residual", c.residual},
                      {"tolerance", c.tolerance}, {"pass", c.pass}});
    ok = ok && c.pass;
    std::ostringstream os;
    os << std::left << std::setw(26) << c.name << ' ' << fmt(c.residual) << (c.pass ? "  ok" : "  FAIL");
    r.summary.push_back(os.str());
  }
  r.report["checks"] = checks;
  r.report["pass"] = ok;
  r.exit_code = ok ? 0 : exit_code(ErrorKind::numerical);
  return r;
}

CommandResult cmd_oracle_compare(const RunConfig& rc) {
  CommandResult r;
  r.report = header("oracle-compare", rc);
  json per_n = json::array();
  json all = json::array();
  double worst = 0.0;
  int skipped = 0;
  for (int n : rc.battery.n_values) {
    double w = 0.0, wp = 0.0, wa = 0.0;
    double t0 = 0.0, t1 = 0.0, t2 = 0.0, t23 = 0.0;
    int used = 0, skip_n = 0;
    for (int i = 0; i < rc.battery.count; ++i) {
      const std::uint64_t s = battery_seed(rc.seed, n, i);
      FieldComparison c = compare_field(battery_field(rc.battery.family, n, s), rc.battery.degree,
                                        rc.tol.jet_invariants);
      c.seed = s;
      all.push_back(comparison_json(c));
      if (c.skipped) {
        ++skip_n;
        continue;
      }
      ++used;
      w = std::max(w, c.d_rho);
      wp = std::max(wp, c.d_polar);
      wa = std::max(wa, c.d_amended);
      t0 = std::max(t0, c.d_A0);
      t1 = std::max(t1, c.d_A1);
      t2 = std::max(t2, c.d_A2);
      t23 = std::max(t23, c.d_A2_minus_A3);
    }
    worst = std::max(worst, w);
    skipped += skip_n;
    per_n.push_back({{"n", n},
                     {"fields", used},
                     {"skipped", skip_n},
                     {"max_rel_rho", w},
                     {"max_rel_polar", wp},
                     {"max_rel_A0", t0},
                     {"max_rel_A1", t1},
                     {"max_rel_A2", t2},
                     {"max_rel_A2_minus_A3", t23},
                     {"max_rel_amended_j1", wa}});
    r.summary.push_back("n=" + std::to_string(n) + "  fields " + std::to_string(used) + "  skipped " +
                        std::to_string(skip_n) + "  max rel |closed - oracle| " + fmt(w) +
                        "  (amended J1 " + fmt(wa) + ")  polar " + fmt(wp));
  }
  const bool ok = worst <= rc.tol.rho_agreement;
  r.report["battery"] = rc.canonical["battery"];
  r.report["summary"] = per_n;
  r.report["skipped"] = skipped;
  r.report["max_rel_discrepancy"] = worst;
  r.report["pass"] = ok;
  r.report["fields"] = all;
  r.exit_code = ok ? 0 : exit_code(ErrorKind::numerical);
  return r;
}

CommandResult cmd_torus(const RunConfig& rc) {
  if (!rc.torus) throw Error(ErrorKind::config, "cli_reports", "torus needs a torus section");
  TorusConfig cfg = *rc.torus;
  const DensityQuadrature quad = density_quadrature(cfg);
  const std::vector<ClusterReport> rows = density_compare(cfg);

  std::ostringstream csv;
  csv << "p,d_p,mean_lambda,mean_lambda_sq,quad_rho_mean,quad_rho_sq_mean,gap_lo,gap_hi\n";
  csv << std::setprecision(17);
  std::vector<double> ps, dm, ds, gaps;
  json jr = json::array();
  for (const auto& x : rows) {
    csv << x.p << ',' << x.d_p << ',' << x.mean_lambda << ',' << x.mean_lambda_sq << ','
        << x.quad_rho_mean << ',' << x.quad_rho_sq_mean << ',' << x.gap_lo << ',' << x.gap_hi << '\n';
    ps.push_back(x.p);
    dm.push_back(x.disc_mean);
    ds.push_back(x.disc_sq);
    gaps.push_back(x.gap_hi);
    jr.push_back({{"p", x.p},
                  {"d_p", x.d_p},
                  {"mean_lambda", x.mean_lambda},
                  {"mean_lambda_sq", x.mean_lambda_sq},
                  {"disc_mean", x.disc_mean},
                  {"disc_sq", x.disc_sq},
                  {"max_abs_cluster", x.max_abs_cluster},
                  {"gap_lo", x.gap_lo},
                  {"gap_hi", x.gap_hi},
                  {"hermiticity", x.hermiticity},
                  {"plaquette_error", x.plaquette_error},
                  {"max_residual", x.max_residual},
                  {"restarts", x.restarts}});
  }
  // least-squares slope of gap_hi against p
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    sx += ps[i];
    sy += gaps[i];
    sxx += ps[i] * ps[i];
    sxy += ps[i] * gaps[i];
  }
  const double m = static_cast<double>(ps.size());
  const double gap_slope = ps.size() > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : NAN;

  CommandResult r;
  r.csv = csv.str();
  r.report = header("torus", rc);
  r.report["torus"] = torus_to_json(cfg);
  r.report["n_flux"] = cfg.n_flux();
  r.report["quadrature"] = {{"rho_mean", quad.rho_mean},
                            {"rho_sq_mean", quad.rho_sq_mean},
                            {"rho_max_abs", quad.rho_max_abs},
                            {"volume", quad.volume},
                            {"mu0", quad.mu0}};
  r.report["rows"] = jr;
  auto absv = [](std::vector<double> v) {
    for (double& x : v) x = std::abs(x);
    return v;
  };
  r.report["trend"] = {{"loglog_slope_disc_mean", loglog_slope(ps, absv(dm))},
                       {"loglog_slope_disc_sq", loglog_slope(ps, absv(ds))},
                       {"gap_hi_slope", gap_slope},
                       {"gap_hi_slope_over_2mu0", gap_slope / (2.0 * quad.mu0)}};
  r.report["note"] =
      "finite-p tolerances on the discrepancies are an engineering budget, not a derived bound";
  for (const auto& x : rows)
    r.summary.push_back("p=" + std::to_string(x.p) + "  d_p=" + std::to_string(x.d_p) +
                        "  mean " + fmt(x.mean_lambda) + "  |disc| " + fmt(std::abs(x.disc_mean)) +
                        "  gap " + fmt(x.gap_lo) + ".." + fmt(x.gap_hi));
  return r;
}

CommandResult cmd_selfcheck(const RunConfig& rc) {
  SelfcheckOptions opt;
  opt.seed = rc.seed;
  opt.tol = rc.tol.identity;
  const SelfcheckReport rep = run_selfcheck(opt);
  CommandResult r;
  r.report = header("selfcheck", rc);
  r.report["exact_target"] = kExactTarget;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"statement", c.statement},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"exact", c.residual <= kExactTarget}});
    std::ostringstream os;
    os << std::left << std::setw(28) << c.name << ' ' << fmt(c.residual) << (c.pass ? "  ok" : "  FAIL")
       << (c.pass ? "" : "  (" + c.statement + ")");
    r.summary.push_back(os.str());
  }
  r.report["checks"] = checks;
  r.report["negative_control"] = {{"perturbation", "moment table entry (j=0, m=2) scaled by 1.001"},
                                  {"check", "norm_z_beta"},
                                  {"residual", rep.negative_control_residual},
                                  {"flagged", rep.negative_control_flagged}};
  r.summary.push_back(std::string("negative control (perturbed moment table) ") +
                      (rep.negative_control_flagged ? "flagged" : "NOT flagged"));
  r.report["pass"] = rep.all_pass();
  r.exit_code = rep.all_pass() ? 0 : exit_code(ErrorKind::numerical);
  return r;
}

CommandResult run_command(const std::string& command, const RunConfig& rc) {
  if (command == "rho") return cmd_rho(rc);
  if (command == "identities") return cmd_identities(rc);
  if (command == "oracle-compare") return cmd_oracle_compare(rc);
  if (command == "torus") return cmd_torus(rc);
  if (command == "selfcheck") return cmd_selfcheck(rc);
  throw Error(ErrorKind::config, "cli_reports", "unknown command '" + command + "'");
}

}  // namespace sdlab
