#include "sdlab/torus_lab.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sdlab/errors.hpp"
#include "sdlab/frame_spectral.hpp"
#include "sdlab/rho_formula.hpp"

namespace sdlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx I(0.0, 1.0);

struct Wave {
  double kx, ky;
};

Wave wave(const TorusConfig& cfg, const TrigMode& m) {
  return {kTwoPi * m.mx / cfg.Lx, kTwoPi * m.my / cfg.Ly};
}

double eval_modes(const TorusConfig& cfg, const std::vector<TrigMode>& modes, double x, double y) {
  double s = 0.0;
  for (const auto& m : modes) {
    const Wave k = wave(cfg, m);
    const double th = k.kx * x + k.ky * y;
    s += m.c * std::cos(th) + m.s * std::sin(th);
  }
  return s;
}

// int_a^{a+h} exp(i k t) dt
cplx segment(double k, double a, double h) {
  if (k == 0.0) return h;
  return (std::exp(I * k * (a + h)) - std::exp(I * k * a)) / (I * k);
}

double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

}  // namespace

// ---------------------------------------------------------------------------------------------

double TorusConfig::b(double x, double y) const { return b0 + eval_modes(*this, b_modes, x, y); }
double TorusConfig::w(double x, double y) const { return w0 + eval_modes(*this, w_modes, x, y); }

int TorusConfig::n_flux() const { return static_cast<int>(std::lround(b0 * Lx * Ly / kTwoPi)); }

double TorusConfig::b_max() const {
  double m = 0.0;
  for (int j = 0; j < Ny; ++j)
    for (int i = 0; i < Nx; ++i) m = std::max(m, tau(i * hx(), j * hy()));
  return m;
}

void TorusConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::config, "torus_lab", what); };
  if (Nx < 3 || Ny < 3) fail("grid must have at least 3 points per axis");
  if (!(Lx > 0.0) || !(Ly > 0.0)) fail("period lengths must be positive");
  for (const auto* modes : {&b_modes, &w_modes})
    for (const auto& m : *modes)
      if (m.mx == 0 && m.my == 0) fail("trigonometric modes must have nonzero wave vector");
  const double flux = b0 * Lx * Ly;
  const int nf = n_flux();
  if (nf < 1 || std::abs(flux - kTwoPi * nf) > 1e-10 * kTwoPi * nf) {
    std::ostringstream os;
    os << "flux " << flux << " is not 2 pi N_flux for a positive integer N_flux";
    fail(os.str());
  }
  for (int j = 0; j < Ny; ++j)
    for (int i = 0; i < Nx; ++i) {
      if (b(i * hx(), j * hy()) <= 0.0) fail("b must be positive on the lattice");
      if (w(i * hx(), j * hy()) <= 0.0) fail("conformal factor must be positive on the lattice");
    }
  if (p_list.empty()) fail("p list is empty");
  int p_max = 0;
  for (int p : p_list) {
    if (p < 1) fail("p must be positive");
    p_max = std::max(p_max, p);
  }
  // magnetic length resolution: h sqrt(p b) <= sqrt(2 pi) / 8 per axis
  const double hmax = std::sqrt(kTwoPi) / 8.0 / std::sqrt(p_max * b_max());
  const int need_x = static_cast<int>(std::ceil(Lx / hmax));
  const int need_y = static_cast<int>(std::ceil(Ly / hmax));
  if (Nx < need_x || Ny < need_y) {
    std::ostringstream os;
    os << "grid " << Nx << "x" << Ny << " does not resolve the magnetic length at p = " << p_max
       << "; need at least " << need_x << "x" << need_y;
    fail(os.str());
  }
}

ChartField TorusConfig::chart_field(double x, double y) const {
  ChartField f = ChartField::zero(1);
  ScalarField w_field = ScalarField::constant(2, w0);
  for (const auto& m : w_modes) {
    const Wave k = wave(*this, m);
    if (m.c != 0.0) w_field += ScalarField::trig(2, m.c, {k.kx, k.ky}, Trig::cos);
    if (m.s != 0.0) w_field += ScalarField::trig(2, m.s, {k.kx, k.ky}, Trig::sin);
  }
  f.g_entry(0, 0) = w_field;
  f.g_entry(1, 1) = w_field;
  f.A[1] = ScalarField::monomial(2, b0, {1, 0});
  for (const auto& m : b_modes) {
    const Wave k = wave(*this, m);
    if (m.mx != 0) {
      if (m.c != 0.0) f.A[1] += ScalarField::trig(2, m.c / k.kx, {k.kx, k.ky}, Trig::sin);
      if (m.s != 0.0) f.A[1] += ScalarField::trig(2, -m.s / k.kx, {k.kx, k.ky}, Trig::cos);
    } else {
      if (m.c != 0.0) f.A[0] += ScalarField::trig(2, -m.c / k.ky, {0.0, k.ky}, Trig::sin);
      if (m.s != 0.0) f.A[0] += ScalarField::trig(2, m.s / k.ky, {0.0, k.ky}, Trig::cos);
    }
  }
  f.x0 = {x, y};
  return f;
}

double torus_Ax(const TorusConfig& cfg, double y) {
  double a = 0.0;
  for (const auto& m : cfg.b_modes) {
    if (m.mx != 0) continue;
    const double ky = wave(cfg, m).ky;
    a += -m.c / ky * std::sin(ky * y) + m.s / ky * std::cos(ky * y);
  }
  return a;
}

double torus_Ay(const TorusConfig& cfg, double x, double y) {
  double a = cfg.b0 * x;
  for (const auto& m : cfg.b_modes) {
    if (m.mx == 0) continue;
    const Wave k = wave(cfg, m);
    const double th = k.kx * x + k.ky * y;
    a += m.c / k.kx * std::sin(th) - m.s / k.kx * std::cos(th);
  }
  return a;
}

double torus_Ay_edge(const TorusConfig& cfg, double x, double y0, double h) {
  double a = cfg.b0 * x * h;
  for (const auto& m : cfg.b_modes) {
    if (m.mx == 0) continue;
    const Wave k = wave(cfg, m);
    const cplx e = std::exp(I * k.kx * x) * segment(k.ky, y0, h);
    a += m.c / k.kx * e.imag() - m.s / k.kx * e.real();
  }
  return a;
}

double torus_cell_flux(const TorusConfig& cfg, double x0, double y0, double hx, double hy) {
  double f = cfg.b0 * hx * hy;
  for (const auto& m : cfg.b_modes) {
    const Wave k = wave(cfg, m);
    const cplx e = segment(k.kx, x0, hx) * segment(k.ky, y0, hy);
    f += m.c * e.real() + m.s * e.imag();
  }
  return f;
}

// ---------------------------------------------------------------------------------------------

double LatticeOperator::hermiticity_residual() const {
  const SparseC d = SparseC(matrix.adjoint()) - matrix;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseC::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double LatticeOperator::norm_estimate() const {
  std::vector<double> rows(dim(), 0.0);
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SparseC::InnerIterator it(matrix, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return *std::max_element(rows.begin(), rows.end());
}

void LatticeOperator::rebuild() {
  const int N = dim();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(5 * N);
  const double cx = 1.0 / (hx * hx), cy = 1.0 / (hy * hy);
  for (int j = 0; j < Ny; ++j)
    for (int i = 0; i < Nx; ++i) {
      const int s = i + Nx * j;
      const int sx = (i + 1) % Nx + Nx * j;
      const int sy = i + Nx * ((j + 1) % Ny);
      const double ws = inv_sqrt_w[s];
      trip.emplace_back(s, s, (2.0 * cx + 2.0 * cy) * ws * ws + shift[s]);
      const cplx hxv = -cx * ux[s] * ws * inv_sqrt_w[sx];
      const cplx hyv = -cy * uy[s] * ws * inv_sqrt_w[sy];
      trip.emplace_back(s, sx, hxv);
      trip.emplace_back(sx, s, std::conj(hxv));
      trip.emplace_back(s, sy, hyv);
      trip.emplace_back(sy, s, std::conj(hyv));
    }
  matrix.resize(N, N);
  matrix.setFromTriplets(trip.begin(), trip.end());
  matrix.makeCompressed();
}

LatticeOperator assemble(const TorusConfig& cfg, int p) {
  cfg.validate();
  LatticeOperator op;
  op.Nx = cfg.Nx;
  op.Ny = cfg.Ny;
  op.p = p;
  op.hx = cfg.hx();
  op.hy = cfg.hy();
  const int N = op.dim();
  op.ux.resize(N);
  op.uy.resize(N);
  op.inv_sqrt_w.resize(N);
  op.shift.resize(N);
  for (int j = 0; j < op.Ny; ++j)
    for (int i = 0; i < op.Nx; ++i) {
      const int s = i + op.Nx * j;
      const double x = i * op.hx, y = j * op.hy;
      double phx = -p * torus_Ax(cfg, y) * op.hx;
      if (i == op.Nx - 1) phx += p * cfg.b0 * cfg.Lx * y;  // psi(x + Lx, y) = e^{i p b0 Lx y} psi(x, y)
      op.ux[s] = std::exp(I * phx);
      op.uy[s] = std::exp(-I * (p * torus_Ay_edge(cfg, x, y, op.hy)));
      op.inv_sqrt_w[s] = 1.0 / std::sqrt(cfg.w(x, y));
      op.shift[s] = -p * cfg.tau(x, y);
    }
  double total = 0.0;
  for (int j = 0; j < op.Ny; ++j)
    for (int i = 0; i < op.Nx; ++i) {
      const int s = i + op.Nx * j;
      const int sx = (i + 1) % op.Nx + op.Nx * j;
      const int sy = i + op.Nx * ((j + 1) % op.Ny);
      const cplx plaq = op.ux[s] * op.uy[sx] * std::conj(op.ux[sy]) * std::conj(op.uy[s]);
      const double expected = -p * torus_cell_flux(cfg, i * op.hx, j * op.hy, op.hx, op.hy);
      op.max_plaquette_error =
          std::max(op.max_plaquette_error, std::abs(wrap_angle(std::arg(plaq) - expected)));
      total -= std::arg(plaq);
    }
  op.total_plaquette_flux = total;
  op.rebuild();
  return op;
}

LatticeOperator gauge_transformed(const LatticeOperator& op, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<cplx> g(op.dim());
  for (auto& v : g) v = std::exp(I * angle(rng));
  LatticeOperator out = op;
  for (int j = 0; j < op.Ny; ++j)
    for (int i = 0; i < op.Nx; ++i) {
      const int s = i + op.Nx * j;
      const int sx = (i + 1) % op.Nx + op.Nx * j;
      const int sy = i + op.Nx * ((j + 1) % op.Ny);
      out.ux[s] = g[s] * op.ux[s] * std::conj(g[sx]);
      out.uy[s] = g[s] * op.uy[s] * std::conj(g[sy]);
    }
  out.rebuild();
  return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

Spectrum dense_spectrum(const SparseC& A, int k) {
  const CMat dense = CMat(A);
  Eigen::SelfAdjointEigenSolver<CMat> es(dense);
  Spectrum out;
  for (int i = 0; i < k; ++i) {
    out.values.push_back(es.eigenvalues()(i));
    const CVec x = es.eigenvectors().col(i);
    out.residuals.push_back((dense * x - es.eigenvalues()(i) * x).norm());
  }
  return out;
}

double gershgorin_min(const SparseC& A) {
  std::vector<double> centre(A.rows(), 0.0), radius(A.rows(), 0.0);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseC::InnerIterator it(A, k); it; ++it) {
      if (it.row() == it.col())
        centre[it.row()] = it.value().real();
      else
        radius[it.row()] += std::abs(it.value());
    }
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centre.size(); ++i) m = std::min(m, centre[i] - radius[i]);
  return m;
}

}  // namespace

Spectrum low_spectrum(const SparseC& A, int k, const LanczosOptions& opt) {
  const int N = static_cast<int>(A.rows());
  if (k < 1 || k > N) throw Error(ErrorKind::config, "torus_lab", "requested eigenvalue count out of range");
  if (N <= 256 || 3 * k >= N) return dense_spectrum(A, k);

  const double sigma = gershgorin_min(A) - 1.0;
  SparseC shifted = A;
  for (int i = 0; i < N; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLLT<SparseC> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::numerical, "torus_lab", "factorization of the shifted operator failed");

  const int m = std::min(N - 1, std::max(2 * k + 20, k + 40));
  CMat V(N, m + 1);
  CMat H = CMat::Zero(m, m);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&] {
    CVec v(N);
    for (int i = 0; i < N; ++i) v(i) = cplx(normal(rng), normal(rng));
    return v;
  };
  V.col(0) = random_vector().normalized();

  Spectrum out;
  out.shift = sigma;
  int start = 0;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    double beta = 0.0;
    for (int j = start; j < m; ++j) {
      CVec w = llt.solve(V.col(j));
      ++out.operator_applications;
      CVec h = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h;
      const CVec h2 = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      for (int i = 0; i <= j; ++i) {
        H(i, j) = h(i);
        H(j, i) = std::conj(h(i));
      }
      beta = w.norm();
      if (beta < 1e-14 * std::abs(h(j))) {
        // invariant subspace: continue with a fresh orthogonal direction
        CVec r = random_vector();
        r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
        r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
        V.col(j + 1) = r.normalized();
        beta = 0.0;
      } else {
        V.col(j + 1) = w / beta;
      }
      if (j + 1 < m) {
        H(j + 1, j) = beta;
        H(j, j + 1) = beta;
      }
    }
    const CMat Hs = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(Hs);
    // largest theta first
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = m - 1 - i;
    int converged = 0;
    for (int i = 0; i < k; ++i) {
      const int c = order[i];
      const double theta = es.eigenvalues()(c);
      if (beta * std::abs(es.eigenvectors()(m - 1, c)) <= opt.tol * std::abs(theta)) ++converged;
    }
    out.restarts = restart;
    if (converged == k) {
      CMat Y(m, k);
      for (int i = 0; i < k; ++i) Y.col(i) = es.eigenvectors().col(order[i]);
      const CMat X = V.leftCols(m) * Y;
      std::vector<std::pair<double, int>> vals;
      for (int i = 0; i < k; ++i) vals.emplace_back(sigma + 1.0 / es.eigenvalues()(order[i]), i);
      std::sort(vals.begin(), vals.end());
      double norm_a = 0.0;
      {
        std::vector<double> rows(N, 0.0);
        for (int c = 0; c < A.outerSize(); ++c)
          for (SparseC::InnerIterator it(A, c); it; ++it) rows[it.row()] += std::abs(it.value());
        norm_a = *std::max_element(rows.begin(), rows.end());
      }
      for (const auto& [lambda, idx] : vals) {
        const CVec x = X.col(idx).normalized();
        const double r = (A * x - lambda * x).norm();
        if (r > opt.residual_bound * norm_a) {
          std::ostringstream os;
          os << "eigenpair residual " << r << " exceeds " << opt.residual_bound * norm_a;
          throw Error(ErrorKind::convergence, "torus_lab", os.str());
        }
        out.values.push_back(lambda);
        out.residuals.push_back(r);
      }
      return out;
    }
    // thick restart: keep the leading Ritz vectors and the residual direction
    const int keep = std::min(m - 1, k + (m - k) / 2);
    CMat Y(m, keep);
    for (int i = 0; i < keep; ++i) Y.col(i) = es.eigenvectors().col(order[i]);
    const CMat kept = V.leftCols(m) * Y;
    const CVec resid = V.col(m);
    V.leftCols(keep) = kept;
    V.col(keep) = resid;
    H.setZero();
    for (int i = 0; i < keep; ++i) {
      H(i, i) = es.eigenvalues()(order[i]);
      const cplx c = beta * Y(m - 1, i);
      H(keep, i) = c;
      H(i, keep) = std::conj(c);
    }
    start = keep;
  }
  std::ostringstream os;
  os << "Lanczos did not converge " << k << " eigenpairs in " << opt.max_restarts << " restarts ("
     << out.operator_applications << " operator applications)";
  throw Error(ErrorKind::convergence, "torus_lab", os.str());
}

Cluster detect_cluster(const std::vector<double>& evals, int p, double mu0) {
  const double lo = 0.5 * p * mu0, hi = 1.5 * p * mu0;
  if (evals.empty() || evals.back() < hi) {
    std::ostringstream os;
    os << "no computed eigenvalue above " << hi << " at p = " << p << "; gap not resolved";
    throw Error(ErrorKind::numerical, "torus_lab", os.str());
  }
  int best = -1;
  double best_gap = 0.0;
  for (std::size_t i = 0; i + 1 < evals.size(); ++i) {
    if (evals[i] >= hi || evals[i + 1] <= lo) continue;
    const double gap = evals[i + 1] - evals[i];
    if (gap > best_gap) {
      best_gap = gap;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    std::ostringstream os;
    os << "no spectral gap meets (" << lo << ", " << hi << ") at p = " << p;
    throw Error(ErrorKind::numerical, "torus_lab", os.str());
  }
  Cluster c;
  c.d = best + 1;
  c.gap_lo = evals[best];
  c.gap_hi = evals[best + 1];
  c.values.assign(evals.begin(), evals.begin() + best + 1);
  return c;
}

DensityQuadrature density_quadrature(const TorusConfig& cfg) {
  const int Q = cfg.quad_points;
  if (Q < 1) throw Error(ErrorKind::config, "torus_lab", "quad_points must be positive");
  const double dx = cfg.Lx / Q, dy = cfg.Ly / Q;
  DensityQuadrature out;
  std::vector<std::vector<double>> grid;
  double s1 = 0.0, s2 = 0.0, vol = 0.0;
  for (int j = 0; j < Q; ++j)
    for (int i = 0; i < Q; ++i) {
      const double x = (i + 0.5) * dx, y = (j + 0.5) * dy;
      grid.push_back({x, y});
      const ChartField f = cfg.chart_field(x, y);
      const GeometryJet jet = covariant_jet(f, build_frame(endos_at(f, f.x0)));
      const double rho = rho_closed(jet).rho;
      const double weight = cfg.b(x, y) * dx * dy;
      s1 += rho * weight;
      s2 += rho * rho * weight;
      vol += weight;
      out.rho_max_abs = std::max(out.rho_max_abs, std::abs(rho));
    }
  out.volume = vol;
  out.rho_mean = s1 / vol;
  out.rho_sq_mean = s2 / vol;
  out.mu0 = mu0_estimate(cfg.chart_field(), grid);
  return out;
}

ClusterReport cluster_report(const TorusConfig& cfg, int p, const DensityQuadrature& quad) {
  const LatticeOperator op = assemble(cfg, p);
  LanczosOptions opt;
  opt.tol = cfg.eig_tol;
  opt.max_restarts = cfg.max_restarts;
  opt.seed = cfg.seed + static_cast<std::uint64_t>(p);
  int k = static_cast<int>(std::ceil(1.5 * p * cfg.n_flux())) + 8;
  Cluster cl;
  Spectrum spec;
  for (;;) {
    k = std::min(k, op.dim());
    spec = low_spectrum(op.matrix, k, opt);
    if (spec.values.back() >= 1.5 * p * quad.mu0 || k == op.dim()) break;
    k = static_cast<int>(std::ceil(1.6 * k));
  }
  cl = detect_cluster(spec.values, p, quad.mu0);

  ClusterReport r;
  r.p = p;
  r.d_p = cl.d;
  r.cluster = cl.values;
  r.gap_lo = cl.gap_lo;
  r.gap_hi = cl.gap_hi;
  for (double v : cl.values) {
    r.mean_lambda += v;
    r.mean_lambda_sq += v * v;
    r.max_abs_cluster = std::max(r.max_abs_cluster, std::abs(v));
  }
  r.mean_lambda /= cl.d;
  r.mean_lambda_sq /= cl.d;
  r.quad_rho_mean = quad.rho_mean;
  r.quad_rho_sq_mean = quad.rho_sq_mean;
  r.disc_mean = std::abs(r.mean_lambda - quad.rho_mean);
  r.disc_sq = std::abs(r.mean_lambda_sq - quad.rho_sq_mean);
  r.hermiticity = op.hermiticity_residual();
  r.plaquette_error = op.max_plaquette_error;
  for (double v : spec.residuals) r.max_residual = std::max(r.max_residual, v);
  r.restarts = spec.restarts;
  return r;
}

std::vector<ClusterReport> density_compare(const TorusConfig& cfg) {
  cfg.validate();
  const DensityQuadrature quad = density_quadrature(cfg);
  std::vector<ClusterReport> out;
  for (int p : cfg.p_list) out.push_back(cluster_report(cfg, p, quad));
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sdlab
