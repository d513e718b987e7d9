#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "sdlab/tensor_geometry.hpp"

namespace sdlab {

/// c cos(k.x) + s sin(k.x) with k = 2 pi (mx / Lx, my / Ly).
struct TrigMode {
  int mx = 0, my = 0;
  double c = 0.0, s = 0.0;
};

/// Flat-chart 2-torus [0, Lx) x [0, Ly) with field b = b0 + sum modes and metric
/// g = w (dx^2 + dy^2), w = w0 + sum modes.
struct TorusConfig {
  int Nx = 96, Ny = 96;
  double Lx = 0.0, Ly = 0.0;
  double b0 = 1.0;
  std::vector<TrigMode> b_modes;
  double w0 = 1.0;
  std::vector<TrigMode> w_modes;
  std::vector<int> p_list;
  double eig_tol = 1e-12;      // relative Ritz residual in the shift-inverted problem
  int max_restarts = 400;
  std::uint64_t seed = 1;
  int quad_points = 32;        // per axis, for the density quadrature

  double hx() const { return Lx / Nx; }
  double hy() const { return Ly / Ny; }
  double b(double x, double y) const;
  double w(double x, double y) const;
  /// b / w, the eigenvalue of |cal J|
  double tau(double x, double y) const { return b(x, y) / w(x, y); }
  int n_flux() const;
  double b_max() const;  // sampled on the lattice

  /// Flux integrality, positivity of b and w, mode indices, resolution
  /// h_mu sqrt(p_max b_max) <= sqrt(2 pi) / 8. Throws Error(config) naming the required grid.
  void validate() const;

  /// Analytic chart data: g = w Id, A = (-G(y), b0 x + F(x, y)) with periodic F, G.
  ChartField chart_field(double x = 0.0, double y = 0.0) const;
};

/// Potential components and exact edge integrals of the gauge above.
double torus_Ax(const TorusConfig& cfg, double y);
double torus_Ay(const TorusConfig& cfg, double x, double y);
/// int_{y0}^{y0+h} A_y(x, t) dt
double torus_Ay_edge(const TorusConfig& cfg, double x, double y0, double h);
/// int over [x0, x0+hx] x [y0, y0+hy] of b
double torus_cell_flux(const TorusConfig& cfg, double x0, double y0, double hx, double hy);

using SparseC = Eigen::SparseMatrix<cplx>;

/// Sites are ordered s = i + Nx * j. ux[s] multiplies psi(i+1, j) in the row of s, with the
/// transition factor exp(i p b0 Lx y_j) folded in at i = Nx - 1; uy[s] likewise for (i, j+1).
struct LatticeOperator {
  int Nx = 0, Ny = 0, p = 0;
  double hx = 0.0, hy = 0.0;
  std::vector<cplx> ux, uy;
  std::vector<double> inv_sqrt_w;  // similarity weight w^{-1/2}
  std::vector<double> shift;       // -p tau
  SparseC matrix;
  double max_plaquette_error = 0.0;  // |arg(plaquette) + p * cell flux|, wrapped
  double total_plaquette_flux = 0.0; // -sum arg(plaquette) = 2 pi p N_flux

  int dim() const { return Nx * Ny; }
  double hermiticity_residual() const;
  /// max row sum of |entries|
  double norm_estimate() const;
  /// Rebuild `matrix` from links, weights and shift.
  void rebuild();
};

LatticeOperator assemble(const TorusConfig& cfg, int p);

/// Links multiplied by exp(i theta(s)) ... exp(-i theta(s + mu)) for random theta.
LatticeOperator gauge_transformed(const LatticeOperator& op, std::uint64_t seed);

struct LanczosOptions {
  double tol = 1e-12;
  int max_restarts = 400;
  std::uint64_t seed = 1;
  double residual_bound = 1e-8;  // per pair, relative to norm_estimate
};

struct Spectrum {
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // ||A x - lambda x|| per pair
  int restarts = 0;
  int operator_applications = 0;
  double shift = 0.0;
};

/// k smallest eigenvalues of a Hermitian matrix by shift-invert thick-restart Lanczos with
/// full reorthogonalization, shift below the Gershgorin bound. Throws Error(convergence).
Spectrum low_spectrum(const SparseC& A, int k, const LanczosOptions& opt = {});

struct Cluster {
  int d = 0;
  double gap_lo = 0.0, gap_hi = 0.0;
  std::vector<double> values;
};

/// Largest gap between consecutive eigenvalues that meets the window
/// (p mu0 / 2, 3 p mu0 / 2); everything below it is the cluster. Throws Error(numerical)
/// when no computed eigenvalue lies above the window.
Cluster detect_cluster(const std::vector<double>& evals, int p, double mu0);

struct DensityQuadrature {
  double rho_mean = 0.0;     // (1/vol) int rho dmu
  double rho_sq_mean = 0.0;  // (1/vol) int rho^2 dmu
  double rho_max_abs = 0.0;
  double volume = 0.0;       // int b dx dy
  double mu0 = 0.0;
};

DensityQuadrature density_quadrature(const TorusConfig& cfg);

struct ClusterReport {
  int p = 0;
  int d_p = 0;
  std::vector<double> cluster;
  double gap_lo = 0.0, gap_hi = 0.0;
  double mean_lambda = 0.0, mean_lambda_sq = 0.0;
  double quad_rho_mean = 0.0, quad_rho_sq_mean = 0.0;
  double disc_mean = 0.0, disc_sq = 0.0;
  double max_abs_cluster = 0.0;
  double hermiticity = 0.0;
  double plaquette_error = 0.0;
  double max_residual = 0.0;
  int restarts = 0;
};

ClusterReport cluster_report(const TorusConfig& cfg, int p, const DensityQuadrature& quad);
std::vector<ClusterReport> density_compare(const TorusConfig& cfg);

/// Least-squares slope of log(y) against log(x); y <= 0 entries are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sdlab
