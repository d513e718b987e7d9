#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sdlab/field.hpp"

namespace sdlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Local data on a chart of R^{2n}: metric g_ij(x), potential A_i(x) and a basepoint.
/// The magnetic two-form is B = dA, so dB = 0 holds by construction.
struct ChartField {
  int n = 1;
  std::vector<ScalarField> g;  // dim*dim, row-major, symmetric
  std::vector<ScalarField> A;  // dim
  std::vector<double> x0;      // dim

  int dim() const { return 2 * n; }
  ScalarField& g_entry(int i, int j) { return g[i * dim() + j]; }
  const ScalarField& g_entry(int i, int j) const { return g[i * dim() + j]; }

  /// Empty field with g and A slots allocated (all zero).
  static ChartField zero(int n);

  /// Checks the structural invariants: symmetric positive-definite metric at x0 and at
  /// `samples` (if given), nondegenerate B at x0. Throws Error on failure.
  void validate(std::span<const std::vector<double>> samples = {}) const;
};

/// Levi-Civita connection matrices: conn[i](k, j) = Gamma^k_{ij}, so that
/// nabla_i V = d_i V + conn[i] V in chart coordinates.
struct Christoffel {
  int dim = 0;
  std::vector<Mat> conn;
  double operator()(int k, int i, int j) const { return conn[i](k, j); }
};

/// Curvature operators: op[i*dim+j](l, k) = R^l_{kij}, i.e. R(d_i, d_j) d_k = R^l_{kij} d_l.
struct Riemann {
  int dim = 0;
  std::vector<Mat> op;
  double operator()(int l, int k, int i, int j) const { return op[i * dim + j](l, k); }
  /// R_{abcd} = g(R(d_c, d_d) d_b, d_a) ... lowered with the given metric.
  double lowered(const Mat& g, int a, int b, int c, int d) const;
};

Christoffel christoffel(const ChartField& field, std::span<const double> x);
Riemann riemann(const ChartField& field, std::span<const double> x);

/// Pointwise endomorphisms, all in chart coordinates.
struct PointEndos {
  std::vector<double> x;
  Mat g;
  Mat B;      // g(Bu, v) = B(u, v)
  Mat J;      // B (B^*B)^{-1/2}
  Mat absJ;   // (B^*B)^{1/2}, equal to |cal J|
  double tau = 0.0;
};

PointEndos endos_at(const ChartField& field, std::span<const double> x);

/// Smallest eigenvalue of |cal J| over the grid (inf of B(u, Ju)/|u|^2).
double mu0_estimate(const ChartField& field, std::span<const std::vector<double>> grid);

/// An endomorphism field and its first two covariant derivatives at a point (chart coordinates).
/// cov2[c*dim+d] = (nabla nabla Psi)_{(d_c, d_d)} = nabla_c (nabla_d Psi) - nabla_{nabla_c d_d} Psi.
struct EndoJet {
  Mat value;
  std::vector<Mat> cov1;
  std::vector<Mat> cov2;
};

/// Everything needed downstream, still in chart coordinates.
struct ChartJet {
  int dim = 0;
  std::vector<double> x;
  Mat g;
  Christoffel gamma;
  Riemann curvature;
  EndoJet B, absB, J;
  /// min/max eigenvalue ratio of |cal J|; small values flag a nearly degenerate B.
  double conditioning = 1.0;
};

ChartJet chart_jet(const ChartField& field, std::span<const double> x);

}  // namespace sdlab
