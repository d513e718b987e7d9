#pragma once

#include <vector>

#include "sdlab/tensor_geometry.hpp"

namespace sdlab {

/// The diagonalizing frame at x0. Complex frame vectors are indexed
/// u = 0..n-1 for d/dz_j and u = n..2n-1 for d/dzbar_j.
struct DiagonalFrame {
  int n = 0;
  std::vector<double> a;  // ascending eigenvalues of cal J on T^(1,0)
  Mat e;                  // columns e_1..e_2n, chart coordinates, g-orthonormal
  CMat w;                 // columns w_1..w_n, chart coordinates
  std::vector<double> x0;

  /// Chart coordinates of d/dz_j (u < n) and d/dzbar_j (u >= n) as columns.
  CMat complex_vectors() const;

  /// Frame with w replaced by w * U for a unitary U (n x n). The caller is responsible for U
  /// only mixing w_j with equal a_j; the eigenvalues are kept.
  DiagonalFrame regauged(const CMat& U) const;
};

/// Deterministic diagonal frame: a_j ascending, degenerate eigenspaces fixed by
/// orthonormalizing projected coordinate axes in order, then largest-entry phase fixing.
DiagonalFrame build_frame(const PointEndos& endos);

/// Frame-component tensors at x0. Endomorphisms are stored as matrices in the complex
/// frame basis E_u (column v holds the E-components of Psi E_v).
struct GeometryJet {
  int n = 0;
  std::vector<double> a;
  DiagonalFrame frame;
  std::vector<CMat> dJc;     // [u]       nabla_{E_u} cal J
  std::vector<CMat> ddJc;    // [u*2n+v]  (nabla nabla cal J)_{(E_u, E_v)}
  std::vector<CMat> dJ;      // [u]       nabla_{E_u} J
  std::vector<CMat> dAbsJ;   // [u]       nabla_{E_u} |cal J|
  std::vector<CMat> ddAbsJ;  // [u*2n+v]
  std::vector<CMat> Rc;      // [u*2n+v]  R^{TX}(E_u, E_v)
  double tau0 = 0.0;
  double conditioning = 1.0;

  int dim() const { return 2 * n; }
  static int bar(int u, int n) { return u < n ? u + n : u - n; }
  /// Complex bilinear pairing <A E_v, E_w>; <E_x, E_w> = 1/2 if x = bar(w), else 0.
  static cplx pair(const CMat& A, int v, int w, int n) { return 0.5 * A(bar(w, n), v); }
  cplx pair(const CMat& A, int v, int w) const { return pair(A, v, w, n); }

  const CMat& ddJ_at(int u, int v) const { return ddJc[u * dim() + v]; }
  const CMat& ddAbs_at(int u, int v) const { return ddAbsJ[u * dim() + v]; }
  const CMat& R_at(int u, int v) const { return Rc[u * dim() + v]; }

  /// The zero jet (constant field, flat metric) with the given eigenvalues.
  static GeometryJet flat(const std::vector<double>& a);
};

/// Contract chart-coordinate covariant derivatives with the frame.
GeometryJet contract(const ChartJet& chart, const DiagonalFrame& frame);

/// chart_jet at frame.x0 followed by contract().
GeometryJet covariant_jet(const ChartField& field, const DiagonalFrame& frame);

/// Maximum residuals of the structural identities a valid jet satisfies.
struct JetResiduals {
  double skew = 0.0;        // <(nabla_U cal J)V, W> + <(nabla_U cal J)W, V>
  double closedness = 0.0;  // cyclic sum of <(nabla_U cal J)V, W>
  double commutator = 0.0;  // antisymmetrized nabla nabla cal J minus [R, cal J]
  double abs_selfadjoint = 0.0;
  double riemann = 0.0;     // antisymmetries, pair symmetry, first Bianchi
  double max() const;
};

JetResiduals jet_residuals(const GeometryJet& jet);

/// q_{j,kl}, q_{j,k lbar}, q_{j,kbar lbar}, stored flat as [(j*n+k)*n+l].
struct QCoeffs {
  int n = 0;
  std::vector<cplx> hol, mix, anti;

  cplx q_hol(int j, int k, int l) const { return hol[(j * n + k) * n + l]; }
  cplx q_mix(int j, int k, int l) const { return mix[(j * n + k) * n + l]; }
  cplx q_anti(int j, int k, int l) const { return anti[(j * n + k) * n + l]; }
};

QCoeffs q_coefficients(const GeometryJet& jet);

/// Residuals of the three antisymmetry/cyclic identities for q_{j,kbar lbar}, and of the
/// two derived quadratic identities.
struct QResiduals {
  double antisym = 0.0, diagonal = 0.0, cyclic = 0.0, quad_cross = 0.0, quad_sum = 0.0;
  double max() const;
};

QResiduals q_residuals(const QCoeffs& q);

}  // namespace sdlab
