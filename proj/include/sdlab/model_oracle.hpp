#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "sdlab/frame_spectral.hpp"

namespace sdlab {

inline constexpr int kMaxHalfDim = 4;

/// Exponents (beta, gamma) of z^beta zbar^gamma; slots beyond n stay zero.
struct Monomial {
  std::array<std::uint8_t, kMaxHalfDim> z{};
  std::array<std::uint8_t, kMaxHalfDim> zb{};

  int degree() const;
  auto operator<=>(const Monomial&) const = default;
};

/// Harmonic-oscillator data at x0: ladder-operator frequencies a_j, truncation degree and
/// the one-dimensional Gaussian moments
///   M(m, a) = int |z|^{2m} exp(-a|z|^2/2) dZ = m! (2/a)^m (2 pi / a).
class ModelContext {
 public:
  ModelContext(std::vector<double> a, int degree = 6);

  int n() const { return static_cast<int>(a_.size()); }
  const std::vector<double>& a() const { return a_; }
  int degree() const { return degree_; }
  double moment(int j, int m) const { return moments_[j][m]; }
  /// P(0,0) = prod a_j / (2 pi)^n
  double bergman_origin() const;

  /// Test fixture: scales one table entry, to check that the identity suite notices.
  ModelContext with_perturbed_moment(int j, int m, double factor) const;

  /// Largest relative deviation between the table and adaptive numeric quadrature.
  double moment_quadrature_deviation() const;

 private:
  std::vector<double> a_;
  int degree_;
  std::vector<std::vector<double>> moments_;
};

/// Finite sum  sum c_{beta gamma} z^beta zbar^gamma exp(-1/4 sum a_j |z_j|^2).
class PolyGauss {
 public:
  explicit PolyGauss(int n = 0) : n_(n) {}

  static PolyGauss constant(int n, cplx c = 1.0);
  static PolyGauss monomial(int n, const std::vector<int>& z_pow, const std::vector<int>& zb_pow,
                            cplx c = 1.0);

  int n() const { return n_; }
  int degree() const;
  const std::map<Monomial, cplx>& terms() const { return terms_; }
  cplx coeff(const Monomial& m) const;
  bool is_zero() const { return terms_.empty(); }

  void add(const Monomial& m, cplx c);
  PolyGauss& operator+=(const PolyGauss& o);
  PolyGauss& operator-=(const PolyGauss& o);
  PolyGauss& operator*=(cplx s);
  friend PolyGauss operator+(PolyGauss a, const PolyGauss& b) { return a += b; }
  friend PolyGauss operator-(PolyGauss a, const PolyGauss& b) { return a -= b; }
  friend PolyGauss operator*(cplx s, PolyGauss a) { return a *= s; }

  /// Pointwise product of polynomial parts; the Gaussian factor of `other` is ignored
  /// (multiplication operator by a polynomial).
  PolyGauss times_polynomial(const PolyGauss& poly) const;

  /// Removes coefficients with modulus <= tol.
  void prune(double tol = 0.0);

 private:
  int n_;
  std::map<Monomial, cplx> terms_;
};

/// b_j = -2 d/dz_j + a_j zbar_j / 2 acting on the full function; on the polynomial part
/// this is p -> -2 d_{z_j} p + a_j zbar_j p. Throws on degree overflow.
PolyGauss apply_b(const ModelContext& ctx, int j, const PolyGauss& f);
/// b_j^+ = 2 d/dzbar_j + a_j z_j / 2; on the polynomial part p -> 2 d_{zbar_j} p.
PolyGauss apply_b_plus(const ModelContext& ctx, int j, const PolyGauss& f);
/// cal L = sum_j b_j b_j^+
PolyGauss apply_L(const ModelContext& ctx, const PolyGauss& f);

/// L^2(R^{2n}, dZ) pairing, linear in f, antilinear in h.
cplx inner(const ModelContext& ctx, const PolyGauss& f, const PolyGauss& h);
double norm_sq(const ModelContext& ctx, const PolyGauss& f);

/// Orthogonal projection onto ker cal L = span{z^beta G}.
PolyGauss project_P(const ModelContext& ctx, const PolyGauss& f);

/// Solves cal L u = f with u orthogonal to ker cal L. Requires ||P f|| <= 1e-10 ||f||.
PolyGauss inverse_L(const ModelContext& ctx, const PolyGauss& f);

/// Value at Z = 0 of the polynomial part (the Gaussian is 1 there).
cplx value_at_origin(const PolyGauss& f);

/// Operator-calculus evaluation of the four A-terms; rho = A0 + A1 + A2 - A3.
struct OracleBreakdown {
  double A0 = 0.0, A1 = 0.0, A2 = 0.0, A3 = 0.0;
  double rho = 0.0;
  double im_residue = 0.0;
  int degree = 6;
};

OracleBreakdown rho_oracle(const GeometryJet& jet, const QCoeffs& q, int degree = 6);

/// q_j(Z, Z) as a polynomial (no Gaussian weight semantics beyond PolyGauss's).
PolyGauss q_polynomial(const QCoeffs& q, int j);

/// The four pieces u_1..u_4 of b_j q_j P(., 0) (with P(., 0) replaced by the bare Gaussian),
/// built from the q-tables, and I_i = P(0,0) sum_{j,j'} (L^{-1} u_i^{(j')}, u_i^{(j)}) computed
/// by inverse_L (so that A3 = 4/9 * sum_i I_i when the pieces are orthogonal).
struct A3Pieces {
  std::vector<std::array<PolyGauss, 4>> u;  // indexed by j
  std::array<double, 4> I{};
  /// max |<u_i^{(j)}, u_k^{(j')}>| over i != k, relative to the largest norm
  double max_offdiag_gram = 0.0;
  /// same for the L^{-1} images
  double max_offdiag_gram_v = 0.0;
};

A3Pieces a3_pieces(const ModelContext& ctx, const QCoeffs& q);

}  // namespace sdlab
