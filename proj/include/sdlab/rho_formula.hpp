#pragma once

#include <string>
#include <vector>

#include "sdlab/frame_spectral.hpp"

namespace sdlab {

enum class Provenance { closed_form, polar_form, special_case };

std::string to_string(Provenance p);

/// Summands of the spectral density at x0.
///
/// For the closed form, `groups` holds {A0, A1, J1, J2} and the named fields are filled:
///   A0 = -sum_{jk} 8/(a_j+a_k) <(nabla nabla cal J)_(dz_j,dz_k) dzbar_j, dzbar_k>
///   A1 =  sum_j (1/a_j) (tr (nabla nabla cal J)_(dz_j,dzbar_j) - tr (nabla nabla |cal J|)_(...))
///   J1 =  sum_{jkl} 8/(9 a_k (a_j+a_l)) |<(nabla_{dz_k} cal J) dzbar_j, dzbar_l>|^2
///   J2 =  sum_{jkl} 8/(a_k (a_j+a_k+a_l)) |<(nabla_{dzbar_k} cal J) dzbar_j, dzbar_l>|^2
/// with tr A := 4 sum_k <A dz_k, dzbar_k>.
/// For the polar form, `groups` holds the seven groups in display order and the named
/// fields stay zero.
struct RhoBreakdown {
  double A0 = 0.0, A1 = 0.0, J1 = 0.0, J2 = 0.0;
  double rho = 0.0;
  double im_residue = 0.0;
  Provenance provenance = Provenance::closed_form;
  std::vector<double> groups;
};

/// `amended_j1` weights J1 by 8/(a_k (a_j+a_l)) instead of 8/(9 a_k (a_j+a_l)); it is the
/// value the operator-calculus route produces. `as_stated` is the default everywhere.
enum class ClosedVariant { as_stated, amended_j1 };

/// Rejects jets whose summands carry an imaginary part above 1e-8 * (1 + sum |terms|).
RhoBreakdown rho_closed(const GeometryJet& jet, ClosedVariant variant = ClosedVariant::as_stated);

/// The same quantity written through the polar decomposition cal J = -i J |cal J|.
RhoBreakdown rho_polar(const GeometryJet& jet);

/// B = 2 pi J: rho = |nabla J|^2 / 24 with the full Frobenius norm over the orthonormal frame.
double rho_almost_kahler(const GeometryJet& jet);

/// nabla J = 0: two-group formula in nabla nabla |cal J| and nabla |cal J|.
double rho_kahler_case(const GeometryJet& jet);

/// sum_{uvw} <(nabla_{e_u} J) e_v, e_w>^2 in the real orthonormal frame.
double grad_J_norm_sq(const GeometryJet& jet);

/// Closed forms of the intermediate quantities, divided by P(0,0) where the display carries it.
struct DisplayedPartials {
  double A2 = 0.0;                   // quartic-term contribution
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
  double A3() const { return 4.0 / 9.0 * (I1 + I2 + I3 + I4); }
};

DisplayedPartials displayed_partials(const QCoeffs& q, const std::vector<double>& a);

}  // namespace sdlab
