#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdlab/model_oracle.hpp"

namespace sdlab {

struct IdentityCheck {
  std::string name;
  std::string statement;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Tolerance for identities that hold in exact arithmetic; reported, not enforced.
inline constexpr double kExactTarget = 1e-12;

/// L^2 norms of z^beta zbar^gamma P(., 0), b_j z^beta P(., 0) and b_j b_k z^beta P(., 0)
/// against their closed forms.
std::vector<IdentityCheck> norm_formula_checks(const ModelContext& ctx, double tol);

/// Ladder algebra, kernel actions, eigen-cases, spectrum, orthonormal kernel basis, norm
/// formulas and projection values
/// on random polynomial data in the model space of `ctx`. Residuals are relative.
std::vector<IdentityCheck> model_space_checks(const ModelContext& ctx, std::uint64_t seed,
                                              double tol);

/// Structural identities of one jet: q-table relations, the curvature commutator, Riemann
/// symmetries, orthogonality of the A3 pieces and their sum, truncation independence.
std::vector<IdentityCheck> jet_checks(const GeometryJet& jet, double tol);

struct SelfcheckOptions {
  std::uint64_t seed = 20240601;
  int fields_per_n = 3;
  double tol = 1e-9;
};

struct SelfcheckReport {
  std::vector<IdentityCheck> checks;
  double moment_quadrature_deviation = 0.0;
  /// The norm check must fail once a moment table entry is scaled by 1 + 1e-3.
  bool negative_control_flagged = false;
  double negative_control_residual = 0.0;
  bool all_pass() const;
};

/// Runs both check families over several a-vectors (including a degenerate one) and seeded
/// random fields for n = 1, 2, 3; residuals are maxima over all instances.
SelfcheckReport run_selfcheck(const SelfcheckOptions& opt = {});

/// Merge by name keeping the worst residual; order of first appearance is preserved.
void merge_checks(std::vector<IdentityCheck>& into, const std::vector<IdentityCheck>& more);

}  // namespace sdlab
