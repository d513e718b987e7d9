#pragma once

#include <cstdint>
#include <vector>

#include "sdlab/tensor_geometry.hpp"

namespace sdlab {

/// Seeded field families on R^{2n}, coordinates ordered (x_1, y_1, ..., x_n, y_n).
namespace fields {

/// g = I + quadratic perturbation (coefficient norm <= 0.2), A = nondegenerate linear part
/// plus random quadratic and cubic terms; x0 drawn from [-0.3, 0.3]^{2n}.
ChartField random_local(int n, std::uint64_t seed);

/// B = 2 pi sum dx_j ^ dy_j and g = M^T M with M = [[I, 0], [C(x), I]] in (x, y) block
/// order, C symmetric quadratic. Then |B| = 2 pi everywhere and J = M^{-1} J_0 M.
ChartField almost_kahler(int n, std::uint64_t seed);

/// B = dd^c phi / 2 for a polynomial potential phi (J_0-invariant) and g = I plus a quadratic
/// perturbation vanishing to second order at x0, so that nabla J = 0 at x0 while |cal J|
/// and nabla nabla J vary.
ChartField kahler_potential(int n, std::uint64_t seed);

/// A = b/2 sum (x_j dy_j - y_j dx_j) + quadratic and cubic terms, g = I + linear and
/// quadratic terms, x0 = 0: all a_j equal b at x0.
ChartField degenerate(int n, std::uint64_t seed);

/// Constant field b dx^dy, flat metric, n = 1.
ChartField constant_2d(double b);

/// b(x, y) = b0 + eps cos(x), flat metric, n = 1, potential A = (b0 x + eps sin x) dy.
ChartField cosine_2d(double b0, double eps, std::vector<double> x0 = {0.0, 0.0});

}  // namespace fields

}  // namespace sdlab
