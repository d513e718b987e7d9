#include "sdlab/fields.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sdlab::fields {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<int> unit_powers(int dim, std::initializer_list<int> idx) {
  std::vector<int> p(dim, 0);
  for (int i : idx) p[i] += 1;
  return p;
}

// All multi-indices of the given total degree over dim variables.
void enumerate(int dim, int degree, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
  if (pos == dim - 1) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (int k = degree; k >= 0; --k) {
    cur[pos] = k;
    enumerate(dim, degree - k, cur, pos + 1, out);
  }
}

std::vector<std::vector<int>> powers_of_degree(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(dim, 0);
  enumerate(dim, degree, cur, 0, out);
  return out;
}

ScalarField random_poly(Rng& rng, int dim, int degree, double scale) {
  ScalarField f(dim);
  for (const auto& p : powers_of_degree(dim, degree))
    f.add_term(Term{uniform(rng, -scale, scale), p, {}, Trig::none});
  return f;
}

void set_sym(ChartField& f, int i, int j, const ScalarField& s) {
  f.g_entry(i, j) = s;
  if (i != j) f.g_entry(j, i) = s;
}

ScalarField identity_entry(int dim, int i, int j) {
  return i == j ? ScalarField::constant(dim, 1.0) : ScalarField(dim);
}

// (x, y) block order index -> interleaved chart index
int chart_index(int n, int block) { return block < n ? 2 * block : 2 * (block - n) + 1; }

}  // namespace

ChartField random_local(int n, std::uint64_t seed) {
  Rng rng(seed);
  const int dim = 2 * n;
  ChartField f = ChartField::zero(n);
  // quadratic metric perturbation with total coefficient norm 0.2
  std::vector<ScalarField> pert;
  double norm_sq = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      pert.push_back(random_poly(rng, dim, 2, 1.0));
      for (const auto& t : pert.back().terms()) norm_sq += (i == j ? 1.0 : 2.0) * t.coeff * t.coeff;
    }
  const double s = 0.2 / std::sqrt(norm_sq);
  int idx = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) set_sym(f, i, j, identity_entry(dim, i, j) + s * pert[idx++]);
  for (int j = 0; j < n; ++j) {
    const double b = uniform(rng, 1.0, 3.0);
    f.A[2 * j + 1] += ScalarField::monomial(dim, 0.5 * b, unit_powers(dim, {2 * j}));
    f.A[2 * j] += ScalarField::monomial(dim, -0.5 * b, unit_powers(dim, {2 * j + 1}));
  }
  for (int i = 0; i < dim; ++i) {
    f.A[i] += random_poly(rng, dim, 2, 0.25);
    f.A[i] += random_poly(rng, dim, 3, 0.15);
  }
  for (double& v : f.x0) v = uniform(rng, -0.3, 0.3);
  return f;
}

ChartField almost_kahler(int n, std::uint64_t seed) {
  Rng rng(seed);
  const int dim = 2 * n;
  const double two_pi = 2.0 * std::numbers::pi;
  // C symmetric, entries linear + quadratic in all coordinates
  std::vector<ScalarField> C(n * n, ScalarField(dim));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField c = random_poly(rng, dim, 1, 0.3) + random_poly(rng, dim, 2, 0.15);
      C[i * n + j] = c;
      C[j * n + i] = c;
    }
  // g = M^T M in block order: [[I + C^2, C], [C, I]]
  ChartField f = ChartField::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ScalarField xx = identity_entry(dim, i, j);
      for (int k = 0; k < n; ++k) xx += (C[i * n + k] * C[k * n + j]).simplified();
      f.g_entry(chart_index(n, i), chart_index(n, j)) = xx.simplified();
      f.g_entry(chart_index(n, i), chart_index(n, n + j)) = C[i * n + j];
      f.g_entry(chart_index(n, n + i), chart_index(n, j)) = C[j * n + i];
      f.g_entry(chart_index(n, n + i), chart_index(n, n + j)) = identity_entry(dim, i, j);
    }
  for (int j = 0; j < n; ++j) {
    f.A[2 * j + 1] += ScalarField::monomial(dim, 0.5 * two_pi, unit_powers(dim, {2 * j}));
    f.A[2 * j] += ScalarField::monomial(dim, -0.5 * two_pi, unit_powers(dim, {2 * j + 1}));
  }
  for (double& v : f.x0) v = uniform(rng, -0.3, 0.3);
  return f;
}

ChartField kahler_potential(int n, std::uint64_t seed) {
  Rng rng(seed);
  const int dim = 2 * n;
  // phi = sum b_j |z_j|^2 / 2 + cubic + quartic
  ScalarField phi(dim);
  for (int j = 0; j < n; ++j) {
    const double b = uniform(rng, 1.0, 3.0);
    phi += ScalarField::monomial(dim, 0.5 * b, unit_powers(dim, {2 * j, 2 * j}));
    phi += ScalarField::monomial(dim, 0.5 * b, unit_powers(dim, {2 * j + 1, 2 * j + 1}));
  }
  phi += random_poly(rng, dim, 3, 0.1);
  phi += random_poly(rng, dim, 4, 0.05);
  // A = -1/2 dphi o J_0: A_{x_j} = -1/2 d_{y_j} phi, A_{y_j} = 1/2 d_{x_j} phi
  ChartField f = ChartField::zero(n);
  for (int i = 0; i < dim; ++i) f.g_entry(i, i) = ScalarField::constant(dim, 1.0);
  for (const auto& t : phi.terms())
    for (int j = 0; j < n; ++j) {
      const int x = 2 * j, y = 2 * j + 1;
      if (t.powers[y] > 0) {
        auto p = t.powers;
        p[y] -= 1;
        f.A[x].add_term(Term{-0.5 * t.coeff * t.powers[y], p, {}, Trig::none});
      }
      if (t.powers[x] > 0) {
        auto p = t.powers;
        p[x] -= 1;
        f.A[y].add_term(Term{0.5 * t.coeff * t.powers[x], p, {}, Trig::none});
      }
    }
  for (double& v : f.x0) v = uniform(rng, -0.2, 0.2);
  // metric perturbation vanishing to second order at x0: nabla J(x0) = 0, nabla nabla J != 0
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = k; l < dim; ++l) {
          const double c = uniform(rng, -0.05, 0.05);
          const double xk = f.x0[k], xl = f.x0[l];
          ScalarField t = ScalarField::monomial(dim, c, unit_powers(dim, {k, l}));
          t += ScalarField::monomial(dim, -c * xl, unit_powers(dim, {k}));
          t += ScalarField::monomial(dim, -c * xk, unit_powers(dim, {l}));
          t += ScalarField::constant(dim, c * xk * xl);
          f.g_entry(i, j) += t;
          if (i != j) f.g_entry(j, i) += t;
        }
  for (auto& e : f.g) e = e.simplified();
  return f;
}

ChartField degenerate(int n, std::uint64_t seed) {
  Rng rng(seed);
  const int dim = 2 * n;
  ChartField f = ChartField::zero(n);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      set_sym(f, i, j,
              identity_entry(dim, i, j) + random_poly(rng, dim, 1, 0.05) + random_poly(rng, dim, 2, 0.05));
  const double b = uniform(rng, 1.0, 3.0);
  for (int j = 0; j < n; ++j) {
    f.A[2 * j + 1] += ScalarField::monomial(dim, 0.5 * b, unit_powers(dim, {2 * j}));
    f.A[2 * j] += ScalarField::monomial(dim, -0.5 * b, unit_powers(dim, {2 * j + 1}));
  }
  for (int i = 0; i < dim; ++i) {
    f.A[i] += random_poly(rng, dim, 2, 0.2);
    f.A[i] += random_poly(rng, dim, 3, 0.2);
  }
  return f;
}

ChartField constant_2d(double b) {
  ChartField f = ChartField::zero(1);
  f.g_entry(0, 0) = ScalarField::constant(2, 1.0);
  f.g_entry(1, 1) = ScalarField::constant(2, 1.0);
  f.A[1] = ScalarField::monomial(2, b, {1, 0});
  return f;
}

ChartField cosine_2d(double b0, double eps, std::vector<double> x0) {
  ChartField f = constant_2d(b0);
  f.A[1] += ScalarField::trig(2, eps, {1.0, 0.0}, Trig::sin);
  f.x0 = std::move(x0);
  return f;
}

}  // namespace sdlab::fields
