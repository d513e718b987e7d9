#include "sdlab/rho_formula.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sdlab/errors.hpp"

namespace sdlab {

namespace {

const cplx I(0.0, 1.0);

void check_imaginary(const RhoBreakdown& b, double magnitude, const char* what) {
  const double tol = 1e-8 * (1.0 + magnitude);
  if (b.im_residue > tol) {
    std::ostringstream os;
    os << what << ": imaginary residue " << b.im_residue << " exceeds " << tol
       << " (inconsistent jet)";
    throw Error(ErrorKind::numerical, "rho_formula", os.str());
  }
}

double max_abs(const std::vector<CMat>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

// tr A = 4 sum_k <A dz_k, dzbar_k>
cplx trace4(const GeometryJet& jet, const CMat& A) {
  cplx s = 0.0;
  for (int k = 0; k < jet.n; ++k) s += jet.pair(A, k, k + jet.n);
  return 4.0 * s;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::polar_form: return "polar_form";
    case Provenance::special_case: return "special_case";
  }
  return "unknown";
}

RhoBreakdown rho_closed(const GeometryJet& jet, ClosedVariant variant) {
  const int n = jet.n;
  const auto& a = jet.a;
  cplx line1 = 0.0, line2 = 0.0;
  double j1 = 0.0, j2 = 0.0;
  const double j1_weight = variant == ClosedVariant::amended_j1 ? 9.0 : 1.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      line1 -= 8.0 / (a[j] + a[k]) * jet.pair(jet.ddJ_at(j, k), j + n, k + n);
  for (int j = 0; j < n; ++j)
    line2 += (trace4(jet, jet.ddJ_at(j, j + n)) - trace4(jet, jet.ddAbs_at(j, j + n))) / a[j];
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        j1 += j1_weight * 8.0 / (9.0 * a[k] * (a[j] + a[l])) *
              std::norm(jet.pair(jet.dJc[k], j + n, l + n));
        j2 += 8.0 / (a[k] * (a[j] + a[k] + a[l])) *
              std::norm(jet.pair(jet.dJc[k + n], j + n, l + n));
      }
  RhoBreakdown b;
  b.provenance = Provenance::closed_form;
  b.A0 = line1.real();
  b.A1 = line2.real();
  b.J1 = j1;
  b.J2 = j2;
  b.rho = b.A0 + b.A1 + b.J1 + b.J2;
  b.im_residue = std::abs(line1.imag()) + std::abs(line2.imag());
  b.groups = {b.A0, b.A1, b.J1, b.J2};
  check_imaginary(b, std::abs(line1) + std::abs(line2) + j1 + j2, "closed form");
  return b;
}

RhoBreakdown rho_polar(const GeometryJet& jet) {
  const int n = jet.n;
  const auto& a = jet.a;
  const auto& DJ = jet.dJ;
  const auto& DA = jet.dAbsJ;
  auto z = [](int j) { return j; };
  auto zb = [n](int j) { return j + n; };

  cplx g1 = 0.0, g2 = 0.0, g3 = 0.0, g4 = 0.0, g5 = 0.0;
  double g6 = 0.0, g7 = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const CMat jj = DJ[zb(j)] * DJ[z(j)] + DJ[z(j)] * DJ[zb(j)];
      g1 += 2.0 * a[k] * (a[k] - a[j]) / (a[j] * (a[j] + a[k])) * jet.pair(jj, z(k), zb(k));

      const CMat jk = DJ[z(j)] * DJ[zb(k)] + DJ[zb(k)] * DJ[z(j)];
      g2 += 2.0 * jet.pair(jk, zb(j), z(k));

      const CMat mix_jj = DJ[z(j)] * DA[zb(j)] + DJ[zb(j)] * DA[z(j)] + DA[zb(j)] * DJ[z(j)] +
                          DA[z(j)] * DJ[zb(j)];
      g3 += 2.0 * (a[j] - a[k]) / (a[j] * (a[j] + a[k])) * I * jet.pair(mix_jj, z(k), zb(k));

      const CMat mix_jk = DJ[z(j)] * DA[zb(k)] + DJ[zb(k)] * DA[z(j)] + DA[zb(k)] * DJ[z(j)] +
                          DA[z(j)] * DJ[zb(k)];
      g4 -= 4.0 * I / (a[j] + a[k]) * jet.pair(mix_jk, z(k), zb(j));

      g5 += 8.0 / (a[j] + a[k]) *
            (jet.pair(jet.ddAbs_at(z(j), zb(k)), zb(j), z(k)) -
             jet.pair(jet.ddAbs_at(z(j), zb(j)), zb(k), z(k)));
    }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const cplx d = jet.pair(DA[zb(l)], zb(j), z(k)) - jet.pair(DA[zb(j)], zb(l), z(k));
        g6 += 8.0 / (9.0 * a[k] * (a[j] + a[l])) * std::norm(d);
        g7 += 2.0 * (a[l] + a[j]) * (a[l] + a[j]) / (a[k] * (a[j] + a[k] + a[l])) *
              std::norm(jet.pair(DJ[zb(k)], zb(l), zb(j)));
      }
  const cplx total = g1 + g2 + g3 + g4 + g5 + g6 + g7;
  RhoBreakdown b;
  b.provenance = Provenance::polar_form;
  b.groups = {g1.real(), g2.real(), g3.real(), g4.real(), g5.real(), g6, g7};
  b.rho = total.real();
  b.im_residue = std::abs(total.imag());
  check_imaginary(b,
                  std::abs(g1) + std::abs(g2) + std::abs(g3) + std::abs(g4) + std::abs(g5) + g6 + g7,
                  "polar form");
  return b;
}

double grad_J_norm_sq(const GeometryJet& jet) {
  const int n = jet.n;
  const int dim = jet.dim();
  // e_{2j-1} = dz_j + dzbar_j, e_{2j} = i (dz_j - dzbar_j)
  CMat C = CMat::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    C(j, 2 * j) = 1.0;
    C(j + n, 2 * j) = 1.0;
    C(j, 2 * j + 1) = I;
    C(j + n, 2 * j + 1) = -I;
  }
  const CMat Cinv = C.inverse();
  double s = 0.0;
  for (int u = 0; u < dim; ++u) {
    CMat D = CMat::Zero(dim, dim);
    for (int v = 0; v < dim; ++v) D += C(v, u) * jet.dJ[v];
    const CMat inE = Cinv * D * C;  // real matrix in the orthonormal frame
    s += inE.cwiseAbs2().sum();
  }
  return s;
}

double rho_almost_kahler(const GeometryJet& jet) {
  const double two_pi = 2.0 * std::numbers::pi;
  for (double v : jet.a)
    if (std::abs(v - two_pi) > 1e-8 * two_pi)
      throw Error(ErrorKind::numerical, "rho_formula", "not almost-Kahler: a_j != 2 pi");
  if (max_abs(jet.dAbsJ) > 1e-8 * two_pi || max_abs(jet.ddAbsJ) > 1e-8 * two_pi)
    throw Error(ErrorKind::numerical, "rho_formula", "not almost-Kahler: |cal J| is not constant");
  return grad_J_norm_sq(jet) / 24.0;
}

double rho_kahler_case(const GeometryJet& jet) {
  double scale = 1.0;
  for (double v : jet.a) scale = std::max(scale, v);
  if (max_abs(jet.dJ) > 1e-8 * scale)
    throw Error(ErrorKind::numerical, "rho_formula", "nabla J does not vanish at the point");
  const int n = jet.n;
  const auto& a = jet.a;
  const auto& DA = jet.dAbsJ;
  cplx first = 0.0;
  double second = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      first += 8.0 / (a[j] + a[k]) *
               (jet.pair(jet.ddAbs_at(j, j + n), k + n, k) - jet.pair(jet.ddAbs_at(j, k + n), j + n, k));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const cplx d = jet.pair(DA[l + n], j + n, k) - jet.pair(DA[j + n], l + n, k);
        second += 8.0 / (9.0 * a[k] * (a[j] + a[l])) * std::norm(d);
      }
  if (std::abs(first.imag()) > 1e-8 * (1.0 + std::abs(first)))
    throw Error(ErrorKind::numerical, "rho_formula", "Kahler-case formula has imaginary residue");
  return first.real() + second;
}

DisplayedPartials displayed_partials(const QCoeffs& q, const std::vector<double>& a) {
  const int n = q.n;
  DisplayedPartials p;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const double delta = k == l ? 1.0 : 0.0;
        const cplx hsym = q.q_hol(j, k, l) + q.q_hol(j, l, k);
        const cplx asym = q.q_anti(j, k, l) + q.q_anti(j, l, k);
        p.A2 += 8.0 / (9.0 * a[k] * a[l]) *
                (std::norm(hsym) + 2.0 * (1.0 + delta) * std::norm(q.q_mix(j, k, l)) + std::norm(asym));
        p.I1 += std::norm(hsym) * 2.0 / (a[k] * a[l]);
        p.I2 += std::norm(q.q_mix(j, k, l)) * 4.0 * a[j] / (a[k] * a[l] * (a[j] + a[l])) +
                2.0 * (std::conj(q.q_mix(j, k, l)) * q.q_mix(l, k, j)).real() * 2.0 /
                    (a[k] * (a[j] + a[l]));
        const double denom = a[j] * a[k] * a[l] * (a[j] + a[k] + a[l]);
        p.I4 += std::norm(q.q_anti(j, k, l)) * 2.0 * (a[j] - a[l]) * (a[j] - a[l]) / denom -
                2.0 * (std::conj(q.q_anti(j, k, l)) * q.q_anti(j, l, k)).real() * 2.0 *
                    (a[j] - a[l]) * (a[k] - a[j]) / denom;
      }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) p.I3 += std::norm(q.q_mix(j, k, k)) * 4.0 / (a[k] * a[k]);
  return p;
}

}  // namespace sdlab
