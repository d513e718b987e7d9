#include "sdlab/model_oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sdlab/errors.hpp"

namespace sdlab {

namespace {

Monomial shifted(Monomial m, int j, int dz, int dzb) {
  m.z[j] = static_cast<std::uint8_t>(m.z[j] + dz);
  m.zb[j] = static_cast<std::uint8_t>(m.zb[j] + dzb);
  return m;
}

void check_degree(const ModelContext& ctx, const PolyGauss& f, const char* op) {
  if (f.degree() > ctx.degree()) {
    std::ostringstream os;
    os << op << ": degree " << f.degree() << " exceeds truncation degree " << ctx.degree();
    throw Error(ErrorKind::numerical, "model_oracle", os.str());
  }
}

void check_context(const ModelContext& ctx, const PolyGauss& f) {
  if (f.n() != ctx.n()) throw Error(ErrorKind::config, "model_oracle", "mismatched model context");
}

double factorial(int m) {
  double f = 1.0;
  for (int k = 2; k <= m; ++k) f *= k;
  return f;
}

}  // namespace

int Monomial::degree() const {
  int d = 0;
  for (int j = 0; j < kMaxHalfDim; ++j) d += z[j] + zb[j];
  return d;
}

// ---------------------------------------------------------------------------------------------

ModelContext::ModelContext(std::vector<double> a, int degree) : a_(std::move(a)), degree_(degree) {
  if (a_.empty() || static_cast<int>(a_.size()) > kMaxHalfDim)
    throw Error(ErrorKind::config, "model_oracle", "half-dimension out of supported range");
  if (degree_ < 6) throw Error(ErrorKind::config, "model_oracle", "truncation degree must be >= 6");
  for (double v : a_)
    if (!(v > 0.0)) throw Error(ErrorKind::config, "model_oracle", "a_j must be positive");
  // a monomial of degree D pairs with one of degree D: exponents up to D per coordinate
  moments_.resize(a_.size());
  for (std::size_t j = 0; j < a_.size(); ++j) {
    const double aj = a_[j];
    moments_[j].resize(degree_ + 1);
    for (int m = 0; m <= degree_; ++m)
      moments_[j][m] = factorial(m) * std::pow(2.0 / aj, m) * (2.0 * std::numbers::pi / aj);
  }
}

double ModelContext::bergman_origin() const {
  double p = 1.0;
  for (double v : a_) p *= v / (2.0 * std::numbers::pi);
  return p;
}

ModelContext ModelContext::with_perturbed_moment(int j, int m, double factor) const {
  ModelContext c = *this;
  c.moments_.at(j).at(m) *= factor;
  return c;
}

double ModelContext::moment_quadrature_deviation() const {
  boost::math::quadrature::exp_sinh<double> integrator;
  double worst = 0.0;
  for (int j = 0; j < n(); ++j) {
    const double aj = a_[j];
    for (int m = 0; m <= degree_; ++m) {
      auto f = [aj, m](double r) {
        if (r <= 0.0) return 0.0;
        return std::exp((2 * m + 1) * std::log(r) - 0.5 * aj * r * r);
      };
      const double q = 2.0 * std::numbers::pi * integrator.integrate(f, 1e-15);
      worst = std::max(worst, std::abs(q - moments_[j][m]) / std::abs(q));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------------------------

PolyGauss PolyGauss::constant(int n, cplx c) {
  PolyGauss p(n);
  p.add(Monomial{}, c);
  return p;
}

PolyGauss PolyGauss::monomial(int n, const std::vector<int>& z_pow, const std::vector<int>& zb_pow,
                              cplx c) {
  Monomial m;
  for (int j = 0; j < n; ++j) {
    m.z[j] = static_cast<std::uint8_t>(z_pow.at(j));
    m.zb[j] = static_cast<std::uint8_t>(zb_pow.at(j));
  }
  PolyGauss p(n);
  p.add(m, c);
  return p;
}

int PolyGauss::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

cplx PolyGauss::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

void PolyGauss::add(const Monomial& m, cplx c) {
  if (c == cplx(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

PolyGauss& PolyGauss::operator+=(const PolyGauss& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

PolyGauss& PolyGauss::operator-=(const PolyGauss& o) {
  if (n_ == 0) n_ = o.n_;
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

PolyGauss& PolyGauss::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

PolyGauss PolyGauss::times_polynomial(const PolyGauss& poly) const {
  PolyGauss out(n_);
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : poly.terms_) {
      Monomial m;
      for (int j = 0; j < kMaxHalfDim; ++j) {
        m.z[j] = static_cast<std::uint8_t>(m1.z[j] + m2.z[j]);
        m.zb[j] = static_cast<std::uint8_t>(m1.zb[j] + m2.zb[j]);
      }
      out.add(m, c1 * c2);
    }
  return out;
}

void PolyGauss::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

// ---------------------------------------------------------------------------------------------

PolyGauss apply_b(const ModelContext& ctx, int j, const PolyGauss& f) {
  check_context(ctx, f);
  PolyGauss out(f.n());
  const double aj = ctx.a()[j];
  for (const auto& [m, c] : f.terms()) {
    if (m.z[j] > 0) out.add(shifted(m, j, -1, 0), -2.0 * static_cast<double>(m.z[j]) * c);
    out.add(shifted(m, j, 0, 1), aj * c);
  }
  check_degree(ctx, out, "apply_b");
  return out;
}

PolyGauss apply_b_plus(const ModelContext& ctx, int j, const PolyGauss& f) {
  check_context(ctx, f);
  PolyGauss out(f.n());
  for (const auto& [m, c] : f.terms())
    if (m.zb[j] > 0) out.add(shifted(m, j, 0, -1), 2.0 * static_cast<double>(m.zb[j]) * c);
  return out;
}

PolyGauss apply_L(const ModelContext& ctx, const PolyGauss& f) {
  PolyGauss out(f.n());
  for (int j = 0; j < ctx.n(); ++j) out += apply_b(ctx, j, apply_b_plus(ctx, j, f));
  return out;
}

cplx inner(const ModelContext& ctx, const PolyGauss& f, const PolyGauss& h) {
  check_context(ctx, f);
  check_context(ctx, h);
  const int n = ctx.n();
  cplx s = 0.0;
  for (const auto& [mf, cf] : f.terms())
    for (const auto& [mh, ch] : h.terms()) {
      // z^{beta+gamma'} zbar^{gamma+beta'} per coordinate
      double w = 1.0;
      for (int j = 0; j < n && w != 0.0; ++j) {
        const int zp = mf.z[j] + mh.zb[j];
        const int zbp = mf.zb[j] + mh.z[j];
        if (zp != zbp) {
          w = 0.0;
          break;
        }
        if (zp > ctx.degree())
          throw Error(ErrorKind::numerical, "model_oracle", "inner product exceeds moment table");
        w *= ctx.moment(j, zp);
      }
      if (w != 0.0) s += cf * std::conj(ch) * w;
    }
  return s;
}

double norm_sq(const ModelContext& ctx, const PolyGauss& f) { return inner(ctx, f, f).real(); }

PolyGauss project_P(const ModelContext& ctx, const PolyGauss& f) {
  check_context(ctx, f);
  const int n = ctx.n();
  // <z^b zbar^g G, z^beta G> is nonzero only for beta = b - g (componentwise, >= 0)
  std::map<Monomial, bool> targets;
  for (const auto& [m, c] : f.terms()) {
    Monomial beta;
    bool ok = true;
    for (int j = 0; j < n; ++j) {
      if (m.z[j] < m.zb[j]) {
        ok = false;
        break;
      }
      beta.z[j] = static_cast<std::uint8_t>(m.z[j] - m.zb[j]);
    }
    if (ok) targets[beta] = true;
  }
  PolyGauss out(n);
  for (const auto& [beta, unused] : targets) {
    PolyGauss phi(n);
    phi.add(beta, 1.0);
    const cplx overlap = inner(ctx, f, phi);
    const double nrm = norm_sq(ctx, phi);
    out.add(beta, overlap / nrm);
  }
  return out;
}

PolyGauss inverse_L(const ModelContext& ctx, const PolyGauss& f) {
  check_context(ctx, f);
  const int n = ctx.n();
  const double fn = std::sqrt(std::max(norm_sq(ctx, f), 0.0));
  if (fn == 0.0) return PolyGauss(n);
  const double kernel_part = std::sqrt(std::max(norm_sq(ctx, project_P(ctx, f)), 0.0));
  if (kernel_part > 1e-10 * fn) {
    std::ostringstream os;
    os << "inverse_L: right-hand side has a kernel component " << kernel_part / fn
       << " (relative)";
    throw Error(ErrorKind::numerical, "model_oracle", os.str());
  }
  // L(z^b zbar^g G) = 2(a.g) z^b zbar^g G - 4 sum_j b_j g_j z^{b-e_j} zbar^{g-e_j} G.
  // Back-substitute from the top degree down along diagonals (b,g) -> (b-e_j, g-e_j).
  std::map<Monomial, bool> support;
  std::vector<Monomial> frontier;
  for (const auto& [m, c] : f.terms()) {
    support[m] = true;
    frontier.push_back(m);
  }
  while (!frontier.empty()) {
    const Monomial m = frontier.back();
    frontier.pop_back();
    for (int j = 0; j < n; ++j)
      if (m.z[j] > 0 && m.zb[j] > 0) {
        const Monomial lower = shifted(m, j, -1, -1);
        if (!support.count(lower)) {
          support[lower] = true;
          frontier.push_back(lower);
        }
      }
  }
  std::vector<Monomial> order;
  for (const auto& [m, unused] : support) order.push_back(m);
  std::stable_sort(order.begin(), order.end(),
                   [](const Monomial& x, const Monomial& y) { return x.degree() > y.degree(); });
  PolyGauss u(n);
  for (const Monomial& m : order) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) diag += 2.0 * ctx.a()[j] * m.zb[j];
    if (diag == 0.0) continue;  // kernel direction, fixed below by projection
    cplx rhs = f.coeff(m);
    for (int j = 0; j < n; ++j) {
      const Monomial upper = shifted(m, j, 1, 1);
      rhs += 4.0 * static_cast<double>((m.z[j] + 1) * (m.zb[j] + 1)) * u.coeff(upper);
    }
    u.add(m, rhs / diag);
  }
  u -= project_P(ctx, u);
  u.prune(0.0);
  const PolyGauss residual = apply_L(ctx, u) - f;
  const double rn = std::sqrt(std::max(norm_sq(ctx, residual), 0.0));
  if (rn > 1e-10 * fn) {
    std::ostringstream os;
    os << "inverse_L: residual " << rn / fn << " exceeds tolerance";
    throw Error(ErrorKind::numerical, "model_oracle", os.str());
  }
  return u;
}

cplx value_at_origin(const PolyGauss& f) { return f.coeff(Monomial{}); }

// ---------------------------------------------------------------------------------------------

PolyGauss q_polynomial(const QCoeffs& q, int j) {
  const int n = q.n;
  PolyGauss p(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      Monomial hol, mix, anti;
      hol.z[k] += 1;
      hol.z[l] += 1;
      mix.z[k] += 1;
      mix.zb[l] += 1;
      anti.zb[k] += 1;
      anti.zb[l] += 1;
      p.add(hol, q.q_hol(j, k, l));
      p.add(mix, q.q_mix(j, k, l));
      p.add(anti, q.q_anti(j, k, l));
    }
  return p;
}

OracleBreakdown rho_oracle(const GeometryJet& jet, const QCoeffs& q, int degree) {
  const int n = jet.n;
  const int dim = jet.dim();
  const ModelContext ctx(jet.a, degree);
  const double p00 = ctx.bergman_origin();
  const PolyGauss G = PolyGauss::constant(n);

  // A0 straight from the curvature tensor
  cplx a0 = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) a0 += 4.0 * jet.pair(jet.R_at(j, k), j + n, k + n);

  // Q2(Z, Z) = sum_{u,v} zeta_u zeta_v Q2(E_u, E_v), zeta = (z, zbar)
  PolyGauss q2(n);
  for (int u = 0; u < dim; ++u)
    for (int v = 0; v < dim; ++v) {
      cplx coef = -0.25 * jet.ddAbs_at(u, v).trace();
      for (int j = 0; j < n; ++j) coef += jet.pair(jet.ddJ_at(u, v), j, j + n);
      Monomial m;
      (u < n ? m.z[u] : m.zb[u - n]) += 1;
      (v < n ? m.z[v] : m.zb[v - n]) += 1;
      q2.add(m, coef);
    }
  // [P f P](0,0) = <f P(.,0), P(.,0)> = P00^2 <f G, G>
  const cplx a1 = p00 * inner(ctx, q2, G);

  cplx a2 = 0.0;
  PolyGauss f_sum(n), u_sum(n);
  for (int j = 0; j < n; ++j) {
    const PolyGauss qj = q_polynomial(q, j);
    a2 += norm_sq(ctx, qj);
    const PolyGauss fj = apply_b(ctx, j, qj);
    f_sum += fj;
    u_sum += inverse_L(ctx, fj);
  }
  a2 *= 4.0 / 9.0 * p00;
  const cplx a3 = 4.0 / 9.0 * p00 * inner(ctx, u_sum, f_sum);

  OracleBreakdown b;
  b.degree = degree;
  b.A0 = a0.real();
  b.A1 = a1.real();
  b.A2 = a2.real();
  b.A3 = a3.real();
  b.rho = b.A0 + b.A1 + b.A2 - b.A3;
  b.im_residue = std::abs((a0 + a1 + a2 - a3).imag());
  return b;
}

A3Pieces a3_pieces(const ModelContext& ctx, const QCoeffs& q) {
  const int n = q.n;
  const auto& a = ctx.a();
  const PolyGauss G = PolyGauss::constant(n);
  A3Pieces out;
  out.u.resize(n);
  for (int j = 0; j < n; ++j) {
    auto& u = out.u[j];
    for (auto& p : u) p = PolyGauss(n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const PolyGauss zz = PolyGauss::monomial(n, [&] {
          std::vector<int> z(n, 0);
          z[k] += 1;
          z[l] += 1;
          return z;
        }(), std::vector<int>(n, 0));
        u[0] += q.q_hol(j, k, l) * apply_b(ctx, j, zz);
        std::vector<int> zk(n, 0);
        zk[k] = 1;
        const PolyGauss zkG = PolyGauss::monomial(n, zk, std::vector<int>(n, 0));
        u[1] += (q.q_mix(j, k, l) / a[l]) * apply_b(ctx, j, apply_b(ctx, l, zkG));
        u[3] += (q.q_anti(j, k, l) / (a[k] * a[l])) *
                apply_b(ctx, j, apply_b(ctx, k, apply_b(ctx, l, G)));
      }
    for (int k = 0; k < n; ++k) u[2] += (q.q_mix(j, k, k) * 2.0 / a[k]) * apply_b(ctx, j, G);
  }

  const double p00 = ctx.bergman_origin();
  std::array<PolyGauss, 4> usum, vsum;
  for (int i = 0; i < 4; ++i) {
    usum[i] = PolyGauss(n);
    vsum[i] = PolyGauss(n);
    for (int j = 0; j < n; ++j) {
      usum[i] += out.u[j][i];
      vsum[i] += inverse_L(ctx, out.u[j][i]);
    }
    out.I[i] = p00 * inner(ctx, vsum[i], usum[i]).real();
  }

  // Gram matrices over all (piece, j) pairs with distinct pieces
  double scale_u = 0.0, scale_v = 0.0;
  std::vector<std::pair<int, PolyGauss>> us, vs;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 4; ++i) {
      us.emplace_back(i, out.u[j][i]);
      vs.emplace_back(i, inverse_L(ctx, out.u[j][i]));
      scale_u = std::max(scale_u, norm_sq(ctx, out.u[j][i]));
      scale_v = std::max(scale_v, norm_sq(ctx, vs.back().second));
    }
  for (std::size_t x = 0; x < us.size(); ++x)
    for (std::size_t y = 0; y < us.size(); ++y) {
      if (us[x].first == us[y].first) continue;
      out.max_offdiag_gram =
          std::max(out.max_offdiag_gram, std::abs(inner(ctx, us[x].second, us[y].second)));
      out.max_offdiag_gram_v =
          std::max(out.max_offdiag_gram_v, std::abs(inner(ctx, vs[x].second, vs[y].second)));
    }
  if (scale_u > 0.0) out.max_offdiag_gram /= scale_u;
  if (scale_v > 0.0) out.max_offdiag_gram_v /= scale_v;
  return out;
}

}  // namespace sdlab
