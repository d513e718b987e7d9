#include "sdlab/tensor_geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdlab/errors.hpp"

namespace sdlab {

namespace {

// Metric and its chart derivatives up to order 2 at a point.
struct MetricData {
  Mat g, ginv;
  std::vector<Mat> dg, ddg;        // dg[c], ddg[c*dim+d]
  std::vector<Mat> dginv, ddginv;  // same layout
};

MetricData metric_data(const ChartField& f, std::span<const double> x) {
  const int dim = f.dim();
  MetricData m;
  m.g = Mat::Zero(dim, dim);
  m.dg.assign(dim, Mat::Zero(dim, dim));
  m.ddg.assign(dim * dim, Mat::Zero(dim, dim));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const ScalarJet s = f.g_entry(i, j).jet(x, 2);
      m.g(i, j) = s.value;
      for (int c = 0; c < dim; ++c) {
        m.dg[c](i, j) = s.dx(c);
        for (int d = 0; d < dim; ++d) m.ddg[c * dim + d](i, j) = s.dxx(c, d);
      }
    }
  }
  Eigen::LLT<Mat> llt(m.g);
  if (llt.info() != Eigen::Success || m.g.determinant() <= 0.0)
    throw Error(ErrorKind::numerical, "tensor_geometry", "degenerate metric (not positive definite)");
  m.ginv = llt.solve(Mat::Identity(dim, dim));
  m.dginv.resize(dim);
  m.ddginv.resize(dim * dim);
  for (int c = 0; c < dim; ++c) m.dginv[c] = -m.ginv * m.dg[c] * m.ginv;
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d)
      m.ddginv[c * dim + d] =
          m.ginv * (m.dg[c] * m.ginv * m.dg[d] + m.dg[d] * m.ginv * m.dg[c] - m.ddg[c * dim + d]) *
          m.ginv;
  return m;
}

// Gamma matrices and their first derivatives; dconn[c*dim+d] = d_c conn[d].
struct ConnectionData {
  Christoffel gamma;
  std::vector<Mat> dconn;
};

ConnectionData connection_data(const MetricData& m) {
  const int dim = static_cast<int>(m.g.rows());
  // lowered symbols Gamma_{l,ij} and their derivatives
  auto lowered = [&](int l, int i, int j) {
    return 0.5 * (m.dg[i](j, l) + m.dg[j](i, l) - m.dg[l](i, j));
  };
  auto dlowered = [&](int c, int l, int i, int j) {
    return 0.5 * (m.ddg[c * dim + i](j, l) + m.ddg[c * dim + j](i, l) - m.ddg[c * dim + l](i, j));
  };
  ConnectionData out;
  out.gamma.dim = dim;
  out.gamma.conn.assign(dim, Mat::Zero(dim, dim));
  out.dconn.assign(dim * dim, Mat::Zero(dim, dim));
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) {
        double s = 0.0;
        for (int l = 0; l < dim; ++l) s += m.ginv(k, l) * lowered(l, i, j);
        out.gamma.conn[i](k, j) = s;
      }
  for (int c = 0; c < dim; ++c)
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k)
        for (int j = 0; j < dim; ++j) {
          double s = 0.0;
          for (int l = 0; l < dim; ++l)
            s += m.dginv[c](k, l) * lowered(l, i, j) + m.ginv(k, l) * dlowered(c, l, i, j);
          out.dconn[c * dim + i](k, j) = s;
        }
  return out;
}

Riemann curvature_from(const ConnectionData& cd) {
  const int dim = cd.gamma.dim;
  Riemann r;
  r.dim = dim;
  r.op.resize(dim * dim);
  const auto& G = cd.gamma.conn;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      r.op[i * dim + j] = cd.dconn[i * dim + j] - cd.dconn[j * dim + i] + G[i] * G[j] - G[j] * G[i];
  return r;
}

// Magnetic endomorphism B = g^{-1} F^T (F_{ab} = d_a A_b - d_b A_a) with chart derivatives.
struct RawEndo {
  Mat value;
  std::vector<Mat> d1, d2;  // d1[c], d2[c*dim+d]
};

RawEndo magnetic_endo(const ChartField& f, const MetricData& m, std::span<const double> x,
                      int order) {
  const int dim = f.dim();
  std::vector<ScalarJet> a;
  a.reserve(dim);
  for (int i = 0; i < dim; ++i) a.push_back(f.A[i].jet(x, order + 1));
  Mat F = Mat::Zero(dim, dim);
  std::vector<Mat> dF(dim, Mat::Zero(dim, dim)), ddF(dim * dim, Mat::Zero(dim, dim));
  for (int p = 0; p < dim; ++p)
    for (int q = 0; q < dim; ++q) {
      F(p, q) = a[q].dx(p) - a[p].dx(q);
      for (int c = 0; c < dim; ++c) {
        dF[c](p, q) = a[q].dxx(c, p) - a[p].dxx(c, q);
        for (int d = 0; d < dim; ++d) ddF[c * dim + d](p, q) = a[q].dxxx(c, d, p) - a[p].dxxx(c, d, q);
      }
    }
  RawEndo b;
  b.value = m.ginv * F.transpose();
  b.d1.resize(dim);
  b.d2.resize(dim * dim);
  for (int c = 0; c < dim; ++c)
    b.d1[c] = m.dginv[c] * F.transpose() + m.ginv * dF[c].transpose();
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d)
      b.d2[c * dim + d] = m.ddginv[c * dim + d] * F.transpose() +
                          m.dginv[c] * dF[d].transpose() + m.dginv[d] * dF[c].transpose() +
                          m.ginv * ddF[c * dim + d].transpose();
  return b;
}

// Spectral data of a g-self-adjoint positive operator: S = V diag(d) V^{-1}.
struct SelfAdjointSpectrum {
  Mat V, Vinv;
  Vec d;
};

SelfAdjointSpectrum spectrum_in_orthonormal_gauge(const Mat& g, const Mat& op) {
  Eigen::LLT<Mat> llt(g);
  const Mat L = llt.matrixL();
  const Mat Lt = L.transpose();
  const Mat LtInv = Lt.inverse();
  Mat sym = Lt * op * LtInv;
  sym = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  SelfAdjointSpectrum s;
  s.V = LtInv * es.eigenvectors();
  s.Vinv = es.eigenvectors().transpose() * Lt;
  s.d = es.eigenvalues();
  return s;
}

// Solves S X + X S = R for S = V diag(d) V^{-1} with d > 0.
Mat solve_sylvester(const SelfAdjointSpectrum& s, const Mat& R) {
  Mat Rt = s.Vinv * R * s.V;
  const int n = static_cast<int>(s.d.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Rt(i, j) /= (s.d(i) + s.d(j));
  return s.V * Rt * s.Vinv;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

EndoJet covariantize(const RawEndo& raw, const ConnectionData& cd) {
  const int dim = cd.gamma.dim;
  const auto& G = cd.gamma.conn;
  EndoJet e;
  e.value = raw.value;
  e.cov1.resize(dim);
  for (int c = 0; c < dim; ++c) e.cov1[c] = raw.d1[c] + commutator(G[c], raw.value);
  e.cov2.resize(dim * dim);
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d) {
      // d_c (nabla_d Psi)
      Mat dcov = raw.d2[c * dim + d] + commutator(cd.dconn[c * dim + d], raw.value) +
                 commutator(G[d], raw.d1[c]);
      Mat v = dcov + commutator(G[c], e.cov1[d]);
      for (int k = 0; k < dim; ++k) v -= G[c](k, d) * e.cov1[k];
      e.cov2[c * dim + d] = v;
    }
  return e;
}

}  // namespace

double Riemann::lowered(const Mat& g, int a, int b, int c, int d) const {
  double s = 0.0;
  for (int l = 0; l < dim; ++l) s += g(a, l) * op[c * dim + d](l, b);
  return s;
}

ChartField ChartField::zero(int n) {
  ChartField f;
  f.n = n;
  const int dim = 2 * n;
  f.g.assign(dim * dim, ScalarField(dim));
  f.A.assign(dim, ScalarField(dim));
  f.x0.assign(dim, 0.0);
  return f;
}

void ChartField::validate(std::span<const std::vector<double>> samples) const {
  const int d = dim();
  if (n < 1) throw Error(ErrorKind::config, "tensor_geometry", "n must be >= 1");
  if (static_cast<int>(g.size()) != d * d || static_cast<int>(A.size()) != d ||
      static_cast<int>(x0.size()) != d)
    throw Error(ErrorKind::config, "tensor_geometry", "field component counts do not match 2n");
  for (const auto& s : g)
    if (s.dim() != d) throw Error(ErrorKind::config, "tensor_geometry", "metric entry has wrong arity");
  for (const auto& s : A)
    if (s.dim() != d) throw Error(ErrorKind::config, "tensor_geometry", "potential entry has wrong arity");
  auto check_metric = [&](std::span<const double> x) {
    Mat gm(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gm(i, j) = g_entry(i, j).value(x);
    const double asym = (gm - gm.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + gm.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::config, "tensor_geometry", "metric is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(gm);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error(ErrorKind::numerical, "tensor_geometry", "metric is not positive definite");
  };
  check_metric(x0);
  for (const auto& s : samples) check_metric(s);
  (void)endos_at(*this, x0);
}

Christoffel christoffel(const ChartField& field, std::span<const double> x) {
  return connection_data(metric_data(field, x)).gamma;
}

Riemann riemann(const ChartField& field, std::span<const double> x) {
  return curvature_from(connection_data(metric_data(field, x)));
}

PointEndos endos_at(const ChartField& field, std::span<const double> x) {
  const int dim = field.dim();
  const MetricData m = metric_data(field, x);
  const RawEndo b = magnetic_endo(field, m, x, 0);
  const double det = b.value.determinant();
  const double scale = std::pow(b.value.cwiseAbs().maxCoeff() + 1e-300, dim);
  if (!(std::abs(det) > 1e-12 * scale) || !std::isfinite(det)) {
    std::ostringstream os;
    os << "magnetic form is degenerate at the point (det B = " << det << ")";
    throw Error(ErrorKind::numerical, "tensor_geometry", os.str());
  }
  const Mat M = -b.value * b.value;
  const SelfAdjointSpectrum s = spectrum_in_orthonormal_gauge(m.g, M);
  if (s.d.minCoeff() <= 0.0)
    throw Error(ErrorKind::numerical, "tensor_geometry", "B^*B is not positive definite");
  const Vec root = s.d.cwiseSqrt();
  PointEndos e;
  e.x.assign(x.begin(), x.end());
  e.g = m.g;
  e.B = b.value;
  e.absJ = s.V * root.asDiagonal() * s.Vinv;
  e.J = b.value * (s.V * root.cwiseInverse().asDiagonal() * s.Vinv);
  e.tau = 0.5 * root.sum();
  return e;
}

double mu0_estimate(const ChartField& field, std::span<const std::vector<double>> grid) {
  if (grid.empty()) throw Error(ErrorKind::config, "tensor_geometry", "empty sample grid for mu0");
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& x : grid) {
    const PointEndos e = endos_at(field, x);
    const SelfAdjointSpectrum s = spectrum_in_orthonormal_gauge(e.g, e.absJ);
    mu = std::min(mu, s.d.minCoeff());
  }
  return mu;
}

ChartJet chart_jet(const ChartField& field, std::span<const double> x) {
  const int dim = field.dim();
  const MetricData m = metric_data(field, x);
  const ConnectionData cd = connection_data(m);
  const RawEndo b = magnetic_endo(field, m, x, 2);

  // M = -B^2 = B^*B and its derivatives
  RawEndo M;
  M.value = -b.value * b.value;
  M.d1.resize(dim);
  M.d2.resize(dim * dim);
  for (int c = 0; c < dim; ++c) M.d1[c] = -(b.d1[c] * b.value + b.value * b.d1[c]);
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d)
      M.d2[c * dim + d] = -(b.d2[c * dim + d] * b.value + b.d1[c] * b.d1[d] + b.d1[d] * b.d1[c] +
                            b.value * b.d2[c * dim + d]);

  SelfAdjointSpectrum s = spectrum_in_orthonormal_gauge(m.g, M.value);
  if (s.d.minCoeff() <= 0.0)
    throw Error(ErrorKind::numerical, "tensor_geometry", "magnetic form is degenerate at the point");
  s.d = s.d.cwiseSqrt();

  // |B| = sqrt(M): S dS + dS S = dM, and the second-order analogue
  RawEndo S;
  S.value = s.V * s.d.asDiagonal() * s.Vinv;
  S.d1.resize(dim);
  S.d2.resize(dim * dim);
  for (int c = 0; c < dim; ++c) S.d1[c] = solve_sylvester(s, M.d1[c]);
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d)
      S.d2[c * dim + d] =
          solve_sylvester(s, M.d2[c * dim + d] - S.d1[c] * S.d1[d] - S.d1[d] * S.d1[c]);

  // J = B |B|^{-1}
  const Mat Sinv = s.V * s.d.cwiseInverse().asDiagonal() * s.Vinv;
  std::vector<Mat> dSinv(dim), ddSinv(dim * dim);
  for (int c = 0; c < dim; ++c) dSinv[c] = -Sinv * S.d1[c] * Sinv;
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d)
      ddSinv[c * dim + d] =
          Sinv * (S.d1[c] * Sinv * S.d1[d] + S.d1[d] * Sinv * S.d1[c] - S.d2[c * dim + d]) * Sinv;
  RawEndo Jr;
  Jr.value = b.value * Sinv;
  Jr.d1.resize(dim);
  Jr.d2.resize(dim * dim);
  for (int c = 0; c < dim; ++c) Jr.d1[c] = b.d1[c] * Sinv + b.value * dSinv[c];
  for (int c = 0; c < dim; ++c)
    for (int d = 0; d < dim; ++d)
      Jr.d2[c * dim + d] = b.d2[c * dim + d] * Sinv + b.d1[c] * dSinv[d] + b.d1[d] * dSinv[c] +
                           b.value * ddSinv[c * dim + d];

  ChartJet out;
  out.dim = dim;
  out.x.assign(x.begin(), x.end());
  out.g = m.g;
  out.gamma = cd.gamma;
  out.curvature = curvature_from(cd);
  out.B = covariantize(b, cd);
  out.absB = covariantize(S, cd);
  out.J = covariantize(Jr, cd);
  out.conditioning = s.d.minCoeff() / s.d.maxCoeff();
  return out;
}

}  // namespace sdlab
