#include "sdlab/frame_spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "sdlab/errors.hpp"

namespace sdlab {

namespace {

constexpr double kDegenerateRel = 1e-9;

// Makes the largest-magnitude entry real positive. The first entry within a relative
// 1e-9 of the maximum wins, so near-ties resolve identically across platforms.
void fix_phase(Eigen::Ref<CVec> v) {
  const double mx = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= mx * (1.0 - 1e-9)) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

// Gram-Schmidt of the given candidates into an orthonormal set of `want` vectors.
CMat orthonormalize(const std::vector<CVec>& candidates, int want) {
  const int dim = candidates.empty() ? 0 : static_cast<int>(candidates.front().size());
  CMat out(dim, want);
  int have = 0;
  for (const auto& c : candidates) {
    if (have == want) break;
    CVec v = c;
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < have; ++k) v -= out.col(k) * out.col(k).dot(v);
    const double nrm = v.norm();
    if (nrm < 1e-6) continue;
    out.col(have++) = v / nrm;
  }
  if (have != want)
    throw Error(ErrorKind::numerical, "frame_spectral", "could not span the eigenspace");
  return out;
}

}  // namespace

CMat DiagonalFrame::complex_vectors() const {
  const int dim = 2 * n;
  CMat T(dim, dim);
  const double s = 1.0 / std::sqrt(2.0);
  T.leftCols(n) = s * w;
  T.rightCols(n) = s * w.conjugate();
  return T;
}

DiagonalFrame DiagonalFrame::regauged(const CMat& U) const {
  DiagonalFrame f = *this;
  f.w = w * U;
  const double r2 = std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    f.e.col(2 * j) = r2 * f.w.col(j).real();
    f.e.col(2 * j + 1) = -r2 * f.w.col(j).imag();
  }
  return f;
}

DiagonalFrame build_frame(const PointEndos& endos) {
  const int dim = static_cast<int>(endos.g.rows());
  const int n = dim / 2;
  Eigen::LLT<Mat> llt(endos.g);
  const Mat Lt = Mat(llt.matrixL()).transpose();
  const Mat LtInv = Lt.inverse();

  // orthonormal gauge y = L^T x
  const Mat Jt = Lt * endos.J * LtInv;
  Mat absT = Lt * endos.absJ * LtInv;
  absT = 0.5 * (absT + absT.transpose());

  // projector onto the +i eigenspace of J
  const CMat P = 0.5 * (CMat::Identity(dim, dim) - cplx(0, 1) * Jt.cast<cplx>());
  std::vector<CVec> axes;
  for (int k = 0; k < dim; ++k) axes.push_back(P.col(k));
  const CMat Y = orthonormalize(axes, n);

  CMat H = Y.adjoint() * absT.cast<cplx>() * Y;
  H = 0.5 * (H + H.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const Vec a = es.eigenvalues();
  if (a.minCoeff() <= 0.0)
    throw Error(ErrorKind::numerical, "frame_spectral", "cal J is not positive on T^(1,0)");
  CMat W = Y * es.eigenvectors();

  // canonical basis inside each degenerate eigenspace
  const double scale = a.maxCoeff();
  for (int start = 0; start < n;) {
    int stop = start + 1;
    while (stop < n && a(stop) - a(start) <= kDegenerateRel * scale) ++stop;
    const int m = stop - start;
    if (m > 1) {
      const CMat block = W.middleCols(start, m);
      std::vector<CVec> cand;
      for (int k = 0; k < dim; ++k) cand.push_back(block * block.adjoint().col(k));
      W.middleCols(start, m) = orthonormalize(cand, m);
    }
    start = stop;
  }
  for (int j = 0; j < n; ++j) fix_phase(W.col(j));

  DiagonalFrame f;
  f.n = n;
  f.a.assign(a.data(), a.data() + n);
  f.x0 = endos.x;
  f.w = LtInv.cast<cplx>() * W;
  f.e.resize(dim, dim);
  const double r2 = std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    f.e.col(2 * j) = r2 * f.w.col(j).real();
    f.e.col(2 * j + 1) = -r2 * f.w.col(j).imag();
  }
  return f;
}

GeometryJet GeometryJet::flat(const std::vector<double>& a) {
  GeometryJet jet;
  jet.n = static_cast<int>(a.size());
  jet.a = a;
  const int dim = 2 * jet.n;
  const CMat z = CMat::Zero(dim, dim);
  jet.dJc.assign(dim, z);
  jet.dJ.assign(dim, z);
  jet.dAbsJ.assign(dim, z);
  jet.ddJc.assign(dim * dim, z);
  jet.ddAbsJ.assign(dim * dim, z);
  jet.Rc.assign(dim * dim, z);
  for (double v : a) jet.tau0 += v;
  jet.frame.n = jet.n;
  jet.frame.a = a;
  jet.frame.e = Mat::Identity(dim, dim);
  jet.frame.w = CMat::Zero(dim, jet.n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < jet.n; ++j) {
    jet.frame.w(2 * j, j) = s;
    jet.frame.w(2 * j + 1, j) = cplx(0, -s);
  }
  jet.frame.x0.assign(dim, 0.0);
  return jet;
}

GeometryJet contract(const ChartJet& chart, const DiagonalFrame& frame) {
  const int dim = chart.dim;
  const int n = dim / 2;
  const CMat T = frame.complex_vectors();
  const CMat Tinv = T.inverse();
  const cplx minus_i(0, -1);

  auto to_frame = [&](const Mat& m) -> CMat { return Tinv * m.cast<cplx>() * T; };
  auto first = [&](const std::vector<Mat>& cov, cplx factor) {
    std::vector<CMat> out(dim);
    for (int u = 0; u < dim; ++u) {
      CMat acc = CMat::Zero(dim, dim);
      for (int c = 0; c < dim; ++c) acc += T(c, u) * cov[c].cast<cplx>();
      out[u] = factor * (Tinv * acc * T);
    }
    return out;
  };
  auto second = [&](const std::vector<Mat>& cov, cplx factor) {
    // transform endomorphism part once per chart pair, then contract directions
    std::vector<CMat> framed(dim * dim);
    for (int k = 0; k < dim * dim; ++k) framed[k] = to_frame(cov[k]);
    std::vector<CMat> out(dim * dim, CMat::Zero(dim, dim));
    for (int u = 0; u < dim; ++u)
      for (int v = 0; v < dim; ++v) {
        CMat acc = CMat::Zero(dim, dim);
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d) acc += T(c, u) * T(d, v) * framed[c * dim + d];
        out[u * dim + v] = factor * acc;
      }
    return out;
  };

  GeometryJet jet;
  jet.n = n;
  jet.a = frame.a;
  jet.frame = frame;
  jet.dJc = first(chart.B.cov1, minus_i);
  jet.ddJc = second(chart.B.cov2, minus_i);
  jet.dJ = first(chart.J.cov1, 1.0);
  jet.dAbsJ = first(chart.absB.cov1, 1.0);
  jet.ddAbsJ = second(chart.absB.cov2, 1.0);
  jet.Rc = second(chart.curvature.op, 1.0);
  for (double v : frame.a) jet.tau0 += v;
  jet.conditioning = chart.conditioning;
  return jet;
}

GeometryJet covariant_jet(const ChartField& field, const DiagonalFrame& frame) {
  return contract(chart_jet(field, frame.x0), frame);
}

double JetResiduals::max() const {
  return std::max({skew, closedness, commutator, abs_selfadjoint, riemann});
}

JetResiduals jet_residuals(const GeometryJet& jet) {
  const int n = jet.n;
  const int dim = jet.dim();
  JetResiduals r;
  auto upd = [](double& slot, cplx v) { slot = std::max(slot, std::abs(v)); };

  CMat calJ = CMat::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    calJ(j, j) = jet.a[j];
    calJ(j + n, j + n) = -jet.a[j];
  }
  for (int u = 0; u < dim; ++u)
    for (int v = 0; v < dim; ++v)
      for (int w = 0; w < dim; ++w) {
        upd(r.skew, jet.pair(jet.dJc[u], v, w) + jet.pair(jet.dJc[u], w, v));
        upd(r.closedness,
            jet.pair(jet.dJc[u], v, w) + jet.pair(jet.dJc[v], w, u) + jet.pair(jet.dJc[w], u, v));
        upd(r.abs_selfadjoint, jet.pair(jet.dAbsJ[u], v, w) - jet.pair(jet.dAbsJ[u], w, v));
      }
  for (int u = 0; u < dim; ++u)
    for (int v = 0; v < dim; ++v) {
      const CMat& R = jet.R_at(u, v);
      const CMat lhs = jet.ddJ_at(u, v) - jet.ddJ_at(v, u);
      r.commutator = std::max(r.commutator, (lhs - (R * calJ - calJ * R)).cwiseAbs().maxCoeff());
      r.riemann = std::max(r.riemann, (R + jet.R_at(v, u)).cwiseAbs().maxCoeff());
      for (int x = 0; x < dim; ++x)
        for (int y = 0; y < dim; ++y) {
          // <R(E_u,E_v)E_y, E_x>
          const cplx rxyuv = jet.pair(R, y, x);
          upd(r.riemann, rxyuv + jet.pair(R, x, y));
          upd(r.riemann, rxyuv - jet.pair(jet.R_at(x, y), v, u));
        }
      for (int y = 0; y < dim; ++y) {
        const CVec bianchi = R.col(y) + jet.R_at(v, y).col(u) + jet.R_at(y, u).col(v);
        r.riemann = std::max(r.riemann, bianchi.cwiseAbs().maxCoeff());
      }
    }
  return r;
}

QCoeffs q_coefficients(const GeometryJet& jet) {
  const int n = jet.n;
  QCoeffs q;
  q.n = n;
  q.hol.assign(n * n * n, 0.0);
  q.mix.assign(n * n * n, 0.0);
  q.anti.assign(n * n * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const int idx = (j * n + k) * n + l;
        const int zbar_j = j + n;
        q.hol[idx] = jet.pair(jet.dJc[k], l, zbar_j);
        q.mix[idx] = jet.pair(jet.dJc[k], l + n, zbar_j) + jet.pair(jet.dJc[l + n], k, zbar_j);
        q.anti[idx] = jet.pair(jet.dJc[k + n], l + n, zbar_j);
      }
  return q;
}

double QResiduals::max() const { return std::max({antisym, diagonal, cyclic, quad_cross, quad_sum}); }

QResiduals q_residuals(const QCoeffs& q) {
  const int n = q.n;
  QResiduals r;
  auto upd = [](double& slot, cplx v) { slot = std::max(slot, std::abs(v)); };
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      upd(r.diagonal, q.q_anti(j, k, j));
      for (int l = 0; l < n; ++l) {
        const cplx qjkl = q.q_anti(j, k, l);
        const cplx qjlk = q.q_anti(j, l, k);
        const cplx qkjl = q.q_anti(k, j, l);
        upd(r.antisym, q.q_anti(l, k, j) + qjkl);
        upd(r.cyclic, qjkl + q.q_anti(l, j, k) + q.q_anti(k, l, j));
        const double cross = 2.0 * (std::conj(qjkl) * qjlk).real();
        upd(r.quad_cross, cross - (std::norm(qjkl) + std::norm(qjlk) - std::norm(qkjl)));
        upd(r.quad_sum, std::norm(qjkl + qjlk) -
                            (2.0 * std::norm(qjkl) + 2.0 * std::norm(qjlk) - std::norm(qkjl)));
      }
    }
  return r;
}

}  // namespace sdlab
