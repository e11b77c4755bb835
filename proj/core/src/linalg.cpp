#include "repstab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

namespace repstab {

bool all_finite(const ComplexMatrix& a) {
  return a.allFinite();
}

void require_square(const ComplexMatrix& a, const char* who, bool check_finite) {
  if (a.rows() != a.cols())
    fail(errc::dimension, std::string(who) + ": matrix must be square, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  if (check_finite && !all_finite(a))
    fail(errc::validation, std::string(who) + ": matrix has non-finite entries");
}

double hermitian_defect(const ComplexMatrix& a) { return operator_norm(a - a.adjoint()); }
double skew_hermitian_defect(const ComplexMatrix& a) { return operator_norm(a + a.adjoint()); }
double unitary_defect(const ComplexMatrix& a) {
  return operator_norm(a * a.adjoint() - ComplexMatrix::Identity(a.rows(), a.cols()));
}

double operator_norm(const ComplexMatrix& a) {
  require_square(a, "operator_norm");
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

SpectralDecomposition hermitian_eig(const ComplexMatrix& a, const LinalgOptions& opts) {
  require_square(a, "hermitian_eig");
  const double scale = std::max(1e-300, operator_norm(a));
  if (hermitian_defect(a) > opts.hermitian_tol * scale)
    fail(errc::contract, "hermitian_eig: input is not Hermitian to tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (a + a.adjoint()));
  if (es.info() != Eigen::Success)
    fail(errc::validation, "hermitian_eig: eigensolver failed");
  SpectralDecomposition dec;
  dec.eigenvalues = es.eigenvalues().cast<complexd>();
  dec.basis = es.eigenvectors();
  return dec;
}

namespace {

// Stable lexicographic order by (Re, Im).
std::vector<Eigen::Index> lex_order(const ComplexVector& vals) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(vals.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (vals[i].real() != vals[j].real()) return vals[i].real() < vals[j].real();
    return vals[i].imag() < vals[j].imag();
  });
  return idx;
}

} // namespace

SpectralDecomposition normal_eig(const ComplexMatrix& a, const LinalgOptions& opts) {
  require_square(a, "normal_eig");
  const Eigen::Index n = a.rows();
  const double scale = operator_norm(a);
  const double comm = operator_norm(a * a.adjoint() - a.adjoint() * a);
  if (comm > opts.normal_tol * std::max(1e-300, scale * scale))
    fail(errc::not_normal, "normal_eig: commutator defect " + std::to_string(comm) +
                               " above tolerance");

  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  const ComplexMatrix s = (a - a.adjoint()) / complexd(0.0, 2.0);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> esh(h);
  if (esh.info() != Eigen::Success) fail(errc::validation, "normal_eig: eigensolver failed");
  RealVector hvals = esh.eigenvalues();
  ComplexMatrix basis = esh.eigenvectors();

  ComplexVector vals(n);
  const double cluster = opts.cluster_tol * std::max(1e-300, scale);
  Eigen::Index lo = 0;
  while (lo < n) {
    Eigen::Index hi = lo + 1;
    while (hi < n && hvals[hi] - hvals[hi - 1] <= cluster) ++hi;
    const Eigen::Index m = hi - lo;
    if (m == 1) {
      vals[lo] = complexd(hvals[lo], (basis.col(lo).adjoint() * s * basis.col(lo))(0).real());
    } else {
      // Refine the skew part inside the cluster subspace.
      ComplexMatrix q = basis.middleCols(lo, m);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> ess(
          ComplexMatrix(q.adjoint() * s * q));
      if (ess.info() != Eigen::Success)
        fail(errc::validation, "normal_eig: cluster refinement failed");
      basis.middleCols(lo, m) = q * ess.eigenvectors();
      for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = basis.col(lo + j);
        vals[lo + j] = complexd((col.adjoint() * h * col)(0).real(), ess.eigenvalues()[j]);
      }
    }
    lo = hi;
  }

  const auto order = lex_order(vals);
  SpectralDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.basis.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    dec.eigenvalues[j] = vals[order[static_cast<std::size_t>(j)]];
    dec.basis.col(j) = basis.col(order[static_cast<std::size_t>(j)]);
  }
  return dec;
}

std::pair<ComplexMatrix, ComplexMatrix> polar(const ComplexMatrix& a,
                                              const LinalgOptions& opts) {
  require_square(a, "polar");
  const double scale = operator_norm(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a * a.adjoint());
  if (es.info() != Eigen::Success) fail(errc::validation, "polar: eigensolver failed");
  RealVector lam = es.eigenvalues().cwiseMax(0.0);
  const double smin = std::sqrt(lam.minCoeff());
  if (smin <= opts.singular_tol * scale)
    fail(errc::singular,
         "polar: input is near-singular (smallest singular value " + std::to_string(smin) + ")");
  const ComplexMatrix& u = es.eigenvectors();
  ComplexMatrix p = u * lam.cwiseSqrt().asDiagonal() * u.adjoint();
  ComplexMatrix pinv = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
  return {std::move(p), pinv * a};
}

QuasimodeResult quasimode(const SpectralDecomposition& dec, const ComplexVector& v,
                          complexd alpha, double delta) {
  if (v.size() != dec.dim())
    fail(errc::dimension, "quasimode: vector length does not match decomposition");
  if (delta <= 0.0) fail(errc::contract, "quasimode: delta must be positive");
  const double vn = v.norm();
  if (vn == 0.0) fail(errc::contract, "quasimode: v must be nonzero");

  const Eigen::Index n = dec.dim();
  ComplexVector coeff = dec.basis.adjoint() * v;

  QuasimodeResult r;
  r.v_norm = vn;
  double wn2 = 0.0;
  Eigen::Index nearest = 0;
  double nearest_dist = std::abs(dec.eigenvalues[0] - alpha);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = std::abs(dec.eigenvalues[j] - alpha);
    wn2 += d * d * std::norm(coeff[j]);
    if (d < nearest_dist) {
      nearest_dist = d;
      nearest = j;
    }
  }
  r.w_norm = std::sqrt(wn2);
  r.bound = r.w_norm / vn;
  r.lambda = dec.eigenvalues[nearest];

  ComplexVector in_cluster = ComplexVector::Zero(n);
  Eigen::Index cluster_dim = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(dec.eigenvalues[j] - alpha) < delta) {
      in_cluster[j] = coeff[j];
      ++cluster_dim;
    }
  }
  if (cluster_dim == 0)
    fail(errc::cluster_empty, "quasimode: no eigenvalue within delta=" + std::to_string(delta) +
                                  " of alpha (nearest at distance " +
                                  std::to_string(nearest_dist) + ")");
  r.cluster_dim = cluster_dim;

  double tn = in_cluster.norm();
  ComplexVector e;
  if (tn > 0.0) {
    e = (dec.basis * in_cluster) / tn;
  } else {
    // v is orthogonal to the cluster; any unit cluster vector is admissible.
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(dec.eigenvalues[j] - alpha) < delta) {
        e = dec.basis.col(j);
        break;
      }
  }
  r.unit_vector = e;
  r.projection_error = (v - vn * e).norm();
  return r;
}

QuasimodeResult quasimode(const ComplexMatrix& a, const ComplexVector& v, complexd alpha,
                          double delta, const LinalgOptions& opts) {
  return quasimode(normal_eig(a, opts), v, alpha, delta);
}

ComplexMatrix exp_i_hermitian(const ComplexMatrix& h, const LinalgOptions& opts) {
  SpectralDecomposition dec = hermitian_eig(h, opts);
  ComplexVector phases(dec.dim());
  for (Eigen::Index j = 0; j < dec.dim(); ++j)
    phases[j] = std::exp(complexd(0.0, dec.eigenvalues[j].real()));
  return dec.basis * phases.asDiagonal() * dec.basis.adjoint();
}

} // namespace repstab
