#include "repstab/lie_newton.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace repstab::lie {

LieAlgebraData::LieAlgebraData(Eigen::Index n, std::vector<double> c) : n_(n), c_(std::move(c)) {}

LieAlgebraData make_lie_algebra(Eigen::Index n, const std::vector<double>& tensor) {
  if (n < 1 || tensor.size() != static_cast<std::size_t>(n * n * n))
    fail(errc::validation, "make_lie_algebra: tensor must have shape n x n x n");
  LieAlgebraData g(n, tensor);

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = 0; l < n; ++l)
        if (std::abs(g.structure(i, j, l) + g.structure(j, i, l)) > 1e-12) {
          std::ostringstream m;
          m << "make_lie_algebra: antisymmetry fails at (" << i << "," << j << "," << l << ")";
          fail(errc::validation, m.str());
        }

  // Jacobi: sum_m c[i][j][m]c[m][k][l] + cyclic = 0.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          double s = 0.0;
          for (Eigen::Index m = 0; m < n; ++m)
            s += g.structure(i, j, m) * g.structure(m, k, l) +
                 g.structure(j, k, m) * g.structure(m, i, l) +
                 g.structure(k, i, m) * g.structure(m, j, l);
          if (std::abs(s) > 1e-12) {
            std::ostringstream m;
            m << "make_lie_algebra: Jacobi identity fails at (" << i << "," << j << "," << k
              << "," << l << ")";
            fail(errc::validation, m.str());
          }
        }

  // Killing form tr(ad_i ad_j) must equal -delta_ij in this basis.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double kf = 0.0;
      for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index m = 0; m < n; ++m)
          kf += g.structure(i, l, m) * g.structure(j, m, l);
      const double want = i == j ? -1.0 : 0.0;
      if (std::abs(kf - want) > 1e-10) {
        std::ostringstream msg;
        msg << "make_lie_algebra: Killing form entry (" << i << "," << j << ") = " << kf
            << ", expected " << want;
        fail(errc::validation, msg.str());
      }
    }
  return g;
}

LieAlgebraData su2_killing_normalized() {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<double> c(27, 0.0);
  auto set = [&](int i, int j, int l, double v) { c[static_cast<std::size_t>((i * 3 + j) * 3 + l)] = v; };
  set(0, 1, 2, s);
  set(1, 0, 2, -s);
  set(1, 2, 0, s);
  set(2, 1, 0, -s);
  set(2, 0, 1, s);
  set(0, 2, 1, -s);
  return LieAlgebraData(3, std::move(c));
}

std::vector<ComplexMatrix> su_basis(Eigen::Index d) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d - 1));
  const double r = 1.0 / std::sqrt(2.0);
  const complexd i(0.0, 1.0);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a + 1; b < d; ++b) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(a, b) = i * r;
      sym(b, a) = i * r;
      basis.push_back(sym);
      ComplexMatrix asym = ComplexMatrix::Zero(d, d);
      asym(a, b) = r;
      asym(b, a) = -r;
      basis.push_back(asym);
    }
  for (Eigen::Index m = 1; m < d; ++m) {
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
    for (Eigen::Index j = 0; j < m; ++j) diag(j, j) = i * norm;
    diag(m, m) = -i * norm * static_cast<double>(m);
    basis.push_back(diag);
  }
  return basis;
}

namespace {

RealVector to_coords(const std::vector<ComplexMatrix>& basis, const ComplexMatrix& m) {
  RealVector v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a)
    v[static_cast<Eigen::Index>(a)] = (basis[a].adjoint() * m).trace().real();
  return v;
}

ComplexMatrix from_coords(const std::vector<ComplexMatrix>& basis, const RealVector& v) {
  ComplexMatrix m = ComplexMatrix::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t a = 0; a < basis.size(); ++a) m += v[static_cast<Eigen::Index>(a)] * basis[a];
  return m;
}

void validate_images(const AlmostRep& t) {
  if (t.images.size() != static_cast<std::size_t>(t.algebra.n()))
    fail(errc::validation, "almost rep: image count must equal the algebra dimension");
  for (const auto& x : t.images) {
    require_square(x, "almost rep image");
    if (x.rows() != t.images.front().rows())
      fail(errc::dimension, "almost rep: images must share one dimension");
    if (skew_hermitian_defect(x) > 1e-10 * (1.0 + operator_norm(x)))
      fail(errc::contract, "almost rep: image is not skew-Hermitian to tolerance");
    if (std::abs(x.trace()) > 1e-10 * (1.0 + operator_norm(x)) * std::sqrt(double(x.rows())))
      fail(errc::contract, "almost rep: image is not traceless to tolerance");
  }
}

ComplexMatrix bracket_image(const AlmostRep& t, Eigen::Index j, Eigen::Index k) {
  // t({e_j, e_k}) through the structure constants.
  const Eigen::Index n = t.algebra.n();
  ComplexMatrix m = ComplexMatrix::Zero(t.images[0].rows(), t.images[0].cols());
  for (Eigen::Index l = 0; l < n; ++l) {
    const double c = t.algebra.structure(j, k, l);
    if (c != 0.0) m += c * t.images[static_cast<std::size_t>(l)];
  }
  return m;
}

struct Stats {
  double K = 0.0, eps = 0.0;
};

Stats k_eps(const AlmostRep& t) {
  Stats s;
  for (const auto& x : t.images) s.K = std::max(s.K, operator_norm(x));
  const auto alpha = defect_tensor(t);
  for (const auto& row : alpha)
    for (const auto& a : row) s.eps = std::max(s.eps, operator_norm(a));
  return s;
}

} // namespace

AlmostRep make_almost_rep(LieAlgebraData algebra, std::vector<ComplexMatrix> images) {
  AlmostRep t;
  t.algebra = std::move(algebra);
  t.images = std::move(images);
  validate_images(t);
  const Stats s = k_eps(t);
  t.K = s.K;
  t.eps = s.eps;
  try {
    t.mu = mu_K_eps(t).mu;
  } catch (const Error& e) {
    if (e.code() != errc::reducibility) throw;
    t.mu = std::numeric_limits<double>::quiet_NaN();
  }
  return t;
}

std::vector<std::vector<ComplexMatrix>> defect_tensor(const AlmostRep& t) {
  const Eigen::Index n = t.algebra.n();
  std::vector<std::vector<ComplexMatrix>> alpha(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    alpha[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k < j) {
        alpha[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
            -alpha[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        continue;
      }
      const ComplexMatrix& xj = t.images[static_cast<std::size_t>(j)];
      const ComplexMatrix& xk = t.images[static_cast<std::size_t>(k)];
      alpha[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
          bracket_image(t, j, k) - (xj * xk - xk * xj);
    }
  }
  return alpha;
}

ComplexMatrix apply_casimir(const AlmostRep& t, const ComplexMatrix& sigma) {
  ComplexMatrix out = ComplexMatrix::Zero(sigma.rows(), sigma.cols());
  for (const auto& x : t.images) {
    const ComplexMatrix inner = sigma * x - x * sigma;
    out -= inner * x - x * inner;
  }
  return out;
}

CasimirOperator almost_casimir(const AlmostRep& t) {
  validate_images(t);
  const Eigen::Index d = t.images[0].rows();
  const auto basis = su_basis(d);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  CasimirOperator op;
  op.dim_space = dim;
  op.matrix.resize(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b)
    op.matrix.col(b) = to_coords(basis, apply_casimir(t, basis[static_cast<std::size_t>(b)]));
  const double sym_defect = (op.matrix - op.matrix.transpose()).norm();
  if (sym_defect > 1e-9 * (1.0 + op.matrix.norm()))
    fail(errc::validation, "almost_casimir: matrix is not symmetric to tolerance");
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose());
  return op;
}

MuKEps mu_K_eps(const AlmostRep& t, int ascent_iterations) {
  validate_images(t);
  const Eigen::Index d = t.images[0].rows();
  const auto basis = su_basis(d);
  const CasimirOperator gamma = almost_casimir(t);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gamma.matrix);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin <= 1e-10)
    fail(errc::reducibility,
         "mu_K_eps: almost-Casimir is singular (lambda_min = " + std::to_string(lmin) +
             "); a nontrivial operator commutes with every image");

  const RealMatrix inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                         es.eigenvectors().transpose();

  // Lower bound for the op-norm-to-op-norm |||Gamma^{-1}|||: evaluate the
  // ratio on every basis direction, then run power-type ascent from the best.
  auto ratio_of = [&](const RealVector& v) {
    const double denom = operator_norm(from_coords(basis, v));
    if (denom == 0.0) return 0.0;
    return operator_norm(from_coords(basis, RealVector(inv * v))) / denom;
  };
  double mu = 0.0;
  Eigen::Index best = 0;
  for (Eigen::Index a = 0; a < gamma.dim_space; ++a) {
    RealVector seed = RealVector::Zero(gamma.dim_space);
    seed[a] = 1.0;
    const double r = ratio_of(seed);
    if (r > mu) {
      mu = r;
      best = a;
    }
  }
  RealVector v = RealVector::Zero(gamma.dim_space);
  v[best] = 1.0;
  for (int it = 0; it < ascent_iterations; ++it) {
    v = inv * v;
    const double nrm = v.norm();
    if (nrm == 0.0) break;
    v /= nrm;
    mu = std::max(mu, ratio_of(v));
  }

  MuKEps out;
  const Stats s = k_eps(t);
  out.K = s.K;
  out.eps = s.eps;
  out.mu = mu;
  out.lambda_min = lmin;
  out.mu_upper = std::sqrt(static_cast<double>(gamma.dim_space)) / lmin;
  return out;
}

NewtonStep newton_correction(const AlmostRep& t) {
  const Eigen::Index n = t.algebra.n();
  const Eigen::Index d = t.images[0].rows();
  const auto basis = su_basis(d);
  const CasimirOperator gamma = almost_casimir(t);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gamma.matrix);
  if (es.eigenvalues().minCoeff() <= 1e-10)
    fail(errc::reducibility, "newton_correction: almost-Casimir is singular");
  const RealMatrix inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                         es.eigenvectors().transpose();

  const auto alpha = defect_tensor(t);
  NewtonStep step;
  step.correction.reserve(static_cast<std::size_t>(n));
  std::vector<ComplexMatrix> next;
  next.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexMatrix kappa = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ComplexMatrix& a = alpha[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      const ComplexMatrix& x = t.images[static_cast<std::size_t>(i)];
      kappa += a * x - x * a;
    }
    ComplexMatrix corr = -from_coords(basis, RealVector(inv * to_coords(basis, kappa)));
    ComplexMatrix xn = t.images[static_cast<std::size_t>(j)] + corr;
    xn = 0.5 * (xn - xn.adjoint()); // guard rounding drift
    step.correction.push_back(std::move(corr));
    next.push_back(std::move(xn));
  }
  step.next = make_almost_rep(t.algebra, std::move(next));
  return step;
}

NewtonResult newton_stabilize(const AlmostRep& t, double tol, int max_iter) {
  NewtonResult res;
  AlmostRep cur = t;
  res.history.push_back({cur.mu, cur.K, cur.eps});
  res.initial_mu_k_eps = cur.mu * cur.K * cur.eps;
  int iter = 0;
  while (cur.eps > tol && iter < max_iter) {
    if (std::isnan(cur.mu))
      fail(errc::reducibility, "newton_stabilize: almost-Casimir is singular");
    cur = newton_correction(cur).next;
    res.history.push_back({cur.mu, cur.K, cur.eps});
    ++iter;
  }
  res.rep = cur;
  double dist = 0.0;
  for (std::size_t j = 0; j < cur.images.size(); ++j)
    dist = std::max(dist, operator_norm(cur.images[j] - t.images[j]));
  res.final_distance = dist;
  res.converged = cur.eps <= tol;
  if (!res.converged)
    throw DivergenceError("newton_stabilize: eps = " + std::to_string(cur.eps) + " after " +
                              std::to_string(max_iter) + " iterations",
                          res);
  return res;
}

std::pair<double, double> projector_identity_check(const AlmostRep& t, const ComplexMatrix& p) {
  validate_images(t);
  require_square(p, "projector_identity_check");
  if (p.rows() != t.images[0].rows())
    fail(errc::dimension, "projector_identity_check: dimension mismatch");
  const double scale = 1.0 + operator_norm(p);
  if (hermitian_defect(p) > 1e-10 * scale || operator_norm(p * p - p) > 1e-10 * scale)
    fail(errc::contract, "projector_identity_check: input is not an orthogonal projector");

  const Eigen::Index d = p.rows();
  const complexd i(0.0, 1.0);
  const ComplexMatrix pt = i * (p - (p.trace() / static_cast<double>(d)) *
                                        ComplexMatrix::Identity(d, d));
  const double lhs = -(apply_casimir(t, pt) * pt).trace().real();

  double rhs = 0.0;
  const ComplexMatrix q = ComplexMatrix::Identity(d, d) - p;
  for (const auto& x : t.images) rhs += 2.0 * (q * x * p).squaredNorm();
  return {lhs, rhs};
}

IrreducibilityMagnitude irreducibility_magnitude(const AlmostRep& t) {
  validate_images(t);
  const Eigen::Index d = t.images[0].rows();
  const auto basis = su_basis(d);
  const CasimirOperator gamma = almost_casimir(t);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gamma.matrix);

  IrreducibilityMagnitude out;
  out.lambda1 = es.eigenvalues().minCoeff();
  if (out.lambda1 > 1e-10) {
    out.mu = mu_K_eps(t).mu;
  } else {
    out.mu = std::numeric_limits<double>::quiet_NaN();
  }

  // Candidate projectors: spectral bipartitions of the bottom eigenvector of
  // Gamma, plus every coordinate-subspace projector in small dimension.
  std::vector<ComplexMatrix> candidates;
  Eigen::Index argmin = 0;
  es.eigenvalues().minCoeff(&argmin);
  const ComplexMatrix a = from_coords(basis, RealVector(es.eigenvectors().col(argmin)));
  const SpectralDecomposition sd =
      hermitian_eig(ComplexMatrix(complexd(0.0, -1.0) * a));
  for (Eigen::Index split = 0; split + 1 < d; ++split) {
    ComplexMatrix q = sd.basis.rightCols(d - 1 - split);
    candidates.push_back(q * q.adjoint());
  }
  if (d <= 4) {
    for (unsigned mask = 1; mask + 1 < (1u << d); ++mask) {
      ComplexMatrix pi = ComplexMatrix::Zero(d, d);
      for (Eigen::Index j = 0; j < d; ++j)
        if (mask & (1u << j)) pi(j, j) = 1.0;
      candidates.push_back(std::move(pi));
    }
  }

  double best = std::numeric_limits<double>::infinity();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  for (const auto& pi : candidates) {
    double val = 0.0;
    for (const auto& x : t.images)
      val = std::max(val, operator_norm((id - pi) * x * pi));
    best = std::min(best, val);
  }
  out.d_upper = best;
  return out;
}

std::string newton_report_to_json_text(const NewtonResult& r) {
  nlohmann::json j;
  j["converged"] = r.converged;
  j["final_distance"] = r.final_distance;
  j["initial_mu_k_eps"] = r.initial_mu_k_eps;
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : r.history) hist.push_back({{"mu", h[0]}, {"K", h[1]}, {"eps", h[2]}});
  j["history"] = hist;
  return j.dump(2);
}

} // namespace repstab::lie
