#pragma once

#include <array>
#include <string>
#include <vector>

#include "repstab/complex_matrix.hpp"
#include "repstab/errors.hpp"
#include "repstab/linalg.hpp"

namespace repstab::lie {

/// Structure constants {e_i, e_j} = sum_l c[i][j][l] e_l of a compact Lie
/// algebra in a Killing-orthonormal basis (<e_j, e_k> = -delta_jk).
class LieAlgebraData {
public:
  LieAlgebraData() = default;
  LieAlgebraData(Eigen::Index n, std::vector<double> c);

  Eigen::Index n() const { return n_; }
  double structure(Eigen::Index i, Eigen::Index j, Eigen::Index l) const {
    return c_[static_cast<std::size_t>((i * n_ + j) * n_ + l)];
  }
  const std::vector<double>& tensor() const { return c_; }

private:
  Eigen::Index n_ = 0;
  std::vector<double> c_;
};

/// Validates antisymmetry, the Jacobi identity (1e-12) and Killing
/// orthonormality (1e-10); throws errc::validation naming the failed identity.
LieAlgebraData make_lie_algebra(Eigen::Index n, const std::vector<double>& tensor);

/// su(2) with the 1/sqrt(2) Killing normalization: c[i][j][l] = eps_{ijl}/sqrt(2).
LieAlgebraData su2_killing_normalized();

struct AlmostRep {
  LieAlgebraData algebra;
  std::vector<ComplexMatrix> images; // skew-Hermitian, traceless
  // Cached statistics; mu is NaN when the almost-Casimir is singular.
  double mu = 0.0, K = 0.0, eps = 0.0;
};

AlmostRep make_almost_rep(LieAlgebraData algebra, std::vector<ComplexMatrix> images);

/// HS-orthonormal basis of traceless skew-Hermitian operators on C^d
/// (generalized Gell-Mann generators times i); d^2-1 elements.
std::vector<ComplexMatrix> su_basis(Eigen::Index d);

/// alpha[j][k] = t({e_j,e_k}) - [t(e_j), t(e_k)]; exactly antisymmetric.
std::vector<std::vector<ComplexMatrix>> defect_tensor(const AlmostRep& t);

/// Gamma(sigma) = -sum_i [[sigma, t(e_i)], t(e_i)] applied directly.
ComplexMatrix apply_casimir(const AlmostRep& t, const ComplexMatrix& sigma);

/// Gamma as a real symmetric PSD matrix on the traceless skew-Hermitian space.
struct CasimirOperator {
  Eigen::Index dim_space = 0;
  RealMatrix matrix;
};
CasimirOperator almost_casimir(const AlmostRep& t);

struct MuKEps {
  double mu = 0.0;        // certified lower bound from power-type ascent
  double K = 0.0;
  double eps = 0.0;
  double mu_upper = 0.0;  // sqrt(d^2-1)/lambda_min comparison bound
  double lambda_min = 0.0;
};
/// Throws errc::reducibility when Gamma is singular (common invariant subspace).
MuKEps mu_K_eps(const AlmostRep& t, int ascent_iterations = 20);

struct NewtonStep {
  std::vector<ComplexMatrix> correction;
  AlmostRep next;
};
/// One Kazhdan-type step: a(e_j) = -Gamma^{-1} sum_i [alpha(e_j,e_i), x_i],
/// images re-skew-symmetrized, statistics recomputed.
NewtonStep newton_correction(const AlmostRep& t);

struct NewtonResult {
  AlmostRep rep;
  std::vector<std::array<double, 3>> history; // (mu, K, eps) per iterate
  bool converged = false;
  double final_distance = 0.0;   // max_j || t0(e_j) - rep(e_j) ||
  double initial_mu_k_eps = 0.0; // mu0 * K0 * eps0 for the distance bound
};

class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, NewtonResult partial)
      : Error(errc::divergence, what), partial_(std::move(partial)) {}
  const NewtonResult& partial() const { return partial_; }

private:
  NewtonResult partial_;
};

NewtonResult newton_stabilize(const AlmostRep& t, double tol = 1e-12, int max_iter = 30);

/// Exact identity: lhs = -tr(Gamma(P~) P~) with P~ the traceless skew-Hermitian
/// image i(P - tr(P)/d), rhs = 2 sum_i ||(1-P) x_i P||_HS^2.
std::pair<double, double> projector_identity_check(const AlmostRep& t, const ComplexMatrix& p);

struct IrreducibilityMagnitude {
  double lambda1 = 0.0;  // smallest eigenvalue of Gamma
  double mu = 0.0;       // NaN when Gamma singular
  double d_upper = 0.0;  // heuristic upper bound on min_Pi max_j ||(1-Pi)x_j Pi||
};
IrreducibilityMagnitude irreducibility_magnitude(const AlmostRep& t);

std::string newton_report_to_json_text(const NewtonResult& r);

} // namespace repstab::lie
