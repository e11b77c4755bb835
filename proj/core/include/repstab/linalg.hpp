#pragma once

#include <utility>

#include "repstab/complex_matrix.hpp"
#include "repstab/errors.hpp"

namespace repstab {

/// Eigendecomposition of a normal operator. `basis` columns are orthonormal
/// eigenvectors; A * basis = basis * diag(eigenvalues) up to 1e-9 * ||A||.
/// Hermitian input: eigenvalues real, ascending. General normal input:
/// eigenvalues sorted lexicographically by (real, imag).
struct SpectralDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix basis;

  Eigen::Index dim() const { return eigenvalues.size(); }
};

struct QuasimodeResult {
  complexd lambda = 0.0;        // eigenvalue nearest to alpha
  double bound = 0.0;           // ||w|| / ||v||, so |lambda - alpha| <= bound
  ComplexVector unit_vector;    // unit vector in the delta-cluster subspace
  Eigen::Index cluster_dim = 0; // dimension of that subspace
  double projection_error = 0.0;// measured || v - ||v|| * unit_vector ||
  double v_norm = 0.0;
  double w_norm = 0.0;          // w := A v - alpha v
};

struct LinalgOptions {
  double hermitian_tol = 1e-10;     // relative Hermiticity defect
  double normal_tol = 1e-8;         // commutator defect, relative to ||A||^2
  double cluster_tol = 1e-8;        // eigenvalue cluster threshold, relative to ||A||
  double singular_tol = 1e-12;      // smallest singular value, relative to ||A||
};

/// Largest singular value, computed from the top eigenvalue of A* A.
double operator_norm(const ComplexMatrix& a);

SpectralDecomposition hermitian_eig(const ComplexMatrix& a, const LinalgOptions& opts = {});

/// Joint diagonalization of the commuting Hermitian parts (A+A*)/2 and
/// (A-A*)/(2i), refining the skew part inside each eigenvalue cluster of the
/// Hermitian part.
SpectralDecomposition normal_eig(const ComplexMatrix& a, const LinalgOptions& opts = {});

/// A = P U with P positive Hermitian and U unitary, via the spectral
/// decomposition of A A*. Throws errc::singular for near-singular input.
std::pair<ComplexMatrix, ComplexMatrix> polar(const ComplexMatrix& a,
                                              const LinalgOptions& opts = {});

/// Quasimode extraction: given A v = alpha v + w, locates the eigenvalue
/// nearest alpha (|lambda - alpha| <= ||w||/||v||) and a unit vector in the
/// span of eigenvectors within delta of alpha with
/// || v - ||v|| e || <= 2 ||w|| / delta.
QuasimodeResult quasimode(const SpectralDecomposition& dec, const ComplexVector& v,
                          complexd alpha, double delta);
QuasimodeResult quasimode(const ComplexMatrix& a, const ComplexVector& v,
                          complexd alpha, double delta, const LinalgOptions& opts = {});

/// exp(iH) for Hermitian H (unitary by construction).
ComplexMatrix exp_i_hermitian(const ComplexMatrix& h, const LinalgOptions& opts = {});

double hermitian_defect(const ComplexMatrix& a);       // ||A - A*||
double skew_hermitian_defect(const ComplexMatrix& a);  // ||A + A*||
double unitary_defect(const ComplexMatrix& a);         // ||A A* - I||

} // namespace repstab
