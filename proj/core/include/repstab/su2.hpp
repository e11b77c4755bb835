#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "repstab/complex_matrix.hpp"
#include "repstab/linalg.hpp"

namespace repstab::su2 {

/// Exact irreducible su(2) triple on C^n. `basis` columns are the canonical
/// chain basis (ascending -iX3 eigenvalue); for the builder it is the
/// identity, for recovered representations the ambient chain basis.
struct Su2Irrep {
  Eigen::Index n = 0;
  ComplexMatrix X1, X2, X3;
  ComplexMatrix basis;
};

/// Candidate almost-representation data: three skew-Hermitian operators with
/// the Casimir/commutator axioms parameterized by (k, c).
struct Su2Triple {
  ComplexMatrix x1, x2, x3;
  int k = 0;
  double c = 0.0;
};

struct Su2Defects {
  double r1 = 0.0; // || x1^2+x2^2+x3^2 + (k^2/4 + kc/2) I ||
  double r2 = 0.0; // k * max_j || [x_j, x_{j+1}] - x_{j+2} ||
  Eigen::Index dim = 0;
};

struct Su2StabilizeOptions {
  double window = 0.5;          // quasimode delta for the eigenvalue descent
  double c_integrality = 0.05;  // max distance of c from the nearest integer
  LinalgOptions linalg;
};

struct Su2StabilizationReport {
  bool inferred_dim_ok = false;
  Su2Irrep rep;
  std::array<double, 3> distances{};        // || x_j - rep.X_j ||
  std::vector<double> chain_eigenvalues;    // of -i x3, strictly decreasing
  double residual_r1 = 0.0;
  double residual_r2 = 0.0;
  std::pair<double, double> norm_window{};  // (min_j ||x_j||, max_j ||x_j||)
};

/// Chain-basis irreducible triple: X3 = diag(i((n-1)/2 - m)) descending the
/// chain, ladder coefficients sqrt((n^2-1)/4 - l^2 -+ l).
Su2Irrep build_exact_su2(Eigen::Index n);

void validate(const Su2Triple& t, const LinalgOptions& opts = {});

Su2Defects su2_defects(const Su2Triple& t);

/// y_pm = +-i x1 + x2; satisfies y_+^* = -y_-.
std::pair<ComplexMatrix, ComplexMatrix> ladder(const Su2Triple& t);

/// Recovers the nearest exact irreducible representation by descending the
/// spectrum of -i x3 with y_- through quasimode windows, checking that the
/// chain exhausts the space, fixing phases so <y_- e_m, e_{m-1}> >= 0 and
/// assembling the exact chain operators in the recovered basis.
Su2StabilizationReport stabilize_su2(const Su2Triple& t, const Su2StabilizeOptions& opts = {});

/// max_j || x_j - rep.X_j ||.
double su2_distance(const Su2Triple& t, const Su2Irrep& rep);

std::string report_to_json_text(const Su2StabilizationReport& r);

} // namespace repstab::su2
