#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "repstab/complex_matrix.hpp"
#include "repstab/linalg.hpp"

namespace repstab::qtorus {

/// Exact clock/shift pair on C^n: X1 = diag(e^{2pi i (theta1+m)/n}),
/// X2 e_m = e^{2pi i theta2/n} e_{m+1 mod n} in the canonical basis.
/// `basis` columns are that canonical basis in the ambient space.
struct TorusIrrep {
  Eigen::Index n = 0;
  double theta1 = 0.0, theta2 = 0.0; // in [0, n)
  ComplexMatrix X1, X2;
  ComplexMatrix basis;
};

struct TorusPair {
  ComplexMatrix x1, x2;
  int k = 0;
  double c = 0.0;
};

struct TorusDefects {
  double r1 = 0.0; // k^3 * max_j || x_j x_j^* - I ||
  double r2 = 0.0; // k^3 * || x1 x2 - e^{2pi i/(k+c)} x2 x1 ||
  Eigen::Index dim = 0;
};

struct TorusStabilizeOptions {
  double window = 0.0;          // quasimode delta; 0 -> pi/(2k)
  double c_integrality = 0.05;
  LinalgOptions linalg;
};

struct TorusStabilizationReport {
  TorusIrrep rep;
  std::array<double, 2> distances{};
  double residual_r1 = 0.0;
  double residual_r2 = 0.0;
  double theta_extracted = 0.0;            // closing phase of the x2-chain
  std::vector<complexd> chain_eigenvalues; // unit eigenvalues of x1 along the chain
  double unitarize_drift = 0.0;
};

struct AlignResult {
  ComplexMatrix u;                 // combined intertwiner (lattice-reduced)
  std::array<double, 2> p{};       // phase translation, in [0, 1) per axis
  std::array<double, 2> residuals{}; // || b.X_j - u^* a.X_j u ||
};

TorusIrrep build_exact_qtorus(Eigen::Index n, double theta1 = 0.0, double theta2 = 0.0);

void validate(const TorusPair& t);

TorusDefects qtorus_defects(const TorusPair& t);

/// Replaces each generator by its unitary polar factor; drift = max_j ||x_j - U_j||.
std::pair<TorusPair, double> unitarize(const TorusPair& t, const LinalgOptions& opts = {});

/// Diagonalizes the (unitarized) x1, builds the eigenvalue chain with x2 as a
/// ladder inside pi/(2k) quasimode windows, extracts the closing phase, applies
/// the phase twist and returns the exact clock/shift pair in the recovered basis.
TorusStabilizationReport stabilize_qtorus(const TorusPair& t,
                                          const TorusStabilizeOptions& opts = {});

/// The lattice intertwiner X1^{-m2} X2^{m1} of `a`, which conjugates X_j to
/// e^{-2pi i m_j/n} X_j.
ComplexMatrix lattice_intertwiner(const TorusIrrep& a, long m1, long m2);

/// Finds (U, p) with b.X_j = e^{2pi i p_j} U^* a.X_j U to 1e-8, then composes
/// with the lattice intertwiner for floor(n p_j) so the returned residuals
/// || b.X_j - U^* a.X_j U || are O(1/n).
AlignResult align_qtorus(const TorusIrrep& a, const TorusIrrep& b);

double torus_distance(const TorusPair& t, const TorusIrrep& rep);

std::string report_to_json_text(const TorusStabilizationReport& r);

} // namespace repstab::qtorus
