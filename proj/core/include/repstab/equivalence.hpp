#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "repstab/complex_matrix.hpp"
#include "repstab/quantization.hpp"
#include "repstab/qtorus.hpp"
#include "repstab/su2.hpp"

namespace repstab::equiv {

struct OrderFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  bool exact = false;
  int points_used = 0;
};

/// Least squares on (log k, log residual); residuals below 1e-12 are treated
/// as floor and excluded. Throws when fewer than 3 usable points remain
/// (unless the whole set sits at the floor, which is reported as exact).
OrderFit order_fit(const std::vector<int>& ks, const std::vector<double>& residuals,
                   double floor = 1e-12);

struct SphereEquivalence {
  ComplexMatrix u;                       // U with U^{-1} Q_k(u_j) U ~ T_k(u_j)
  std::array<double, 3> generator_residuals{};
  su2::Su2StabilizationReport left, right;
};

/// Scales both generator triples into almost su(2) data, stabilizes each and
/// intertwines the recovered canonical chain bases.
SphereEquivalence find_equivalence_sphere(const quant::Quantization& t,
                                          const quant::Quantization& q, int k);

enum class TorusOrder { standard, three_halves };

struct TorusEquivalence {
  ComplexMatrix u;
  /// Translation carrying t onto q: q ~ t-composed-with tau_p^*, in [0,1)^2.
  std::array<double, 2> translation{};
  std::array<double, 2> generator_residuals{};
  qtorus::TorusStabilizationReport left, right;
};

/// standard: lattice-reduced intertwiner, O(1/k) generator residuals without
/// a translation. three_halves: applies the first-order normalizer then the
/// second-order correction to both sides, checks the refined generator
/// relations, and returns the translation-augmented intertwiner.
TorusEquivalence find_equivalence_torus(const quant::Quantization& t,
                                        const quant::Quantization& q, int k, TorusOrder order);

struct ResidualRow {
  int k = 0;
  std::string f;
  double residual = 0.0;
};

struct EquivalenceResult {
  std::vector<int> ks;
  std::vector<ComplexMatrix> unitaries;
  std::optional<std::vector<std::array<double, 2>>> translations;
  std::vector<ResidualRow> rows;
  std::vector<std::string> fs;
  std::vector<OrderFit> per_f;
  double fitted_order = 0.0; // worst fitted slope (exact functions excluded)
};

/// Residuals || U_k^{-1} Q_k(f~) U_k - T_k(f) || for each function and k,
/// where f~ is f translated by -p_k when translations are present.
EquivalenceResult residual_scan(const quant::Quantization& t, const quant::Quantization& q,
                                const std::vector<int>& ks,
                                const std::vector<ComplexMatrix>& unitaries,
                                const std::optional<std::vector<std::array<double, 2>>>& translations,
                                const std::vector<quant::Observable>& fs);

std::string result_to_json_text(const EquivalenceResult& r);
std::string result_to_csv_text(const EquivalenceResult& r);

} // namespace repstab::equiv
