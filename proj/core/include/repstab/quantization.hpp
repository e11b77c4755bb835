#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "repstab/complex_matrix.hpp"
#include "repstab/observable.hpp"

namespace repstab::quant {

/// A quantization family k -> (H_k of dimension k + c, T_k). Evaluators are
/// pure and safe to share across threads.
struct Quantization {
  Manifold manifold = Manifold::sphere;
  std::string backend;
  int c = 0; // dim H_k = k + c
  std::function<ComplexMatrix(int, const Observable&)> op;

  Eigen::Index dim(int k) const { return k + c; }
  ComplexMatrix operator()(int k, const Observable& f) const { return op(k, f); }
};

/// Closed-form sphere model on dim k + c: degree-one images are the Hermitian
/// spin matrices scaled by s_k = 1/(k+c+1); higher monomials are quantized by
/// the fully symmetrized spin polynomial.
Quantization sphere_spin_quantization(int c = 1);

/// Multiply-then-project on the degree-k monomial section basis with the
/// Fubini-Study weight; Gauss-Legendre in the polar variable and uniform
/// azimuthal nodes. dim H_k = k + 1.
ComplexMatrix sphere_toeplitz_quadrature(int k, const SphereFunction& f, int polar_nodes = 0);
Quantization sphere_quadrature_quantization();

/// Closed-form torus model on dim k (c = 0), derived from the level-k theta
/// oracle: T_k(u1^n u2^m) = e^{-pi(n^2+m^2)/2k} e^{-i pi n m/k} Shift^n Clock^{-m}.
Quantization torus_theta_quantization();

/// Level-k theta-basis inner products on a periodic grid; Gaussian series
/// truncated below 1e-16. dim H_k = k.
ComplexMatrix torus_toeplitz_quadrature(int k, const TorusFunction& f);
Quantization torus_quadrature_quantization();

using FunctionOp = std::function<Observable(const Observable&)>;

/// T_k^D(f) = T_k(f + k^{-order} D f). Requires D(1) = 0.
Quantization change_of_variable(const Quantization& q, const FunctionOp& d, int order);

/// Fourier multiplier pi(n^2+m^2)/2 (= -Laplacian/8pi): first-order change of
/// variable normalizing the symmetric first-order product coefficient of the
/// theta model to zero.
FunctionOp torus_c1_normalizer();
/// Fourier multiplier pi^2(n^2+m^2)^2/8: second-order change matching the
/// symmetric second-order coefficient to the flat translation-invariant one
/// (and restoring unitary generator images to O(1/k^3)).
FunctionOp torus_moyal_correction();

struct SlopeFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  bool exact = false; // every residual at the floor
  int points_used = 0;
};

struct AxiomPairReport {
  std::string f, g;
  std::vector<int> ks;
  std::vector<double> e1_f, e1_g, e2, e3;
  SlopeFit s1, s2, s3;
};

struct AxiomReport {
  std::vector<AxiomPairReport> pairs;
};

/// Residuals e1 = | ||T_k(f)|| - ||f||_inf |, e2 = ||[T_k f, T_k g] - (i/k)T_k({f,g})||,
/// e3 = ||T_k(f) T_k(g) - T_k(fg)||, with log-log fitted slopes.
AxiomReport verify_axioms(const Quantization& q, const std::vector<Observable>& fs,
                          const std::vector<int>& ks, const SupNormOptions& sup_opts = {});

struct TraceRow {
  int k = 0;
  std::string f;
  complexd trace;
  complexd integral; // (1/2pi) Int f w
};

struct TraceProfile {
  std::vector<TraceRow> rows;
  std::vector<std::string> fs;
  std::vector<double> r_estimate;       // per f; NaN when indeterminate
  std::vector<bool> indeterminate;      // Int f w = 0
  std::vector<Eigen::Index> dim_minus_k;
};

/// tr T_k(f) against (k/2pi) Int f R_k w with R_k = 1 + R/k + O(1/k^2);
/// least-squares R per function.
TraceProfile trace_profile(const Quantization& q, const std::vector<Observable>& fs,
                           const std::vector<int>& ks);

} // namespace repstab::quant
