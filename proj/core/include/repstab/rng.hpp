#pragma once

#include <cstdint>

#include "repstab/complex_matrix.hpp"

namespace repstab {

/// SplitMix64 stream. Deterministic across platforms; streams are split by
/// hashing (seed, stream) so ensembles can be generated independently per
/// (k, seed) pair and merged in any order.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng split(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal via Box-Muller (explicit algorithm, stream-stable).
  double normal();
  complexd normal_complex();

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Random Hermitian with independent Gaussian entries, rescaled to the
/// requested operator norm (0 norm -> zero matrix).
ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double op_norm = 1.0);
ComplexMatrix random_skew_hermitian(Rng& rng, Eigen::Index n, double op_norm = 1.0);
/// Haar-like unitary from QR of a Ginibre matrix with the R-diagonal phase fix.
ComplexMatrix random_unitary(Rng& rng, Eigen::Index n);
/// Orthogonal projector of the given rank.
ComplexMatrix random_projector(Rng& rng, Eigen::Index n, Eigen::Index rank);

} // namespace repstab
