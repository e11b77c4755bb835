#include "repstab/rng.hpp"

#include <cmath>

#include <Eigen/QR>

#include "repstab/linalg.hpp"

namespace repstab {

namespace {
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
} // namespace

Rng Rng::split(std::uint64_t seed, std::uint64_t stream) {
  // Derive a child seed by running the parent generator over (seed, stream).
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull;
  std::uint64_t b = splitmix64(s);
  return Rng(a ^ (b + 0x9e3779b97f4a7c15ull));
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 kept away from 0.
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0x1.0p-60);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double two_pi = 6.283185307179586476925286766559;
  spare_ = r * std::sin(two_pi * u2);
  have_spare_ = true;
  return r * std::cos(two_pi * u2);
}

complexd Rng::normal_complex() {
  const double re = normal();
  const double im = normal();
  return complexd(re, im) / std::sqrt(2.0);
}

ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double op_norm) {
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal_complex();
  ComplexMatrix h = 0.5 * (g + g.adjoint());
  const double nn = operator_norm(h);
  if (nn == 0.0 || op_norm == 0.0) return ComplexMatrix::Zero(n, n);
  return h * (op_norm / nn);
}

ComplexMatrix random_skew_hermitian(Rng& rng, Eigen::Index n, double op_norm) {
  return complexd(0.0, 1.0) * random_hermitian(rng, n, op_norm);
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal_complex();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar and the result is
  // deterministic in the input stream.
  for (Eigen::Index j = 0; j < n; ++j) {
    complexd d = r(j, j);
    const double m = std::abs(d);
    q.col(j) *= (m > 0.0) ? d / m : complexd(1.0, 0.0);
  }
  return q;
}

ComplexMatrix random_projector(Rng& rng, Eigen::Index n, Eigen::Index rank) {
  if (rank <= 0) return ComplexMatrix::Zero(n, n);
  if (rank >= n) return ComplexMatrix::Identity(n, n);
  ComplexMatrix g(n, rank);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) g(i, j) = rng.normal_complex();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = ComplexMatrix(qr.householderQ()).leftCols(rank);
  return q * q.adjoint();
}

} // namespace repstab
