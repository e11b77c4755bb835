#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "repstab/cmx.hpp"
#include "repstab/errors.hpp"
#include "repstab/linalg.hpp"
#include "repstab/rng.hpp"
#include "test_support.hpp"

using namespace repstab;
using testsup::power_iteration_norm;

namespace {
ComplexMatrix diag3(complexd a, complexd b, complexd c) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}
} // namespace

TEST_CASE("operator norm on diagonal and zero matrices") {
  CHECK(operator_norm(diag3(1.0, -2.0, 0.5)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(operator_norm(ComplexMatrix::Zero(3, 3)) == 0.0);
  CHECK_THROWS_AS(operator_norm(ComplexMatrix::Zero(2, 3)), Error);
}

TEST_CASE("operator norm agrees with the power-iteration oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    ComplexMatrix a(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) a(i, j) = rng.normal_complex();
    const double got = operator_norm(a);
    const double want = power_iteration_norm(a, rng);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, want));
  }
}

TEST_CASE("operator norm is submultiplicative") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix a = random_hermitian(rng, 6, 1.5);
    ComplexMatrix b(6, 6);
    for (Eigen::Index i = 0; i < 6; ++i)
      for (Eigen::Index j = 0; j < 6; ++j) b(i, j) = rng.normal_complex();
    CHECK(operator_norm(a * b) <= operator_norm(a) * operator_norm(b) + 1e-9);
  }
}

TEST_CASE("hermitian_eig sorts ascending and solves 2x2 analytically") {
  auto dec = hermitian_eig(diag3(3.0, 1.0, 2.0));
  CHECK(dec.eigenvalues[0].real() == doctest::Approx(1.0));
  CHECK(dec.eigenvalues[1].real() == doctest::Approx(2.0));
  CHECK(dec.eigenvalues[2].real() == doctest::Approx(3.0));

  ComplexMatrix pauli(2, 2);
  pauli << 0.0, 1.0, 1.0, 0.0;
  auto p = hermitian_eig(pauli);
  CHECK(p.eigenvalues[0].real() == doctest::Approx(-1.0));
  CHECK(p.eigenvalues[1].real() == doctest::Approx(1.0));
  ComplexVector minus(2), plus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(std::abs(minus.dot(p.basis.col(0))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(plus.dot(p.basis.col(1))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_eig reconstruction residual") {
  Rng rng(23);
  const ComplexMatrix a = random_hermitian(rng, 16, 2.0);
  auto dec = hermitian_eig(a);
  const ComplexMatrix recon = dec.basis * dec.eigenvalues.asDiagonal() * dec.basis.adjoint();
  CHECK(operator_norm(a - recon) <= 1e-10 * operator_norm(a) + 1e-12);
  CHECK(unitary_defect(dec.basis) <= 1e-10);
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  ComplexMatrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(hermitian_eig(a), Error);
}

TEST_CASE("normal_eig orders lexicographically and handles unitaries") {
  const ComplexMatrix u = diag3(1.0, complexd(0.0, 1.0), -1.0);
  auto dec = normal_eig(u);
  CHECK(dec.eigenvalues[0] == complexd(-1.0, 0.0));
  CHECK(std::abs(dec.eigenvalues[1] - complexd(0.0, 1.0)) < 1e-12);
  CHECK(dec.eigenvalues[2] == complexd(1.0, 0.0));

  Rng rng(5);
  const ComplexMatrix q = random_unitary(rng, 12);
  auto d2 = normal_eig(q);
  const ComplexMatrix recon = d2.basis * d2.eigenvalues.asDiagonal() * d2.basis.adjoint();
  CHECK(operator_norm(q - recon) <= 1e-9);
  for (Eigen::Index j = 0; j < 12; ++j)
    CHECK(std::abs(std::abs(d2.eigenvalues[j]) - 1.0) <= 1e-9);
}

TEST_CASE("normal_eig agrees with hermitian_eig on Hermitian input") {
  Rng rng(17);
  const ComplexMatrix a = random_hermitian(rng, 9, 1.0);
  auto dh = hermitian_eig(a);
  auto dn = normal_eig(a);
  for (Eigen::Index j = 0; j < 9; ++j)
    CHECK(std::abs(dh.eigenvalues[j] - dn.eigenvalues[j]) <= 1e-9);
}

TEST_CASE("normal_eig rejects non-normal input") {
  ComplexMatrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(normal_eig(a), Error);
}

TEST_CASE("polar on unitary, scalar and perturbed clock input") {
  Rng rng(31);
  const ComplexMatrix u = random_unitary(rng, 5);
  auto [p1, u1] = polar(u);
  CHECK(operator_norm(p1 - ComplexMatrix::Identity(5, 5)) <= 1e-12);
  CHECK(operator_norm(u1 - u) <= 1e-12);

  auto [p2, u2] = polar(ComplexMatrix(2.0 * ComplexMatrix::Identity(4, 4)));
  CHECK(operator_norm(p2 - 2.0 * ComplexMatrix::Identity(4, 4)) <= 1e-12);
  CHECK(operator_norm(u2 - ComplexMatrix::Identity(4, 4)) <= 1e-12);

  ComplexMatrix clock = ComplexMatrix::Zero(4, 4);
  for (int m = 0; m < 4; ++m)
    clock(m, m) = std::exp(complexd(0.0, 2.0 * M_PI * m / 4.0));
  auto [p3, u3] = polar(ComplexMatrix((1.0 + 1e-3) * clock));
  CHECK(operator_norm(u3 - clock) <= 1e-12);
  CHECK(operator_norm(p3 - (1.0 + 1e-3) * ComplexMatrix::Identity(4, 4)) <= 1e-12);
}

TEST_CASE("polar reconstructs and rejects near-singular input") {
  Rng rng(41);
  ComplexMatrix a(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) a(i, j) = rng.normal_complex();
  a += 3.0 * ComplexMatrix::Identity(6, 6); // keep it well-conditioned
  auto [p, u] = polar(a);
  CHECK(operator_norm(a - p * u) <= 1e-10 * operator_norm(a));
  CHECK(unitary_defect(u) <= 1e-10);
  CHECK(hermitian_defect(p) <= 1e-10 * operator_norm(p));

  ComplexMatrix sing = ComplexMatrix::Zero(3, 3);
  sing(0, 0) = 1.0;
  CHECK_THROWS_AS(polar(sing), Error);
}

TEST_CASE("quasimode on a two-level diagonal") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(1, 1) = 1.0;
  ComplexVector e1(2);
  e1 << 1.0, 0.0;

  auto r = quasimode(a, e1, 0.0, 0.5);
  CHECK(r.lambda == complexd(0.0, 0.0));
  CHECK(r.bound == 0.0);
  CHECK(r.cluster_dim == 1);
  CHECK((r.unit_vector - e1).norm() <= 1e-14);

  auto r2 = quasimode(a, e1, 0.4, 0.5);
  CHECK(r2.lambda == complexd(0.0, 0.0));
  CHECK(r2.w_norm == doctest::Approx(0.4));
  CHECK(std::abs(r2.lambda - complexd(0.4, 0.0)) <= r2.bound + 1e-15);
}

TEST_CASE("quasimode inequalities hold verbatim, brute-forced over the spectrum") {
  Rng rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 10;
    const ComplexMatrix a = random_hermitian(rng, n, 3.0);
    auto dec = hermitian_eig(a);
    const Eigen::Index pick = static_cast<Eigen::Index>(rng.next_u64() % n);
    ComplexVector noise(n);
    for (Eigen::Index i = 0; i < n; ++i) noise[i] = rng.normal_complex();
    noise -= dec.basis.col(pick).dot(noise) * dec.basis.col(pick);
    noise *= 1e-3 / noise.norm();
    const ComplexVector v = dec.basis.col(pick) + noise;
    const complexd alpha = dec.eigenvalues[pick];
    double gap = 1e9;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != pick) gap = std::min(gap, std::abs(dec.eigenvalues[j] - alpha));
    if (gap < 1e-6) continue; // skip accidental near-degeneracy
    const double delta = gap / 2.0;

    auto r = quasimode(a, v, alpha, delta);
    // Brute-force check of the eigenvalue bound over the full spectrum.
    double nearest = 1e9;
    for (Eigen::Index j = 0; j < n; ++j)
      nearest = std::min(nearest, std::abs(dec.eigenvalues[j] - alpha));
    CHECK(std::abs(r.lambda - alpha) == doctest::Approx(nearest).epsilon(1e-12));
    CHECK(std::abs(r.lambda - alpha) <= r.bound + 1e-15);
    CHECK(r.projection_error <= 2.0 * r.w_norm / delta + 1e-15);
    CHECK(std::abs(r.unit_vector.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("quasimode reports an empty cluster") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(1, 1) = 1.0;
  ComplexVector v(2);
  v << 1.0, 0.0;
  CHECK_THROWS_AS(quasimode(a, v, complexd(0.5, 0.0), 0.25), Error);
  try {
    quasimode(a, v, complexd(0.5, 0.0), 0.25);
  } catch (const Error& e) {
    CHECK(e.code() == errc::cluster_empty);
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("exp_i_hermitian produces a unitary") {
  Rng rng(71);
  const ComplexMatrix h = random_hermitian(rng, 7, 2.0);
  const ComplexMatrix u = exp_i_hermitian(h);
  CHECK(unitary_defect(u) <= 1e-11);
}

TEST_CASE("cmx round trip in both formats") {
  Rng rng(83);
  ComplexMatrix a(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) a(i, j) = rng.normal_complex();

  const auto dir = std::filesystem::temp_directory_path() / "repstab_cmx_test";
  std::filesystem::create_directories(dir);
  const std::string jpath = (dir / "a.cmx").string();
  const std::string bpath = (dir / "a.cmxb").string();

  cmx::save(jpath, a, cmx::Format::json);
  cmx::save(bpath, a, cmx::Format::binary);
  const ComplexMatrix aj = cmx::load(jpath);
  const ComplexMatrix ab = cmx::load(bpath);
  CHECK(operator_norm(a - aj) <= 1e-13 * operator_norm(a));
  CHECK(operator_norm(a - ab) == 0.0); // binary is exact

  // Deterministic JSON text.
  CHECK(cmx::to_json_text(a) == cmx::to_json_text(aj));

  std::ofstream bad(dir / "bad.cmx");
  bad << "{\"rows\": 2, \"cols\": 2, \"data\": [1, 0]}";
  bad.close();
  CHECK_THROWS_AS(cmx::load((dir / "bad.cmx").string()), Error);
}
