#include <doctest.h>

#include <cmath>

#include "repstab/errors.hpp"
#include "repstab/linalg.hpp"
#include "repstab/rng.hpp"
#include "repstab/su2.hpp"

using namespace repstab;
using namespace repstab::su2;

namespace {

double commutation_defect(const Su2Irrep& rep) {
  const ComplexMatrix* xs[3] = {&rep.X1, &rep.X2, &rep.X3};
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    const ComplexMatrix& a = *xs[j];
    const ComplexMatrix& b = *xs[(j + 1) % 3];
    const ComplexMatrix& c = *xs[(j + 2) % 3];
    worst = std::max(worst, operator_norm(a * b - b * a - c));
  }
  return worst;
}

double casimir_defect(const Su2Irrep& rep) {
  const double n = static_cast<double>(rep.n);
  return operator_norm(rep.X1 * rep.X1 + rep.X2 * rep.X2 + rep.X3 * rep.X3 +
                       ((n * n - 1.0) / 4.0) * ComplexMatrix::Identity(rep.n, rep.n));
}

Su2Triple triple_from(const Su2Irrep& rep, int k, double c) {
  return Su2Triple{rep.X1, rep.X2, rep.X3, k, c};
}

} // namespace

TEST_CASE("exact irrep for n = 1 and n = 2") {
  const Su2Irrep one = build_exact_su2(1);
  CHECK(operator_norm(one.X1) == 0.0);
  CHECK(operator_norm(one.X2) == 0.0);
  CHECK(operator_norm(one.X3) == 0.0);

  const Su2Irrep two = build_exact_su2(2);
  CHECK(two.X3(0, 0) == complexd(0.0, -0.5));
  CHECK(two.X3(1, 1) == complexd(0.0, 0.5));
  // Ladder actions in the chain basis: Y- e2 = e1 and Y+ e1 = -e2.
  const Su2Triple t = triple_from(two, 2, 0.0);
  auto [yp, ym] = ladder(t);
  ComplexVector e1 = ComplexVector::Zero(2), e2 = ComplexVector::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  CHECK((ym * e2 - e1).norm() <= 1e-14);
  CHECK((yp * e1 + e2).norm() <= 1e-14);
  CHECK(casimir_defect(two) <= 1e-14);

  CHECK_THROWS_AS(build_exact_su2(0), Error);
}

TEST_CASE("exact irrep invariants at n = 5") {
  const Su2Irrep rep = build_exact_su2(5);
  CHECK(commutation_defect(rep) <= 1e-10);
  CHECK(casimir_defect(rep) <= 1e-9);
  for (const ComplexMatrix* x : {&rep.X1, &rep.X2, &rep.X3})
    CHECK(skew_hermitian_defect(*x) <= 1e-12);
}

TEST_CASE("su2 defects on exact, zero and mis-declared inputs") {
  const int k = 16;
  const Su2Irrep rep = build_exact_su2(k);
  const Su2Defects d = su2_defects(triple_from(rep, k, 0.0));
  CHECK(d.r1 == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(d.r2 <= 16 * 1e-12);
  CHECK(d.dim == k);

  Su2Triple zero{ComplexMatrix::Zero(4, 4), ComplexMatrix::Zero(4, 4), ComplexMatrix::Zero(4, 4),
                 4, 0.0};
  const Su2Defects dz = su2_defects(zero);
  CHECK(dz.r1 == doctest::Approx(4.0));
  CHECK(dz.r2 == 0.0);

  const Su2Irrep big = build_exact_su2(64);
  const Su2Defects dc = su2_defects(triple_from(big, 64, 0.5));
  CHECK(dc.r1 == doctest::Approx(16.25).epsilon(1e-10));
}

TEST_CASE("ladder operators satisfy y_+^* = -y_-") {
  Rng rng(3);
  Su2Triple t{random_skew_hermitian(rng, 6, 1.0), random_skew_hermitian(rng, 6, 1.0),
              random_skew_hermitian(rng, 6, 1.0), 6, 0.0};
  auto [yp, ym] = ladder(t);
  CHECK(operator_norm(yp.adjoint() + ym) <= 1e-13);

  Su2Triple z{ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3), 3,
              0.0};
  auto [zp, zm] = ladder(z);
  CHECK(operator_norm(zp) == 0.0);
  CHECK(operator_norm(zm) == 0.0);
}

TEST_CASE("stabilize_su2 fixed point on exact irreps") {
  for (int n : {2, 3, 5, 16, 33}) {
    const Su2Irrep rep = build_exact_su2(n);
    const auto report = stabilize_su2(triple_from(rep, n, 0.0));
    CHECK(report.inferred_dim_ok);
    for (double d : report.distances) CHECK(d <= 1e-9);
    CHECK(static_cast<int>(report.chain_eigenvalues.size()) == n);
    for (int m = 0; m < n; ++m)
      CHECK(report.chain_eigenvalues[static_cast<std::size_t>(m)] ==
            doctest::Approx((n - 1) / 2.0 - m).epsilon(1e-12));
    CHECK(casimir_defect(report.rep) <= 1e-9);
  }
}

TEST_CASE("stabilize_su2 recovers perturbed irreps") {
  const int k = 32;
  const Su2Irrep rep = build_exact_su2(k);
  Rng rng = Rng::split(2024, 1);
  const double scale = 1.0 / (static_cast<double>(k) * k);
  Su2Triple t{rep.X1 + random_skew_hermitian(rng, k, scale),
              rep.X2 + random_skew_hermitian(rng, k, scale),
              rep.X3 + random_skew_hermitian(rng, k, scale), k, 0.0};
  const auto report = stabilize_su2(t);
  CHECK(report.inferred_dim_ok);
  for (double d : report.distances) CHECK(d <= 0.1);
  // Report distance agrees with su2_distance against the returned rep.
  const double dist = su2_distance(t, report.rep);
  CHECK(dist == doctest::Approx(std::max({report.distances[0], report.distances[1],
                                          report.distances[2]}))
                    .epsilon(1e-12));
}

TEST_CASE("stabilize_su2 rejects a two-block direct sum at the R3 boundary") {
  const int k = 16;
  const Su2Irrep rep = build_exact_su2(k);
  const Eigen::Index n = 2 * k;
  auto embed = [&](const ComplexMatrix& x) {
    ComplexMatrix big = ComplexMatrix::Zero(n, n);
    big.topLeftCorner(k, k) = x;
    big.bottomRightCorner(k, k) = x;
    return big;
  };
  Su2Triple t{embed(rep.X1), embed(rep.X2), embed(rep.X3), k, 0.0};
  CHECK_THROWS_AS(stabilize_su2(t), Error);
  try {
    stabilize_su2(t);
  } catch (const Error& e) {
    CHECK(e.code() == errc::inconsistency);
  }
}

TEST_CASE("stabilize_su2 rejects non-integral declared c") {
  const int k = 16;
  const Su2Irrep rep = build_exact_su2(k);
  CHECK_THROWS_AS(stabilize_su2(triple_from(rep, k, 0.5)), Error);
}

TEST_CASE("stabilize_su2 reports inconsistent dimension") {
  const Su2Irrep rep = build_exact_su2(16);
  try {
    stabilize_su2(triple_from(rep, 17, 0.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::inconsistency);
  }
}

TEST_CASE("stabilize_su2 distances are equivariant under conjugation") {
  const int k = 12;
  const Su2Irrep rep = build_exact_su2(k);
  Rng rng = Rng::split(99, 5);
  const double scale = 0.5 / (static_cast<double>(k) * k);
  Su2Triple t{rep.X1 + random_skew_hermitian(rng, k, scale),
              rep.X2 + random_skew_hermitian(rng, k, scale),
              rep.X3 + random_skew_hermitian(rng, k, scale), k, 0.0};
  const ComplexMatrix v = random_unitary(rng, k);
  Su2Triple tc{v * t.x1 * v.adjoint(), v * t.x2 * v.adjoint(), v * t.x3 * v.adjoint(), k, 0.0};
  const auto r1 = stabilize_su2(t);
  const auto r2 = stabilize_su2(tc);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(r1.distances[static_cast<std::size_t>(j)] -
                   r2.distances[static_cast<std::size_t>(j)]) <= 1e-9);
  // The recovered reps are conjugate by the same v.
  CHECK(operator_norm(v * r1.rep.X3 * v.adjoint() - r2.rep.X3) <= 1e-8);
}

TEST_CASE("halving the perturbation does not degrade recovery") {
  const int k = 24;
  const Su2Irrep rep = build_exact_su2(k);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    double prev = -1.0;
    for (double eta : {1.0, 0.5}) {
      Rng rng = Rng::split(seed, 77); // same noise direction, halved scale
      const double scale = eta / (static_cast<double>(k) * k);
      Su2Triple t{rep.X1 + random_skew_hermitian(rng, k, scale),
                  rep.X2 + random_skew_hermitian(rng, k, scale),
                  rep.X3 + random_skew_hermitian(rng, k, scale), k, 0.0};
      const auto report = stabilize_su2(t);
      const double d =
          std::max({report.distances[0], report.distances[1], report.distances[2]});
      if (prev >= 0.0) CHECK(d <= 1.1 * prev);
      prev = d;
    }
  }
}

TEST_CASE("norm window brackets k/2 with the frozen constant") {
  // C1 frozen at 1.0: exact irreps have ||x_j|| = (n-1)/2 = k/2 - 1/2 and the
  // test ensemble perturbations are O(1/k).
  const double frozen_c1 = 1.0;
  for (int k : {8, 16, 32}) {
    const Su2Irrep rep = build_exact_su2(k);
    const auto report = stabilize_su2(Su2Triple{rep.X1, rep.X2, rep.X3, k, 0.0});
    CHECK(report.norm_window.first >= k / 2.0 - frozen_c1);
    CHECK(report.norm_window.second <= k / 2.0 + frozen_c1);
  }
}

TEST_CASE("su2_distance examples") {
  const Su2Irrep rep = build_exact_su2(8);
  CHECK(su2_distance(Su2Triple{rep.X1, rep.X2, rep.X3, 8, 0.0}, rep) == 0.0);

  Rng rng(15);
  const ComplexMatrix u = random_unitary(rng, 8);
  Su2Irrep conj = rep;
  conj.X1 = u * rep.X1 * u.adjoint();
  conj.X2 = u * rep.X2 * u.adjoint();
  conj.X3 = u * rep.X3 * u.adjoint();
  const double d = su2_distance(Su2Triple{rep.X1, rep.X2, rep.X3, 8, 0.0}, conj);
  const double direct = std::max({operator_norm(rep.X1 - conj.X1),
                                  operator_norm(rep.X2 - conj.X2),
                                  operator_norm(rep.X3 - conj.X3)});
  CHECK(d == doctest::Approx(direct).epsilon(1e-12));

  Su2Irrep small = build_exact_su2(4);
  CHECK_THROWS_AS(su2_distance(Su2Triple{rep.X1, rep.X2, rep.X3, 8, 0.0}, small), Error);
}

TEST_CASE("stabilization report serializes to JSON") {
  const Su2Irrep rep = build_exact_su2(4);
  const auto report = stabilize_su2(Su2Triple{rep.X1, rep.X2, rep.X3, 4, 0.0});
  const std::string text = report_to_json_text(report);
  CHECK(text.find("chain_eigenvalues") != std::string::npos);
  CHECK(text.find("distances") != std::string::npos);
}
