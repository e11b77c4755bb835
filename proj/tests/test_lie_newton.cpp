#include <doctest.h>

#include <cmath>
#include <numbers>

#include "repstab/errors.hpp"
#include "repstab/lie_newton.hpp"
#include "repstab/linalg.hpp"
#include "repstab/rng.hpp"
#include "repstab/su2.hpp"

using namespace repstab;
using namespace repstab::lie;

namespace {

// Exact spin-(d-1)/2 images of the Killing-normalized su(2) basis.
std::vector<ComplexMatrix> spin_images(Eigen::Index d) {
  const su2::Su2Irrep rep = su2::build_exact_su2(d);
  const double s = 1.0 / std::sqrt(2.0);
  return {s * rep.X1, s * rep.X2, s * rep.X3};
}

ComplexMatrix traceless_skew_noise(Rng& rng, Eigen::Index d, double scale) {
  ComplexMatrix m = random_skew_hermitian(rng, d, scale);
  m -= (m.trace() / static_cast<double>(d)) * ComplexMatrix::Identity(d, d);
  return m;
}

AlmostRep perturbed_spin(Eigen::Index d, double scale, Rng& rng) {
  auto imgs = spin_images(d);
  for (auto& x : imgs) x += traceless_skew_noise(rng, d, scale);
  return make_almost_rep(su2_killing_normalized(), std::move(imgs));
}

} // namespace

TEST_CASE("make_lie_algebra accepts the normalized su(2) constants") {
  const LieAlgebraData g = su2_killing_normalized();
  CHECK_NOTHROW(make_lie_algebra(3, g.tensor()));
}

TEST_CASE("make_lie_algebra rejects the unnormalized epsilon tensor") {
  std::vector<double> c(27, 0.0);
  auto set = [&](int i, int j, int l, double v) {
    c[static_cast<std::size_t>((i * 3 + j) * 3 + l)] = v;
  };
  // Raw structure constants of [L_i, L_j] = L_l: Killing form is -2 delta.
  set(0, 1, 2, 1.0);
  set(1, 0, 2, -1.0);
  set(1, 2, 0, 1.0);
  set(2, 1, 0, -1.0);
  set(2, 0, 1, 1.0);
  set(0, 2, 1, -1.0);
  try {
    make_lie_algebra(3, c);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::validation);
    CHECK(std::string(e.what()).find("-2") != std::string::npos);
  }
  CHECK_THROWS_AS(make_lie_algebra(3, std::vector<double>(27, 0.0)), Error);
}

TEST_CASE("defect tensor vanishes on genuine representations") {
  for (Eigen::Index d : {2, 3, 5}) {
    const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(d));
    const auto alpha = defect_tensor(t);
    for (const auto& row : alpha)
      for (const auto& a : row) CHECK(operator_norm(a) <= 1e-10);
    CHECK(t.eps <= 1e-10);
  }
}

TEST_CASE("defect tensor is exactly antisymmetric and vanishes for zero images") {
  Rng rng(2);
  std::vector<ComplexMatrix> imgs;
  for (int i = 0; i < 3; ++i) imgs.push_back(traceless_skew_noise(rng, 4, 1.0));
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), imgs);
  const auto alpha = defect_tensor(t);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(operator_norm(alpha[j][k] + alpha[k][j]) == 0.0);

  std::vector<ComplexMatrix> zeros(3, ComplexMatrix::Zero(4, 4));
  const AlmostRep z = make_almost_rep(su2_killing_normalized(), zeros);
  for (const auto& row : defect_tensor(z))
    for (const auto& a : row) CHECK(operator_norm(a) == 0.0);
}

TEST_CASE("defect scale tracks the injected noise") {
  // Ensemble statistic: eps within a factor 4 of noise * K.
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Rng rng = Rng::split(seed, 31);
    const double scale = 1e-3;
    const AlmostRep t = perturbed_spin(5, scale, rng);
    const double ratio = t.eps / (scale * t.K);
    if (ratio >= 0.25 && ratio <= 4.0) ++inside;
  }
  CHECK(inside >= 5);
}

TEST_CASE("almost-Casimir is the identity for the defining representation") {
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(2));
  const CasimirOperator gamma = almost_casimir(t);
  CHECK(gamma.dim_space == 3);
  // Brute-force 3x3 comparison against the identity.
  CHECK((gamma.matrix - RealMatrix::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("almost-Casimir vanishes for zero images and is PSD") {
  std::vector<ComplexMatrix> zeros(3, ComplexMatrix::Zero(3, 3));
  const AlmostRep z = make_almost_rep(su2_killing_normalized(), zeros);
  CHECK(almost_casimir(z).matrix.norm() == 0.0);

  Rng rng(13);
  std::vector<ComplexMatrix> imgs;
  for (int i = 0; i < 3; ++i) imgs.push_back(traceless_skew_noise(rng, 4, 1.0));
  const CasimirOperator gamma = almost_casimir(make_almost_rep(su2_killing_normalized(), imgs));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gamma.matrix);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  CHECK((gamma.matrix - gamma.matrix.transpose()).norm() <= 1e-9);
}

TEST_CASE("smallest Casimir eigenvalue is 1 on every exact irrep") {
  for (Eigen::Index d = 2; d <= 6; ++d) {
    const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(d));
    const CasimirOperator gamma = almost_casimir(t);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(gamma.matrix);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("mu_K_eps on the defining representation and under small noise") {
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(2));
  const MuKEps s = mu_K_eps(t);
  CHECK(s.mu == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.lambda_min == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.mu <= s.mu_upper + 1e-12);

  Rng rng = Rng::split(4, 4);
  const AlmostRep noisy = perturbed_spin(2, 1e-4, rng);
  const MuKEps sn = mu_K_eps(noisy);
  CHECK(std::abs(sn.mu - s.mu) <= 0.1 * s.mu);
}

TEST_CASE("block-diagonal sums trigger the reducibility error") {
  const auto small = spin_images(3);
  std::vector<ComplexMatrix> imgs;
  for (const auto& x : small) {
    ComplexMatrix big = ComplexMatrix::Zero(6, 6);
    big.topLeftCorner(3, 3) = x;
    big.bottomRightCorner(3, 3) = x;
    imgs.push_back(big);
  }
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), imgs);
  CHECK(std::isnan(t.mu));
  CHECK_THROWS_AS(mu_K_eps(t), Error);
  try {
    mu_K_eps(t);
  } catch (const Error& e) {
    CHECK(e.code() == errc::reducibility);
  }
}

TEST_CASE("newton correction is a no-op on genuine representations") {
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(4));
  const NewtonStep step = newton_correction(t);
  for (const auto& a : step.correction) CHECK(operator_norm(a) <= 1e-9);
  CHECK(step.next.eps <= 1e-9);
}

TEST_CASE("newton correction contracts quadratically") {
  Rng rng = Rng::split(7, 1);
  const AlmostRep t = perturbed_spin(3, 1e-3, rng);
  const NewtonStep step = newton_correction(t);
  // eps(next) <= C eps^2 with the frozen ensemble constant.
  const double frozen_c = 20.0;
  CHECK(step.next.eps <= frozen_c * t.eps * t.eps);

  // Halving the defect roughly quarters the next-step defect.
  Rng rng_a = Rng::split(8, 2);
  Rng rng_b = Rng::split(8, 2);
  const AlmostRep ta = perturbed_spin(3, 1e-3, rng_a);
  const AlmostRep tb = perturbed_spin(3, 0.5e-3, rng_b);
  const double ra = newton_correction(ta).next.eps;
  const double rb = newton_correction(tb).next.eps;
  CHECK(ra / rb >= 2.0);
  CHECK(ra / rb <= 8.0);
}

TEST_CASE("newton_stabilize converges in zero iterations on genuine input") {
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(5));
  const NewtonResult res = newton_stabilize(t);
  CHECK(res.converged);
  CHECK(res.history.size() == 1);
  CHECK(res.final_distance == 0.0);
}

TEST_CASE("newton_stabilize reaches the floor with quadratic history") {
  Rng rng = Rng::split(12, 0);
  const AlmostRep t = perturbed_spin(5, 1e-4, rng);
  const NewtonResult res = newton_stabilize(t);
  CHECK(res.converged);
  CHECK(res.rep.eps <= 1e-12);
  const double frozen_c = 20.0;
  for (std::size_t i = 0; i + 1 < res.history.size(); ++i) {
    const double e0 = res.history[i][2], e1 = res.history[i + 1][2];
    if (e1 > 1e-12) CHECK(e1 <= frozen_c * e0 * e0);
  }
  // Distance bound c * mu K eps with the frozen ensemble constant.
  const double frozen_dist_c = 5.0;
  CHECK(res.final_distance <= frozen_dist_c * res.initial_mu_k_eps);

  // Final output is a representation: defects at the floor.
  const auto alpha = defect_tensor(res.rep);
  for (const auto& row : alpha)
    for (const auto& a : row) CHECK(operator_norm(a) <= 1e-12);
}

TEST_CASE("newton_stabilize fails honestly far above the threshold") {
  Rng rng = Rng::split(13, 13);
  const AlmostRep t = perturbed_spin(3, 1.0, rng);
  try {
    const NewtonResult res = newton_stabilize(t, 1e-12, 12);
    // Converging to some other representation is acceptable; the report
    // must be honest about the final defect.
    CHECK(res.rep.eps <= 1e-12);
  } catch (const DivergenceError& e) {
    CHECK(!e.partial().history.empty());
    CHECK(e.partial().rep.eps > 1e-12);
    CHECK(e.partial().history.back()[2] == e.partial().rep.eps);
  }
}

TEST_CASE("projector identity is exact for random data") {
  Rng rng(55);
  for (int repi = 0; repi < 10; ++repi) {
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    std::vector<ComplexMatrix> imgs;
    for (int i = 0; i < 3; ++i) imgs.push_back(traceless_skew_noise(rng, d, 1.0));
    const AlmostRep t = make_almost_rep(su2_killing_normalized(), imgs);
    for (int p = 0; p < 100; ++p) {
      const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.next_u64() % (d - 1));
      const ComplexMatrix proj = random_projector(rng, d, rank);
      const auto [lhs, rhs] = projector_identity_check(t, proj);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + rhs));
    }
  }
}

TEST_CASE("projector identity edge cases and contract") {
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(4));
  const auto [l0, r0] = projector_identity_check(t, ComplexMatrix::Zero(4, 4));
  CHECK(std::abs(l0) <= 1e-12);
  CHECK(r0 == 0.0);
  const auto [l1, r1] = projector_identity_check(t, ComplexMatrix::Identity(4, 4));
  CHECK(std::abs(l1) <= 1e-12);
  CHECK(r1 == 0.0);

  ComplexMatrix notp = 0.5 * ComplexMatrix::Identity(4, 4);
  CHECK_THROWS_AS(projector_identity_check(t, notp), Error);
}

TEST_CASE("irreducibility magnitude separates reducible and irreducible data") {
  // Reducible block sum: both lambda1 and d_upper at the floor.
  const auto small = spin_images(2);
  std::vector<ComplexMatrix> imgs;
  for (const auto& x : small) {
    ComplexMatrix big = ComplexMatrix::Zero(4, 4);
    big.topLeftCorner(2, 2) = x;
    big.bottomRightCorner(2, 2) = 0.7 * x; // inequivalent blocks, still invariant
    imgs.push_back(big);
  }
  // Re-balance tracelessness (blocks are traceless already).
  const AlmostRep red = make_almost_rep(su2_killing_normalized(), imgs);
  const IrreducibilityMagnitude mr = irreducibility_magnitude(red);
  CHECK(mr.lambda1 <= 1e-9);
  CHECK(mr.d_upper <= 1e-9);

  // Exact spin-2: comfortably irreducible.
  const AlmostRep five = make_almost_rep(su2_killing_normalized(), spin_images(5));
  const IrreducibilityMagnitude m5 = irreducibility_magnitude(five);
  CHECK(m5.d_upper > 0.1);
  CHECK(m5.lambda1 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spin-1/2 magnitude matches the Bloch-sphere brute force") {
  const AlmostRep t = make_almost_rep(su2_killing_normalized(), spin_images(2));
  const IrreducibilityMagnitude m = irreducibility_magnitude(t);

  // Brute force over rank-1 projectors (I + n.sigma)/2 on a 1e-3 grid.
  double best = 1e300;
  const double step = 1e-3;
  const int nth = static_cast<int>(std::numbers::pi / step);
  for (int it = 0; it <= nth; ++it) {
    const double th = it * step;
    const int nph = std::max(1, static_cast<int>(2.0 * std::numbers::pi * std::sin(th) / step));
    for (int ip = 0; ip < nph; ++ip) {
      const double ph = 2.0 * std::numbers::pi * ip / nph;
      ComplexVector p(2);
      p << std::cos(th / 2.0), std::exp(complexd(0.0, ph)) * std::sin(th / 2.0);
      double worst = 0.0;
      for (const auto& x : t.images) {
        const ComplexVector v = x * p;
        const ComplexVector w = v - p.dot(v) * p;
        worst = std::max(worst, w.norm());
      }
      best = std::min(best, worst);
    }
  }
  CHECK(m.d_upper * m.d_upper <= 100.0 * m.lambda1);
  CHECK(m.lambda1 <= 100.0 * best * best);
  // d_upper is an upper bound on the brute-forced minimum, and not far off.
  CHECK(m.d_upper >= best - 1e-6);
  CHECK(m.d_upper <= 2.0 * best);
}

TEST_CASE("newton report serializes to JSON") {
  Rng rng = Rng::split(3, 3);
  const AlmostRep t = perturbed_spin(3, 1e-5, rng);
  const NewtonResult res = newton_stabilize(t);
  const std::string text = newton_report_to_json_text(res);
  CHECK(text.find("history") != std::string::npos);
  CHECK(text.find("final_distance") != std::string::npos);
}
