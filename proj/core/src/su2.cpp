#include "repstab/su2.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "repstab/cmx.hpp"
#include "repstab/errors.hpp"

namespace repstab::su2 {

Su2Irrep build_exact_su2(Eigen::Index n) {
  if (n < 1) fail(errc::dimension, "build_exact_su2: n must be >= 1");
  const double casimir = (static_cast<double>(n) * n - 1.0) / 4.0;
  ComplexMatrix x3 = ComplexMatrix::Zero(n, n);
  ComplexMatrix yp = ComplexMatrix::Zero(n, n);
  ComplexMatrix ym = ComplexMatrix::Zero(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const double lam = static_cast<double>(p) - (n - 1) / 2.0;
    x3(p, p) = complexd(0.0, lam);
    if (p + 1 < n) yp(p + 1, p) = -std::sqrt(casimir - lam * lam - lam);
    if (p > 0) ym(p - 1, p) = std::sqrt(casimir - lam * lam + lam);
  }
  Su2Irrep rep;
  rep.n = n;
  rep.X3 = std::move(x3);
  rep.X1 = complexd(0.0, 0.5) * (ym - yp);
  rep.X2 = 0.5 * (ym + yp);
  rep.basis = ComplexMatrix::Identity(n, n);
  return rep;
}

void validate(const Su2Triple& t, const LinalgOptions& opts) {
  require_square(t.x1, "su2 triple");
  require_square(t.x2, "su2 triple");
  require_square(t.x3, "su2 triple");
  if (t.x1.rows() != t.x2.rows() || t.x1.rows() != t.x3.rows())
    fail(errc::dimension, "su2 triple: generators must share one dimension");
  if (t.k < 1) fail(errc::validation, "su2 triple: k must be a positive integer");
  for (const ComplexMatrix* x : {&t.x1, &t.x2, &t.x3}) {
    const double defect = skew_hermitian_defect(*x);
    if (defect > opts.hermitian_tol * (1.0 + operator_norm(*x)))
      fail(errc::contract, "su2 triple: generator is not skew-Hermitian to tolerance");
  }
}

Su2Defects su2_defects(const Su2Triple& t) {
  validate(t);
  const Eigen::Index n = t.x1.rows();
  const double kk = static_cast<double>(t.k);
  ComplexMatrix cas = t.x1 * t.x1 + t.x2 * t.x2 + t.x3 * t.x3 +
                      (kk * kk / 4.0 + kk * t.c / 2.0) * ComplexMatrix::Identity(n, n);
  Su2Defects d;
  d.r1 = operator_norm(cas);
  double worst = 0.0;
  const ComplexMatrix* xs[3] = {&t.x1, &t.x2, &t.x3};
  for (int j = 0; j < 3; ++j) {
    const ComplexMatrix& a = *xs[j];
    const ComplexMatrix& b = *xs[(j + 1) % 3];
    const ComplexMatrix& c = *xs[(j + 2) % 3];
    worst = std::max(worst, operator_norm(a * b - b * a - c));
  }
  d.r2 = kk * worst;
  d.dim = n;
  return d;
}

std::pair<ComplexMatrix, ComplexMatrix> ladder(const Su2Triple& t) {
  const complexd i(0.0, 1.0);
  return {i * t.x1 + t.x2, -i * t.x1 + t.x2};
}

namespace {

// Deterministic phase fix: largest-modulus entry made real positive.
void fix_leading_phase(ComplexVector& v) {
  Eigen::Index best = 0;
  double mag = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > mag) {
      mag = std::abs(v[i]);
      best = i;
    }
  if (mag > 0.0) v *= std::conj(v[best]) / mag;
}

Eigen::Index nearest_index(const ComplexVector& vals, complexd alpha) {
  Eigen::Index best = 0;
  double dist = std::abs(vals[0] - alpha);
  for (Eigen::Index j = 1; j < vals.size(); ++j) {
    const double d = std::abs(vals[j] - alpha);
    if (d < dist) {
      dist = d;
      best = j;
    }
  }
  return best;
}

} // namespace

Su2StabilizationReport stabilize_su2(const Su2Triple& t, const Su2StabilizeOptions& opts) {
  validate(t, opts.linalg);
  const Eigen::Index n = t.x1.rows();
  const double kc = t.k + t.c;
  if (static_cast<double>(n) > 2.0 * kc - 1.0)
    fail(errc::inconsistency,
         "stabilize_su2: dim H = " + std::to_string(n) + " violates dim <= 2(k+c)-1");
  if (std::abs(t.c - std::round(t.c)) > opts.c_integrality)
    fail(errc::inconsistency, "stabilize_su2: c = " + std::to_string(t.c) +
                                  " is not within " + std::to_string(opts.c_integrality) +
                                  " of an integer");
  const Eigen::Index n_expected = t.k + static_cast<Eigen::Index>(std::llround(t.c));

  auto [yp, ym] = ladder(t);
  const complexd i(0.0, 1.0);
  SpectralDecomposition dec = hermitian_eig(ComplexMatrix(-i * t.x3), opts.linalg);

  // Step 1: descend from the top eigenvalue with y_-.
  std::vector<Eigen::Index> claimed;
  claimed.reserve(static_cast<std::size_t>(n));
  std::set<Eigen::Index> seen;
  std::vector<ComplexVector> chain;
  std::vector<double> chain_vals;

  Eigen::Index top = n - 1; // ascending order
  ComplexVector e = dec.basis.col(top);
  fix_leading_phase(e);
  claimed.push_back(top);
  seen.insert(top);
  chain.push_back(e);
  chain_vals.push_back(dec.eigenvalues[top].real());

  for (Eigen::Index step = 1; step < n; ++step) {
    const ComplexVector v = ym * chain.back();
    const complexd alpha(chain_vals.back() - 1.0, 0.0);
    QuasimodeResult qm;
    try {
      qm = quasimode(dec, v, alpha, opts.window);
    } catch (const Error& err) {
      if (err.code() == errc::cluster_empty)
        fail(errc::chain_break,
             "stabilize_su2: chain break at step " + std::to_string(step) + ": " + err.what());
      throw;
    }
    const Eigen::Index idx = nearest_index(dec.eigenvalues, alpha);
    if (seen.count(idx))
      fail(errc::inconsistency, "stabilize_su2: chain slot " + std::to_string(step) +
                                    " claims an already-claimed eigenvalue " +
                                    std::to_string(dec.eigenvalues[idx].real()));
    seen.insert(idx);
    claimed.push_back(idx);
    ComplexVector next = qm.unit_vector;
    // Step 3 phase convention: <y_- e_m, e_{m-1}> real >= 0.
    const complexd z = v.dot(next);
    if (std::abs(z) > 0.0) next *= std::conj(z) / std::abs(z);
    chain.push_back(next);
    chain_vals.push_back(dec.eigenvalues[idx].real());
  }

  // Step 2: the chain must exhaust the space and match the declared (k, c).
  if (n != n_expected) {
    std::ostringstream msg;
    msg << "stabilize_su2: dim H = " << n << " but k + c = " << n_expected;
    fail(errc::inconsistency, msg.str());
  }

  // Assemble the exact representation in the recovered chain basis
  // (chain runs top-down; canonical order is ascending).
  ComplexMatrix basis(n, n);
  for (Eigen::Index m = 0; m < n; ++m) basis.col(n - 1 - m) = chain[static_cast<std::size_t>(m)];
  Su2Irrep canonical = build_exact_su2(n);

  Su2StabilizationReport report;
  report.inferred_dim_ok = true;
  report.rep.n = n;
  report.rep.basis = basis;
  report.rep.X1 = basis * canonical.X1 * basis.adjoint();
  report.rep.X2 = basis * canonical.X2 * basis.adjoint();
  report.rep.X3 = basis * canonical.X3 * basis.adjoint();
  report.distances = {operator_norm(t.x1 - report.rep.X1), operator_norm(t.x2 - report.rep.X2),
                      operator_norm(t.x3 - report.rep.X3)};
  report.chain_eigenvalues = chain_vals;
  const Su2Defects d = su2_defects(t);
  report.residual_r1 = d.r1;
  report.residual_r2 = d.r2;
  const double n1 = operator_norm(t.x1), n2 = operator_norm(t.x2), n3 = operator_norm(t.x3);
  report.norm_window = {std::min({n1, n2, n3}), std::max({n1, n2, n3})};
  return report;
}

double su2_distance(const Su2Triple& t, const Su2Irrep& rep) {
  if (t.x1.rows() != rep.X1.rows())
    fail(errc::dimension, "su2_distance: dimension mismatch");
  return std::max({operator_norm(t.x1 - rep.X1), operator_norm(t.x2 - rep.X2),
                   operator_norm(t.x3 - rep.X3)});
}

std::string report_to_json_text(const Su2StabilizationReport& r) {
  nlohmann::json j;
  j["inferred_dim_ok"] = r.inferred_dim_ok;
  j["n"] = r.rep.n;
  j["distances"] = r.distances;
  j["chain_eigenvalues"] = r.chain_eigenvalues;
  j["residual_r1"] = r.residual_r1;
  j["residual_r2"] = r.residual_r2;
  j["norm_window"] = {r.norm_window.first, r.norm_window.second};
  j["rep"] = {{"X1", nlohmann::json::parse(cmx::to_json_text(r.rep.X1))},
              {"X2", nlohmann::json::parse(cmx::to_json_text(r.rep.X2))},
              {"X3", nlohmann::json::parse(cmx::to_json_text(r.rep.X3))},
              {"basis", nlohmann::json::parse(cmx::to_json_text(r.rep.basis))}};
  return j.dump(2);
}

} // namespace repstab::su2
