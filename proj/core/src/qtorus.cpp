#include "repstab/qtorus.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "repstab/cmx.hpp"
#include "repstab/errors.hpp"

namespace repstab::qtorus {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod_positive(double x, double m) {
  double r = std::fmod(x, m);
  if (r < 0.0) r += m;
  return r;
}
} // namespace

TorusIrrep build_exact_qtorus(Eigen::Index n, double theta1, double theta2) {
  if (n < 1) fail(errc::dimension, "build_exact_qtorus: n must be >= 1");
  TorusIrrep rep;
  rep.n = n;
  rep.theta1 = mod_positive(theta1, static_cast<double>(n));
  rep.theta2 = mod_positive(theta2, static_cast<double>(n));
  rep.X1 = ComplexMatrix::Zero(n, n);
  rep.X2 = ComplexMatrix::Zero(n, n);
  const double nn = static_cast<double>(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    rep.X1(m, m) = std::exp(complexd(0.0, kTwoPi * (rep.theta1 + m) / nn));
    rep.X2((m + 1) % n, m) = std::exp(complexd(0.0, kTwoPi * rep.theta2 / nn));
  }
  rep.basis = ComplexMatrix::Identity(n, n);
  return rep;
}

void validate(const TorusPair& t) {
  require_square(t.x1, "torus pair");
  require_square(t.x2, "torus pair");
  if (t.x1.rows() != t.x2.rows())
    fail(errc::dimension, "torus pair: generators must share one dimension");
  if (t.k < 1) fail(errc::validation, "torus pair: k must be a positive integer");
}

TorusDefects qtorus_defects(const TorusPair& t) {
  validate(t);
  const Eigen::Index n = t.x1.rows();
  const double k3 = std::pow(static_cast<double>(t.k), 3);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  TorusDefects d;
  d.r1 = k3 * std::max(operator_norm(t.x1 * t.x1.adjoint() - id),
                       operator_norm(t.x2 * t.x2.adjoint() - id));
  const complexd eps = std::exp(complexd(0.0, kTwoPi / (t.k + t.c)));
  d.r2 = k3 * operator_norm(t.x1 * t.x2 - eps * t.x2 * t.x1);
  d.dim = n;
  return d;
}

std::pair<TorusPair, double> unitarize(const TorusPair& t, const LinalgOptions& opts) {
  validate(t);
  TorusPair u = t;
  double drift = 0.0;
  for (ComplexMatrix* x : {&u.x1, &u.x2}) {
    auto [p, w] = polar(*x, opts);
    drift = std::max(drift, operator_norm(*x - w));
    *x = std::move(w);
  }
  return {std::move(u), drift};
}

namespace {
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

TorusStabilizationReport stabilize_qtorus(const TorusPair& t, const TorusStabilizeOptions& opts) {
  validate(t);
  const Eigen::Index n = t.x1.rows();
  const double kc = t.k + t.c;
  if (static_cast<double>(n) > 2.0 * kc - 1.0)
    fail(errc::inconsistency,
         "stabilize_qtorus: dim H = " + std::to_string(n) + " violates dim <= 2(k+c)-1");
  if (std::abs(t.c - std::round(t.c)) > opts.c_integrality)
    fail(errc::inconsistency,
         "stabilize_qtorus: c = " + std::to_string(t.c) + " is not near an integer");
  const Eigen::Index n_expected = t.k + static_cast<Eigen::Index>(std::llround(t.c));
  const double delta = opts.window > 0.0 ? opts.window : std::numbers::pi / (2.0 * t.k);

  auto [ut, drift] = unitarize(t, opts.linalg);
  SpectralDecomposition dec = normal_eig(ut.x1, opts.linalg);

  // Chain start: deterministic choice, the lexicographically largest eigenvalue.
  Eigen::Index start = n - 1;
  ComplexVector e = dec.basis.col(start);
  fix_leading_phase(e);

  std::set<Eigen::Index> seen{start};
  std::vector<ComplexVector> chain{e};
  std::vector<complexd> chain_vals{dec.eigenvalues[start] /
                                   std::abs(dec.eigenvalues[start])};
  const complexd step_phase = std::exp(complexd(0.0, kTwoPi / kc));

  for (Eigen::Index step = 1; step < n; ++step) {
    const ComplexVector v = ut.x2 * chain.back();
    const complexd alpha = chain_vals.back() * step_phase;
    QuasimodeResult qm;
    try {
      qm = quasimode(dec, v, alpha, delta);
    } catch (const Error& err) {
      if (err.code() == errc::cluster_empty)
        fail(errc::chain_break,
             "stabilize_qtorus: chain break at step " + std::to_string(step) + ": " + err.what());
      throw;
    }
    const Eigen::Index idx = nearest_index(dec.eigenvalues, alpha);
    if (seen.count(idx))
      fail(errc::inconsistency,
           "stabilize_qtorus: chain slot " + std::to_string(step) +
               " claims an already-claimed eigenvalue");
    seen.insert(idx);
    ComplexVector next = qm.unit_vector;
    // Successor phase: <x2 e_m, e_{m+1}> real >= 0.
    const complexd z = v.dot(next);
    if (std::abs(z) > 0.0) next *= std::conj(z) / std::abs(z);
    chain.push_back(next);
    chain_vals.push_back(dec.eigenvalues[idx] / std::abs(dec.eigenvalues[idx]));
  }

  if (n != n_expected) {
    std::ostringstream msg;
    msg << "stabilize_qtorus: dim H = " << n << " but k + c = " << n_expected;
    fail(errc::inconsistency, msg.str());
  }

  // Closing phase x2 e_{n-1} ~ e^{i theta} e_0, then the twist
  // f_m = e^{-i theta m / n} e_m makes the shift coefficient uniform.
  const complexd closing = chain.front().dot(ut.x2 * chain.back());
  const double theta = std::arg(closing);
  const double nn = static_cast<double>(n);

  ComplexMatrix basis(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    basis.col(m) = chain[static_cast<std::size_t>(m)] * std::exp(complexd(0.0, -theta * m / nn));

  const complexd lambda0 = chain_vals.front();
  TorusStabilizationReport report;
  report.rep.n = n;
  report.rep.theta1 = mod_positive(nn * std::arg(lambda0) / kTwoPi, nn);
  report.rep.theta2 = mod_positive(theta / kTwoPi, nn);
  report.rep.basis = basis;

  ComplexMatrix d1 = ComplexMatrix::Zero(n, n);
  ComplexMatrix s2 = ComplexMatrix::Zero(n, n);
  const complexd hop = std::exp(complexd(0.0, theta / nn));
  for (Eigen::Index m = 0; m < n; ++m) {
    d1(m, m) = lambda0 * std::exp(complexd(0.0, kTwoPi * m / nn));
    s2((m + 1) % n, m) = hop;
  }
  report.rep.X1 = basis * d1 * basis.adjoint();
  report.rep.X2 = basis * s2 * basis.adjoint();

  report.distances = {operator_norm(t.x1 - report.rep.X1), operator_norm(t.x2 - report.rep.X2)};
  const TorusDefects d = qtorus_defects(t);
  report.residual_r1 = d.r1;
  report.residual_r2 = d.r2;
  report.theta_extracted = theta;
  report.chain_eigenvalues = chain_vals;
  report.unitarize_drift = drift;
  return report;
}

ComplexMatrix lattice_intertwiner(const TorusIrrep& a, long m1, long m2) {
  const Eigen::Index n = a.n;
  ComplexMatrix w = ComplexMatrix::Identity(n, n);
  const ComplexMatrix x1inv = a.X1.adjoint(); // unitary
  const ComplexMatrix x2inv = a.X2.adjoint();
  for (long i = 0; i < std::labs(m1); ++i) w = (m1 > 0 ? a.X2 : x2inv) * w;
  for (long i = 0; i < std::labs(m2); ++i) w = (m2 > 0 ? x1inv : a.X1) * w;
  return w;
}

AlignResult align_qtorus(const TorusIrrep& a, const TorusIrrep& b) {
  if (a.n != b.n) fail(errc::dimension, "align_qtorus: dimensions differ");
  const Eigen::Index n = a.n;
  const double nn = static_cast<double>(n);

  ComplexMatrix u0 = a.basis * b.basis.adjoint();
  AlignResult res;
  for (int j = 0; j < 2; ++j) {
    const ComplexMatrix& ax = j == 0 ? a.X1 : a.X2;
    const ComplexMatrix& bx = j == 0 ? b.X1 : b.X2;
    const ComplexMatrix m = u0.adjoint() * ax * u0;
    // One least-squares pass: the Frobenius-optimal phase for b.X ~ e^{i phi} m.
    const complexd tr = (m.adjoint() * bx).trace();
    const double phi = std::arg(tr);
    res.p[j] = mod_positive(phi / kTwoPi, 1.0);
    const double resid = operator_norm(bx - std::exp(complexd(0.0, phi)) * m);
    if (resid > 1e-8)
      fail(errc::not_equivalent,
           "align_qtorus: no intertwiner to tolerance (generator " + std::to_string(j + 1) +
               " residual " + std::to_string(resid) + ")");
  }

  const long m1 = static_cast<long>(std::floor(nn * res.p[0]));
  const long m2 = static_cast<long>(std::floor(nn * res.p[1]));
  ComplexMatrix u = lattice_intertwiner(a, m1, m2) * u0;
  if (std::abs(u(0, 0)) > 0.0) u *= std::conj(u(0, 0)) / std::abs(u(0, 0));

  res.residuals = {operator_norm(b.X1 - u.adjoint() * a.X1 * u),
                   operator_norm(b.X2 - u.adjoint() * a.X2 * u)};
  res.u = std::move(u);
  return res;
}

double torus_distance(const TorusPair& t, const TorusIrrep& rep) {
  if (t.x1.rows() != rep.X1.rows()) fail(errc::dimension, "torus_distance: dimension mismatch");
  return std::max(operator_norm(t.x1 - rep.X1), operator_norm(t.x2 - rep.X2));
}

std::string report_to_json_text(const TorusStabilizationReport& r) {
  nlohmann::json j;
  j["n"] = r.rep.n;
  j["theta1"] = r.rep.theta1;
  j["theta2"] = r.rep.theta2;
  j["distances"] = r.distances;
  j["residual_r1"] = r.residual_r1;
  j["residual_r2"] = r.residual_r2;
  j["theta_extracted"] = r.theta_extracted;
  j["unitarize_drift"] = r.unitarize_drift;
  nlohmann::json evs = nlohmann::json::array();
  for (const auto& z : r.chain_eigenvalues) evs.push_back({z.real(), z.imag()});
  j["chain_eigenvalues"] = evs;
  j["rep"] = {{"X1", nlohmann::json::parse(cmx::to_json_text(r.rep.X1))},
              {"X2", nlohmann::json::parse(cmx::to_json_text(r.rep.X2))},
              {"basis", nlohmann::json::parse(cmx::to_json_text(r.rep.basis))}};
  return j.dump(2);
}

} // namespace repstab::qtorus
