#include "repstab/equivalence.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "repstab/cmx.hpp"
#include "repstab/errors.hpp"

namespace repstab::equiv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mod1(double x) {
  double r = std::fmod(x, 1.0);
  if (r < 0.0) r += 1.0;
  return r;
}
} // namespace

OrderFit order_fit(const std::vector<int>& ks, const std::vector<double>& residuals,
                   double floor) {
  if (ks.size() != residuals.size())
    fail(errc::validation, "order_fit: ks and residuals must have equal length");
  OrderFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (!(residuals[i] > 0.0)) continue;
    if (residuals[i] < floor) continue;
    lx.push_back(std::log(static_cast<double>(ks[i])));
    ly.push_back(std::log(residuals[i]));
  }
  fit.points_used = static_cast<int>(lx.size());
  if (lx.empty()) {
    fit.exact = true;
    return fit;
  }
  if (lx.size() < 3) fail(errc::validation, "order_fit: fewer than 3 usable points");
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

SphereEquivalence find_equivalence_sphere(const quant::Quantization& t,
                                          const quant::Quantization& q, int k) {
  if (t.manifold != quant::Manifold::sphere || q.manifold != quant::Manifold::sphere)
    fail(errc::validation, "find_equivalence_sphere: both backends must quantize the sphere");
  if (t.c != q.c)
    fail(errc::dimension, "find_equivalence_sphere: dim H_k differs between backends");
  const int c = t.c;
  const double n = k + c;
  if (n < 2) fail(errc::validation, "find_equivalence_sphere: k + c must be >= 2");

  // Scale making the exact closed-form model an exact Casimir fixed point:
  // beta^2 ((k+c)^2 - 1) = k^2 + 2kc.
  const double beta =
      std::sqrt((static_cast<double>(k) * k + 2.0 * k * c) / (n * n - 1.0));
  const double s = 1.0 / (k + c + 1.0);
  const double alpha = beta / (2.0 * s);
  const complexd ia(0.0, alpha);

  const quant::Observable us[3] = {quant::Observable(quant::SphereFunction::u1()),
                                   quant::Observable(quant::SphereFunction::u2()),
                                   quant::Observable(quant::SphereFunction::u3())};
  auto triple_of = [&](const quant::Quantization& qq) {
    su2::Su2Triple tr;
    tr.x1 = ia * qq(k, us[0]);
    tr.x2 = ia * qq(k, us[1]);
    tr.x3 = ia * qq(k, us[2]);
    tr.k = k;
    tr.c = c;
    return tr;
  };

  SphereEquivalence eq;
  eq.left = su2::stabilize_su2(triple_of(t));
  eq.right = su2::stabilize_su2(triple_of(q));

  ComplexMatrix u = eq.right.rep.basis * eq.left.rep.basis.adjoint();
  if (std::abs(u(0, 0)) > 0.0) u *= std::conj(u(0, 0)) / std::abs(u(0, 0));
  for (int j = 0; j < 3; ++j)
    eq.generator_residuals[static_cast<std::size_t>(j)] =
        operator_norm(u.adjoint() * q(k, us[j]) * u - t(k, us[j]));
  eq.u = std::move(u);
  return eq;
}

TorusEquivalence find_equivalence_torus(const quant::Quantization& t,
                                        const quant::Quantization& q, int k, TorusOrder order) {
  if (t.manifold != quant::Manifold::torus || q.manifold != quant::Manifold::torus)
    fail(errc::validation, "find_equivalence_torus: both backends must quantize the torus");
  if (t.c != q.c)
    fail(errc::dimension, "find_equivalence_torus: dim H_k differs between backends");
  const int c = t.c;

  quant::Quantization tt = t, qq = q;
  if (order == TorusOrder::three_halves) {
    const auto d1 = quant::torus_c1_normalizer();
    const auto d2 = quant::torus_moyal_correction();
    tt = quant::change_of_variable(quant::change_of_variable(t, d1, 1), d2, 2);
    qq = quant::change_of_variable(quant::change_of_variable(q, d1, 1), d2, 2);
  }

  const quant::Observable u1(quant::TorusFunction::u1());
  const quant::Observable u2(quant::TorusFunction::u2());
  auto pair_of = [&](const quant::Quantization& b) {
    qtorus::TorusPair p;
    p.x1 = b(k, u1);
    p.x2 = b(k, u2);
    p.k = k;
    p.c = c;
    return p;
  };
  const qtorus::TorusPair pt = pair_of(tt);
  const qtorus::TorusPair pq = pair_of(qq);

  if (order == TorusOrder::three_halves) {
    // Refined generator relations must hold at the 1/k^3 scale.
    const double budget = 100.0;
    for (const auto* p : {&pt, &pq}) {
      const qtorus::TorusDefects d = qtorus::qtorus_defects(*p);
      if (d.r1 > budget || d.r2 > budget)
        fail(errc::mode_unsupported,
             "find_equivalence_torus: refined relations fail after the second-order change "
             "(r1 = " + std::to_string(d.r1) + ", r2 = " + std::to_string(d.r2) + ")");
    }
  }

  TorusEquivalence eq;
  eq.left = qtorus::stabilize_qtorus(pt);
  eq.right = qtorus::stabilize_qtorus(pq);
  const auto& a = eq.left.rep;  // from t
  const auto& b = eq.right.rep; // from q
  const double nn = static_cast<double>(a.n);
  // Translation from t to q per axis: (theta_b - theta_a)/n mod 1.
  eq.translation[0] = mod1((b.theta1 - a.theta1) / nn);
  eq.translation[1] = mod1((b.theta2 - a.theta2) / nn);

  if (order == TorusOrder::standard) {
    const qtorus::AlignResult al = qtorus::align_qtorus(a, b);
    // align gives || b.X_j - U_al^* a.X_j U_al || = O(1/n); the scan form
    // U^{-1} Q U ~ T needs U := U_al^*.
    ComplexMatrix u = al.u.adjoint();
    for (int j = 0; j < 2; ++j) {
      const quant::Observable& uj = j == 0 ? u1 : u2;
      eq.generator_residuals[static_cast<std::size_t>(j)] =
          operator_norm(u.adjoint() * q(k, uj) * u - t(k, uj));
    }
    eq.u = std::move(u);
    return eq;
  }

  // three_halves: b.X_j = e^{2 pi i p_j} U0^* a.X_j U0 exactly with
  // U0 = a.basis b.basis^*; with U := U0^* the translated comparison
  // e^{-2 pi i p_j} U^{-1} Q(u_j) U tracks T(u_j) at the 3/2 order.
  ComplexMatrix u = (a.basis * b.basis.adjoint()).adjoint();
  if (std::abs(u(0, 0)) > 0.0) u *= std::conj(u(0, 0)) / std::abs(u(0, 0));
  for (int j = 0; j < 2; ++j) {
    const quant::Observable& uj = j == 0 ? u1 : u2;
    const complexd phase =
        std::exp(complexd(0.0, -kTwoPi * eq.translation[static_cast<std::size_t>(j)]));
    eq.generator_residuals[static_cast<std::size_t>(j)] =
        operator_norm(phase * (u.adjoint() * q(k, uj) * u) - t(k, uj));
  }
  eq.u = std::move(u);
  return eq;
}

EquivalenceResult residual_scan(const quant::Quantization& t, const quant::Quantization& q,
                                const std::vector<int>& ks,
                                const std::vector<ComplexMatrix>& unitaries,
                                const std::optional<std::vector<std::array<double, 2>>>& translations,
                                const std::vector<quant::Observable>& fs) {
  if (unitaries.size() != ks.size())
    fail(errc::validation, "residual_scan: one unitary per k required");
  if (translations && translations->size() != ks.size())
    fail(errc::validation, "residual_scan: one translation per k required");

  EquivalenceResult res;
  res.ks = ks;
  res.unitaries = unitaries;
  res.translations = translations;
  for (const auto& f : fs) res.fs.push_back(quant::to_string(f));

  std::vector<std::vector<double>> residuals(fs.size());
  for (std::size_t ik = 0; ik < ks.size(); ++ik) {
    const int k = ks[ik];
    const ComplexMatrix& u = unitaries[ik];
    for (std::size_t i = 0; i < fs.size(); ++i) {
      quant::Observable fq = fs[i];
      if (translations) {
        const auto& p = (*translations)[ik];
        fq = quant::Observable(fs[i].torus().translate(-p[0], -p[1]));
      }
      const double r = operator_norm(u.adjoint() * q(k, fq) * u - t(k, fs[i]));
      residuals[i].push_back(r);
      res.rows.push_back({k, res.fs[i], r});
    }
  }

  double worst = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    OrderFit fit = order_fit(ks, residuals[i]);
    if (!fit.exact) {
      worst = std::max(worst, fit.slope);
      any = true;
    }
    res.per_f.push_back(fit);
  }
  res.fitted_order = any ? worst : 0.0;
  return res;
}

std::string result_to_json_text(const EquivalenceResult& r) {
  nlohmann::json j;
  j["ks"] = r.ks;
  nlohmann::json us = nlohmann::json::array();
  for (const auto& u : r.unitaries) us.push_back(nlohmann::json::parse(cmx::to_json_text(u)));
  j["unitaries"] = us;
  if (r.translations) {
    nlohmann::json ts = nlohmann::json::array();
    for (const auto& p : *r.translations) ts.push_back({p[0], p[1]});
    j["translations"] = ts;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"k", row.k}, {"f", row.f}, {"residual", row.residual}});
  j["residuals"] = rows;
  nlohmann::json fits = nlohmann::json::array();
  for (std::size_t i = 0; i < r.per_f.size(); ++i) {
    fits.push_back({{"f", r.fs[i]},
                    {"slope", r.per_f[i].slope},
                    {"intercept", r.per_f[i].intercept},
                    {"r2", r.per_f[i].r2},
                    {"exact", r.per_f[i].exact}});
  }
  j["fits"] = fits;
  j["fitted_order"] = r.fitted_order;
  return j.dump(2);
}

std::string result_to_csv_text(const EquivalenceResult& r) {
  std::ostringstream o;
  o << "k,f,residual\n";
  char buf[40];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%.15g", row.residual);
    o << row.k << ",\"" << row.f << "\"," << buf << "\n";
  }
  return o.str();
}

} // namespace repstab::equiv
