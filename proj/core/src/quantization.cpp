#include "repstab/quantization.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "repstab/errors.hpp"
#include "repstab/linalg.hpp"
#include "repstab/su2.hpp"
#include "repstab/qtorus.hpp"

namespace repstab::quant {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

// ---------------------------------------------------------------- sphere ---

namespace {

struct SpinContext {
  Eigen::Index n;
  ComplexMatrix s1, s2, s3;
  // Memoized symmetrized powers for one evaluation.
  std::map<std::array<int, 3>, ComplexMatrix> cache;

  explicit SpinContext(Eigen::Index dim) : n(dim) {
    const su2::Su2Irrep rep = su2::build_exact_su2(dim);
    const complexd mi(0.0, -2.0);
    s1 = mi * rep.X1;
    s2 = mi * rep.X2;
    s3 = mi * rep.X3;
  }

  // Average over all orderings of the word S1^a S2^b S3^e, by first letter.
  const ComplexMatrix& sym(int a, int b, int e) {
    const std::array<int, 3> key{a, b, e};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    ComplexMatrix m;
    const int d = a + b + e;
    if (d == 0) {
      m = ComplexMatrix::Identity(n, n);
    } else {
      m = ComplexMatrix::Zero(n, n);
      if (a > 0) m += static_cast<double>(a) * (s1 * sym(a - 1, b, e));
      if (b > 0) m += static_cast<double>(b) * (s2 * sym(a, b - 1, e));
      if (e > 0) m += static_cast<double>(e) * (s3 * sym(a, b, e - 1));
      m /= static_cast<double>(d);
    }
    return cache.emplace(key, std::move(m)).first->second;
  }
};

} // namespace

Quantization sphere_spin_quantization(int c) {
  Quantization q;
  q.manifold = Manifold::sphere;
  q.backend = "spin";
  q.c = c;
  q.op = [c](int k, const Observable& f) -> ComplexMatrix {
    const Eigen::Index n = k + c;
    if (k < 1 || n < 1) fail(errc::validation, "sphere spin model: k + c must be >= 1");
    const double s = 1.0 / (static_cast<double>(k) + c + 1.0);
    SpinContext ctx(n);
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (const auto& [key, v] : f.sphere().coeffs()) {
      const int deg = key[0] + key[1] + key[2];
      out += v * std::pow(s, deg) * ctx.sym(key[0], key[1], key[2]);
    }
    return out;
  };
  return q;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

} // namespace

ComplexMatrix sphere_toeplitz_quadrature(int k, const SphereFunction& f, int polar_nodes) {
  if (k < 1) fail(errc::validation, "sphere_toeplitz_quadrature: k must be >= 1");
  const int deg = f.degree();
  const int min_nodes = 2 * k + 8;
  int nt = polar_nodes > 0 ? polar_nodes : min_nodes + 2 * deg;
  if (nt < min_nodes)
    fail(errc::resolution, "sphere_toeplitz_quadrature: polar grid must have >= 2k+8 nodes");
  const int npsi = 2 * (k + deg) + 8;

  std::vector<double> s, w;
  gauss_legendre(nt, s, w);

  // Azimuthal Fourier coefficients of f at each polar node:
  // f(s, psi) = sum_d fc[d](s) e^{i d psi}, |d| <= deg.
  // Chart: u1 = sqrt(1-s^2) cos psi, u2 = sqrt(1-s^2) sin psi, u3 = s.
  std::vector<std::vector<complexd>> fc(static_cast<std::size_t>(2 * deg + 1),
                                        std::vector<complexd>(s.size()));
  for (std::size_t it = 0; it < s.size(); ++it) {
    const double st = std::sqrt(std::max(0.0, 1.0 - s[it] * s[it]));
    std::vector<complexd> vals(static_cast<std::size_t>(npsi));
    for (int ip = 0; ip < npsi; ++ip) {
      const double psi = kTwoPi * ip / npsi;
      vals[static_cast<std::size_t>(ip)] =
          f.eval(st * std::cos(psi), st * std::sin(psi), s[it]);
    }
    for (int d = -deg; d <= deg; ++d) {
      complexd acc = 0.0;
      for (int ip = 0; ip < npsi; ++ip) {
        const double psi = kTwoPi * ip / npsi;
        acc += vals[static_cast<std::size_t>(ip)] * std::exp(complexd(0.0, -d * psi));
      }
      fc[static_cast<std::size_t>(d + deg)][it] = acc / static_cast<double>(npsi);
    }
  }

  // Section z^a carries radial factor ((1-s)/(1+s))^{a/2} and the k-th power
  // of the Fubini-Study weight ((1+s)/2)^k; basis ordered z^k .. z^0 so the
  // u3 image is ascending-diagonal.
  const Eigen::Index dim = k + 1;
  auto radial = [&](int a, int b, double sv) {
    return std::exp(0.5 * (a + b) * std::log((1.0 - sv) / (1.0 + sv)) +
                    k * std::log((1.0 + sv) / 2.0));
  };
  RealVector norms(dim);
  for (int a = 0; a <= k; ++a) {
    double acc = 0.0;
    for (std::size_t it = 0; it < s.size(); ++it) acc += w[it] * radial(a, a, s[it]);
    norms[a] = acc;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b) {
      const int d = a - b; // e^{i(b-a)psi} under the integral picks fc at a-b
      if (std::abs(d) > deg) continue;
      complexd acc = 0.0;
      for (std::size_t it = 0; it < s.size(); ++it)
        acc += w[it] * radial(a, b, s[it]) * fc[static_cast<std::size_t>(d + deg)][it];
      out(k - a, k - b) = acc / std::sqrt(norms[a] * norms[b]);
    }
  return out;
}

Quantization sphere_quadrature_quantization() {
  Quantization q;
  q.manifold = Manifold::sphere;
  q.backend = "sphere-quad";
  q.c = 1;
  q.op = [](int k, const Observable& f) { return sphere_toeplitz_quadrature(k, f.sphere()); };
  return q;
}

// ----------------------------------------------------------------- torus ---

namespace {

// Closed-form lattice image: Shift^n Clock^{-m} with the derived Gaussian
// amplitude and phase.
ComplexMatrix theta_model_monomial(int k, int n, int m) {
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  const double amp = std::exp(-kPi * (static_cast<double>(n) * n + static_cast<double>(m) * m) /
                              (2.0 * k));
  const complexd phase = std::exp(complexd(0.0, -kPi * static_cast<double>(n) * m / k));
  for (int j = 0; j < k; ++j) {
    const int row = ((j + n) % k + k) % k;
    out(row, j) = amp * phase * std::exp(complexd(0.0, -kTwoPi * static_cast<double>(m) * j / k));
  }
  return out;
}

} // namespace

Quantization torus_theta_quantization() {
  Quantization q;
  q.manifold = Manifold::torus;
  q.backend = "theta";
  q.c = 0;
  q.op = [](int k, const Observable& f) -> ComplexMatrix {
    if (k < 1) fail(errc::validation, "torus theta model: k must be >= 1");
    ComplexMatrix out = ComplexMatrix::Zero(k, k);
    for (const auto& [key, v] : f.torus().coeffs())
      out += v * theta_model_monomial(k, key[0], key[1]);
    return out;
  };
  return q;
}

ComplexMatrix torus_toeplitz_quadrature(int k, const TorusFunction& f) {
  if (k < 1) fail(errc::validation, "torus_toeplitz_quadrature: k must be >= 1");
  const int box = f.box();
  const int grid = 4 * k + 64 + 8 * box;
  const double h = 1.0 / grid;

  // Weighted theta values Theta~_j(q) = theta_j(q) e^{-pi k q2^2}; every
  // Gaussian term is bounded by 1 and the series is truncated below 1e-16.
  std::vector<ComplexMatrix> theta(static_cast<std::size_t>(k),
                                   ComplexMatrix(grid, grid));
  for (int j = 0; j < k; ++j) {
    auto& th = theta[static_cast<std::size_t>(j)];
    for (int i2 = 0; i2 < grid; ++i2) {
      const double q2 = i2 * h;
      for (int i1 = 0; i1 < grid; ++i1) {
        const double q1 = i1 * h;
        complexd acc = 0.0;
        for (int ell = -8; ell <= 8; ++ell) {
          const double t = ell + static_cast<double>(j) / k;
          const double mag = -kPi * k * (t + q2) * (t + q2);
          if (mag < -40.0) continue; // term below 1e-16
          acc += std::exp(complexd(mag, kTwoPi * k * t * q1));
        }
        th(i2, i1) = acc;
      }
    }
  }

  RealVector norms(k);
  for (int j = 0; j < k; ++j)
    norms[j] = std::sqrt(theta[static_cast<std::size_t>(j)].squaredNorm() * h * h);

  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (const auto& [key, v] : f.coeffs()) {
    // Frequency selection in q1 couples theta_j to theta_{(j+n) mod k}.
    const int n = key[0], m = key[1];
    ComplexMatrix pw(grid, grid);
    for (int i2 = 0; i2 < grid; ++i2) {
      const double q2 = i2 * h;
      const complexd ph2 = std::exp(complexd(0.0, kTwoPi * m * q2));
      for (int i1 = 0; i1 < grid; ++i1)
        pw(i2, i1) = ph2 * std::exp(complexd(0.0, kTwoPi * n * (i1 * h)));
    }
    for (int j = 0; j < k; ++j) {
      const int i = ((j + n) % k + k) % k;
      const auto& ti = theta[static_cast<std::size_t>(i)];
      const auto& tj = theta[static_cast<std::size_t>(j)];
      const complexd val =
          (ti.conjugate().cwiseProduct(tj).cwiseProduct(pw)).sum() * h * h;
      out(i, j) += v * val / (norms[i] * norms[j]);
    }
  }
  return out;
}

Quantization torus_quadrature_quantization() {
  Quantization q;
  q.manifold = Manifold::torus;
  q.backend = "theta-quad";
  q.c = 0;
  q.op = [](int k, const Observable& f) { return torus_toeplitz_quadrature(k, f.torus()); };
  return q;
}

// ---------------------------------------------------- change of variable ---

Quantization change_of_variable(const Quantization& q, const FunctionOp& d, int order) {
  if (order != 1 && order != 2)
    fail(errc::validation, "change_of_variable: order must be 1 or 2");
  const Observable one = Observable::constant(q.manifold, 1.0);
  if (!d(one).is_zero(1e-14))
    fail(errc::contract, "change_of_variable: D must vanish on constants");
  Quantization out = q;
  out.backend = q.backend + "+D" + std::to_string(order);
  auto base = q.op;
  out.op = [base, d, order](int k, const Observable& f) {
    const double scale = std::pow(static_cast<double>(k), -order);
    return base(k, f + complexd(scale, 0.0) * d(f));
  };
  return out;
}

namespace {
FunctionOp torus_multiplier(std::function<double(int, int)> weight) {
  return [weight](const Observable& f) -> Observable {
    TorusFunction out;
    for (const auto& [key, v] : f.torus().coeffs()) {
      const double w = weight(key[0], key[1]);
      if (w != 0.0) out += TorusFunction::monomial(key[0], key[1], w * v);
    }
    return Observable(out);
  };
}
} // namespace

FunctionOp torus_c1_normalizer() {
  return torus_multiplier([](int n, int m) {
    return 0.5 * kPi * (static_cast<double>(n) * n + static_cast<double>(m) * m);
  });
}

FunctionOp torus_moyal_correction() {
  return torus_multiplier([](int n, int m) {
    const double q = static_cast<double>(n) * n + static_cast<double>(m) * m;
    return kPi * kPi * q * q / 8.0;
  });
}

// ------------------------------------------------------ axioms and trace ---

namespace {

SlopeFit fit_or_exact(const std::vector<int>& ks, const std::vector<double>& residuals,
                      double floor = 1e-12) {
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < residuals.size(); ++i)
    if (residuals[i] >= floor) {
      lx.push_back(std::log(static_cast<double>(ks[i])));
      ly.push_back(std::log(residuals[i]));
    }
  fit.points_used = static_cast<int>(lx.size());
  if (lx.empty()) {
    fit.exact = true;
    return fit;
  }
  if (lx.size() < 3) fail(errc::validation, "slope fit: fewer than 3 usable points");
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

} // namespace

AxiomReport verify_axioms(const Quantization& q, const std::vector<Observable>& fs,
                          const std::vector<int>& ks, const SupNormOptions& sup_opts) {
  if (ks.size() < 3) fail(errc::validation, "verify_axioms: need >= 3 values of k");
  std::vector<double> sup(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) sup[i] = sup_norm(fs[i], sup_opts);

  AxiomReport report;
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i; j < fs.size(); ++j) {
      AxiomPairReport pair;
      pair.f = to_string(fs[i]);
      pair.g = to_string(fs[j]);
      pair.ks = ks;
      const Observable bracket = poisson_bracket(fs[i], fs[j]);
      const Observable product = fs[i] * fs[j];
      for (int k : ks) {
        const ComplexMatrix tf = q(k, fs[i]);
        const ComplexMatrix tg = q(k, fs[j]);
        pair.e1_f.push_back(std::abs(operator_norm(tf) - sup[i]));
        pair.e1_g.push_back(std::abs(operator_norm(tg) - sup[j]));
        const ComplexMatrix comm = tf * tg - tg * tf;
        pair.e2.push_back(operator_norm(
            comm - complexd(0.0, 1.0 / k) * q(k, bracket)));
        pair.e3.push_back(operator_norm(tf * tg - q(k, product)));
      }
      pair.s1 = fit_or_exact(ks, pair.e1_f);
      pair.s2 = fit_or_exact(ks, pair.e2);
      pair.s3 = fit_or_exact(ks, pair.e3);
      report.pairs.push_back(std::move(pair));
    }
  return report;
}

TraceProfile trace_profile(const Quantization& q, const std::vector<Observable>& fs,
                           const std::vector<int>& ks) {
  TraceProfile prof;
  for (const auto& f : fs) prof.fs.push_back(to_string(f));
  for (int k : ks) prof.dim_minus_k.push_back(q.dim(k) - k);

  for (std::size_t i = 0; i < fs.size(); ++i) {
    const complexd integral = mean_integral(fs[i]);
    std::vector<double> y;
    for (int k : ks) {
      TraceRow row;
      row.k = k;
      row.f = prof.fs[i];
      row.trace = q(k, fs[i]).trace();
      row.integral = integral;
      prof.rows.push_back(row);
      if (std::abs(integral) > 1e-12)
        y.push_back((row.trace / (static_cast<double>(k) * integral)).real() - 1.0);
    }
    if (std::abs(integral) <= 1e-12) {
      prof.indeterminate.push_back(true);
      prof.r_estimate.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    prof.indeterminate.push_back(false);
    // Least squares y = R/k + g/k^2.
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t t = 0; t < ks.size(); ++t) {
      const double x1 = 1.0 / ks[t];
      const double x2 = x1 * x1;
      a11 += x1 * x1;
      a12 += x1 * x2;
      a22 += x2 * x2;
      b1 += x1 * y[t];
      b2 += x2 * y[t];
    }
    const double det = a11 * a22 - a12 * a12;
    double r;
    if (std::abs(det) > 1e-30) {
      r = (b1 * a22 - b2 * a12) / det;
    } else {
      r = a11 > 0.0 ? b1 / a11 : 0.0;
    }
    prof.r_estimate.push_back(r);
  }
  return prof;
}

} // namespace repstab::quant
