#include "repstab/observable.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "repstab/errors.hpp"

namespace repstab::quant {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPruneTol = 1e-300;
} // namespace

// ---------------------------------------------------------------- sphere ---

SphereFunction SphereFunction::constant(complexd v) { return monomial(0, 0, 0, v); }

SphereFunction SphereFunction::monomial(int a, int b, int e, complexd coeff) {
  if (a < 0 || b < 0 || e < 0)
    fail(errc::validation, "sphere monomial: exponents must be non-negative");
  SphereFunction f;
  f.add_term(a, b, e, coeff);
  f.prune();
  return f;
}

void SphereFunction::add_term(int a, int b, int e, complexd coeff) {
  if (coeff == complexd(0.0, 0.0)) return;
  if (e >= 2) {
    // u3^2 = 1 - u1^2 - u2^2.
    add_term(a, b, e - 2, coeff);
    add_term(a + 2, b, e - 2, -coeff);
    add_term(a, b + 2, e - 2, -coeff);
    return;
  }
  coeffs_[{a, b, e}] += coeff;
}

void SphereFunction::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = std::abs(it->second) < kPruneTol ? coeffs_.erase(it) : std::next(it);
}

bool SphereFunction::is_zero(double tol) const {
  for (const auto& [k, v] : coeffs_)
    if (std::abs(v) > tol) return false;
  return true;
}

bool SphereFunction::is_real(double tol) const {
  for (const auto& [k, v] : coeffs_)
    if (std::abs(v.imag()) > tol) return false;
  return true;
}

int SphereFunction::degree() const {
  int d = 0;
  for (const auto& [k, v] : coeffs_) d = std::max(d, k[0] + k[1] + k[2]);
  return d;
}

SphereFunction SphereFunction::conjugate() const {
  SphereFunction f;
  for (const auto& [k, v] : coeffs_) f.coeffs_[k] = std::conj(v);
  return f;
}

complexd SphereFunction::eval(double u1, double u2, double u3) const {
  complexd s = 0.0;
  for (const auto& [k, v] : coeffs_)
    s += v * std::pow(u1, k[0]) * std::pow(u2, k[1]) * (k[2] ? u3 : 1.0);
  return s;
}

SphereFunction& SphereFunction::operator+=(const SphereFunction& o) {
  for (const auto& [k, v] : o.coeffs_) coeffs_[k] += v;
  prune();
  return *this;
}

SphereFunction& SphereFunction::operator-=(const SphereFunction& o) {
  for (const auto& [k, v] : o.coeffs_) coeffs_[k] -= v;
  prune();
  return *this;
}

SphereFunction operator*(const SphereFunction& a, const SphereFunction& b) {
  SphereFunction f;
  for (const auto& [ka, va] : a.coeffs_)
    for (const auto& [kb, vb] : b.coeffs_)
      f.add_term(ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2], va * vb);
  f.prune();
  return f;
}

SphereFunction operator*(complexd s, SphereFunction f) {
  for (auto& [k, v] : f.coeffs_) v *= s;
  f.prune();
  return f;
}

namespace {

// Formal partial derivative on the canonical representative.
SphereFunction sphere_partial(const SphereFunction& f, int axis) {
  SphereFunction d;
  for (const auto& [k, v] : f.coeffs()) {
    int e[3] = {k[0], k[1], k[2]};
    if (e[axis] == 0) continue;
    const complexd c = v * static_cast<double>(e[axis]);
    e[axis] -= 1;
    d += SphereFunction::monomial(e[0], e[1], e[2], c);
  }
  return d;
}

} // namespace

SphereFunction poisson_bracket(const SphereFunction& f, const SphereFunction& g) {
  // {u_j, u_{j+1}} = -2 u_{j+2}, extended by the Leibniz rule. The relation
  // ideal (u1^2+u2^2+u3^2-1) is Poisson, so the canonical representative is a
  // valid choice for the formal computation.
  const SphereFunction df[3] = {sphere_partial(f, 0), sphere_partial(f, 1), sphere_partial(f, 2)};
  const SphereFunction dg[3] = {sphere_partial(g, 0), sphere_partial(g, 1), sphere_partial(g, 2)};
  const SphereFunction u[3] = {SphereFunction::u1(), SphereFunction::u2(), SphereFunction::u3()};
  SphereFunction out;
  for (int j = 0; j < 3; ++j) {
    const int a = j, b = (j + 1) % 3, c = (j + 2) % 3;
    // (df/du_a dg/du_b - df/du_b dg/du_a) * (-2 u_c)
    out += complexd(-2.0, 0.0) * ((df[a] * dg[b] - df[b] * dg[a]) * u[c]);
  }
  return out;
}

SphereFunction harmonic_basis(int n) {
  if (n < 1) fail(errc::validation, "harmonic_basis: n must be >= 1");
  SphereFunction f1 = complexd(-1.0, 0.0) * (SphereFunction::u1() +
                                             complexd(0.0, 1.0) * SphereFunction::u2());
  SphereFunction f = f1;
  for (int m = 1; m < n; ++m)
    f = std::sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * (f1 * f);
  return f;
}

// ----------------------------------------------------------------- torus ---

TorusFunction TorusFunction::constant(complexd v) { return monomial(0, 0, v); }

TorusFunction TorusFunction::monomial(int n, int m, complexd coeff) {
  TorusFunction f;
  if (coeff != complexd(0.0, 0.0)) f.coeffs_[{n, m}] = coeff;
  return f;
}

void TorusFunction::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = std::abs(it->second) < kPruneTol ? coeffs_.erase(it) : std::next(it);
}

bool TorusFunction::is_zero(double tol) const {
  for (const auto& [k, v] : coeffs_)
    if (std::abs(v) > tol) return false;
  return true;
}

bool TorusFunction::is_real(double tol) const {
  for (const auto& [k, v] : coeffs_) {
    auto it = coeffs_.find({-k[0], -k[1]});
    const complexd other = it == coeffs_.end() ? complexd(0.0, 0.0) : it->second;
    if (std::abs(v - std::conj(other)) > tol) return false;
  }
  return true;
}

int TorusFunction::box() const {
  int b = 0;
  for (const auto& [k, v] : coeffs_) b = std::max({b, std::abs(k[0]), std::abs(k[1])});
  return b;
}

TorusFunction TorusFunction::conjugate() const {
  TorusFunction f;
  for (const auto& [k, v] : coeffs_) f.coeffs_[{-k[0], -k[1]}] = std::conj(v);
  return f;
}

complexd TorusFunction::eval(double q1, double q2) const {
  complexd s = 0.0;
  for (const auto& [k, v] : coeffs_)
    s += v * std::exp(complexd(0.0, kTwoPi * (k[0] * q1 + k[1] * q2)));
  return s;
}

TorusFunction TorusFunction::translate(double p1, double p2) const {
  TorusFunction f;
  for (const auto& [k, v] : coeffs_)
    f.coeffs_[k] = v * std::exp(complexd(0.0, kTwoPi * (k[0] * p1 + k[1] * p2)));
  return f;
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& o) {
  for (const auto& [k, v] : o.coeffs_) coeffs_[k] += v;
  prune();
  return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& o) {
  for (const auto& [k, v] : o.coeffs_) coeffs_[k] -= v;
  prune();
  return *this;
}

TorusFunction operator*(const TorusFunction& a, const TorusFunction& b) {
  TorusFunction f;
  for (const auto& [ka, va] : a.coeffs_)
    for (const auto& [kb, vb] : b.coeffs_) f.coeffs_[{ka[0] + kb[0], ka[1] + kb[1]}] += va * vb;
  f.prune();
  return f;
}

TorusFunction operator*(complexd s, TorusFunction f) {
  for (auto& [k, v] : f.coeffs_) v *= s;
  f.prune();
  return f;
}

TorusFunction poisson_bracket(const TorusFunction& f, const TorusFunction& g) {
  // {u1^n u2^m, u1^a u2^b} = 2 pi (n b - m a) u1^{n+a} u2^{m+b}.
  TorusFunction out;
  for (const auto& [kf, vf] : f.coeffs())
    for (const auto& [kg, vg] : g.coeffs()) {
      const double factor = kTwoPi * (kf[0] * kg[1] - kf[1] * kg[0]);
      if (factor != 0.0)
        out += TorusFunction::monomial(kf[0] + kg[0], kf[1] + kg[1], factor * vf * vg);
    }
  return out;
}

TorusFunction moyal_weyl_c2(const TorusFunction& f, const TorusFunction& g) {
  // On monomial pairs the bidifferential reduces to -(pi^2/2)(n b - m a)^2 fg.
  TorusFunction out;
  const double half_pi2 = 0.5 * std::numbers::pi * std::numbers::pi;
  for (const auto& [kf, vf] : f.coeffs())
    for (const auto& [kg, vg] : g.coeffs()) {
      const double cross = static_cast<double>(kf[0]) * kg[1] - static_cast<double>(kf[1]) * kg[0];
      if (cross != 0.0)
        out += TorusFunction::monomial(kf[0] + kg[0], kf[1] + kg[1],
                                       -half_pi2 * cross * cross * vf * vg);
    }
  return out;
}

// ------------------------------------------------------------- observable ---

Observable Observable::constant(Manifold m, complexd v) {
  if (m == Manifold::sphere) return Observable(SphereFunction::constant(v));
  return Observable(TorusFunction::constant(v));
}

const SphereFunction& Observable::sphere() const {
  if (!std::holds_alternative<SphereFunction>(fn_))
    fail(errc::validation, "observable: expected a sphere function");
  return std::get<SphereFunction>(fn_);
}

const TorusFunction& Observable::torus() const {
  if (!std::holds_alternative<TorusFunction>(fn_))
    fail(errc::validation, "observable: expected a torus function");
  return std::get<TorusFunction>(fn_);
}

bool Observable::is_real(double tol) const {
  return manifold() == Manifold::sphere ? sphere().is_real(tol) : torus().is_real(tol);
}

bool Observable::is_zero(double tol) const {
  return manifold() == Manifold::sphere ? sphere().is_zero(tol) : torus().is_zero(tol);
}

Observable Observable::conjugate() const {
  if (manifold() == Manifold::sphere) return Observable(sphere().conjugate());
  return Observable(torus().conjugate());
}

namespace {
void require_same_manifold(const Observable& a, const Observable& b) {
  if (a.manifold() != b.manifold())
    fail(errc::validation, "observable: mixed manifolds");
}
} // namespace

Observable operator+(const Observable& a, const Observable& b) {
  require_same_manifold(a, b);
  if (a.manifold() == Manifold::sphere) return Observable(a.sphere() + b.sphere());
  return Observable(a.torus() + b.torus());
}

Observable operator-(const Observable& a, const Observable& b) {
  require_same_manifold(a, b);
  if (a.manifold() == Manifold::sphere) return Observable(a.sphere() - b.sphere());
  return Observable(a.torus() - b.torus());
}

Observable operator*(const Observable& a, const Observable& b) {
  require_same_manifold(a, b);
  if (a.manifold() == Manifold::sphere) return Observable(a.sphere() * b.sphere());
  return Observable(a.torus() * b.torus());
}

Observable operator*(complexd s, const Observable& f) {
  if (f.manifold() == Manifold::sphere) return Observable(s * f.sphere());
  return Observable(s * f.torus());
}

Observable poisson_bracket(const Observable& f, const Observable& g) {
  require_same_manifold(f, g);
  if (f.manifold() == Manifold::sphere)
    return Observable(poisson_bracket(f.sphere(), g.sphere()));
  return Observable(poisson_bracket(f.torus(), g.torus()));
}

double sup_norm(const Observable& f, const SupNormOptions& opts) {
  double best = 0.0;
  if (f.manifold() == Manifold::sphere) {
    const double h = opts.sphere_geodesic_spacing;
    const int nth = std::max(3, static_cast<int>(std::ceil(std::numbers::pi / h)) + 1);
    const int nps = std::max(4, static_cast<int>(std::ceil(kTwoPi / h)));
    const auto& fn = f.sphere();
    for (int it = 0; it < nth; ++it) {
      const double th = std::numbers::pi * it / (nth - 1);
      const double st = std::sin(th), ct = std::cos(th);
      for (int ip = 0; ip < nps; ++ip) {
        const double ps = kTwoPi * ip / nps;
        best = std::max(best, std::abs(fn.eval(st * std::cos(ps), st * std::sin(ps), ct)));
      }
    }
    return best;
  }
  const auto& fn = f.torus();
  const int n = opts.torus_grid;
  // Separable evaluation: group coefficients by the q1 frequency.
  std::map<int, std::vector<std::pair<int, complexd>>> rows;
  for (const auto& [k, v] : fn.coeffs()) rows[k[0]].push_back({k[1], v});
  std::vector<std::vector<complexd>> inner;
  std::vector<int> freqs;
  for (const auto& [n1, terms] : rows) {
    freqs.push_back(n1);
    std::vector<complexd> vals(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const double q2 = static_cast<double>(j) / n;
      complexd s = 0.0;
      for (const auto& [m, v] : terms) s += v * std::exp(complexd(0.0, kTwoPi * m * q2));
      vals[static_cast<std::size_t>(j)] = s;
    }
    inner.push_back(std::move(vals));
  }
  for (int i = 0; i < n; ++i) {
    const double q1 = static_cast<double>(i) / n;
    std::vector<complexd> phase(freqs.size());
    for (std::size_t r = 0; r < freqs.size(); ++r)
      phase[r] = std::exp(complexd(0.0, kTwoPi * freqs[r] * q1));
    for (int j = 0; j < n; ++j) {
      complexd s = 0.0;
      for (std::size_t r = 0; r < freqs.size(); ++r) s += phase[r] * inner[r][static_cast<std::size_t>(j)];
      best = std::max(best, std::abs(s));
    }
  }
  return best;
}

complexd mean_integral(const Observable& f) {
  if (f.manifold() == Manifold::torus) {
    const auto& c = f.torus().coeffs();
    auto it = c.find({0, 0});
    return it == c.end() ? complexd(0.0, 0.0) : it->second;
  }
  // (1/2pi) Int u1^a u2^b u3^e w: zero unless a, b even and e = 0; then
  // the angular average of cos^a sin^b times (1/2) Int (1-t^2)^{(a+b)/2} dt.
  complexd total = 0.0;
  for (const auto& [k, v] : f.sphere().coeffs()) {
    if (k[2] == 1 || k[0] % 2 == 1 || k[1] % 2 == 1) continue;
    // Wallis: (1/2pi) Int cos^a sin^b = (a-1)!!(b-1)!!/(a+b)!! for even a,b.
    auto dfact = [](int m) {
      double r = 1.0;
      for (int x = m; x > 1; x -= 2) r *= x;
      return r;
    };
    const double ang = dfact(k[0] - 1) * dfact(k[1] - 1) / dfact(k[0] + k[1]);
    // (1/2) Int_{-1}^{1} (1-t^2)^{p} dt = (2p)!! / (2p+1)!!
    const int p = (k[0] + k[1]) / 2;
    const double rad = dfact(2 * p) / dfact(2 * p + 1);
    total += v * ang * rad;
  }
  return total;
}

// ----------------------------------------------------------------- parser ---

namespace {

struct Parser {
  Manifold manifold;
  std::string s;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void err(const std::string& what) {
    fail(errc::validation, "parse_observable: " + what + " at position " + std::to_string(pos));
  }

  double number() {
    skip();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s.substr(pos), &used);
    } catch (...) {
      err("expected a number");
    }
    pos += used;
    return v;
  }

  long integer() {
    skip();
    bool neg = eat('-');
    if (!neg) eat('+');
    skip();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) err("expected an integer");
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      v = 10 * v + (s[pos++] - '0');
    return neg ? -v : v;
  }

  bool word(const char* w) {
    skip();
    std::size_t len = std::string(w).size();
    if (s.compare(pos, len, w) == 0) {
      pos += len;
      return true;
    }
    return false;
  }

  Observable expression() {
    Observable acc = term();
    for (;;) {
      skip();
      if (eat('+'))
        acc = acc + term();
      else if (eat('-'))
        acc = acc - term();
      else
        return acc;
    }
  }

  Observable term() {
    Observable acc = factor();
    for (;;) {
      skip();
      if (eat('*'))
        acc = acc * factor();
      else
        return acc;
    }
  }

  Observable factor() {
    Observable base = atom();
    skip();
    if (eat('^')) {
      const long e = integer();
      if (e < 0) err("negative powers are only available through F(n,m)");
      Observable out = Observable::constant(manifold, 1.0);
      for (long i = 0; i < e; ++i) out = out * base;
      return out;
    }
    return base;
  }

  Observable atom() {
    skip();
    if (eat('(')) {
      Observable inner = expression();
      if (!eat(')')) err("expected ')'");
      return inner;
    }
    if (eat('-')) return complexd(-1.0, 0.0) * atom();
    if (word("u1"))
      return manifold == Manifold::sphere ? Observable(SphereFunction::u1())
                                          : Observable(TorusFunction::u1());
    if (word("u2"))
      return manifold == Manifold::sphere ? Observable(SphereFunction::u2())
                                          : Observable(TorusFunction::u2());
    if (word("u3")) {
      if (manifold != Manifold::sphere) err("u3 is a sphere coordinate");
      return Observable(SphereFunction::u3());
    }
    if (word("F")) {
      if (manifold != Manifold::torus) err("F(n,m) is a torus literal");
      if (!eat('(')) err("expected '(' after F");
      const long n = integer();
      if (!eat(',')) err("expected ','");
      const long m = integer();
      if (!eat(')')) err("expected ')'");
      return Observable(TorusFunction::monomial(static_cast<int>(n), static_cast<int>(m)));
    }
    if (word("cos") || word("sin")) {
      const bool is_cos = s[pos - 3] == 'c';
      if (manifold != Manifold::torus) err("cos/sin sugar is torus-only");
      if (!eat('(')) err("expected '('");
      int axis = 0;
      if (word("q1"))
        axis = 0;
      else if (word("q2"))
        axis = 1;
      else
        err("expected q1 or q2");
      if (!eat(')')) err("expected ')'");
      TorusFunction plus = axis == 0 ? TorusFunction::monomial(1, 0) : TorusFunction::monomial(0, 1);
      TorusFunction minus =
          axis == 0 ? TorusFunction::monomial(-1, 0) : TorusFunction::monomial(0, -1);
      if (is_cos) return Observable(complexd(0.5, 0.0) * (plus + minus));
      return Observable(complexd(0.0, -0.5) * (plus - minus));
    }
    skip();
    if (pos < s.size() &&
        (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
      return Observable::constant(manifold, number());
    }
    err("unexpected token");
  }
};

std::string fmt_c(complexd v) {
  std::ostringstream o;
  if (std::abs(v.imag()) < 1e-15) {
    o << v.real();
  } else {
    o << "(" << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i)";
  }
  return o.str();
}

} // namespace

Observable parse_observable(Manifold m, const std::string& text) {
  Parser p{m, text};
  Observable out = p.expression();
  p.skip();
  if (p.pos != p.s.size()) p.err("trailing input");
  return out;
}

std::string to_string(const Observable& f) {
  std::ostringstream o;
  bool first = true;
  if (f.manifold() == Manifold::sphere) {
    for (const auto& [k, v] : f.sphere().coeffs()) {
      if (!first) o << " + ";
      first = false;
      o << fmt_c(v);
      if (k[0]) o << "*u1^" << k[0];
      if (k[1]) o << "*u2^" << k[1];
      if (k[2]) o << "*u3";
    }
  } else {
    for (const auto& [k, v] : f.torus().coeffs()) {
      if (!first) o << " + ";
      first = false;
      o << fmt_c(v) << "*F(" << k[0] << "," << k[1] << ")";
    }
  }
  if (first) o << "0";
  return o.str();
}

} // namespace repstab::quant
