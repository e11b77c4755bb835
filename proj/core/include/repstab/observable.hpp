#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <variant>

#include "repstab/complex_matrix.hpp"

namespace repstab::quant {

enum class Manifold { sphere, torus };

/// Polynomial in the Cartesian coordinate functions u1, u2, u3 of the unit
/// sphere, kept in the canonical form with u3-degree <= 1 (u3^2 is reduced
/// through u1^2 + u2^2 + u3^2 = 1).
class SphereFunction {
public:
  using Key = std::array<int, 3>; // exponents (a, b, e), e in {0, 1}
  using Map = std::map<Key, complexd>;

  SphereFunction() = default;
  static SphereFunction constant(complexd v);
  static SphereFunction monomial(int a, int b, int e, complexd coeff = 1.0);
  static SphereFunction u1() { return monomial(1, 0, 0); }
  static SphereFunction u2() { return monomial(0, 1, 0); }
  static SphereFunction u3() { return monomial(0, 0, 1); }

  const Map& coeffs() const { return coeffs_; }
  bool is_zero(double tol = 0.0) const;
  bool is_real(double tol = 1e-12) const;
  int degree() const;

  SphereFunction conjugate() const;
  complexd eval(double u1, double u2, double u3) const;

  SphereFunction& operator+=(const SphereFunction& o);
  SphereFunction& operator-=(const SphereFunction& o);
  friend SphereFunction operator+(SphereFunction a, const SphereFunction& b) { return a += b; }
  friend SphereFunction operator-(SphereFunction a, const SphereFunction& b) { return a -= b; }
  friend SphereFunction operator*(const SphereFunction& a, const SphereFunction& b);
  friend SphereFunction operator*(complexd s, SphereFunction f);

private:
  void add_term(int a, int b, int e, complexd coeff); // reduces u3 powers
  void prune();
  Map coeffs_;
};

/// Finite Fourier polynomial on the torus: coefficients of u1^n u2^m with
/// u_j(q) = e^{2 pi i q_j}.
class TorusFunction {
public:
  using Key = std::array<int, 2>;
  using Map = std::map<Key, complexd>;

  TorusFunction() = default;
  static TorusFunction constant(complexd v);
  static TorusFunction monomial(int n, int m, complexd coeff = 1.0);
  static TorusFunction u1() { return monomial(1, 0); }
  static TorusFunction u2() { return monomial(0, 1); }

  const Map& coeffs() const { return coeffs_; }
  bool is_zero(double tol = 0.0) const;
  bool is_real(double tol = 1e-12) const;
  int box() const; // max(|n|, |m|)

  TorusFunction conjugate() const;
  complexd eval(double q1, double q2) const;
  /// Pullback by the translation q -> q + p: coefficients gain e^{2pi i(n p1 + m p2)}.
  TorusFunction translate(double p1, double p2) const;

  TorusFunction& operator+=(const TorusFunction& o);
  TorusFunction& operator-=(const TorusFunction& o);
  friend TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
  friend TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
  friend TorusFunction operator*(const TorusFunction& a, const TorusFunction& b);
  friend TorusFunction operator*(complexd s, TorusFunction f);

private:
  void prune();
  Map coeffs_;
};

SphereFunction poisson_bracket(const SphereFunction& f, const SphereFunction& g);
TorusFunction poisson_bracket(const TorusFunction& f, const TorusFunction& g);

/// Highest-weight harmonics by the recursion f_{n+1} = sqrt((2n+3)/(2n+2)) f_1 f_n,
/// f_1 = -(u1 + i u2).
SphereFunction harmonic_basis(int n);

/// Second-order symmetric coefficient of the flat translation-invariant
/// product: -(1/32 pi^2)(f_xx g_yy - 2 f_xy g_xy + f_yy g_xx).
TorusFunction moyal_weyl_c2(const TorusFunction& f, const TorusFunction& g);

/// Manifold-tagged wrapper used by quantization evaluators and the CLI.
class Observable {
public:
  Observable(SphereFunction f) : fn_(std::move(f)) {}
  Observable(TorusFunction f) : fn_(std::move(f)) {}
  static Observable constant(Manifold m, complexd v);

  Manifold manifold() const {
    return std::holds_alternative<SphereFunction>(fn_) ? Manifold::sphere : Manifold::torus;
  }
  const SphereFunction& sphere() const;
  const TorusFunction& torus() const;

  bool is_real(double tol = 1e-12) const;
  bool is_zero(double tol = 0.0) const;
  Observable conjugate() const;

  friend Observable operator+(const Observable& a, const Observable& b);
  friend Observable operator-(const Observable& a, const Observable& b);
  friend Observable operator*(const Observable& a, const Observable& b);
  friend Observable operator*(complexd s, const Observable& f);

private:
  std::variant<SphereFunction, TorusFunction> fn_;
};

Observable poisson_bracket(const Observable& f, const Observable& g);

struct SupNormOptions {
  double sphere_geodesic_spacing = 1e-3;
  int torus_grid = 2048;
};
/// Uniform norm by dense grid evaluation.
double sup_norm(const Observable& f, const SupNormOptions& opts = {});

/// Normalized integral (1/2pi) * Int f w over the surface (w of total area 2pi).
complexd mean_integral(const Observable& f);

/// Function literals: sphere "u1^2*u3 - 0.5"; torus "F(1,0)+F(-1,0)",
/// with cos(q1)/sin(q2) sugar.
Observable parse_observable(Manifold m, const std::string& text);
std::string to_string(const Observable& f);

} // namespace repstab::quant
