#pragma once

#include <cmath>

namespace fireball {

/// Forward-mode dual number a + b·ε with ε² = 0.
///
/// Used to take exact total time derivatives of symmetry coefficients and
/// gauge functions: evaluating f(q + ε q̇, t + ε) yields df/dt in `deriv`.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double v, double d) : value(v), deriv(d) {}

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    deriv = (deriv * o.value - value * o.deriv) / (o.value * o.value);
    value /= o.value;
    return *this;
  }
};

constexpr Dual operator-(const Dual& a) { return {-a.value, -a.deriv}; }
constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }

inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.value);
  return {s, a.deriv / (2.0 * s)};
}

inline Dual cbrt(const Dual& a) {
  const double c = std::cbrt(a.value);
  return {c, a.deriv / (3.0 * c * c)};
}

inline Dual pow(const Dual& a, double p) {
  const double v = std::pow(a.value, p);
  return {v, p * std::pow(a.value, p - 1.0) * a.deriv};
}

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.value);
  return {e, e * a.deriv};
}

inline Dual log(const Dual& a) { return {std::log(a.value), a.deriv / a.value}; }

inline Dual sin(const Dual& a) { return {std::sin(a.value), std::cos(a.value) * a.deriv}; }

inline Dual cos(const Dual& a) { return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }

/// Plain value of a scalar that may be a Dual.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value; }

}  // namespace fireball
