#pragma once

// First integrals of the reduced systems: the energy H, the Ermakov
// invariant I (and Ĩ = 2I for the elliptic model), and the explicitly
// time-dependent scaling invariant J.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "fireball/dynamics.hpp"
#include "fireball/integrate.hpp"
#include "fireball/model.hpp"

namespace fireball {

/// Lower bound of I over the whole phase space.
inline double ermakov_lower_bound(ModelKind kind) {
  detail::require_planar(kind, "ermakov_lower_bound");
  return kind == ModelKind::TwoD ? 2.0 : 9.0 / 4.0;
}

/// Ermakov invariant of the 2d or elliptic system.
///
///   2d:        ½(XẎ − YẊ)² + Y/X + X/Y
///   elliptic:  ½(XẎ − YẊ)² + ¾(Y/X)^{4/3} + (3/2)(X/Y)^{2/3}
inline double ermakov_invariant(const State& state) {
  detail::require_planar(state.kind(), "ermakov_invariant");
  const double x = state.q(0), y = state.q(1);
  const double m = x * state.qdot(1) - y * state.qdot(0);
  const double u = y / x;
  if (state.kind() == ModelKind::TwoD) return 0.5 * m * m + u + 1.0 / u;
  const double c = std::cbrt(u);
  return 0.5 * m * m + 0.75 * u * c + 1.5 / (c * c);
}

/// Ĩ = 2I, the elliptic invariant in the normalization of the stretched
/// polar form.
inline double ermakov_invariant_tilde(const State& state) {
  if (state.kind() != ModelKind::EllipticThreeD) {
    throw UnsupportedModel("ermakov_invariant_tilde: elliptic model only");
  }
  return 2.0 * ermakov_invariant(state);
}

/// Coupling functions of a frictionless (ω = 0) Ermakov pair
///
///   Ẍ = f(Y/X) / (X²Y),   Ÿ = g(X/Y) / (XY²)
///
/// together with antiderivatives F' = f and G' = g. An empty g means g ≡ 0,
/// in which case Y is unrestricted (Ÿ = 0).
struct GeneralErmakovSpec {
  std::function<double(double)> f;
  std::function<double(double)> F;
  std::function<double(double)> g;
  std::function<double(double)> G;

  /// f = g = 1: the 2d fireball.
  static GeneralErmakovSpec two_d() {
    auto one = [](double) { return 1.0; };
    auto id = [](double s) { return s; };
    return {one, id, one, id};
  }

  /// f(s) = s^{1/3}, g(s) = s^{-1/3}, i.e. f(Y/X) = g(X/Y) = (Y/X)^{1/3}.
  static GeneralErmakovSpec elliptic() {
    return {[](double s) { return std::cbrt(s); },
            [](double s) { return 0.75 * s * std::cbrt(s); },
            [](double s) { return 1.0 / std::cbrt(s); },
            [](double s) {
              const double c = std::cbrt(s);
              return 1.5 * c * c;
            }};
  }

  /// f(s) = s with a free g; X then obeys the 1d Pinney equation.
  static GeneralErmakovSpec one_d(std::function<double(double)> g = {},
                                  std::function<double(double)> G = {}) {
    return {[](double s) { return s; }, [](double s) { return 0.5 * s * s; }, std::move(g),
            std::move(G)};
  }
};

inline double general_ermakov_invariant(const GeneralErmakovSpec& spec, double x, double y,
                                        double xdot, double ydot) {
  if (!(x > 0.0)) throw DomainError("general_ermakov_invariant: X must be positive");
  const bool has_g = static_cast<bool>(spec.g);
  if (has_g && !(y > 0.0)) throw DomainError("general_ermakov_invariant: Y must be positive");
  const double m = x * ydot - y * xdot;
  double i = 0.5 * m * m + spec.F(y / x);
  if (has_g) i += spec.G(x / y);
  return i;
}

/// Accelerations (Ẍ, Ÿ) of the Ermakov pair described by `spec`.
inline std::pair<double, double> general_ermakov_acceleration(const GeneralErmakovSpec& spec,
                                                              double x, double y) {
  if (!(x > 0.0)) throw DomainError("general_ermakov_acceleration: X must be positive");
  const bool has_g = static_cast<bool>(spec.g);
  if (has_g && !(y > 0.0)) throw DomainError("general_ermakov_acceleration: Y must be positive");
  if (y == 0.0) throw DomainError("general_ermakov_acceleration: Y must be nonzero");
  const double ax = spec.f(y / x) / (x * x * y);
  const double ay = has_g ? spec.g(x / y) / (x * y * y) : 0.0;
  return {ax, ay};
}

/// Noether invariant of the scaling symmetry, J = 2tH − Σ w_i q_i q̇_i.
inline double noether_invariant(const State& state) {
  const Coords w = mass_weights(state.kind());
  double virial = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) virial += w[i] * state.q(i) * state.qdot(i);
  return 2.0 * state.t() * hamiltonian(state) - virial;
}

/// Effective angular potential U(φ) in the polar form of the invariant.
inline double angular_potential(ModelKind kind, double phi) {
  detail::require_planar(kind, "angular_potential");
  if (!(phi > 0.0 && phi < std::numbers::pi / 2)) {
    throw DomainError("angular_potential: phi must lie strictly inside (0, pi/2)");
  }
  const double c = std::cos(phi), s = std::sin(phi);
  if (kind == ModelKind::TwoD) return 1.0 / (s * c);
  const double k = std::cbrt(c * c * s);
  return 3.0 / std::cbrt(2.0) / (k * k);
}

/// dU/dφ.
inline double angular_potential_derivative(ModelKind kind, double phi) {
  const double u = angular_potential(kind, phi);
  const double tn = std::tan(phi);
  if (kind == ModelKind::TwoD) return u * (tn - 1.0 / tn);
  return (2.0 / 3.0) * u * (2.0 * tn - 1.0 / tn);
}

/// Minimum of U(φ): 2 at φ = π/4 (2d), 9/2 at sin φ = 1/√3 (elliptic).
inline double angular_potential_minimum(ModelKind kind) {
  detail::require_planar(kind, "angular_potential_minimum");
  return kind == ModelKind::TwoD ? 2.0 : 4.5;
}

inline double angular_potential_argmin(ModelKind kind) {
  detail::require_planar(kind, "angular_potential_argmin");
  return kind == ModelKind::TwoD ? std::numbers::pi / 4 : std::asin(1.0 / std::sqrt(3.0));
}

struct PolarInvariants {
  double H = 0.0;
  /// I for the 2d model, Ĩ for the elliptic model.
  double I = 0.0;
};

/// H = ṙ²/2 + I/r² and I = ½(r²φ̇)² + U(φ).
inline PolarInvariants polar_invariants(const PolarState& polar, ModelKind kind) {
  if (!(polar.r > 0.0)) throw DomainError("polar_invariants: r must be positive");
  const double l = polar.r * polar.r * polar.phidot;
  const double inv = 0.5 * l * l + angular_potential(kind, polar.phi);
  return {0.5 * polar.rdot * polar.rdot + inv / (polar.r * polar.r), inv};
}

struct InvariantRow {
  double t = 0.0;
  double H = 0.0;
  std::optional<double> I;
  std::optional<double> Itilde;
  double J = 0.0;
};

struct InvariantDrift {
  double H = 0.0;
  std::optional<double> I;
  std::optional<double> Itilde;
  double J = 0.0;
};

/// Invariants evaluated along a trajectory.
///
/// Drift is max |v(t) − v(0)| / |v(0)| for H, I and Ĩ and
/// max |J(t) − J(0)| / max(1, |J(0)|) for J, which may vanish.
struct InvariantReport {
  std::vector<InvariantRow> series;
  InvariantDrift drift;
};

inline InvariantRow invariant_row(const State& s) {
  InvariantRow row{s.t(), hamiltonian(s), std::nullopt, std::nullopt, noether_invariant(s)};
  if (s.kind() == ModelKind::TwoD || s.kind() == ModelKind::EllipticThreeD) {
    row.I = ermakov_invariant(s);
  }
  if (s.kind() == ModelKind::EllipticThreeD) row.Itilde = 2.0 * *row.I;
  return row;
}

inline InvariantReport invariant_report(const Trajectory& traj) {
  if (traj.empty()) throw InsufficientData("invariant_report: empty trajectory");
  InvariantReport report;
  report.series.reserve(traj.size());
  for (const State& s : traj) report.series.push_back(invariant_row(s));

  const InvariantRow& first = report.series.front();
  auto rel = [](double v, double v0) { return std::abs(v - v0) / std::abs(v0); };
  InvariantDrift& d = report.drift;
  if (first.I) d.I = 0.0;
  if (first.Itilde) d.Itilde = 0.0;
  for (const InvariantRow& row : report.series) {
    d.H = std::max(d.H, rel(row.H, first.H));
    d.J = std::max(d.J, std::abs(row.J - first.J) / std::max(1.0, std::abs(first.J)));
    if (row.I) d.I = std::max(*d.I, rel(*row.I, *first.I));
    if (row.Itilde) d.Itilde = std::max(*d.Itilde, rel(*row.Itilde, *first.Itilde));
  }
  return report;
}

}  // namespace fireball
