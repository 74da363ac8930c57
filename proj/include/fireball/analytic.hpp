#pragma once

// Closed-form and quadrature solutions of the reduced systems.
//
// For the planar models the energy separates as H = ṙ²/2 + I/r², so r(t) is
// explicit, and in the time t̃ = ∫dt/r² the angle obeys the one-degree-of-
// freedom energy law I = ½(dφ/dt̃)² + U(φ).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "fireball/dynamics.hpp"
#include "fireball/integrate.hpp"
#include "fireball/invariants.hpp"
#include "fireball/model.hpp"
#include "fireball/ode.hpp"

namespace fireball {

/// Radial motion r² = 2H(t − t0)² + I/H with H, I > 0.
struct RadialSolution {
  double H = 1.0;
  /// I for the 2d model, Ĩ for the elliptic model.
  double I = 2.0;
  double t0 = 0.0;

  void validate() const {
    if (!(H > 0.0) || !(I > 0.0) || !std::isfinite(t0)) {
      throw DomainError("radial solution: requires H > 0, I > 0 and finite t0");
    }
  }

  static RadialSolution from_state(const State& state) {
    const PolarState p = to_polar(state);
    const PolarInvariants inv = polar_invariants(p, state.kind());
    RadialSolution sol{inv.H, inv.I, state.t() - p.r * p.rdot / (2.0 * inv.H)};
    sol.validate();
    return sol;
  }
};

struct RadialPoint {
  double r = 0.0;
  double rdot = 0.0;
};

inline RadialPoint radial(const RadialSolution& sol, double t) {
  sol.validate();
  const double s = t - sol.t0;
  const double r = std::sqrt(2.0 * sol.H * s * s + sol.I / sol.H);
  return {r, 2.0 * sol.H * s / r};
}

/// Spherical radius of the 3d model, r² = 2Ht² − 2Jt + r0², with J the
/// scaling invariant and r0 the radius at t = 0.
inline RadialPoint radial_3d(double H, double J, double r0, double t) {
  if (!(H > 0.0) || !(r0 > 0.0)) throw DomainError("radial_3d: requires H > 0 and r0 > 0");
  const double r2 = 2.0 * H * t * t - 2.0 * J * t + r0 * r0;
  if (!(r2 > 0.0)) throw DomainError("radial_3d: r² is not positive at the requested time");
  const double r = std::sqrt(r2);
  return {r, (2.0 * H * t - J) / r};
}

/// t̃(t) = ∫_{t0}^{t} dt'/r² = arctan(√(2/I) H (t − t0)) / √(2I).
inline double time_reparam(const RadialSolution& sol, double t) {
  sol.validate();
  return std::atan(std::sqrt(2.0 / sol.I) * sol.H * (t - sol.t0)) / std::sqrt(2.0 * sol.I);
}

/// Initial data for the angular motion in reparametrized time.
struct AngularSolution {
  /// I for the 2d model, Ĩ for the elliptic model.
  double invariant = 2.0;
  double phi0 = std::numbers::pi / 4;
  /// Branch of dφ/dt̃ at phi0: +1 or −1.
  int sign0 = 1;
  /// Reparametrized time at which phi = phi0.
  double ttilde0 = 0.0;
};

struct AngularSample {
  double ttilde = 0.0;
  double phi = 0.0;
  double dphi = 0.0;  ///< dφ/dt̃
};

namespace detail {

inline void validate_angular(const AngularSolution& sol, ModelKind kind) {
  require_planar(kind, "angular solution");
  if (!(sol.phi0 > 0.0 && sol.phi0 < std::numbers::pi / 2)) {
    throw DomainError("angular solution: phi0 must lie strictly inside (0, pi/2)");
  }
  if (sol.sign0 != 1 && sol.sign0 != -1) throw DomainError("angular solution: sign0 must be ±1");
  if (!(sol.invariant >= angular_potential_minimum(kind))) {
    throw NoMotionError("angular solution: invariant below the potential minimum");
  }
  const double excess = sol.invariant - angular_potential(kind, sol.phi0);
  if (excess < -1e-12 * sol.invariant) {
    throw NoMotionError("angular solution: phi0 is not reachable with this invariant");
  }
}

/// Root of U(φ) = level on [lo, hi], given U − level changes sign there.
template <class Fn>
double bisect(Fn&& g, double lo, double hi, double tol) {
  double glo = g(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Turning points φ₋ < φ₊ where U(φ) equals `invariant`, located by
/// bisection to 1e-12.
inline std::pair<double, double> turning_points(ModelKind kind, double invariant) {
  detail::require_planar(kind, "turning_points");
  const double umin = angular_potential_minimum(kind);
  if (!(invariant >= umin)) throw NoMotionError("turning_points: invariant below the minimum");
  const double centre = angular_potential_argmin(kind);
  if (invariant == umin) return {centre, centre};
  auto g = [&](double phi) { return angular_potential(kind, phi) - invariant; };
  // U diverges at both ends; find brackets close enough to the axes.
  double lo = centre, hi = centre;
  do {
    lo *= 0.5;
  } while (g(lo) <= 0.0);
  const double quarter = std::numbers::pi / 2;
  do {
    hi = quarter - 0.5 * (quarter - hi);
  } while (g(hi) <= 0.0);
  return {detail::bisect(g, lo, centre, 1e-12), detail::bisect(g, centre, hi, 1e-12)};
}

/// Angle φ(t̃) on `ttilde_grid` (non-decreasing, ≥ sol.ttilde0).
///
/// The energy law is integrated in its second-order form d²φ/dt̃² = −U'(φ)
/// with the adaptive Dormand–Prince machinery, starting from
/// dφ/dt̃ = sign0 · √(2(I − U(φ0))); the branch reverses at the turning
/// points without special casing. Throws NumericError if the invariant is not
/// preserved to 1e-8.
inline std::vector<AngularSample> angular_quadrature(const AngularSolution& sol, ModelKind kind,
                                                     std::span<const double> ttilde_grid) {
  detail::validate_angular(sol, kind);
  const double excess = std::max(0.0, sol.invariant - angular_potential(kind, sol.phi0));
  const ode::Vector<2> y0{sol.phi0, sol.sign0 * std::sqrt(2.0 * excess)};

  std::vector<double> targets;
  for (std::size_t i = 0; i < ttilde_grid.size(); ++i) {
    const double tt = ttilde_grid[i];
    if (tt < sol.ttilde0 || (i > 0 && tt < ttilde_grid[i - 1])) {
      throw DomainError("angular_quadrature: grid must be non-decreasing and start at ttilde0");
    }
    if (tt > sol.ttilde0 && (targets.empty() || tt > targets.back())) targets.push_back(tt);
  }

  std::vector<AngularSample> solved;
  solved.reserve(targets.size());
  auto f = [kind](double, const ode::Vector<2>& y) {
    return ode::Vector<2>{y[1], -angular_potential_derivative(kind, y[0])};
  };
  auto admissible = [](const ode::Vector<2>& y) {
    return y[0] > 0.0 && y[0] < std::numbers::pi / 2 && std::isfinite(y[1]);
  };
  ode::Settings settings{1e-12, 1e-13, 1e-4, 0.05, 50};
  const auto outcome = ode::integrate<2>(f, sol.ttilde0, y0, targets, settings, admissible,
                                         [&](double tt, const ode::Vector<2>& y) {
                                           solved.push_back({tt, y[0], y[1]});
                                         });
  if (outcome.status != ode::Status::Ok) {
    throw NumericError("angular_quadrature: integration failed near ttilde = " +
                       detail::exact_text(outcome.t));
  }

  std::vector<AngularSample> out;
  out.reserve(ttilde_grid.size());
  std::size_t next = 0;
  for (double tt : ttilde_grid) {
    if (tt == sol.ttilde0) {
      out.push_back({tt, y0[0], y0[1]});
      continue;
    }
    while (solved[next].ttilde < tt) ++next;
    out.push_back(solved[next]);
  }
  for (const AngularSample& s : out) {
    const double inv = 0.5 * s.dphi * s.dphi + angular_potential(kind, s.phi);
    if (std::abs(inv - sol.invariant) > 1e-8 * sol.invariant) {
      throw NumericError("angular_quadrature: invariant not preserved");
    }
  }
  return out;
}

struct OneDPoint {
  double X = 0.0;
  double Xdot = 0.0;
};

/// Exact solution X = (2H(t − t0)² + 1/(2H))^{1/2} of Ẍ = 1/X³.
inline OneDPoint oneD_solution(double H, double t0, double t) {
  if (!(H > 0.0)) throw DomainError("oneD_solution: H must be positive");
  const double s = t - t0;
  const double x = std::sqrt(2.0 * H * s * s + 0.5 / H);
  return {x, 2.0 * H * s / x};
}

/// Nonlinear superposition for the 1d Ermakov pair with f(s) = s, g = 0,
/// built on the particular solution X = ((t − t0)² + 1)^{1/2}.
struct Superposition1D {
  double tau = 0.0;  ///< ∫dt/X² = arctan(t − t0)
  double u = 0.0;    ///< Y/X = √(2I) sin τ
  double X = 0.0;
  double Xdot = 0.0;
  double Y = 0.0;  ///< √(2I)(t − t0), a free-particle motion
  double Ydot = 0.0;
};

inline Superposition1D superposition_1d(double I, double t0, double t) {
  if (!(I > 0.0)) throw DomainError("superposition_1d: I must be positive");
  const double s = t - t0;
  const OneDPoint x = oneD_solution(0.5, t0, t);
  const double amp = std::sqrt(2.0 * I);
  Superposition1D r;
  r.tau = std::atan(s);
  r.u = amp * std::sin(r.tau);
  r.X = x.X;
  r.Xdot = x.Xdot;
  r.Y = amp * s;
  r.Ydot = amp;
  return r;
}

/// States of the exact solution through `initial` at the requested times
/// (non-decreasing, ≥ initial.t()). Available for the 1d, 2d and elliptic
/// models; the planar models go through radial + time_reparam +
/// angular_quadrature.
inline std::vector<State> analytic_states(const State& initial, std::span<const double> times) {
  const ModelKind kind = initial.kind();
  std::vector<State> out;
  out.reserve(times.size());
  if (kind == ModelKind::OneD) {
    const double H = hamiltonian(initial);
    const double t0 = initial.t() - initial.q(0) * initial.qdot(0) / (2.0 * H);
    for (double t : times) {
      const OneDPoint p = oneD_solution(H, t0, t);
      out.emplace_back(kind, t, std::initializer_list<double>{p.X},
                       std::initializer_list<double>{p.Xdot});
    }
    return out;
  }
  if (kind == ModelKind::ThreeD) {
    throw UnsupportedModel("analytic_states: only the radius is available in closed form for 3d");
  }

  const PolarState p0 = to_polar(initial);
  const RadialSolution radial_sol = RadialSolution::from_state(initial);
  AngularSolution ang{radial_sol.I, p0.phi, p0.phidot < 0.0 ? -1 : 1,
                      time_reparam(radial_sol, initial.t())};
  std::vector<double> tt;
  tt.reserve(times.size());
  for (double t : times) tt.push_back(std::max(ang.ttilde0, time_reparam(radial_sol, t)));
  const auto angles = angular_quadrature(ang, kind, tt);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const RadialPoint rp = radial(radial_sol, times[i]);
    PolarState p{rp.r, angles[i].phi, rp.rdot, angles[i].dphi / (rp.r * rp.r), angles[i].ttilde};
    out.push_back(to_cartesian(p, kind, times[i]));
  }
  return out;
}

}  // namespace fireball
