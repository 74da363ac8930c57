#pragma once

// Noether machinery for the reduced Lagrangians L = ½ Σ w_i q̇_i² − V(q).
//
// Symmetry coefficients and gauge functions are generic callables evaluated
// on Dual numbers, so their total time derivatives (τ̇, η̇, Λ̇) are exact.
// Partial derivatives of L are closed form. Only extended_generator_apply,
// which acts on arbitrary fields, falls back to finite differences.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "fireball/dual.hpp"
#include "fireball/dynamics.hpp"
#include "fireball/integrate.hpp"
#include "fireball/invariants.hpp"
#include "fireball/model.hpp"

namespace fireball {

/// Point symmetry G = τ ∂t + η·∂q with gauge Λ, all functions of (q, t).
///
/// Each callable is generic in the scalar type:
///   tau(const std::array<T,3>& q, T t) -> T
///   eta(const std::array<T,3>& q, T t) -> std::array<T,3>
///   gauge(const std::array<T,3>& q, T t) -> T
template <class Tau, class Eta, class Gauge>
struct PointSymmetry {
  Tau tau;
  Eta eta;
  Gauge gauge;
};

template <class Tau, class Eta, class Gauge>
PointSymmetry<Tau, Eta, Gauge> make_point_symmetry(Tau tau, Eta eta, Gauge gauge) {
  return {std::move(tau), std::move(eta), std::move(gauge)};
}

namespace detail {
inline constexpr auto zero_gauge = [](const auto& q, auto) {
  using T = std::decay_t<decltype(q[0])>;
  return T(0.0);
};
}  // namespace detail

/// τ = 2t, η = q, Λ = 0.
inline auto scaling_symmetry() {
  return make_point_symmetry(
      [](const auto&, auto t) { return decltype(t)(2.0) * t; },
      [](const auto& q, auto) { return q; }, detail::zero_gauge);
}

/// τ = 1, η = 0, Λ = 0.
inline auto time_translation() {
  return make_point_symmetry(
      [](const auto&, auto t) { return decltype(t)(1.0); },
      [](const auto& q, auto) {
        using T = std::decay_t<decltype(q[0])>;
        return std::array<T, 3>{};
      },
      detail::zero_gauge);
}

namespace detail {

struct PointJet {
  Dual tau;
  std::array<Dual, 3> eta;
  Dual gauge;
};

/// Coefficients along the straight line (q + ε q̇, t + ε); the ε-parts are
/// the total time derivatives of functions of (q, t).
template <class Sym>
PointJet point_jet(const Sym& sym, const State& s) {
  std::array<Dual, 3> q{};
  for (std::size_t i = 0; i < s.dim(); ++i) q[i] = Dual(s.q(i), s.qdot(i));
  const Dual t(s.t(), 1.0);
  return {sym.tau(q, t), sym.eta(q, t), sym.gauge(q, t)};
}

}  // namespace detail

/// G^[1]L + τ̇L − Λ̇ at a phase point; zero for a Noether symmetry.
template <class Sym>
double noether_condition_residual(const Sym& sym, const State& s) {
  const detail::PointJet jet = detail::point_jet(sym, s);
  const Coords grad = potential_gradient(s);
  const Coords p = canonical_momenta(s);
  const double L = lagrangian(s);
  double g1 = 0.0;  // autonomous L: the τ ∂L/∂t term vanishes
  for (std::size_t i = 0; i < s.dim(); ++i) {
    g1 += jet.eta[i].value * (-grad[i]);
    g1 += (jet.eta[i].deriv - jet.tau.deriv * s.qdot(i)) * p[i];
  }
  return g1 + jet.tau.deriv * L - jet.gauge.deriv;
}

/// J = τ(q̇·∂L/∂q̇ − L) − η·∂L/∂q̇ + Λ.
template <class Sym>
double noether_invariant_from(const Sym& sym, const State& s) {
  const detail::PointJet jet = detail::point_jet(sym, s);
  const Coords p = canonical_momenta(s);
  double qdot_p = 0.0, eta_p = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    qdot_p += s.qdot(i) * p[i];
    eta_p += jet.eta[i].value * p[i];
  }
  return jet.tau.value * (qdot_p - lagrangian(s)) - eta_p + jet.gauge.value;
}

/// First prolongation G^[1]F = τ ∂F/∂t + η·∂F/∂q + (η̇ − τ̇ q̇)·∂F/∂q̇ applied to
/// a phase-space field F(State). Partials of F use central differences with
/// step 1e-6·max(1, |x|).
template <class Sym, class Field>
double extended_generator_apply(const Sym& sym, Field&& field, const State& s) {
  const detail::PointJet jet = detail::point_jet(sym, s);
  const std::size_t d = s.dim();
  const ModelKind kind = s.kind();

  auto eval = [&](double t, const Coords& q, const Coords& v) {
    return static_cast<double>(field(State(kind, t, std::span<const double>(q.data(), d),
                                           std::span<const double>(v.data(), d))));
  };
  auto step = [](double x) { return 1e-6 * std::max(1.0, std::abs(x)); };

  const Coords& q = s.q_padded();
  const Coords& v = s.qdot_padded();
  double result = 0.0;
  {
    const double h = step(s.t());
    const double dt = (eval(s.t() + h, q, v) - eval(s.t() - h, q, v)) / (2.0 * h);
    result += jet.tau.value * dt;
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double h = std::min(step(q[i]), 0.5 * q[i]);
    Coords qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    result += jet.eta[i].value * (eval(s.t(), qp, v) - eval(s.t(), qm, v)) / (2.0 * h);

    const double hv = step(v[i]);
    Coords vp = v, vm = v;
    vp[i] += hv;
    vm[i] -= hv;
    const double coeff = jet.eta[i].deriv - jet.tau.deriv * v[i];
    result += coeff * (eval(s.t(), q, vp) - eval(s.t(), q, vm)) / (2.0 * hv);
  }
  return result;
}

/// Gauge of the velocity-dependent symmetry generating the 2d Ermakov
/// invariant: Λ = τL − ½(XẎ − YẊ)² + X/Y + Y/X.
inline constexpr auto ermakov_gauge = [](const auto& q, const auto& v, auto t, auto tau) {
  using T = decltype(t);
  const std::array<T, 3> q3{q[0], q[1], T(0.0)};
  const std::array<T, 3> v3{v[0], v[1], T(0.0)};
  const T m = q[0] * v[1] - q[1] * v[0];
  return tau * kernel::lagrangian(ModelKind::TwoD, q3, v3) - T(0.5) * m * m + q[0] / q[1] +
         q[1] / q[0];
};

struct DynamicalSymmetryResult {
  /// G^[1]L + τ̇L − Λ̇ on shell.
  double residual = 0.0;
  /// Noether invariant of the symmetry.
  double invariant = 0.0;
};

/// Checks the velocity-dependent symmetry of the 2d system
///
///   G = τ ∂t + [τẊ + Y M] ∂X + [τẎ − X M] ∂Y,   M = XẎ − YẊ,
///
/// for a free function tau(q, v, t) (generic over the scalar type,
/// q and v being std::array<T,2>). Total derivatives are taken along the
/// flow, with accelerations from the equations of motion.
template <class Tau, class Gauge>
DynamicalSymmetryResult dynamical_symmetry_check(Tau&& tau, const State& s, Gauge&& gauge) {
  if (s.kind() != ModelKind::TwoD) {
    throw UnsupportedModel("dynamical_symmetry_check: defined for the 2d model only");
  }
  const Coords a = rhs(s);
  const std::array<Dual, 2> q{Dual(s.q(0), s.qdot(0)), Dual(s.q(1), s.qdot(1))};
  const std::array<Dual, 2> v{Dual(s.qdot(0), a[0]), Dual(s.qdot(1), a[1])};
  const Dual t(s.t(), 1.0);

  const Dual tau_d = tau(q, v, t);
  const Dual m = q[0] * v[1] - q[1] * v[0];
  const std::array<Dual, 2> xi{tau_d * v[0] + q[1] * m, tau_d * v[1] - q[0] * m};
  const Dual lambda = gauge(q, v, t, tau_d);

  const Coords grad = potential_gradient(s);
  const Coords p = canonical_momenta(s);
  const double L = lagrangian(s);
  double lhs = tau_d.deriv * L;
  double qdot_p = 0.0, xi_p = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    lhs += xi[i].value * (-grad[i]) + (xi[i].deriv - tau_d.deriv * s.qdot(i)) * p[i];
    qdot_p += s.qdot(i) * p[i];
    xi_p += xi[i].value * p[i];
  }
  return {lhs - lambda.deriv, tau_d.value * (qdot_p - L) - xi_p + lambda.value};
}

template <class Tau>
DynamicalSymmetryResult dynamical_symmetry_check(Tau&& tau, const State& s) {
  return dynamical_symmetry_check(std::forward<Tau>(tau), s, ermakov_gauge);
}

/// Image of a state under t → αt, q → βq (so q̇ → (β/α) q̇).
inline State rescale_state(const State& s, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("rescale: alpha and beta must be positive");
  Coords q{}, v{};
  for (std::size_t i = 0; i < s.dim(); ++i) {
    q[i] = beta * s.q(i);
    v[i] = beta / alpha * s.qdot(i);
  }
  return State(s.kind(), alpha * s.t(), std::span<const double>(q.data(), s.dim()),
               std::span<const double>(v.data(), s.dim()));
}

/// Coefficient c in d²q̄/dt̄² = c · F(q̄) after rescaling; every reduced force
/// is homogeneous of degree −3, so c = β⁴/α² and form invariance needs α = β².
inline double form_invariance_factor(double alpha, double beta) {
  return std::pow(beta, 4) / (alpha * alpha);
}

inline State scale_state(const State& s, double beta) { return rescale_state(s, beta * beta, beta); }

/// Maps every sample by the scaling symmetry: X̄(t̄) = βX(t̄/β²).
inline Trajectory scaled_trajectory(const Trajectory& traj, double beta) {
  if (!(beta > 0.0)) throw DomainError("scaled_trajectory: beta must be positive");
  std::vector<State> out;
  out.reserve(traj.size());
  for (const State& s : traj) out.push_back(scale_state(s, beta));
  return Trajectory(traj.kind(), std::move(out));
}

/// Components of the scaling generator on (t, q, q̇): (2t, q, −q̇).
struct PhaseTangent {
  double t = 0.0;
  Coords q{};
  Coords qdot{};
};

inline PhaseTangent scaling_generator_action(const State& s) {
  PhaseTangent g{2.0 * s.t(), {}, {}};
  for (std::size_t i = 0; i < s.dim(); ++i) {
    g.q[i] = s.q(i);
    g.qdot[i] = -s.qdot(i);
  }
  return g;
}

/// Displacement (t̄ − t, q̄ − q, q̄̇ − q̇) of the scaling map at β = 1 + eps,
/// evaluated without cancellation.
inline PhaseTangent scaling_displacement(const State& s, double eps) {
  if (!(eps > -1.0)) throw DomainError("scaling_displacement: requires beta = 1 + eps > 0");
  PhaseTangent d{eps * (2.0 + eps) * s.t(), {}, {}};
  for (std::size_t i = 0; i < s.dim(); ++i) {
    d.q[i] = eps * s.q(i);
    d.qdot[i] = -eps / (1.0 + eps) * s.qdot(i);
  }
  return d;
}

/// Largest mismatch over interior samples between fourth-order central
/// differences of the sampled data and the model: |Δq̇/Δt − q̈_model| and
/// |Δq/Δt − q̇|. Only windows of five equally spaced samples are used.
inline double ode_residual(const Trajectory& traj) {
  if (traj.size() < 5) throw InsufficientData("ode_residual: need at least five samples");
  double worst = 0.0;
  std::size_t windows = 0;
  for (std::size_t i = 2; i + 2 < traj.size(); ++i) {
    const double h = traj[i + 1].t() - traj[i].t();
    bool uniform = true;
    for (std::size_t k = i - 2; k < i + 2; ++k) {
      const double hk = traj[k + 1].t() - traj[k].t();
      if (std::abs(hk - h) > 1e-9 * h) uniform = false;
    }
    if (!uniform) continue;
    ++windows;
    const Coords a = rhs(traj[i]);
    auto stencil = [&](auto&& component) {
      return (-component(traj[i + 2]) + 8.0 * component(traj[i + 1]) -
              8.0 * component(traj[i - 1]) + component(traj[i - 2])) /
             (12.0 * h);
    };
    for (std::size_t c = 0; c < traj[i].dim(); ++c) {
      const double acc = stencil([c](const State& x) { return x.qdot(c); });
      const double vel = stencil([c](const State& x) { return x.q(c); });
      worst = std::max({worst, std::abs(acc - a[c]), std::abs(vel - traj[i].qdot(c))});
    }
  }
  if (windows == 0) throw InsufficientData("ode_residual: no uniformly spaced window");
  return worst;
}

}  // namespace fireball
