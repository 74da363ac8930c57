#pragma once

// Hydrodynamic fields of the Gaussian fireball (1d and 2d), residuals of the
// ideal-gas fluid equations along a reduced trajectory, and the total fluid
// energy.
//
//   n = n0 Π(Xi0/Xi) exp(−Σ xi²/(2Xi²)),   vi = (Ẋi/Xi) xi,
//   T = T0 (X0Y0/(XY)) in 2d,  T0 (X0/X)² in 1d,
//   p = nT,  ε = nT (2d) or nT/2 (1d).
//
// Spatial derivatives are analytic; time derivatives are finite differences
// across trajectory samples at fixed spatial position.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fireball/integrate.hpp"
#include "fireball/model.hpp"
#include "fireball/quadrature.hpp"

namespace fireball {

/// Spatial position (x, y); y is ignored by the 1d model.
using SpatialPoint = std::array<double, 2>;

struct FluidFields {
  double n = 0.0;
  std::array<double, 2> v{};
  double T = 0.0;
  double p = 0.0;
  double eps = 0.0;
};

namespace detail {

inline void require_fluid_model(ModelKind kind, const char* what) {
  if (kind != ModelKind::OneD && kind != ModelKind::TwoD) {
    throw UnsupportedModel(std::string(what) + ": field reconstruction covers the 1d and 2d models");
  }
}

/// ε / (nT): the number of degrees of freedom over two.
inline double energy_factor(ModelKind kind) { return kind == ModelKind::OneD ? 0.5 : 1.0; }

inline std::array<double, 2> reference_widths(const PhysicalParams& params, ModelKind kind) {
  return {params.X0, kind == ModelKind::OneD ? 1.0 : *params.Y0};
}

/// Π Xi0/Xi.
inline double volume_ratio(const PhysicalParams& params, const State& s) {
  const auto ref = reference_widths(params, s.kind());
  double r = 1.0;
  for (std::size_t i = 0; i < s.dim(); ++i) r *= ref[i] / s.q(i);
  return r;
}

inline double temperature(const PhysicalParams& params, const State& s) {
  const double ratio = volume_ratio(params, s);
  return s.kind() == ModelKind::OneD ? params.T0 * ratio * ratio : params.T0 * ratio;
}

}  // namespace detail

/// Fields at `point` for a dimensional state.
inline FluidFields fields_at(const PhysicalParams& params, const State& state,
                             const SpatialPoint& point) {
  const ModelKind kind = state.kind();
  detail::require_fluid_model(kind, "fields_at");
  params.validate(kind);
  double exponent = 0.0;
  FluidFields f;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const double x = point[i] / state.q(i);
    exponent += 0.5 * x * x;
    f.v[i] = state.qdot(i) / state.q(i) * point[i];
  }
  f.n = params.n0 * detail::volume_ratio(params, state) * std::exp(-exponent);
  f.T = detail::temperature(params, state);
  f.p = f.n * f.T;
  f.eps = detail::energy_factor(kind) * f.n * f.T;
  return f;
}

/// Residuals of continuity, momentum and energy balance at one probe and
/// time, in units of n0/τ, L/τ² and n0·T0/τ (τ, L the model's time and length
/// scales). Momentum reports the largest component.
struct PdeResidual {
  double t = 0.0;
  SpatialPoint point{};
  double continuity = 0.0;
  double momentum = 0.0;
  double energy = 0.0;

  double max_abs() const {
    return std::max({std::abs(continuity), std::abs(momentum), std::abs(energy)});
  }
};

/// Probe grid {0, ±1, ±2} standard deviations per axis at `dimensional`.
inline std::vector<SpatialPoint> default_probes(const State& dimensional) {
  detail::require_fluid_model(dimensional.kind(), "default_probes");
  constexpr std::array<double, 5> offsets{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<SpatialPoint> probes;
  if (dimensional.kind() == ModelKind::OneD) {
    for (double a : offsets) probes.push_back({a * dimensional.q(0), 0.0});
  } else {
    for (double a : offsets) {
      for (double b : offsets) probes.push_back({a * dimensional.q(0), b * dimensional.q(1)});
    }
  }
  return probes;
}

namespace detail {

/// Weights w_k with Σ w_k g(t_k) ≈ g'(t_i) from the interpolating polynomial
/// through t_lo .. t_lo + count − 1.
inline std::vector<double> derivative_weights(const std::vector<State>& samples, std::size_t lo,
                                              std::size_t count, std::size_t i) {
  const double x = samples[i].t();
  std::vector<double> w(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const double tk = samples[lo + k].t();
    for (std::size_t m = 0; m < count; ++m) {
      if (m == k) continue;
      double term = 1.0 / (tk - samples[lo + m].t());
      for (std::size_t l = 0; l < count; ++l) {
        if (l == k || l == m) continue;
        term *= (x - samples[lo + l].t()) / (tk - samples[lo + l].t());
      }
      w[k] += term;
    }
  }
  return w;
}

}  // namespace detail

/// Evaluates the fluid equations along a dimensionless trajectory mapped to
/// physical units by `params`, at fixed physical probe positions.
///
/// Time derivatives differentiate the polynomial through the five samples
/// nearest each sample (centred where possible, one-sided at the ends), so
/// every sample gets a fourth-order estimate.
inline std::vector<PdeResidual> pde_residuals(const PhysicalParams& params, const Trajectory& traj,
                                              const std::vector<SpatialPoint>& probes) {
  const ModelKind kind = traj.kind();
  detail::require_fluid_model(kind, "pde_residuals");
  params.validate(kind);
  if (traj.size() < 3) throw InsufficientData("pde_residuals: need at least three samples");

  std::vector<State> dim;
  dim.reserve(traj.size());
  for (const State& s : traj) dim.push_back(dimensionalize(params, s));

  const double tau = params.time_scale(kind);
  const double L = params.length_scale(kind);
  const double c = detail::energy_factor(kind);
  const std::size_t d = dimension(kind);
  const std::size_t window = std::min<std::size_t>(5, dim.size());

  std::vector<PdeResidual> out;
  for (std::size_t i = 0; i < dim.size(); ++i) {
    const State& s = dim[i];
    for (std::size_t k = 0; k < d; ++k) {
      for (const SpatialPoint& p : probes) {
        if (std::abs(p[k]) > 5.0 * s.q(k)) {
          throw DomainError("pde_residuals: probe beyond five standard deviations");
        }
      }
    }

    const std::size_t lo = std::min(i > window / 2 ? i - window / 2 : 0, dim.size() - window);
    const std::vector<double> w = detail::derivative_weights(dim, lo, window, i);
    // d/dt at fixed position of a quantity evaluated on samples.
    auto time_derivative = [&](auto&& quantity) {
      double sum = 0.0;
      for (std::size_t k = 0; k < window; ++k) sum += w[k] * quantity(dim[lo + k]);
      return sum;
    };

    for (const SpatialPoint& p : probes) {
      const FluidFields f = fields_at(params, s, p);
      double div_nv = 0.0, div_v = 0.0, momentum = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double rate = s.qdot(k) / s.q(k);
        const double xr = p[k] / s.q(k);
        div_nv += f.n * rate * (1.0 - xr * xr);
        div_v += rate;
        const double dvdt =
            time_derivative([&](const State& x) { return fields_at(params, x, p).v[k]; });
        const double advect = f.v[k] * rate;
        const double pressure = -f.T * p[k] / (params.m * s.q(k) * s.q(k));
        momentum = std::max(momentum, std::abs(dvdt + advect + pressure));
      }
      const double dndt = time_derivative([&](const State& x) { return fields_at(params, x, p).n; });
      const double depsdt =
          time_derivative([&](const State& x) { return fields_at(params, x, p).eps; });

      PdeResidual r;
      r.t = s.t();
      r.point = p;
      r.continuity = (dndt + div_nv) * tau / params.n0;
      r.momentum = momentum * tau * tau / L;
      r.energy = (depsdt + c * f.T * div_nv + f.p * div_v) * tau / (params.n0 * params.T0);
      out.push_back(r);
    }
  }
  return out;
}

namespace detail {

inline const QuadratureRule& hermite_rule(std::size_t n) {
  static const QuadratureRule r20 = gauss_hermite(20);
  static const QuadratureRule r24 = gauss_hermite(24);
  return n == 20 ? r20 : r24;
}

/// ∫ n(x) · weight(x) dx over space with an n-node Gauss–Hermite product rule
/// in the variables s_i = x_i / (√2 X_i).
template <class Weight>
double gaussian_integral(const PhysicalParams& params, const State& s, std::size_t nodes,
                         Weight&& weight) {
  const QuadratureRule& rule = hermite_rule(nodes);
  const double amplitude = params.n0 * volume_ratio(params, s);
  double jac = 1.0;
  for (std::size_t i = 0; i < s.dim(); ++i) jac *= std::numbers::sqrt2 * s.q(i);
  double sum = 0.0;
  if (s.dim() == 1) {
    for (std::size_t a = 0; a < nodes; ++a) {
      sum += rule.weights[a] * weight(SpatialPoint{std::numbers::sqrt2 * s.q(0) * rule.nodes[a], 0.0});
    }
  } else {
    for (std::size_t a = 0; a < nodes; ++a) {
      for (std::size_t b = 0; b < nodes; ++b) {
        const SpatialPoint x{std::numbers::sqrt2 * s.q(0) * rule.nodes[a],
                             std::numbers::sqrt2 * s.q(1) * rule.nodes[b]};
        sum += rule.weights[a] * rule.weights[b] * weight(x);
      }
    }
  }
  return amplitude * jac * sum;
}

template <class Weight>
double converged_gaussian_integral(const PhysicalParams& params, const State& s, Weight&& weight,
                                   const char* what) {
  const double coarse = gaussian_integral(params, s, 20, weight);
  const double fine = gaussian_integral(params, s, 24, weight);
  if (std::abs(fine - coarse) > 1e-10 * std::abs(fine)) {
    throw NumericError(std::string(what) + ": quadrature did not converge");
  }
  return fine;
}

}  // namespace detail

/// Total fluid energy ∫ (n m v²/2 + ε) of a dimensional state.
inline double total_energy(const PhysicalParams& params, const State& state) {
  detail::require_fluid_model(state.kind(), "total_energy");
  params.validate(state.kind());
  const double thermal = detail::energy_factor(state.kind()) * detail::temperature(params, state);
  auto per_particle = [&](const SpatialPoint& x) {
    double v2 = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
      const double v = state.qdot(i) / state.q(i) * x[i];
      v2 += v * v;
    }
    return 0.5 * params.m * v2 + thermal;
  };
  return detail::converged_gaussian_integral(params, state, per_particle, "total_energy");
}

/// Total particle number ∫ n.
inline double total_number(const PhysicalParams& params, const State& state) {
  detail::require_fluid_model(state.kind(), "total_number");
  params.validate(state.kind());
  return detail::converged_gaussian_integral(
      params, state, [](const SpatialPoint&) { return 1.0; }, "total_number");
}

}  // namespace fireball
