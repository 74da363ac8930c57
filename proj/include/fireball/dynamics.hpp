#pragma once

// Equations of motion of the reduced systems, written as natural Lagrangian
// systems L = ½ Σ w_i q̇_i² − V(q) with constant mass weights w.
//
//   1d        V = 1/(2X²)                 w = (1)
//   2d        V = 1/(XY)                  w = (1, 1)
//   3d        V = (3/2)(XYZ)^(-2/3)       w = (1, 1, 1)
//   elliptic  V = (3/2)(X²Y)^(-2/3)       w = (2, 1)
//
// The accelerations are q̈_i = −(∂V/∂q_i) / w_i.

#include <array>
#include <cmath>

#include "fireball/dual.hpp"
#include "fireball/model.hpp"

namespace fireball {

struct EnergyPair {
  double lagrangian = 0.0;
  double hamiltonian = 0.0;
};

inline constexpr Coords mass_weights(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::OneD: return {1.0, 0.0, 0.0};
    case ModelKind::TwoD: return {1.0, 1.0, 0.0};
    case ModelKind::ThreeD: return {1.0, 1.0, 1.0};
    case ModelKind::EllipticThreeD: return {2.0, 1.0, 0.0};
  }
  return {};
}

// Unchecked kernels, generic over the scalar so that Dual arguments work.
// Callers guarantee positive variances.
namespace kernel {

template <class T>
T potential(ModelKind kind, const std::array<T, 3>& q) {
  using std::cbrt;
  switch (kind) {
    case ModelKind::OneD: return T(1.0) / (T(2.0) * q[0] * q[0]);
    case ModelKind::TwoD: return T(1.0) / (q[0] * q[1]);
    case ModelKind::ThreeD: {
      const T c = cbrt(q[0] * q[1] * q[2]);
      return T(1.5) / (c * c);
    }
    case ModelKind::EllipticThreeD: {
      const T c = cbrt(q[0] * q[0] * q[1]);
      return T(1.5) / (c * c);
    }
  }
  return T(0.0);
}

/// ∇V, padded with zeros.
template <class T>
std::array<T, 3> potential_gradient(ModelKind kind, const std::array<T, 3>& q) {
  using std::cbrt;
  switch (kind) {
    case ModelKind::OneD: return {-T(1.0) / (q[0] * q[0] * q[0]), T(0.0), T(0.0)};
    case ModelKind::TwoD: {
      const T v = T(1.0) / (q[0] * q[1]);
      return {-v / q[0], -v / q[1], T(0.0)};
    }
    case ModelKind::ThreeD: {
      const T c = cbrt(q[0] * q[1] * q[2]);
      const T f = T(1.0) / (c * c);
      return {-f / q[0], -f / q[1], -f / q[2]};
    }
    case ModelKind::EllipticThreeD: {
      const T c = cbrt(q[0] * q[0] * q[1]);
      const T f = T(1.0) / (c * c);
      return {-T(2.0) * f / q[0], -f / q[1], T(0.0)};
    }
  }
  return {};
}

template <class T>
std::array<T, 3> acceleration(ModelKind kind, const std::array<T, 3>& q) {
  const auto grad = potential_gradient(kind, q);
  const Coords w = mass_weights(kind);
  std::array<T, 3> a{};
  for (std::size_t i = 0; i < dimension(kind); ++i) a[i] = -grad[i] / T(w[i]);
  return a;
}

template <class T>
T kinetic(ModelKind kind, const std::array<T, 3>& qdot) {
  const Coords w = mass_weights(kind);
  T k(0.0);
  for (std::size_t i = 0; i < dimension(kind); ++i) k += T(0.5 * w[i]) * qdot[i] * qdot[i];
  return k;
}

template <class T>
T lagrangian(ModelKind kind, const std::array<T, 3>& q, const std::array<T, 3>& qdot) {
  return kinetic(kind, qdot) - potential(kind, q);
}

template <class T>
T hamiltonian(ModelKind kind, const std::array<T, 3>& q, const std::array<T, 3>& qdot) {
  return kinetic(kind, qdot) + potential(kind, q);
}

}  // namespace kernel

/// Accelerations q̈ of the model at `state`.
inline Coords rhs(const State& state) {
  return kernel::acceleration(state.kind(), state.q_padded());
}

inline double pseudo_potential(const State& state) {
  return kernel::potential(state.kind(), state.q_padded());
}

inline Coords potential_gradient(const State& state) {
  return kernel::potential_gradient(state.kind(), state.q_padded());
}

inline double kinetic_energy(const State& state) {
  return kernel::kinetic(state.kind(), state.qdot_padded());
}

inline double hamiltonian(const State& state) {
  return kinetic_energy(state) + pseudo_potential(state);
}

inline double lagrangian(const State& state) {
  return kinetic_energy(state) - pseudo_potential(state);
}

inline EnergyPair energies(const State& state) {
  const double k = kinetic_energy(state);
  const double v = pseudo_potential(state);
  return {k - v, k + v};
}

/// Canonical momenta ∂L/∂q̇ = w ∘ q̇.
inline Coords canonical_momenta(const State& state) {
  const Coords w = mass_weights(state.kind());
  Coords p{};
  for (std::size_t i = 0; i < state.dim(); ++i) p[i] = w[i] * state.qdot(i);
  return p;
}

}  // namespace fireball
