#pragma once

// Model kinds, phase-space state, reference parameters and the
// dimensional <-> dimensionless rescaling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fireball/errors.hpp"

namespace fireball {

/// The four reduced fireball systems.
///
/// EllipticThreeD is the 3D system restricted to Z = X; only X and Y are
/// stored, so the constraint holds by construction.
enum class ModelKind { OneD, TwoD, ThreeD, EllipticThreeD };

inline constexpr std::array<ModelKind, 4> kAllModels = {ModelKind::OneD, ModelKind::TwoD,
                                                        ModelKind::ThreeD,
                                                        ModelKind::EllipticThreeD};

/// Number of stored variances.
constexpr std::size_t dimension(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::OneD: return 1;
    case ModelKind::TwoD: return 2;
    case ModelKind::ThreeD: return 3;
    case ModelKind::EllipticThreeD: return 2;
  }
  return 0;
}

constexpr std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::OneD: return "1d";
    case ModelKind::TwoD: return "2d";
    case ModelKind::ThreeD: return "3d";
    case ModelKind::EllipticThreeD: return "elliptic";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto kind : kAllModels) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

/// Variances or their rates. Entries beyond dimension(kind) are zero.
using Coords = std::array<double, 3>;

/// Phase-space point (t, q, q̇) of one of the reduced systems.
///
/// Every variance is strictly positive; construction throws DomainError
/// otherwise.
class State {
 public:
  State(ModelKind kind, double t, std::span<const double> q, std::span<const double> qdot)
      : kind_(kind), t_(t) {
    const std::size_t d = dimension(kind);
    if (q.size() != d || qdot.size() != d) {
      throw DomainError("state: expected " + std::to_string(d) + " components for model " +
                        std::string(to_string(kind)));
    }
    if (!std::isfinite(t)) throw DomainError("state: time is not finite");
    for (std::size_t i = 0; i < d; ++i) {
      if (!(q[i] > 0.0) || !std::isfinite(q[i])) {
        throw DomainError("state: variance component " + std::to_string(i) +
                          " must be strictly positive and finite");
      }
      if (!std::isfinite(qdot[i])) throw DomainError("state: rate is not finite");
      q_[i] = q[i];
      qdot_[i] = qdot[i];
    }
  }

  State(ModelKind kind, double t, std::initializer_list<double> q,
        std::initializer_list<double> qdot)
      : State(kind, t, std::span<const double>(q.begin(), q.size()),
              std::span<const double>(qdot.begin(), qdot.size())) {}

  ModelKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dimension(kind_); }
  double t() const noexcept { return t_; }

  std::span<const double> q() const noexcept { return {q_.data(), dim()}; }
  std::span<const double> qdot() const noexcept { return {qdot_.data(), dim()}; }
  double q(std::size_t i) const noexcept { return q_[i]; }
  double qdot(std::size_t i) const noexcept { return qdot_[i]; }

  /// Zero-padded copies, convenient for fixed-size arithmetic.
  const Coords& q_padded() const noexcept { return q_; }
  const Coords& qdot_padded() const noexcept { return qdot_; }

  State with_time(double t) const {
    State s = *this;
    if (!std::isfinite(t)) throw DomainError("state: time is not finite");
    s.t_ = t;
    return s;
  }

  friend bool operator==(const State&, const State&) = default;

 private:
  ModelKind kind_;
  double t_;
  Coords q_{};
  Coords qdot_{};
};

/// Dimensional reference values. Temperatures are in energy units.
struct PhysicalParams {
  double n0 = 1.0;
  double T0 = 1.0;
  double X0 = 1.0;
  std::optional<double> Y0 = 1.0;
  std::optional<double> Z0;
  double m = 1.0;

  void validate(ModelKind kind) const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(n0) || !positive(T0) || !positive(X0) || !positive(m)) {
      throw DomainError("params: n0, T0, X0 and m must be strictly positive");
    }
    if (kind != ModelKind::OneD && !(Y0 && positive(*Y0))) {
      throw DomainError("params: Y0 must be present and strictly positive");
    }
    if (kind == ModelKind::ThreeD) {
      if (!(Z0 && positive(*Z0))) throw DomainError("params: Z0 must be present and positive");
    } else if (Z0) {
      throw DomainError("params: Z0 is only meaningful for the 3d model");
    }
  }

  /// Geometric mean of the reference variances of `kind`.
  ///
  /// The elliptic model inherits Z0 = X0 from its constraint.
  double length_scale(ModelKind kind) const {
    validate(kind);
    switch (kind) {
      case ModelKind::OneD: return X0;
      case ModelKind::TwoD: return std::sqrt(X0 * *Y0);
      case ModelKind::ThreeD: return std::cbrt(X0 * *Y0 * *Z0);
      case ModelKind::EllipticThreeD: return std::cbrt(X0 * X0 * *Y0);
    }
    return 0.0;
  }

  /// Dimensional time corresponding to one unit of dimensionless time.
  double time_scale(ModelKind kind) const { return length_scale(kind) * std::sqrt(m / T0); }
};

/// Maps a dimensional state to the barred variables in which the equations
/// of motion carry no parameters.
inline State nondimensionalize(const PhysicalParams& params, const State& dimensional) {
  const ModelKind kind = dimensional.kind();
  const double L = params.length_scale(kind);
  const double tau = params.time_scale(kind);
  Coords q{}, qd{};
  for (std::size_t i = 0; i < dimensional.dim(); ++i) {
    q[i] = dimensional.q(i) / L;
    qd[i] = dimensional.qdot(i) * tau / L;
  }
  const std::size_t d = dimensional.dim();
  return State(kind, dimensional.t() / tau, std::span<const double>(q.data(), d),
               std::span<const double>(qd.data(), d));
}

/// Inverse of nondimensionalize.
inline State dimensionalize(const PhysicalParams& params, const State& scaled) {
  const ModelKind kind = scaled.kind();
  const double L = params.length_scale(kind);
  const double tau = params.time_scale(kind);
  Coords q{}, qd{};
  for (std::size_t i = 0; i < scaled.dim(); ++i) {
    q[i] = scaled.q(i) * L;
    qd[i] = scaled.qdot(i) * L / tau;
  }
  const std::size_t d = scaled.dim();
  return State(kind, scaled.t() * tau, std::span<const double>(q.data(), d),
               std::span<const double>(qd.data(), d));
}

/// Polar view of a planar state: X = r cosφ, Y = r sinφ (TwoD) or the
/// stretched form X = r cosφ / √2, Y = r sinφ (EllipticThreeD).
struct PolarState {
  double r = 0.0;
  double phi = 0.0;
  double rdot = 0.0;
  double phidot = 0.0;
  /// Reparametrized time ∫dt/r², filled in by the analytic pipeline.
  std::optional<double> ttilde;
};

namespace detail {

inline void require_planar(ModelKind kind, std::string_view what) {
  if (kind != ModelKind::TwoD && kind != ModelKind::EllipticThreeD) {
    throw UnsupportedModel(std::string(what) + ": defined for the 2d and elliptic models only");
  }
}

/// Scale applied to X before taking ordinary polar coordinates.
inline double polar_stretch(ModelKind kind) {
  return kind == ModelKind::EllipticThreeD ? std::numbers::sqrt2 : 1.0;
}

}  // namespace detail

inline PolarState to_polar(const State& state) {
  detail::require_planar(state.kind(), "to_polar");
  const double s = detail::polar_stretch(state.kind());
  const double a = s * state.q(0);
  const double adot = s * state.qdot(0);
  const double y = state.q(1);
  const double ydot = state.qdot(1);
  const double r = std::hypot(a, y);
  PolarState p;
  p.r = r;
  p.phi = std::atan2(y, a);
  p.rdot = (a * adot + y * ydot) / r;
  p.phidot = (a * ydot - y * adot) / (r * r);
  return p;
}

inline State to_cartesian(const PolarState& polar, ModelKind kind, double t) {
  detail::require_planar(kind, "to_cartesian");
  if (!(polar.r > 0.0)) throw DomainError("to_cartesian: r must be positive");
  if (!(polar.phi > 0.0 && polar.phi < std::numbers::pi / 2)) {
    throw DomainError("to_cartesian: phi must lie strictly inside (0, pi/2)");
  }
  const double s = detail::polar_stretch(kind);
  const double c = std::cos(polar.phi);
  const double sn = std::sin(polar.phi);
  const double a = polar.r * c;
  const double y = polar.r * sn;
  const double adot = polar.rdot * c - polar.r * sn * polar.phidot;
  const double ydot = polar.rdot * sn + polar.r * c * polar.phidot;
  return State(kind, t, {a / s, y}, {adot / s, ydot});
}

}  // namespace fireball
