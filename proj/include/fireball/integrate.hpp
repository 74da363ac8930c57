#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fireball/dynamics.hpp"
#include "fireball/model.hpp"
#include "fireball/ode.hpp"

namespace fireball {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  double initial_step = 1e-3;
  double t_end = 10.0;
  double sample_interval = 0.1;

  void validate(double t_start) const {
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_unit(rel_tol) || !in_unit(abs_tol)) {
      throw DomainError("integrator: tolerances must lie in (0, 1)");
    }
    if (!(max_step > 0.0) || !(initial_step > 0.0)) {
      throw DomainError("integrator: step sizes must be positive");
    }
    if (!(t_end > t_start) || !std::isfinite(t_end)) {
      throw DomainError("integrator: t_end must exceed the start time");
    }
    if (!(sample_interval > 0.0)) throw DomainError("integrator: sample_interval must be positive");
  }
};

struct IntegrationStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
};

/// Raised when the step size underflows; carries the last accepted state.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, State last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const State& last_good() const noexcept { return last_good_; }

 private:
  State last_good_;
};

/// Raised when steps keep driving a variance to zero.
class SingularityError : public IntegrationFailure {
 public:
  using IntegrationFailure::IntegrationFailure;
};

/// Time-ordered samples of one model.
class Trajectory {
 public:
  Trajectory(ModelKind kind, std::vector<State> samples,
             std::optional<IntegratorConfig> config = std::nullopt, IntegrationStats stats = {})
      : kind_(kind), samples_(std::move(samples)), config_(config), stats_(stats) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (samples_[i].kind() != kind_) throw DomainError("trajectory: mixed model kinds");
      if (i > 0 && !(samples_[i].t() > samples_[i - 1].t())) {
        throw DomainError("trajectory: sample times must be strictly increasing");
      }
    }
  }

  ModelKind kind() const noexcept { return kind_; }
  const std::vector<State>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const State& operator[](std::size_t i) const { return samples_[i]; }
  const State& front() const { return samples_.front(); }
  const State& back() const { return samples_.back(); }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  const std::optional<IntegratorConfig>& config() const noexcept { return config_; }
  const IntegrationStats& stats() const noexcept { return stats_; }

 private:
  ModelKind kind_;
  std::vector<State> samples_;
  std::optional<IntegratorConfig> config_;
  IntegrationStats stats_;
};

/// Sample times t_start + k·interval below t_end, followed by t_end itself.
inline std::vector<double> sample_grid(double t_start, double t_end, double interval) {
  std::vector<double> grid;
  for (std::size_t k = 1;; ++k) {
    const double t = t_start + static_cast<double>(k) * interval;
    if (t >= t_end - 1e-12 * interval) break;
    grid.push_back(t);
  }
  grid.push_back(t_end);
  return grid;
}

/// Variance components at or below this value are treated as a crossing.
inline constexpr double kPositivityFloor = 1e-12;

namespace detail {

template <std::size_t D>
State state_from_phase(ModelKind kind, double t, const ode::Vector<2 * D>& y) {
  return State(kind, t, std::span<const double>(y.data(), D),
               std::span<const double>(y.data() + D, D));
}

template <class Fn>
decltype(auto) with_dimension(ModelKind kind, Fn&& fn) {
  switch (dimension(kind)) {
    case 1: return fn(std::integral_constant<std::size_t, 1>{});
    case 2: return fn(std::integral_constant<std::size_t, 2>{});
    default: return fn(std::integral_constant<std::size_t, 3>{});
  }
}

}  // namespace detail

/// Integrates the model's equations of motion with an embedded
/// Dormand–Prince 5(4) pair, sampling at `config.sample_interval` up to
/// `config.t_end`. The first sample is the initial state.
inline Trajectory integrate(const State& initial, const IntegratorConfig& config) {
  config.validate(initial.t());
  const ModelKind kind = initial.kind();

  return detail::with_dimension(kind, [&](auto dim) {
    constexpr std::size_t D = decltype(dim)::value;
    constexpr std::size_t N = 2 * D;
    ode::Vector<N> y0{};
    for (std::size_t i = 0; i < D; ++i) {
      y0[i] = initial.q(i);
      y0[D + i] = initial.qdot(i);
    }
    auto f = [kind](double, const ode::Vector<N>& y) {
      Coords q{};
      for (std::size_t i = 0; i < D; ++i) q[i] = y[i];
      const Coords a = kernel::acceleration(kind, q);
      ode::Vector<N> dy{};
      for (std::size_t i = 0; i < D; ++i) {
        dy[i] = y[D + i];
        dy[D + i] = a[i];
      }
      return dy;
    };
    auto admissible = [](const ode::Vector<N>& y) {
      for (std::size_t i = 0; i < D; ++i) {
        if (!(y[i] > kPositivityFloor)) return false;
      }
      for (double v : y) {
        if (!std::isfinite(v)) return false;
      }
      return true;
    };

    std::vector<State> samples{initial};
    const auto grid = sample_grid(initial.t(), config.t_end, config.sample_interval);
    samples.reserve(grid.size() + 1);
    ode::Settings settings{config.rel_tol, config.abs_tol, config.initial_step, config.max_step, 50};
    const auto outcome = ode::integrate<N>(
        f, initial.t(), y0, grid, settings, admissible,
        [&](double t, const ode::Vector<N>& y) {
          samples.push_back(detail::state_from_phase<D>(kind, t, y));
        });

    if (outcome.status != ode::Status::Ok) {
      State last = detail::state_from_phase<D>(kind, outcome.t, outcome.y);
      const std::string where = " (last good t = " + detail::exact_text(outcome.t) + ")";
      if (outcome.status == ode::Status::Inadmissible) {
        throw SingularityError("integration: variance driven to zero" + where, std::move(last));
      }
      throw IntegrationFailure("integration: step size underflow" + where, std::move(last));
    }
    IntegrationStats stats{outcome.accepted, outcome.rejected, outcome.evaluations};
    return Trajectory(kind, std::move(samples), config, stats);
  });
}

}  // namespace fireball
