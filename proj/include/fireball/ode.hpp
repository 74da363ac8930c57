#pragma once

// Adaptive Dormand–Prince 5(4) integration of y' = f(t, y) on fixed-size
// state vectors. Steps are clipped so that every requested output time is hit
// exactly; no interpolation error enters the output samples.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace fireball::ode {

template <std::size_t N>
using Vector = std::array<double, N>;

struct Settings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  /// Consecutive inadmissible trial steps tolerated before giving up.
  int max_inadmissible = 50;
};

enum class Status { Ok, StepUnderflow, Inadmissible };

template <std::size_t N>
struct Outcome {
  Status status = Status::Ok;
  double t = 0.0;    ///< last accepted time
  Vector<N> y{};     ///< last accepted state
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace tableau {
// Dormand & Prince (1980), coefficients of RK5(4)7M.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b − b̂ (fifth minus embedded fourth order weights)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace tableau

/// Integrates from (t0, y0) through the strictly increasing `outputs`
/// (all > t0), calling `observe(t, y)` at each of them.
///
/// `admissible(y)` is checked on every stage and on the proposed new state;
/// an inadmissible trial halves the step. Creeping up on the admissibility
/// boundary until the step underflows is reported as Inadmissible, like a
/// run of inadmissible trials. The error test per component is
/// |err_i| ≤ max(abs_tol, rel_tol · max(|y_i|, |y_new_i|)).
template <std::size_t N, class Rhs, class Admissible, class Observer>
Outcome<N> integrate(Rhs&& f, double t0, const Vector<N>& y0, std::span<const double> outputs,
                     const Settings& settings, Admissible&& admissible, Observer&& observe) {
  using namespace tableau;
  Outcome<N> out;
  out.t = t0;
  out.y = y0;
  if (outputs.empty()) return out;

  auto axpy = [](const Vector<N>& y, double h, std::initializer_list<std::pair<double, const Vector<N>*>> terms) {
    Vector<N> r = y;
    for (const auto& [c, k] : terms) {
      if (c == 0.0) continue;
      for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
    }
    return r;
  };

  double t = t0;
  Vector<N> y = y0;
  Vector<N> k1 = f(t, y);
  ++out.evaluations;
  double h = std::min(settings.initial_step, settings.max_step);
  int inadmissible_run = 0;
  bool last_reject_inadmissible = false;

  for (double target : outputs) {
    while (t < target) {
      const double remaining = target - t;
      bool clipped = false;
      double step = std::min(h, settings.max_step);
      if (step >= remaining) {
        step = remaining;
        clipped = true;
      }
      const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (step < min_step && !clipped) {
        out.status = last_reject_inadmissible ? Status::Inadmissible : Status::StepUnderflow;
        return out;
      }

      auto reject_inadmissible = [&]() {
        ++out.rejected;
        h = 0.5 * step;
        last_reject_inadmissible = true;
        return ++inadmissible_run > settings.max_inadmissible;
      };

      const Vector<N> y2 = axpy(y, step, {{a21, &k1}});
      if (!admissible(y2)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      const Vector<N> k2 = f(t + c2 * step, y2);
      const Vector<N> y3 = axpy(y, step, {{a31, &k1}, {a32, &k2}});
      if (!admissible(y3)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      const Vector<N> k3 = f(t + c3 * step, y3);
      const Vector<N> y4 = axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      if (!admissible(y4)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      const Vector<N> k4 = f(t + c4 * step, y4);
      const Vector<N> y5 = axpy(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      if (!admissible(y5)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      const Vector<N> k5 = f(t + c5 * step, y5);
      const Vector<N> y6 =
          axpy(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      if (!admissible(y6)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      const Vector<N> k6 = f(t + step, y6);
      const Vector<N> ynew =
          axpy(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      out.evaluations += 5;
      if (!admissible(ynew)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      const Vector<N> k7 = f(t + step, ynew);
      ++out.evaluations;

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                 e6 * k6[i] + e7 * k7[i]);
        const double scale = std::max(settings.abs_tol,
                                      settings.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i])));
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err)) {
        if (reject_inadmissible()) { out.status = Status::Inadmissible; return out; }
        continue;
      }
      inadmissible_run = 0;

      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = clipped ? target : t + step;
        y = ynew;
        k1 = k7;
        ++out.accepted;
        out.t = t;
        out.y = y;
        // A step shortened to land on an output time says nothing about the
        // natural step size, so keep the previous proposal in that case.
        if (!clipped) h = step * factor;
        else h = std::max(h, step * factor);
      } else {
        ++out.rejected;
        last_reject_inadmissible = false;
        h = step * std::max(factor, 0.2);
      }
    }
    observe(t, y);
  }
  return out;
}

}  // namespace fireball::ode
