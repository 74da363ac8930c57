// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fireball/fireball.hpp"

using namespace fireball;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

/// Accumulates "measured vs bound" facts for one criterion.
class Ledger {
 public:
  void at_most(const std::string& what, double value, double bound) {
    ok_ = ok_ && value <= bound;
    add(what, value, "<=", bound);
  }
  void at_least(const std::string& what, double value, double bound) {
    ok_ = ok_ && value >= bound;
    add(what, value, ">=", bound);
  }
  void count_zero(const std::string& what, long n) {
    ok_ = ok_ && n == 0;
    if (!text_.empty()) text_ += "; ";
    text_ += what + " " + std::to_string(n);
  }
  Outcome done() const { return {ok_, text_}; }

 private:
  void add(const std::string& what, double value, const char* op, double bound) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g %s %.3g", what.c_str(), value, op, bound);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  bool ok_ = true;
  std::string text_;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  State state(ModelKind kind, double qlo = 0.3, double qhi = 3.0, double vmax = 1.5, double tmax = 0.0) {
    std::vector<double> q(dimension(kind)), v(dimension(kind));
    for (auto& x : q) x = uniform(qlo, qhi);
    for (auto& x : v) x = uniform(-vmax, vmax);
    return State(kind, tmax > 0.0 ? uniform(0.0, tmax) : 0.0, q, v);
  }

 private:
  std::mt19937_64 rng_;
};

IntegratorConfig span(double t_end, double interval) {
  IntegratorConfig c;
  c.rel_tol = 1e-10;
  c.t_end = t_end;
  c.sample_interval = interval;
  return c;
}

double radius(const State& s) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) r2 += s.q(i) * s.q(i);
  return std::sqrt(r2);
}

Outcome oned_reproduction() {
  const auto traj = integrate(State(ModelKind::OneD, 0.0, {1.0}, {0.0}), span(20.0, 0.1));
  double worst = 0.0;
  for (const State& s : traj) {
    worst = std::max(worst, std::abs(s.q(0) - oneD_solution(0.5, 0.0, s.t()).X));
  }
  Ledger l;
  l.at_most("max|X - exact| on [0,20]", worst, 1e-8);
  return l.done();
}

Outcome twod_conservation() {
  Sampler sampler(1001);
  double h = 0.0, i = 0.0, j = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto report = invariant_report(integrate(sampler.state(ModelKind::TwoD), span(100.0, 0.5)));
    h = std::max(h, report.drift.H);
    i = std::max(i, *report.drift.I);
    j = std::max(j, report.drift.J);
  }
  Ledger l;
  l.at_most("drift H", h, 1e-8);
  l.at_most("drift I", i, 1e-8);
  l.at_most("drift J", j, 1e-8);
  return l.done();
}

Outcome lower_bounds() {
  Sampler sampler(1002);
  long bad2 = 0, bade = 0;
  for (int k = 0; k < 100000; ++k) {
    if (ermakov_invariant(sampler.state(ModelKind::TwoD, 0.01, 100.0, 5.0)) < 2.0) ++bad2;
    if (ermakov_invariant(sampler.state(ModelKind::EllipticThreeD, 0.01, 100.0, 5.0)) < 2.25) ++bade;
  }
  long bad_traj = 0;
  for (ModelKind kind : {ModelKind::TwoD, ModelKind::EllipticThreeD}) {
    for (int k = 0; k < 10; ++k) {
      for (const State& s : integrate(sampler.state(kind), span(100.0, 0.1))) {
        if (ermakov_invariant(s) < ermakov_lower_bound(kind)) ++bad_traj;
      }
    }
  }
  Ledger l;
  l.count_zero("2d violations in 1e5 states:", bad2);
  l.count_zero("elliptic violations in 1e5 states:", bade);
  l.count_zero("violations along 20 trajectories:", bad_traj);
  return l.done();
}

Outcome radial_law() {
  Sampler sampler(1003);
  std::vector<State> starts{State(ModelKind::TwoD, 0.0, {1.0, 1.0}, {-0.5, 0.5})};
  for (int k = 0; k < 10; ++k) starts.push_back(sampler.state(ModelKind::TwoD));
  double worst = 0.0;
  for (const State& s0 : starts) {
    const RadialSolution sol = RadialSolution::from_state(s0);
    for (const State& s : integrate(s0, span(10.0, 0.1))) {
      const double exact = radial(sol, s.t()).r;
      worst = std::max(worst, std::abs(radius(s) - exact) / exact);
    }
  }
  const RadialSolution ref{1.0, 2.0, 0.0};
  const double slope = radial(ref, 1e3).r / 1e3;
  Ledger l;
  l.at_most("max rel |r - r(t)| on [0,10]", worst, 1e-6);
  l.at_most("|r/t - sqrt(2H)|/sqrt(2H) at t=1e3", std::abs(slope - std::sqrt(2.0)) / std::sqrt(2.0), 1e-3);
  return l.done();
}

Outcome threed_radius() {
  Sampler sampler(1004);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const State s0 = sampler.state(ModelKind::ThreeD);
    const double H = hamiltonian(s0);
    const double J = noether_invariant(s0);
    for (const State& s : integrate(s0, span(10.0, 0.1))) {
      const double exact = radial_3d(H, J, radius(s0), s.t()).r;
      worst = std::max(worst, std::abs(radius(s) * radius(s) - exact * exact) / (exact * exact));
    }
  }
  Ledger l;
  l.at_most("max rel |r^2 - (2Ht^2 - 2Jt + r0^2)|", worst, 1e-7);
  return l.done();
}

Outcome elliptic_consistency() {
  Sampler sampler(1005);
  double tilde = 0.0, polar = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const State s = sampler.state(ModelKind::EllipticThreeD);
    const double twice = 2.0 * ermakov_invariant(s);
    tilde = std::max(tilde, std::abs(ermakov_invariant_tilde(s) - twice));
    polar = std::max(polar, std::abs(polar_invariants(to_polar(s), ModelKind::EllipticThreeD).I - twice) / twice);
  }
  const State ref(ModelKind::EllipticThreeD, 0.0, {1.0, 1.0}, {0.0, 0.0});
  const PolarState p = to_polar(ref);
  const double c2s = std::cos(p.phi) * std::cos(p.phi) * std::sin(p.phi);
  const double alternative = 1.5 * std::pow(c2s, -2.0 / 3.0);
  const double correct = polar_invariants(p, ModelKind::EllipticThreeD).I;
  Ledger l;
  l.at_most("max|Itilde - 2I|", tilde, 1e-12);
  l.at_most("max rel |polar - 2I|", polar, 1e-10);
  l.at_most("|polar form - 9/2| at X=Y=1", std::abs(correct - 4.5), 1e-12);
  l.at_least("|alternative form (" + std::to_string(alternative) + ") - 9/2|", std::abs(alternative - 4.5), 1.0);
  return l.done();
}

Outcome noether_machinery() {
  Sampler sampler(1006);
  const auto scaling = scaling_symmetry();
  const auto shift = time_translation();
  double residual = 0.0, j_err = 0.0, gi = 0.0, dyn = 0.0, dyn_res = 0.0;
  for (ModelKind kind : kAllModels) {
    for (int k = 0; k < 1000; ++k) {
      const State s = sampler.state(kind, 0.3, 3.0, 1.5, 10.0);
      residual = std::max({residual, std::abs(noether_condition_residual(scaling, s)),
                           std::abs(noether_condition_residual(shift, s))});
      const double j = noether_invariant(s);
      j_err = std::max(j_err, std::abs(noether_invariant_from(scaling, s) - j) / std::max(1.0, std::abs(j)));
    }
  }
  auto tau_zero = [](const auto&, const auto&, auto t) { return decltype(t)(0.0); };
  auto tau_one = [](const auto&, const auto&, auto t) { return decltype(t)(1.0); };
  auto tau_xv = [](const auto& q, const auto& v, auto) { return q[0] * v[1]; };
  for (int k = 0; k < 1000; ++k) {
    const State s = sampler.state(ModelKind::TwoD, 0.3, 3.0, 1.5, 10.0);
    gi = std::max(gi, std::abs(extended_generator_apply(
                          scaling, [](const State& x) { return ermakov_invariant(x); }, s)));
    const double I = ermakov_invariant(s);
    for (const auto& r : {dynamical_symmetry_check(tau_zero, s), dynamical_symmetry_check(tau_one, s),
                          dynamical_symmetry_check(tau_xv, s)}) {
      dyn = std::max(dyn, std::abs(r.invariant - I) / I);
      dyn_res = std::max(dyn_res, std::abs(r.residual));
    }
  }
  Ledger l;
  l.at_most("Noether residual (scaling, time shift; 4 models)", residual, 1e-10);
  l.at_most("J formula vs closed form", j_err, 1e-12);
  l.at_most("|G1 I|", gi, 1e-6);
  l.at_most("dynamical symmetry invariant vs I", dyn, 1e-10);
  l.at_most("dynamical symmetry residual", dyn_res, 1e-8);
  return l.done();
}

Outcome form_invariance() {
  Sampler sampler(1007);
  double worst = 0.0;
  for (ModelKind kind : kAllModels) {
    const auto traj = integrate(sampler.state(kind, 0.5, 2.5, 1.0), span(5.0, 0.01));
    for (double beta : {0.5, 2.0, 5.0}) worst = std::max(worst, ode_residual(scaled_trajectory(traj, beta)));
  }
  const double eps = 1e-6;
  double near = 0.0;
  for (int k = 0; k < 100; ++k) {
    const State s = sampler.state(ModelKind::TwoD, 0.3, 3.0, 1.5, 10.0);
    const PhaseTangent g = scaling_generator_action(s);
    const PhaseTangent up = scaling_displacement(s, eps);
    const PhaseTangent down = scaling_displacement(s, -eps);
    near = std::max(near, std::abs((up.t - down.t) / (2 * eps) - g.t));
    for (std::size_t i = 0; i < 2; ++i) {
      near = std::max(near, std::abs((up.q[i] - down.q[i]) / (2 * eps) - g.q[i]));
    }
  }
  Ledger l;
  l.at_most("ODE residual of scaled trajectories (beta 0.5, 2, 5)", worst, 1e-5);
  l.at_most("near-identity vs generator on (t, X, Y)", near, 1e-10);
  return l.done();
}

Outcome hydro_closure() {
  PhysicalParams p2;
  p2.n0 = 2.0;
  p2.T0 = 0.5;
  p2.X0 = 1.5;
  p2.Y0 = 0.8;
  p2.m = 3.0;
  PhysicalParams p1 = p2;
  p1.Y0.reset();

  double pde = 0.0;
  {
    std::vector<State> samples;
    for (int k = 0; k <= 1000; ++k) {
      const double t = 0.005 * k;
      const OneDPoint x = oneD_solution(0.5, 0.0, t);
      samples.emplace_back(ModelKind::OneD, t, std::initializer_list<double>{x.X},
                           std::initializer_list<double>{x.Xdot});
    }
    const Trajectory exact(ModelKind::OneD, samples);
    for (const auto& r : pde_residuals(p1, exact, default_probes(dimensionalize(p1, exact.front())))) {
      pde = std::max(pde, r.max_abs());
    }
    const auto traj = integrate(State(ModelKind::TwoD, 0.0, {1.0, 1.4}, {0.3, -0.2}), span(5.0, 0.01));
    for (const auto& r : pde_residuals(p2, traj, default_probes(dimensionalize(p2, traj.front())))) {
      pde = std::max(pde, r.max_abs());
    }
  }

  Sampler sampler(1008);
  double constancy = 0.0, spread = 0.0;
  const std::pair<ModelKind, PhysicalParams> cases[] = {{ModelKind::OneD, p1}, {ModelKind::TwoD, p2}};
  for (const auto& [kind, params] : cases) {
    const auto traj = integrate(sampler.state(kind), span(20.0, 0.5));
    const double e0 = total_energy(params, dimensionalize(params, traj.front()));
    for (const State& s : traj) {
      constancy = std::max(constancy, std::abs(total_energy(params, dimensionalize(params, s)) - e0) / e0);
    }
    std::vector<double> ratios;
    for (int k = 0; k < 10; ++k) {
      const State s = sampler.state(kind);
      ratios.push_back(total_energy(params, dimensionalize(params, s)) / hamiltonian(s));
    }
    double mean = 0.0, var = 0.0;
    for (double r : ratios) mean += r / 10.0;
    for (double r : ratios) var += (r - mean) * (r - mean) / 10.0;
    spread = std::max(spread, std::sqrt(var) / mean);
  }
  Ledger l;
  l.at_most("PDE residual (1d exact, 2d integrated; all probes)", pde, 1e-5);
  l.at_most("total energy drift", constancy, 1e-8);
  l.at_most("stddev/mean of E/H", spread, 1e-8);
  return l.done();
}

Outcome superposition() {
  Sampler sampler(1009);
  const auto spec = GeneralErmakovSpec::one_d();
  double worst = 0.0;
  long curved = 0;
  for (int k = 0; k < 10; ++k) {
    const double I = sampler.uniform(0.01, 20.0);
    const double t0 = sampler.uniform(-3.0, 3.0);
    double rate = 0.0;
    for (int n = 0; n < 50; ++n) {
      const double t = sampler.uniform(-10.0, 10.0);
      const Superposition1D s = superposition_1d(I, t0, t);
      if (n == 0) rate = s.Ydot;
      if (s.Ydot != rate) ++curved;  // Ẏ constant: Ÿ = 0
      worst = std::max(worst, std::abs(general_ermakov_invariant(spec, s.X, s.Y, s.Xdot, s.Ydot) - I) /
                                  std::max(1.0, I));
    }
  }
  Ledger l;
  l.count_zero("samples with varying dY/dt:", curved);
  l.at_most("|I(X, Y) - I|", worst, 1e-12);
  return l.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 one-dimensional analytic reproduction", oned_reproduction},
      {"2 two-dimensional invariant conservation", twod_conservation},
      {"3 Ermakov lower bounds", lower_bounds},
      {"4 radial law and ballistic slope", radial_law},
      {"5 three-dimensional quadratic radius", threed_radius},
      {"6 elliptic invariant consistency", elliptic_consistency},
      {"7 Noether machinery", noether_machinery},
      {"8 scaling form invariance", form_invariance},
      {"9 hydrodynamic closure and total energy", hydro_closure},
      {"10 nonlinear superposition", superposition},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s (%.2fs): %s\n", out.passed ? "PASS" : "FAIL", name.c_str(), secs, out.detail.c_str());
    if (!out.passed) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
