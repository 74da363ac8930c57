#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "fireball/analytic.hpp"
#include "fireball/integrate.hpp"
#include "test_support.hpp"

namespace fireball {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(RadialTest, WorkedValues) {
  const RadialSolution sol{1.0, 2.0, 0.0};
  const auto p0 = radial(sol, 0.0);
  EXPECT_DOUBLE_EQ(p0.r, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(p0.rdot, 0.0);
  EXPECT_DOUBLE_EQ(radial(sol, 1.0).r, 2.0);
  const double t = 1e3;
  EXPECT_NEAR(radial(sol, t).r / t, std::sqrt(2.0), 1e-3 * std::sqrt(2.0));
}

TEST(RadialTest, InvalidParameters) {
  EXPECT_THROW(radial(RadialSolution{0.0, 2.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(radial(RadialSolution{1.0, -1.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(time_reparam(RadialSolution{-1.0, 2.0, 0.0}, 1.0), DomainError);
  EXPECT_THROW(radial_3d(0.0, 0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(radial_3d(1.0, 0.0, -1.0, 1.0), DomainError);
}

TEST(RadialTest, SecondDerivativeOfRadiusSquared) {
  testing::StateSampler sampler(21);
  for (int k = 0; k < 50; ++k) {
    const RadialSolution sol{sampler.uniform(0.1, 5.0), sampler.uniform(2.0, 10.0),
                             sampler.uniform(-3.0, 3.0)};
    const double t = sampler.uniform(-5.0, 5.0), h = 1e-3;
    auto r2 = [&](double s) { return std::pow(radial(sol, s).r, 2); };
    EXPECT_NEAR((r2(t + h) - 2.0 * r2(t) + r2(t - h)) / (h * h), 4.0 * sol.H, 1e-6);
    const double g = 1e-5;
    const double fd = (radial(sol, t + g).r - radial(sol, t - g).r) / (2 * g);
    EXPECT_NEAR(radial(sol, t).rdot, fd, 1e-6);
  }
}

TEST(RadialTest, FromStateMatchesEnergyForm) {
  testing::StateSampler sampler(22);
  for (ModelKind kind : {ModelKind::TwoD, ModelKind::EllipticThreeD}) {
    for (int k = 0; k < 50; ++k) {
      const State s = sampler.state(kind, 0.3, 3.0, 1.5, 2.0);
      const auto sol = RadialSolution::from_state(s);
      const PolarState p = to_polar(s);
      const auto rp = radial(sol, s.t());
      EXPECT_NEAR(rp.r, p.r, 1e-12 * p.r);
      EXPECT_NEAR(rp.rdot, p.rdot, 1e-11 * std::max(1.0, std::abs(p.rdot)));
    }
  }
}

TEST(RadialTest, ThreeDRadiusAgainstIntegrator) {
  testing::StateSampler sampler(23);
  for (int k = 0; k < 10; ++k) {
    const State s = sampler.state(ModelKind::ThreeD);
    const double H = hamiltonian(s);
    const double J = -(s.q(0) * s.qdot(0) + s.q(1) * s.qdot(1) + s.q(2) * s.qdot(2));
    const double r0 = std::sqrt(s.q(0) * s.q(0) + s.q(1) * s.q(1) + s.q(2) * s.q(2));
    IntegratorConfig c;
    c.t_end = 10.0;
    c.sample_interval = 0.5;
    for (const State& x : integrate(s, c)) {
      const double r = std::sqrt(x.q(0) * x.q(0) + x.q(1) * x.q(1) + x.q(2) * x.q(2));
      EXPECT_NEAR(radial_3d(H, J, r0, x.t()).r, r, 1e-6 * r);
    }
  }
  EXPECT_NEAR(radial_3d(1.5, 0.0, std::sqrt(3.0), 1.0).r, std::sqrt(6.0), 1e-15);
}

TEST(TimeReparamTest, WorkedValues) {
  const RadialSolution sol{1.0, 2.0, 0.0};
  EXPECT_EQ(time_reparam(sol, 0.0), 0.0);
  EXPECT_NEAR(time_reparam(sol, 1.0), kPi / 8, 1e-15);
  EXPECT_NEAR(time_reparam(sol, 1e12), kPi / 4, 1e-12);
  EXPECT_NEAR(time_reparam(RadialSolution{1.0, 2.0, 3.0}, 3.0), 0.0, 1e-15);
}

TEST(TimeReparamTest, MatchesNumericalQuadrature) {
  using boost::math::quadrature::gauss_kronrod;
  testing::StateSampler sampler(24);
  for (int k = 0; k < 30; ++k) {
    const RadialSolution sol{sampler.uniform(0.2, 4.0), sampler.uniform(2.0, 12.0),
                             sampler.uniform(-2.0, 2.0)};
    const double t = sampler.uniform(-20.0, 20.0);
    const double quad = gauss_kronrod<double, 61>::integrate(
        [&](double s) { return 1.0 / std::pow(radial(sol, s).r, 2); }, sol.t0, t, 15, 1e-14);
    EXPECT_NEAR(time_reparam(sol, t), quad, 1e-10);
  }
}

TEST(TurningPointsTest, TwoDClosedForm) {
  const auto [lo, hi] = turning_points(ModelKind::TwoD, 3.0);
  EXPECT_NEAR(lo, 0.5 * std::asin(2.0 / 3.0), 1e-11);
  EXPECT_NEAR(hi, kPi / 2 - 0.5 * std::asin(2.0 / 3.0), 1e-11);
  const auto [a, b] = turning_points(ModelKind::TwoD, 2.0);
  EXPECT_DOUBLE_EQ(a, kPi / 4);
  EXPECT_DOUBLE_EQ(b, kPi / 4);
  EXPECT_THROW(turning_points(ModelKind::TwoD, 1.9), NoMotionError);
  const auto [e1, e2] = turning_points(ModelKind::EllipticThreeD, 6.0);
  EXPECT_NEAR(angular_potential(ModelKind::EllipticThreeD, e1), 6.0, 1e-9);
  EXPECT_NEAR(angular_potential(ModelKind::EllipticThreeD, e2), 6.0, 1e-9);
}

TEST(AngularQuadratureTest, RestsAtPotentialMinimum) {
  std::vector<double> grid;
  for (int k = 0; k <= 50; ++k) grid.push_back(0.1 * k);
  const auto out = angular_quadrature(AngularSolution{2.0, kPi / 4, 1, 0.0}, ModelKind::TwoD, grid);
  ASSERT_EQ(out.size(), grid.size());
  for (const auto& s : out) EXPECT_NEAR(s.phi, kPi / 4, 1e-12);
}

TEST(AngularQuadratureTest, OscillatesBetweenTurningPoints) {
  const auto [lo, hi] = turning_points(ModelKind::TwoD, 3.0);
  std::vector<double> grid;
  for (int k = 0; k <= 2000; ++k) grid.push_back(0.005 * k);
  const auto out = angular_quadrature(AngularSolution{3.0, kPi / 4, 1, 0.0}, ModelKind::TwoD, grid);
  double seen_lo = kPi, seen_hi = 0.0;
  int reversals = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_GE(out[i].phi, lo - 1e-9);
    EXPECT_LE(out[i].phi, hi + 1e-9);
    EXPECT_NEAR(0.5 * out[i].dphi * out[i].dphi + angular_potential(ModelKind::TwoD, out[i].phi),
                3.0, 1e-8);
    seen_lo = std::min(seen_lo, out[i].phi);
    seen_hi = std::max(seen_hi, out[i].phi);
    if (i > 0 && (out[i].dphi > 0) != (out[i - 1].dphi > 0)) ++reversals;
  }
  EXPECT_GE(reversals, 2);
  EXPECT_NEAR(seen_lo, lo, 1e-4);
  EXPECT_NEAR(seen_hi, hi, 1e-4);
  EXPECT_GT(out[1].phi, kPi / 4);
}

TEST(AngularQuadratureTest, Errors) {
  const std::vector<double> grid{0.0, 1.0};
  EXPECT_THROW(angular_quadrature(AngularSolution{1.5, kPi / 4, 1, 0.0}, ModelKind::TwoD, grid),
               NoMotionError);
  EXPECT_THROW(angular_quadrature(AngularSolution{3.0, 0.1, 1, 0.0}, ModelKind::TwoD, grid),
               NoMotionError);
  EXPECT_THROW(angular_quadrature(AngularSolution{3.0, 0.0, 1, 0.0}, ModelKind::TwoD, grid),
               DomainError);
  EXPECT_THROW(angular_quadrature(AngularSolution{3.0, kPi / 2, 1, 0.0}, ModelKind::TwoD, grid),
               DomainError);
  EXPECT_THROW(angular_quadrature(AngularSolution{4.0, 0.3, 1, 0.0}, ModelKind::EllipticThreeD, grid),
               NoMotionError);
  EXPECT_THROW(angular_quadrature(AngularSolution{3.0, kPi / 4, 1, 0.0}, ModelKind::OneD, grid),
               UnsupportedModel);
  const std::vector<double> decreasing{1.0, 0.5};
  EXPECT_THROW(angular_quadrature(AngularSolution{3.0, kPi / 4, 1, 0.0}, ModelKind::TwoD, decreasing),
               DomainError);
}

void expect_pipeline_matches_integrator(const State& s0, double tol) {
  IntegratorConfig c;
  c.t_end = s0.t() + 10.0;
  c.sample_interval = 0.25;
  const auto numeric = integrate(s0, c);
  std::vector<double> times;
  for (const State& s : numeric) times.push_back(s.t());
  const auto exact = analytic_states(s0, times);
  ASSERT_EQ(exact.size(), numeric.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    for (std::size_t k = 0; k < s0.dim(); ++k) {
      EXPECT_NEAR(exact[i].q(k), numeric[i].q(k), tol * std::max(1.0, numeric[i].q(k)))
          << to_string(s0.kind()) << " t=" << times[i];
      EXPECT_NEAR(exact[i].qdot(k), numeric[i].qdot(k), tol) << to_string(s0.kind());
    }
  }
}

TEST(AnalyticPipelineTest, ReferenceTwoDCase) {
  expect_pipeline_matches_integrator(State(ModelKind::TwoD, 0.0, {1.0, 1.0}, {-0.5, 0.5}), 1e-6);
}

TEST(AnalyticPipelineTest, RandomInitialData) {
  testing::StateSampler sampler(25);
  for (ModelKind kind : {ModelKind::OneD, ModelKind::TwoD, ModelKind::EllipticThreeD}) {
    for (int k = 0; k < 6; ++k) expect_pipeline_matches_integrator(sampler.state(kind), 1e-6);
  }
}

TEST(AnalyticPipelineTest, ThreeDHasNoFullClosedForm) {
  const State s(ModelKind::ThreeD, 0.0, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  const std::vector<double> times{0.0};
  EXPECT_THROW(analytic_states(s, times), UnsupportedModel);
}

TEST(OneDSolutionTest, WorkedValuesAndResidual) {
  const auto p0 = oneD_solution(0.5, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(p0.X, 1.0);
  EXPECT_DOUBLE_EQ(p0.Xdot, 0.0);
  EXPECT_DOUBLE_EQ(oneD_solution(0.5, 0.0, 1.0).X, std::sqrt(2.0));
  const double h = 1e-4, t = 0.7;
  const double x = oneD_solution(0.5, 0.0, t).X;
  const double xdd =
      (oneD_solution(0.5, 0.0, t + h).X - 2 * x + oneD_solution(0.5, 0.0, t - h).X) / (h * h);
  EXPECT_NEAR(xdd, 1.0 / (x * x * x), 1e-6);
  EXPECT_THROW(oneD_solution(0.0, 0.0, 1.0), DomainError);
  // H = ½Ẋ² + 1/(2X²) is preserved along the solution
  testing::StateSampler sampler(26);
  for (int k = 0; k < 20; ++k) {
    const double H = sampler.uniform(0.1, 5.0), t0 = sampler.uniform(-2, 2), s = sampler.uniform(-5, 5);
    const auto p = oneD_solution(H, t0, s);
    EXPECT_NEAR(0.5 * p.Xdot * p.Xdot + 0.5 / (p.X * p.X), H, 1e-12 * H);
  }
}

TEST(SuperpositionTest, WorkedValues) {
  const auto a = superposition_1d(2.0, 1.5, 1.5);
  EXPECT_EQ(a.tau, 0.0);
  EXPECT_EQ(a.u, 0.0);
  EXPECT_EQ(a.Y, 0.0);
  const auto b = superposition_1d(0.5, 0.0, 1.0);
  EXPECT_NEAR(b.Y, 1.0, 1e-15);
  EXPECT_NEAR(b.tau, kPi / 4, 1e-15);
  EXPECT_NEAR(b.u, std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(b.u, b.Y / b.X, 1e-15);
  EXPECT_THROW(superposition_1d(0.0, 0.0, 1.0), DomainError);
}

TEST(SuperpositionTest, RecoversInvariantOnRandomInputs) {
  testing::StateSampler sampler(27);
  const auto spec = GeneralErmakovSpec::one_d();
  for (int k = 0; k < 200; ++k) {
    const double I = sampler.uniform(0.01, 20.0), t0 = sampler.uniform(-3, 3);
    const double t = sampler.uniform(-10, 10);
    const auto s = superposition_1d(I, t0, t);
    EXPECT_NEAR(general_ermakov_invariant(spec, s.X, s.Y, s.Xdot, s.Ydot), I, 1e-12 * std::max(1.0, I));
    EXPECT_NEAR(s.u, s.Y / s.X, 1e-12 * std::max(1.0, std::abs(s.u)));
    // Ÿ = 0: Y is linear in t
    const auto s2 = superposition_1d(I, t0, t + 1.0);
    EXPECT_NEAR(s2.Y - s.Y, s.Ydot, 1e-12 * std::max(1.0, s.Ydot));
  }
}

}  // namespace
}  // namespace fireball
