#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fireball/ode.hpp"

namespace fireball::ode {
namespace {

auto always = [](const auto&) { return true; };

TEST(DormandPrinceTest, ExponentialDecayHitsOutputTimesExactly) {
  std::vector<double> outputs{0.1, 0.5, 1.0, 2.0};
  std::vector<double> seen_t, seen_y;
  const auto out = integrate<1>(
      [](double, const Vector<1>& y) { return Vector<1>{-y[0]}; }, 0.0, Vector<1>{1.0}, outputs,
      Settings{1e-12, 1e-14, 1e-3}, always, [&](double t, const Vector<1>& y) {
        seen_t.push_back(t);
        seen_y.push_back(y[0]);
      });
  ASSERT_EQ(out.status, Status::Ok);
  ASSERT_EQ(seen_t, outputs);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    EXPECT_NEAR(seen_y[i], std::exp(-outputs[i]), 1e-11);
  }
}

TEST(DormandPrinceTest, HarmonicOscillatorPhase) {
  std::vector<double> outputs{2.0 * M_PI};
  Vector<2> end{};
  integrate<2>([](double, const Vector<2>& y) { return Vector<2>{y[1], -y[0]}; }, 0.0,
               Vector<2>{1.0, 0.0}, outputs, Settings{1e-11, 1e-13, 1e-2}, always,
               [&](double, const Vector<2>& y) { end = y; });
  EXPECT_NEAR(end[0], 1.0, 1e-9);
  EXPECT_NEAR(end[1], 0.0, 1e-9);
}

TEST(DormandPrinceTest, PersistentInadmissibilityStops) {
  std::vector<double> outputs{2.0};
  const auto out = integrate<1>(
      [](double, const Vector<1>&) { return Vector<1>{-1.0}; }, 0.0, Vector<1>{1.0}, outputs,
      Settings{1e-8, 1e-10, 0.1}, [](const Vector<1>& y) { return y[0] > 0.5; },
      [](double, const Vector<1>&) {});
  EXPECT_EQ(out.status, Status::Inadmissible);
  EXPECT_LE(out.t, 0.5 + 1e-12);
  EXPECT_GT(out.y[0], 0.5);
}

TEST(DormandPrinceTest, BlowUpUnderflowsStepSize) {
  // y' = y² from y = 1 blows up at t = 1.
  std::vector<double> outputs{2.0};
  const auto out = integrate<1>(
      [](double, const Vector<1>& y) { return Vector<1>{y[0] * y[0]}; }, 0.0, Vector<1>{1.0},
      outputs, Settings{1e-8, 1e-10, 1e-3}, [](const Vector<1>& y) { return std::isfinite(y[0]); },
      [](double, const Vector<1>&) {});
  EXPECT_NE(out.status, Status::Ok);
  EXPECT_LT(out.t, 1.0 + 1e-6);
  EXPECT_GT(out.y[0], 1e8);
  EXPECT_GT(out.t, 0.99);
}

}  // namespace
}  // namespace fireball::ode
