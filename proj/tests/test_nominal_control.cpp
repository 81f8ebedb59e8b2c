#include <gtest/gtest.h>

#include <cmath>

#include "rrt_mppi/nominal_control.hpp"

using namespace rrt_mppi;

TEST(NominalControl, SpeedLaw) {
  NominalGains g;
  g.alpha = 1.0;
  g.v_max = 2.0;
  const Control u = nominal_control({0, 0, 0, 0}, {1, 0}, g);
  EXPECT_NEAR(u.v, 2.0 * (1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_EQ(u.omega, 0.0);
}

TEST(NominalControl, SaturatesAndVanishes) {
  NominalGains g;
  EXPECT_NEAR(nominal_control({0, 0, 0, 0}, {40, 0}, g).v, g.v_max, 1e-12);
  EXPECT_EQ(nominal_control({3, 4, 1.0, 0}, {3, 4}, g).v, 0.0);
  double prev = 0.0;
  for (double d = 0.1; d < 5.0; d += 0.1) {
    const double v = nominal_control({0, 0, 0, 0}, {d, 0}, g).v;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(NominalControl, HeadingLawWrapsError) {
  NominalGains g;
  g.k_p = 2.0;
  // Target behind-left: bearing 3pi/4 from heading -3pi/4 gives error -pi/2 after wrapping.
  const Control u = nominal_control({0, 0, -3 * kPi / 4, 0}, {-1, 1}, g);
  EXPECT_NEAR(u.omega, 2.0 * (-kPi / 2), 1e-12);
  const Control w = nominal_control({0, 0, 0, 0}, {0, 1}, g);
  EXPECT_NEAR(w.omega, kPi, 1e-12);
}

TEST(SelectTarget, LookaheadClampsToEnd) {
  Path p;
  for (int k = 0; k < 10; ++k) p.waypoints.push_back({static_cast<double>(k), 0});
  NominalGains g;
  g.lookahead = 3;
  auto sel = select_target(p, {2.2, 1.0, 0, 0}, g);
  EXPECT_EQ(sel.nearest, 2u);
  EXPECT_EQ(sel.target, (Vec2{5, 0}));
  EXPECT_NEAR(sel.deviation, std::hypot(0.2, 1.0), 1e-12);
  sel = select_target(p, {8.9, 0, 0, 0}, g);
  EXPECT_EQ(sel.target, (Vec2{9, 0}));
  g.lookahead = 0;
  EXPECT_EQ(select_target(p, {4.4, 0, 0, 0}, g).target, (Vec2{4, 0}));
}

TEST(SelectTarget, TieGoesToLowerIndex) {
  const Path p{{{0, 0}, {2, 0}}};
  NominalGains g;
  g.lookahead = 0;
  EXPECT_EQ(select_target(p, {1, 0, 0, 0}, g).nearest, 0u);
  EXPECT_THROW(select_target(Path{}, {}, g), std::invalid_argument);
}

TEST(NominalControl, TurnsTowardTarget) {
  NominalGains g;
  DynamicsParams dyn;
  State s{0, 0, 0, 0};
  const Vec2 target{3, 3};
  const double start_error = std::atan2(3.0, 3.0);
  for (int k = 0; k < 15; ++k) s = step(s, nominal_control(s, target, g), {}, dyn);
  EXPECT_GT(s.phi, 0.0);
  EXPECT_GT(s.theta, 0.0);
  EXPECT_LT(std::abs(wrap_angle(std::atan2(target.y - s.y, target.x - s.x) - s.theta)), start_error);
}

TEST(NominalGains, Validate) {
  NominalGains g;
  EXPECT_NO_THROW(validate(g));
  g.alpha = 0;
  EXPECT_THROW(validate(g), std::invalid_argument);
}
