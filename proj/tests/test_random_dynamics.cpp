#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rrt_mppi/dynamics.hpp"
#include "rrt_mppi/random.hpp"

using namespace rrt_mppi;

TEST(NoiseStream, PureFunctionOfCounters) {
  const NoiseStream a(42, StreamPurpose::kRollout, 3), b(42, StreamPurpose::kRollout, 3);
  // Reverse draw order gives the same values.
  for (int i = 9; i >= 0; --i)
    for (int j = 4; j >= 0; --j) EXPECT_EQ(a.standard_normal_pair(i, j), b.standard_normal_pair(i, j));
}

TEST(NoiseStream, KeysSeparateSeedPurposeEpoch) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t seed = 0; seed < 8; ++seed)
    for (auto purpose : {StreamPurpose::kRollout, StreamPurpose::kPlant})
      for (std::uint64_t epoch = 0; epoch < 8; ++epoch) keys.insert(NoiseStream(seed, purpose, epoch).key());
  EXPECT_EQ(keys.size(), 8u * 2u * 8u);
  EXPECT_NE(NoiseStream(1, StreamPurpose::kRollout, 0).standard_normal_pair(0, 0),
            NoiseStream(1, StreamPurpose::kPlant, 0).standard_normal_pair(0, 0));
}

TEST(NoiseStream, MomentsMatchStandardNormal) {
  const NoiseStream s(5, StreamPurpose::kRollout, 0);
  const int n = 200000;
  double m1 = 0, m2 = 0, cross = 0, tail = 0;
  for (int i = 0; i < n / 2; ++i) {
    auto [a, b] = s.standard_normal_pair(i, 0);
    m1 += a + b;
    m2 += a * a + b * b;
    cross += a * b;
    tail += (std::abs(a) > 1.96) + (std::abs(b) > 1.96);
  }
  // Tolerances are ~5 standard errors.
  EXPECT_NEAR(m1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(cross / (n / 2), 0.0, 5.0 / std::sqrt(n / 2));
  EXPECT_NEAR(tail / n, 0.05, 5.0 * std::sqrt(0.05 * 0.95 / n));
}

TEST(Dynamics, StraightLine) {
  DynamicsParams p;
  State s;
  for (int k = 0; k < 20; ++k) s = step(s, {3.0, 0.0}, {}, p);
  EXPECT_NEAR(s.x, 3.0, 1e-12);
  EXPECT_EQ(s.y, 0.0);
  EXPECT_EQ(s.theta, 0.0);
  EXPECT_EQ(s.phi, 0.0);
}

TEST(Dynamics, SingleStepByHand) {
  DynamicsParams p;
  const State s{1.0, 2.0, 0.3, 0.2};
  const State n = step(s, {1.5, 0.4}, {0.5, -0.1}, p);
  EXPECT_DOUBLE_EQ(n.x, 1.0 + 0.05 * std::cos(0.3) * 2.0);
  EXPECT_DOUBLE_EQ(n.y, 2.0 + 0.05 * std::sin(0.3) * 2.0);
  EXPECT_DOUBLE_EQ(n.theta, 0.3 + 0.05 * std::tan(0.2) * 2.0 / 0.5);
  EXPECT_DOUBLE_EQ(n.phi, 0.2 + 0.05 * 0.3);
}

TEST(Dynamics, ConstantSteeringTracesCircle) {
  DynamicsParams p;
  p.dt = 1e-4;
  const double phi = 0.4;
  State s{0, 0, 0, phi};
  const double radius = p.wheelbase / std::tan(phi);
  const int n = 20000;  // 2 s at unit speed
  for (int k = 0; k < n; ++k) s = step(s, {1.0, 0.0}, {}, p);
  // Center of the turning circle is (0, radius).
  EXPECT_NEAR(std::hypot(s.x, s.y - radius), radius, 1e-3);
  EXPECT_NEAR(s.theta, 2.0 / radius, 1e-9);
}

TEST(Dynamics, SteeringGuard) {
  DynamicsParams p;
  EXPECT_THROW(step({0, 0, 0, kPi / 2}, {1, 0}, {}, p), SteeringSingularity);
  EXPECT_THROW(step({0, 0, 0, -(kPi / 2 - 1e-7)}, {1, 0}, {}, p), SteeringSingularity);
  EXPECT_NO_THROW(step({0, 0, 0, kPi / 2 - 1e-5}, {1, 0}, {}, p));
  EXPECT_FALSE(try_step({0, 0, 0, kPi / 2}, {1, 0}, {}, p).has_value());
}

TEST(Dynamics, PerturbationScalesPerChannel) {
  DynamicsParams p;
  p.noise_scale = {2.0, 0.0};
  const NoiseStream s(1, StreamPurpose::kPlant, 0);
  const auto [a, b] = s.standard_normal_pair(3, 0);
  (void)b;
  const Control d = sample_perturbation(s, 3, 0, p);
  EXPECT_EQ(d.v, 2.0 * a);
  EXPECT_EQ(d.omega, 0.0);
}

TEST(Dynamics, LawOfLargeNumbersOverNoise) {
  // Mean displacement of one noisy step equals the noiseless step.
  DynamicsParams p;
  const State s{0, 0, 0.7, 0.0};
  const NoiseStream noise(9, StreamPurpose::kPlant, 0);
  const int n = 100000;
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    const State nxt = step(s, {1.0, 0.0}, sample_perturbation(noise, i, 0, p), p);
    mx += nxt.x;
    my += nxt.y;
  }
  EXPECT_NEAR(mx / n, 0.05 * std::cos(0.7), 5 * 0.05 / std::sqrt(n));
  EXPECT_NEAR(my / n, 0.05 * std::sin(0.7), 5 * 0.05 / std::sqrt(n));
}

TEST(Dynamics, ValidateRejectsBadParams) {
  DynamicsParams p;
  p.dt = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = {};
  p.wheelbase = -1.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
}
