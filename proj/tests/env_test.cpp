#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mbt/common/errors.hpp"
#include "mbt/env/command.hpp"
#include "mbt/env/configuration.hpp"
#include "mbt/env/curriculum.hpp"
#include "mbt/env/env.hpp"
#include "mbt/env/observation.hpp"
#include "mbt/env/rewards.hpp"
#include "mbt/env/termination.hpp"
#include "oracles.hpp"
#include "reward_oracle.hpp"
#include "scenes.hpp"

namespace mbt::env {
namespace {

using testing::AllTerms;

using sim::ActionCommand;
using testing::ZeroActions;

// ---- commands ----

TEST(Command, SamplesStayInRange) {
  Rng rng(1);
  const CommandRanges ranges;
  int holds = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const Command c = SampleCommand(rng, ranges);
    ASSERT_TRUE(ranges.Contains(c));
    ASSERT_GE(c.vx, -0.5);
    ASSERT_LE(c.vx, 2.0);
    ASSERT_LE(std::abs(c.vy), 0.3);
    ASSERT_LE(std::abs(c.omega), kPi / 8.0);
    if (c.IsHoldStill()) ++holds;
  }
  EXPECT_NEAR(static_cast<double>(holds) / draws, 0.25, 0.01);
}

TEST(Command, HoldStillHasZeroMotion) {
  Rng rng(2);
  CommandRanges always;
  always.hold_probability = 1.0;
  const Command c = SampleCommand(rng, always);
  EXPECT_EQ(c.vx, 0.0);
  EXPECT_EQ(c.vy, 0.0);
  EXPECT_EQ(c.omega, 0.0);
}

TEST(Command, SeedReproducible) {
  Rng a(5);
  Rng b(5);
  for (int k = 0; k < 10; ++k) {
    const Command x = SampleCommand(a);
    const Command y = SampleCommand(b);
    EXPECT_EQ(x.vx, y.vx);
    EXPECT_EQ(x.duration, y.duration);
  }
}

TEST(Command, ClampToRanges) {
  Command c;
  c.vx = 3.0;
  c.vy = -1.0;
  c.omega = std::numeric_limits<double>::quiet_NaN();
  c.h = 0.1;
  const Command out = ClampCommand(c);
  EXPECT_EQ(out.vx, 2.0);
  EXPECT_EQ(out.vy, -0.3);
  EXPECT_EQ(out.omega, 0.0);
  EXPECT_EQ(out.h, 0.5);
}

// ---- configurations ----

TEST(Configuration, StageOneIsSingleRobotAtControlPoint) {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const sim::AttachmentConfig c = SampleConfiguration(MakeStage(1), rng);
    ASSERT_EQ(c.NumRobots(), 1);
    EXPECT_EQ(c.attachments[0].radius, 0.0);
    EXPECT_EQ(c.attachments[0].angle, 0.0);
    EXPECT_EQ(c.bar_mass, 5.0);
  }
}

TEST(Configuration, MixedStagesRespectRanges) {
  Rng rng(4);
  int counts[4] = {0, 0, 0, 0};
  for (int k = 0; k < 100000; ++k) {
    const sim::AttachmentConfig c = SampleConfiguration(MakeStage(4), rng);
    ASSERT_NO_THROW(c.Validate());
    const int n = c.NumRobots();
    ++counts[n];
    const sim::Range mass = BarMassRange(n);
    ASSERT_TRUE(mass.Contains(c.bar_mass));
    for (const sim::Attachment& a : c.attachments) {
      ASSERT_GE(a.radius, 0.0);
      ASSERT_LE(a.radius, 3.5);
      ASSERT_GE(a.angle, -kPi);
      ASSERT_LE(a.angle, kPi);
    }
  }
  for (int n = 1; n <= 3; ++n) EXPECT_GT(counts[n], 30000);
}

TEST(Configuration, StageThreeUsesMidpointMass) {
  Rng rng(5);
  for (int k = 0; k < 300; ++k) {
    const sim::AttachmentConfig c = SampleConfiguration(MakeStage(3), rng);
    const sim::Range mass = BarMassRange(c.NumRobots());
    EXPECT_EQ(c.bar_mass, 0.5 * (mass.lo + mass.hi));
  }
}

TEST(Configuration, TriangleContainsControlPoint) {
  Rng rng(6);
  for (int k = 0; k < 10000; ++k) {
    const sim::AttachmentConfig c = SampleConfiguration(3, false, rng);
    const std::vector<Vec2> tri = c.Points();
    ASSERT_TRUE(PointInPolygon(Vec2::Zero(), tri, 1e-12));
  }
}

TEST(Configuration, PairControlPointNearARobot) {
  Rng rng(7);
  for (int k = 0; k < 10000; ++k) {
    const sim::AttachmentConfig c = SampleConfiguration(2, false, rng);
    const double nearest = std::min(c.attachments[0].radius, c.attachments[1].radius);
    ASSERT_LE(nearest, 1.0 + 1e-12);
    const double length = (c.Points()[0] - c.Points()[1]).norm();
    ASSERT_GE(length, 1.0 - 1e-12);
    ASSERT_LE(length, 3.0 + 1e-12);
  }
}

// ---- observations ----

TEST(Observation, ShapeAndFinitenessOverRandomConfigs) {
  Rng rng(8);
  for (int k = 0; k < 60; ++k) {
    const EpisodeSpec spec = SampleEpisode(MakeStage(4), rng);
    Env env;
    const std::vector<Observation> obs = env.Reset(spec);
    ASSERT_EQ(static_cast<int>(obs.size()), spec.config.NumRobots());
    for (const Observation& o : obs) {
      EXPECT_EQ(o.size(), 26u);
      for (double x : o) EXPECT_TRUE(std::isfinite(x));
    }
  }
}

TEST(Observation, AlignedRobotHasZeroRelativeYaw) {
  sim::SimState s = sim::BuildSystem(testing::Triangle(), {}, {}, {}, 0.8, 0.7);
  Rng rng(1);
  for (int r = 0; r < 3; ++r) {
    const Observation o = Observe(s, r, Command{}, rng, 0.0);
    EXPECT_NEAR(o[obs::kRelativeYaw], 0.0, 1e-15);
  }
}

TEST(Observation, ZeroRadiusReportsZeroAngle) {
  sim::AttachmentConfig c = testing::SingleRobot();
  c.attachments[0].angle = 1.0;  // meaningless for R = 0
  sim::SimState s = sim::BuildSystem(c, {}, {});
  Rng rng(1);
  const Observation o = Observe(s, 0, Command{}, rng, 0.0);
  EXPECT_EQ(o[obs::kAttachment], 0.0);
  EXPECT_EQ(o[obs::kAttachment + 1], 0.0);
}

TEST(Observation, CommandAndAttachmentAreCopied) {
  sim::SimState s = sim::BuildSystem(testing::TwoOnBar(), {}, {});
  Command c{0.3, -0.1, 0.2, 0.6, 100};
  Rng rng(1);
  const Observation o = Observe(s, 1, c, rng, 0.0);
  EXPECT_EQ(o[obs::kCommand + 0], 0.3);
  EXPECT_EQ(o[obs::kCommand + 1], -0.1);
  EXPECT_EQ(o[obs::kCommand + 2], 0.2);
  EXPECT_EQ(o[obs::kCommand + 3], 0.6);
  EXPECT_EQ(o[obs::kAttachment], 1.0);
  EXPECT_NEAR(o[obs::kHeight], 0.8, 1e-15);
  EXPECT_EQ(o[obs::kContacts], 1.0);
}

TEST(Observation, OtherRobotsCannotInfluence) {
  Rng rng(9);
  Env env;
  env.Reset(SampleEpisode(MakeStage(3), rng, {}, testing::Triangle()));
  std::vector<ActionCommand> a(3);
  for (int t = 0; t < 30; ++t) {
    for (auto& x : a) for (double& v : x) v = UniformReal(rng, -1.0, 1.0);
    env.Step(a);
  }
  const sim::SimState base = env.state();
  const Command c = env.command();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      sim::SimState mutated = base;
      mutated.bodies[j + 1].position += Vec3(0.3, -0.2, 0.1);
      mutated.bodies[j + 1].orientation = FromRollPitchYaw(0.2, -0.1, 0.4);
      mutated.bodies[j + 1].linear_velocity = Vec3(1.0, 2.0, 3.0);
      mutated.bodies[j + 1].angular_velocity = Vec3(-1.0, 0.5, 2.0);
      mutated.legs[j].feet[0].in_stance = !mutated.legs[j].feet[0].in_stance;
      mutated.legs[j].feet[1].position += Vec3(0.2, 0.2, 0.2);
      mutated.legs[j].clock = 0.123;
      mutated.joint_force[j] = Vec3(100.0, -50.0, 20.0);
      mutated.config.attachments[j].radius += 0.1;
      Rng ra(42);
      Rng rb(42);
      const Observation before = Observe(base, i, c, ra, 0.03);
      const Observation after = Observe(mutated, i, c, rb, 0.03);
      for (int k = 0; k < kObsDim; ++k) EXPECT_EQ(before[k], after[k]) << i << j << k;
    }
  }
}

// ---- rewards ----

TEST(Rewards, StandingContactTerm) {
  sim::SimState s = sim::BuildSystem(testing::SingleRobot(), {}, {});
  const std::vector<ActionCommand> a = ZeroActions(1);
  sim::SimStep(s, a, {});
  const Command hold{0.0, 0.0, 0.0, 0.8, 100};
  const auto r = ComputeRewards(s, a, a, hold, ReferenceOrientation(s.ground, 0.0));
  EXPECT_DOUBLE_EQ(r[0].feet_contact, 0.1);
  EXPECT_EQ(r[0].feet_airtime, 0.0);
}

TEST(Rewards, RelativeYawEndpoints) {
  sim::SimState s = sim::BuildSystem(testing::SingleRobot(), {}, {});
  const std::vector<ActionCommand> a = ZeroActions(1);
  const Command c{0.5, 0.0, 0.0, 0.8, 100};
  const Quat ref = ReferenceOrientation(s.ground, 0.0);
  EXPECT_EQ(ComputeRewards(s, a, a, c, ref)[0].relative_yaw, 0.0);
  s.bodies[1].orientation = YawRotation(kPi);
  EXPECT_NEAR(ComputeRewards(s, a, a, c, ref)[0].relative_yaw, -0.5, 1e-12);
}

TEST(Rewards, VelocityOnCommandGivesFullWeight) {
  sim::SimState s = sim::BuildSystem(testing::SingleRobot(), {}, {});
  const std::vector<ActionCommand> a = ZeroActions(1);
  s.bodies[0].linear_velocity = Vec3(0.7, -0.2, 0.0);
  const Command c{0.7, -0.2, 0.0, 0.8, 100};
  const auto r = ComputeRewards(s, a, a, c, ReferenceOrientation(s.ground, 0.0));
  EXPECT_EQ(r[0].velocity_x, 0.15);
  EXPECT_EQ(r[0].velocity_y, 0.1);
  EXPECT_EQ(r[0].orientation, 0.15);
}

TEST(Rewards, ZeroJointForceWhileStandingPair) {
  sim::SimState s = sim::BuildSystem(testing::TwoOnBar(), {}, {});
  const std::vector<ActionCommand> a = ZeroActions(2);
  s.joint_force.assign(2, Vec3::Zero());
  const Command hold{0.0, 0.0, 0.0, 0.8, 100};
  const auto r = ComputeRewards(s, a, a, hold, ReferenceOrientation(s.ground, 0.0));
  EXPECT_EQ(r[0].joint_force, 0.1);
  EXPECT_EQ(r[1].joint_force, 0.1);
}

TEST(Rewards, TotalsAddUp) {
  Rng rng(10);
  Env env;
  env.Reset(SampleEpisode(MakeStage(4), rng));
  std::vector<ActionCommand> a(env.NumRobots());
  for (int t = 0; t < 50 && !env.done(); ++t) {
    for (auto& x : a) for (double& v : x) v = UniformReal(rng, -1.0, 1.0);
    const StepResult out = env.Step(a);
    for (const RewardBreakdown& b : out.rewards) {
      double local = 0.0;
      for (double x : b.LocalTerms()) local += x;
      double global = 0.0;
      for (double x : b.GlobalTerms()) global += x;
      EXPECT_EQ(b.local, local);
      EXPECT_NEAR(b.global, global, 1e-15);
      EXPECT_EQ(b.total, b.local + b.global);
      EXPECT_EQ(b.global, out.rewards[0].global);
    }
  }
}

// Replays an episode and checks each step against the plain re-implementation.
void CheckAgainstOracle(std::uint64_t seed, int stage, double hold_probability) {
  Rng rng(seed);
  EnvOptions options;
  options.commands.hold_probability = hold_probability;
  options.commands.min_duration = 100;
  Env env(options);
  env.Reset(SampleEpisode(MakeStage(stage), rng, options));
  const int n = env.NumRobots();
  std::vector<ActionCommand> prev = ZeroActions(n);
  std::vector<ActionCommand> a(n);
  for (int t = 0; t < 10 && !env.done(); ++t) {
    for (auto& x : a) for (double& v : x) v = UniformReal(rng, -1.3, 1.3);
    const Command c = env.command();
    const StepResult out = env.Step(a);
    const auto want = testing::OracleRewards(env.state(), a, prev,
                                             {c.vx, c.vy, c.omega, c.h},
                                             env.reference_yaw());
    for (int r = 0; r < n; ++r) {
      const auto got = AllTerms(out.rewards[r]);
      for (int k = 0; k < 14; ++k) {
        EXPECT_NEAR(got[k], want[r][k], 1e-12)
            << RewardBreakdown::TermNames()[k] << " robot " << r << " step " << t;
      }
    }
    prev = a;
  }
}

TEST(Rewards, MatchPlainReimplementation) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CheckAgainstOracle(seed, 1 + seed % 4, seed % 2 == 0 ? 1.0 : 0.0);
  }
}

TEST(Rewards, HoldStillFlipsOnlyBranchTerms) {
  Rng rng(12);
  EnvOptions options;
  options.commands.hold_probability = 0.0;
  Env env(options);
  env.Reset(SampleEpisode(MakeStage(3), rng, options, testing::Triangle()));
  std::vector<ActionCommand> a(3);
  std::vector<ActionCommand> prev = ZeroActions(3);
  std::array<bool, 14> ever_differs{};
  for (int t = 0; t < 200; ++t) {
    for (auto& x : a) for (double& v : x) v = UniformReal(rng, -0.3, 0.3);
    env.Step(a);
    const Quat ref = ReferenceOrientation(env.state().ground, env.reference_yaw());
    // Same carrier motion target, one command counts as moving.
    const Command hold{0.0, 0.0, 0.0, 0.7, 100};
    const Command moving{1e-300, 0.0, 0.0, 0.7, 100};
    ASSERT_TRUE(hold.IsHoldStill());
    ASSERT_FALSE(moving.IsHoldStill());
    const auto rh = ComputeRewards(env.state(), a, prev, hold, ref);
    const auto rm = ComputeRewards(env.state(), a, prev, moving, ref);
    for (int r = 0; r < 3; ++r) {
      const auto h = AllTerms(rh[r]);
      const auto m = AllTerms(rm[r]);
      for (int k = 0; k < 14; ++k) {
        const bool branch = k <= 3 || k == 6;
        if (!branch) {
          EXPECT_EQ(h[k], m[k]) << RewardBreakdown::TermNames()[k];
        } else if (h[k] != m[k]) {
          ever_differs[k] = true;
        }
      }
    }
    if (env.done()) break;
    prev = a;
  }
  for (int k : {0, 1, 2, 3, 6}) {
    EXPECT_TRUE(ever_differs[k]) << RewardBreakdown::TermNames()[k];
  }
}

TEST(Rewards, LocalPartIndependentOfTeamSize) {
  Rng rng(13);
  Env env;
  EnvOptions options;
  options.commands.hold_probability = 0.0;
  env = Env(options);
  env.Reset(SampleEpisode(MakeStage(3), rng, options, testing::TwoOnBar()));
  std::vector<ActionCommand> a(2);
  std::vector<ActionCommand> prev = ZeroActions(2);
  for (int t = 0; t < 40; ++t) {
    for (auto& x : a) for (double& v : x) v = UniformReal(rng, -0.5, 0.5);
    const Command c = env.command();
    env.Step(a);
    const sim::SimState& pair = env.state();
    const Quat ref = ReferenceOrientation(pair.ground, env.reference_yaw());
    const auto team = ComputeRewards(pair, a, prev, c, ref);

    // A one-robot scene carrying the same local signals as robot 1.
    sim::SimState solo = sim::BuildSystem(testing::SingleRobot(), {}, pair.dynamics);
    solo.bodies[0].orientation = pair.bodies[0].orientation;
    solo.bodies[1] = pair.bodies[2];
    solo.pelvis_com_local[0] = pair.pelvis_com_local[1];
    solo.legs[0] = pair.legs[1];
    solo.joint_force[0] = pair.joint_force[1];
    solo.base_acceleration[0] = pair.base_acceleration[1];
    const std::vector<ActionCommand> a1{a[1]};
    const std::vector<ActionCommand> p1{prev[1]};
    const auto alone = ComputeRewards(solo, a1, p1, c, ref);
    EXPECT_EQ(team[1].local, alone[0].local);
    prev = a;
    if (env.done()) break;
  }
}

// ---- termination ----

sim::SimState Nominal() { return sim::BuildSystem(testing::SingleRobot(), {}, {}); }

TEST(Termination, NominalIsNone) {
  EXPECT_EQ(CheckTermination(Nominal(), 10), TerminationReason::kNone);
}

TEST(Termination, CarrierTiltBoundary) {
  const double limit = Deg2Rad(30.0);
  for (int axis = 0; axis < 2; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      sim::SimState s = Nominal();
      const double inside = sign * (limit - 1e-9);
      const double outside = sign * (limit + 1e-9);
      s.bodies[0].orientation = axis == 0 ? FromRollPitchYaw(inside, 0, 0) : FromRollPitchYaw(0, inside, 0);
      EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kNone);
      s.bodies[0].orientation = axis == 0 ? FromRollPitchYaw(outside, 0, 0) : FromRollPitchYaw(0, outside, 0);
      EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kCarrierTilt);
    }
  }
  sim::SimState s = Nominal();
  s.bodies[0].orientation = FromRollPitchYaw(0.0, Deg2Rad(35.0), 0.0);
  EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kCarrierTilt);
}

TEST(Termination, PelvisTiltBoundary) {
  const double limit = Deg2Rad(30.0);
  for (int axis = 0; axis < 2; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      sim::SimState s = Nominal();
      const double inside = sign * (limit - 1e-9);
      const double outside = sign * (limit + 1e-9);
      s.bodies[1].orientation = axis == 0 ? FromRollPitchYaw(inside, 0, 0) : FromRollPitchYaw(0, inside, 0);
      EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kNone);
      s.bodies[1].orientation = axis == 0 ? FromRollPitchYaw(outside, 0, 0) : FromRollPitchYaw(0, outside, 0);
      EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kPelvisTilt);
    }
  }
}

TEST(Termination, RelativeYawBoundary) {
  const double limit = Deg2Rad(30.0);
  for (double sign : {-1.0, 1.0}) {
    sim::SimState s = Nominal();
    s.bodies[1].orientation = YawRotation(sign * (limit - 1e-9));
    EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kNone);
    s.bodies[1].orientation = YawRotation(sign * (limit + 1e-9));
    EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kRelativeYaw);
  }
  // Measured against the carrier, not the world.
  sim::SimState s = Nominal();
  s.bodies[0].orientation = YawRotation(1.0);
  s.bodies[1].orientation = YawRotation(1.0 + limit - 1e-9);
  EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kNone);
}

TEST(Termination, PelvisHeightBoundary) {
  for (auto [z, want] : std::vector<std::pair<double, TerminationReason>>{
           {0.45, TerminationReason::kPelvisHeight},
           {0.5 - 1e-9, TerminationReason::kPelvisHeight},
           {0.5, TerminationReason::kNone},
           {1.0, TerminationReason::kNone},
           {1.0 + 1e-9, TerminationReason::kPelvisHeight}}) {
    sim::SimState s = Nominal();
    s.bodies[1].position.z() = z;
    EXPECT_EQ(CheckTermination(s, 10), want) << z;
  }
}

TEST(Termination, Timeout) {
  EXPECT_EQ(CheckTermination(Nominal(), 499), TerminationReason::kNone);
  EXPECT_EQ(CheckTermination(Nominal(), 500), TerminationReason::kTimeout);
  TerminationLimits eval;
  eval.horizon = 1000;
  EXPECT_EQ(CheckTermination(Nominal(), 999, eval), TerminationReason::kNone);
  EXPECT_EQ(CheckTermination(Nominal(), 1000, eval), TerminationReason::kTimeout);
}

TEST(Termination, CarrierOnGround) {
  sim::SimState s = Nominal();
  s.bodies[0].position.z() = 0.0;
  EXPECT_EQ(CheckTermination(s, 10), TerminationReason::kKneeGround);
}

TEST(Termination, PriorityAndMonotone) {
  sim::SimState s = Nominal();
  s.bodies[0].orientation = FromRollPitchYaw(0.0, Deg2Rad(40.0), 0.0);
  s.bodies[1].position.z() = 0.3;
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(CheckTermination(s, 600), TerminationReason::kCarrierTilt);
  }
  EXPECT_TRUE(IsFailure(TerminationReason::kPelvisHeight));
  EXPECT_FALSE(IsFailure(TerminationReason::kTimeout));
}

// ---- episodes ----

TEST(Env, EpisodesEndByHorizon) {
  Rng rng(14);
  for (int e = 0; e < 4; ++e) {
    Env env;
    env.Reset(SampleEpisode(MakeStage(1 + e), rng));
    const std::vector<ActionCommand> a = ZeroActions(env.NumRobots());
    int steps = 0;
    StepResult out;
    while (!out.done) {
      out = env.Step(a);
      ++steps;
    }
    EXPECT_LE(steps, 500);
    EXPECT_THROW(env.Step(a), UsageError);
  }
}

TEST(Env, StageOneHasNoPushes) {
  Rng rng(15);
  for (int k = 0; k < 2000; ++k) {
    EXPECT_TRUE(SampleEpisode(MakeStage(1), rng).perturbations.empty());
    EXPECT_TRUE(SampleEpisode(MakeStage(3), rng).perturbations.empty());
  }
}

TEST(Env, PushesRespectStageBounds) {
  Rng rng(16);
  bool any_robot_target = false;
  for (int k = 0; k < 2000; ++k) {
    const EpisodeSpec s2 = SampleEpisode(MakeStage(2), rng);
    ASSERT_FALSE(s2.perturbations.empty());
    for (const sim::PerturbationSpec& p : s2.perturbations) {
      ASSERT_LE(p.force.norm(), 50.0);
      ASSERT_LE(std::abs(p.torque_z), 5.0);
      ASSERT_GE(p.duration_steps, 50);
      ASSERT_LE(p.duration_steps, 200);
      ASSERT_EQ(p.target, sim::PerturbationSpec::kCarrier);
    }
    const EpisodeSpec s4 = SampleEpisode(MakeStage(4), rng);
    for (const sim::PerturbationSpec& p : s4.perturbations) {
      ASSERT_LT(p.target, s4.config.NumRobots());
      any_robot_target |= p.target >= 0;
    }
  }
  EXPECT_TRUE(any_robot_target);
}

TEST(Env, CommandsRotateAfterTheirDuration) {
  EpisodeSpec spec;
  spec.config = testing::SingleRobot();
  spec.commands = {{0.0, 0.0, 0.0, 0.8, 100}, {0.5, 0.0, 0.0, 0.8, 300}};
  spec.noise_seeds = {1};
  Env env;
  env.Reset(spec);
  const std::vector<ActionCommand> a = ZeroActions(1);
  for (int t = 0; t < 99; ++t) env.Step(a);
  EXPECT_EQ(env.command().vx, 0.0);
  EXPECT_TRUE(env.state().gait.hold_still);
  const StepResult out = env.Step(a);
  EXPECT_EQ(env.command().vx, 0.5);
  EXPECT_FALSE(env.state().gait.hold_still);
  EXPECT_EQ(out.observations[0][obs::kCommand], 0.5);
}

TEST(Env, MirroredPairSharesGlobalReward) {
  EpisodeSpec spec;
  spec.config = testing::TwoOnBar();
  spec.commands = {{0.0, 0.0, 0.0, 0.8, 450}};
  spec.noise_seeds = {1, 2};
  Env env;
  env.Reset(spec);
  const std::vector<ActionCommand> a = ZeroActions(2);
  for (int t = 0; t < 50; ++t) {
    const StepResult out = env.Step(a);
    EXPECT_EQ(out.rewards[0].global, out.rewards[1].global);
    EXPECT_NEAR(out.rewards[0].local, out.rewards[1].local, 1e-9);
  }
}

TEST(Env, ResetIsDeterministic) {
  auto run = [] {
    Rng rng(17);
    Env env;
    env.Reset(SampleEpisode(MakeStage(4), rng));
    std::vector<ActionCommand> a(env.NumRobots());
    double sum = 0.0;
    for (int t = 0; t < 100 && !env.done(); ++t) {
      for (auto& x : a) for (double& v : x) v = UniformReal(rng, -1.0, 1.0);
      const StepResult out = env.Step(a);
      for (const auto& o : out.observations) for (double x : o) sum += x;
      for (const auto& r : out.rewards) sum += r.total;
    }
    return sum;
  };
  EXPECT_EQ(run(), run());
}

TEST(Env, RejectsMissingNoiseSeeds) {
  EpisodeSpec spec;
  spec.config = testing::TwoOnBar();
  spec.commands = {Command{}};
  Env env;
  EXPECT_THROW(env.Reset(spec), ConfigError);
}

}  // namespace
}  // namespace mbt::env
