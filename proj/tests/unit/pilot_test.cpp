#include <cmath>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "blimpassist/error.hpp"
#include "blimpassist/pilot.hpp"

namespace blimpassist {
namespace {

namespace fs = std::filesystem;

constexpr double kDt = 0.01;

std::vector<double> issue_times(Pilot& pilot, int ticks) {
  std::vector<double> times;
  for (int k = 0; k < ticks; ++k) {
    if (auto c = pilot.step(k * kDt, BlimpState{})) times.push_back(c->t_issued);
  }
  return times;
}

TEST(Rng, UniformRange) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, FrozenStream) {
  // first outputs of mt19937_64 seeded with 0, mapped to [0, 1) by the top 53 bits
  Rng rng(0);
  std::mt19937_64 ref(0);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(rng.uniform(), static_cast<double>(ref() >> 11) / 9007199254740992.0);
  }
  std::mt19937_64 standard(5489u);
  for (int i = 0; i < 9999; ++i) standard();
  EXPECT_EQ(standard(), 9981545732273789042ull);
}

TEST(ChaoticPilot, ReactionGapsRespected) {
  ChaoticPilot pilot(ReactionModel{0.2, 0.05, 3});
  const std::vector<double> times = issue_times(pilot, 3000);
  ASSERT_GT(times.size(), 100u);
  EXPECT_EQ(times.front(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - times[i - 1];
    EXPECT_GE(gap, 0.2 - 1e-9);
    // issued on the first tick after the drawn gap
    EXPECT_LE(gap, 0.25 + kDt + 1e-9);
  }
}

TEST(ChaoticPilot, CommandsInRangeWithoutVertical) {
  ChaoticPilot pilot(ReactionModel{0.2, 0.05, 9});
  double max_x = 0.0;
  for (int k = 0; k < 5000; ++k) {
    if (auto c = pilot.step(k * kDt, BlimpState{})) {
      EXPECT_LE(c->dir.cwiseAbs().maxCoeff(), 1.0);
      EXPECT_LE(std::abs(c->yaw), 1.0);
      EXPECT_EQ(c->vz, 0.0);
      max_x = std::max(max_x, std::abs(c->dir.x()));
    }
  }
  EXPECT_GT(max_x, 0.9);
}

TEST(ChaoticPilot, SeedDeterminesStream) {
  ChaoticPilot a(ReactionModel{0.2, 0.05, 42});
  ChaoticPilot b(ReactionModel{0.2, 0.05, 42});
  ChaoticPilot c(ReactionModel{0.2, 0.05, 43});
  bool differs = false;
  for (int k = 0; k < 500; ++k) {
    const auto x = a.step(k * kDt, BlimpState{});
    EXPECT_EQ(x, b.step(k * kDt, BlimpState{}));
    const auto z = c.step(k * kDt, BlimpState{});
    if (x && z && x->dir != z->dir) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(ChaoticPilot, TenSecondCommandCount) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ChaoticPilot pilot(ReactionModel{0.2, 0.05, seed});
    const std::size_t n = issue_times(pilot, 1000).size();
    EXPECT_GE(n, 40u);
    EXPECT_LE(n, 50u);
  }
}

TEST(ChaoticPilot, NoJitterGivesFixedCadence) {
  ChaoticPilot pilot(ReactionModel{0.2, 0.0, 1});
  const std::vector<double> times = issue_times(pilot, 101);
  ASSERT_EQ(times.size(), 6u);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(times[i], 0.2 * i, 1e-12);
}

TEST(WaypointPilot, PointsAtWaypointAndCaptures) {
  WaypointPlan plan;
  plan.waypoints = {Vec3(3.0, 4.0, 1.0), Vec3(0.0, 0.0, 0.0)};
  WaypointPilot pilot(plan, ReactionModel{0.2, 0.0, 0});
  BlimpState s;
  const auto c = pilot.step(0.0, s);
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->dir.x(), 0.6, 1e-15);
  EXPECT_NEAR(c->dir.y(), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(c->vz, 0.5);
  EXPECT_FALSE(pilot.step(0.1, s));

  s.p_xy = Vec2(3.0, 3.8);
  s.z = 1.0;
  const auto next = pilot.step(0.2, s);
  EXPECT_EQ(pilot.current_index(), 1u);
  ASSERT_TRUE(next);
  EXPECT_NEAR(next->dir.x(), -3.0 / std::hypot(3.0, 3.8), 1e-15);
  EXPECT_DOUBLE_EQ(next->vz, -0.5);

  s.p_xy = Vec2(0.1, 0.0);
  s.z = 0.0;
  EXPECT_FALSE(pilot.step(0.4, s));
  EXPECT_TRUE(pilot.exhausted());
}

TEST(WaypointPilot, SpeedScaleShortensStick) {
  WaypointPlan plan;
  plan.waypoints = {Vec3(10.0, 0.0, 0.0)};
  plan.speed_scale = 0.5;
  WaypointPilot pilot(plan, ReactionModel{});
  EXPECT_DOUBLE_EQ(pilot.step(0.0, BlimpState{})->dir.x(), 0.5);
}

TEST(WaypointPilot, RejectsEmptyPlan) {
  try {
    WaypointPilot pilot(WaypointPlan{}, ReactionModel{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidScenario);
  }
}

TEST(ReactionModel, RejectsNegativeGap) {
  EXPECT_THROW(ChaoticPilot(ReactionModel{-0.1, 0.0, 0}), Error);
}

std::vector<PilotCommand> sample_log() {
  std::vector<PilotCommand> log(3);
  log[0].t_issued = 0.0;
  log[0].dir = Vec2(0.1, -0.2);
  log[1].t_issued = 0.225;
  log[1].dir = Vec2(1.0 / 3.0, 0.0);
  log[1].yaw = -0.7;
  log[2].t_issued = 0.228;
  log[2].vz = 1.0;
  return log;
}

TEST(CommandLog, RoundTrip) {
  const auto log = sample_log();
  const std::string text = format_command_log(log);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,dir_x,dir_y,vz,yaw");
  EXPECT_EQ(parse_command_log(text), log);
}

TEST(CommandLog, FileRoundTrip) {
  const fs::path path = fs::temp_directory_path() / "blimpassist_pilot_test.csv";
  write_command_log(path, sample_log());
  EXPECT_EQ(read_command_log(path), sample_log());
  fs::remove(path);
}

TEST(CommandLog, RejectsNonMonotone) {
  auto log = sample_log();
  log[2].t_issued = 0.225;
  try {
    ReplayPilot pilot(log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotoneLog);
  }
  EXPECT_THROW(parse_command_log(format_command_log(log)), Error);
}

TEST(CommandLog, RejectsBadHeaderAndFields) {
  try {
    parse_command_log("time,x\n0,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  EXPECT_THROW(parse_command_log("t,dir_x,dir_y,vz,yaw\n0,1,2\n"), Error);
  EXPECT_THROW(parse_command_log("t,dir_x,dir_y,vz,yaw\n0,a,0,0,0\n"), Error);
}

TEST(CommandLog, MissingFileIsIoError) {
  try {
    read_command_log("/nonexistent/blimpassist/log.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_io());
    EXPECT_NE(e.detail().find("/nonexistent/blimpassist/log.csv"), std::string::npos);
  }
}

TEST(ReplayPilot, LatestDueEntryWins) {
  ReplayPilot pilot(sample_log());
  std::vector<std::pair<int, PilotCommand>> issued;
  for (int k = 0; k < 40; ++k) {
    if (auto c = pilot.step(k * kDt, BlimpState{})) issued.emplace_back(k, *c);
  }
  ASSERT_EQ(issued.size(), 2u);
  EXPECT_EQ(issued[0].first, 0);
  // 0.225 and 0.228 both fall due at tick 23
  EXPECT_EQ(issued[1].first, 23);
  EXPECT_EQ(issued[1].second, sample_log()[2]);
}

TEST(MakePilot, SeedOverridesReactionSeed) {
  ChaoticPilotSpec spec;
  spec.reaction.seed = 99;
  auto a = make_pilot(spec, 7);
  ChaoticPilot ref(ReactionModel{0.2, 0.05, 7});
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a->step(k * kDt, {}), ref.step(k * kDt, {}));
}

TEST(MakePilot, InteractiveRejected) {
  EXPECT_THROW(make_pilot(InteractivePilotSpec{}, 0), Error);
  EXPECT_FALSE(make_pilot(NullPilotSpec{}, 0)->step(0.0, {}));
}

}  // namespace
}  // namespace blimpassist
