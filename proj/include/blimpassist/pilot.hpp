#pragma once

// Headless command sources: a waypoint follower and a chaotic stick-masher
// paced by a human reaction-time model, plus replay of recorded logs.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "blimpassist/model.hpp"

namespace blimpassist {

/// Identifier of the pseudo-random algorithm, written into reports so runs
/// can be reproduced elsewhere.
inline constexpr const char* kRngAlgorithm = "mt19937_64";

/// mt19937_64 with a fixed 53-bit mantissa mapping for uniforms. The
/// standard distributions are implementation-defined, so they are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct ReactionModel {
  double min_gap = 0.200;
  double jitter = 0.050;
  std::uint64_t seed = 0;

  bool operator==(const ReactionModel&) const = default;
};

struct WaypointPlan {
  std::vector<Vec3> waypoints;
  double capture_radius = 0.3;
  double speed_scale = 1.0;

  bool operator==(const WaypointPlan&) const = default;
};

/// Throws InvalidScenario with a field name.
void validate(const ReactionModel& rm);
void validate(const WaypointPlan& plan);

/// Issue-time spacing tolerates tick times accumulated in floating point.
inline constexpr double kGapEpsilon = 1e-9;

class Pilot {
 public:
  virtual ~Pilot() = default;
  /// Called once per control tick with the state at the start of the tick.
  virtual std::optional<PilotCommand> step(double now, const BlimpState& s) = 0;
};

/// Never issues anything.
class NullPilot final : public Pilot {
 public:
  std::optional<PilotCommand> step(double, const BlimpState&) override { return std::nullopt; }
};

/// Flies through the plan's waypoints in order. Each command points the
/// planar stick at the current waypoint and sets vz from the altitude error
/// (gain kAltitudeGain per meter).
class WaypointPilot final : public Pilot {
 public:
  static constexpr double kAltitudeGain = 0.5;

  WaypointPilot(WaypointPlan plan, ReactionModel rm);
  std::optional<PilotCommand> step(double now, const BlimpState& s) override;

  std::size_t current_index() const { return index_; }
  bool exhausted() const { return index_ >= plan_.waypoints.size(); }

 private:
  WaypointPlan plan_;
  ReactionModel rm_;
  Rng rng_;
  std::size_t index_ = 0;
  std::optional<double> last_issue_;
  double gap_;
};

/// Uniformly random planar and yaw inputs at the reaction cadence.
class ChaoticPilot final : public Pilot {
 public:
  explicit ChaoticPilot(ReactionModel rm);
  std::optional<PilotCommand> step(double now, const BlimpState& s) override;

 private:
  ReactionModel rm_;
  Rng rng_;
  std::optional<double> last_issue_;
  double gap_;
};

/// Re-issues a recorded log. When several entries fall due on one tick the
/// latest wins, matching the preemption rule.
class ReplayPilot final : public Pilot {
 public:
  /// Entries due within this margin of a tick are issued on that tick; half
  /// the 6-decimal timestamp resolution of the log format.
  static constexpr double kDueEpsilon = 5e-7;

  /// Throws NonMonotoneLog unless timestamps strictly increase.
  explicit ReplayPilot(std::vector<PilotCommand> log);
  std::optional<PilotCommand> step(double now, const BlimpState& s) override;

 private:
  std::vector<PilotCommand> log_;
  std::size_t next_ = 0;
};

void check_monotone(const std::vector<PilotCommand>& log);

// Command log: header `t,dir_x,dir_y,vz,yaw`, timestamps with 6 decimals.
std::string format_command_log(const std::vector<PilotCommand>& log);
std::vector<PilotCommand> parse_command_log(const std::string& text);
void write_command_log(const std::filesystem::path& path, const std::vector<PilotCommand>& log);
std::vector<PilotCommand> read_command_log(const std::filesystem::path& path);

struct NullPilotSpec {
  bool operator==(const NullPilotSpec&) const = default;
};
struct WaypointPilotSpec {
  WaypointPlan plan;
  ReactionModel reaction;
  bool operator==(const WaypointPilotSpec&) const = default;
};
struct ChaoticPilotSpec {
  ReactionModel reaction;
  bool operator==(const ChaoticPilotSpec&) const = default;
};
struct ReplayPilotSpec {
  std::filesystem::path log;
  bool operator==(const ReplayPilotSpec&) const = default;
};
/// Commands arrive from a live client; only valid in a bridge session.
struct InteractivePilotSpec {
  bool operator==(const InteractivePilotSpec&) const = default;
};

using PilotSpec = std::variant<NullPilotSpec, WaypointPilotSpec, ChaoticPilotSpec, ReplayPilotSpec,
                               InteractivePilotSpec>;

/// Builds the pilot for a spec. The scenario seed overrides the reaction
/// model's seed. Interactive specs are rejected with InvalidScenario.
std::unique_ptr<Pilot> make_pilot(const PilotSpec& spec, std::uint64_t seed);

}  // namespace blimpassist
