#include "blimpassist/pilot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blimpassist/error.hpp"
#include "blimpassist/text.hpp"

namespace blimpassist {

namespace {

constexpr const char* kLogHeader = "t,dir_x,dir_y,vz,yaw";

}  // namespace

void validate(const ReactionModel& rm) {
  if (!(rm.min_gap >= 0.0)) throw Error(ErrorCode::InvalidScenario, "reaction.min_gap");
  if (!(rm.jitter >= 0.0)) throw Error(ErrorCode::InvalidScenario, "reaction.jitter");
}

void validate(const WaypointPlan& plan) {
  if (plan.waypoints.empty()) throw Error(ErrorCode::InvalidScenario, "plan.waypoints: empty");
  for (const Vec3& w : plan.waypoints) {
    if (!w.allFinite()) throw Error(ErrorCode::InvalidScenario, "plan.waypoints: non-finite");
  }
  if (!(plan.capture_radius > 0.0)) throw Error(ErrorCode::InvalidScenario, "plan.capture_radius");
  if (!(plan.speed_scale > 0.0 && plan.speed_scale <= 1.0)) {
    throw Error(ErrorCode::InvalidScenario, "plan.speed_scale");
  }
}

WaypointPilot::WaypointPilot(WaypointPlan plan, ReactionModel rm)
    : plan_(std::move(plan)), rm_(rm), rng_(rm.seed), gap_(rm.min_gap) {
  validate(plan_);
  validate(rm_);
}

std::optional<PilotCommand> WaypointPilot::step(double now, const BlimpState& s) {
  const Vec3 position(s.p_xy.x(), s.p_xy.y(), s.z);
  while (index_ < plan_.waypoints.size() &&
         (plan_.waypoints[index_] - position).norm() <= plan_.capture_radius) {
    ++index_;
  }
  if (exhausted()) return std::nullopt;
  if (last_issue_ && now - *last_issue_ < gap_ - kGapEpsilon) return std::nullopt;

  const Vec3& target = plan_.waypoints[index_];
  const Vec2 planar = target.head<2>() - s.p_xy;
  PilotCommand c;
  if (planar.norm() > 1e-12) c.dir = plan_.speed_scale * planar.normalized();
  c.vz = kAltitudeGain * (target.z() - s.z);
  c.t_issued = now;

  last_issue_ = now;
  gap_ = rm_.min_gap + rng_.uniform(0.0, rm_.jitter);
  return clamp_command(c);
}

ChaoticPilot::ChaoticPilot(ReactionModel rm) : rm_(rm), rng_(rm.seed), gap_(rm.min_gap) {
  validate(rm_);
}

std::optional<PilotCommand> ChaoticPilot::step(double now, const BlimpState&) {
  if (last_issue_ && now - *last_issue_ < gap_ - kGapEpsilon) return std::nullopt;
  PilotCommand c;
  const double dx = rng_.uniform(-1.0, 1.0);
  const double dy = rng_.uniform(-1.0, 1.0);
  c.dir = Vec2(dx, dy);
  c.yaw = rng_.uniform(-1.0, 1.0);
  c.t_issued = now;
  last_issue_ = now;
  gap_ = rm_.min_gap + rng_.uniform(0.0, rm_.jitter);
  return clamp_command(c);
}

void check_monotone(const std::vector<PilotCommand>& log) {
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (!(log[i].t_issued > log[i - 1].t_issued)) {
      throw Error(ErrorCode::NonMonotoneLog, "entry " + std::to_string(i) + " at t=" +
                                                 format_fixed(log[i].t_issued, 6));
    }
  }
}

ReplayPilot::ReplayPilot(std::vector<PilotCommand> log) : log_(std::move(log)) {
  check_monotone(log_);
}

std::optional<PilotCommand> ReplayPilot::step(double now, const BlimpState&) {
  std::optional<PilotCommand> due;
  while (next_ < log_.size() && log_[next_].t_issued <= now + kDueEpsilon) {
    due = log_[next_++];
  }
  return due;
}

std::string format_command_log(const std::vector<PilotCommand>& log) {
  std::string out = kLogHeader;
  out += '\n';
  for (const PilotCommand& c : log) {
    out += format_fixed(c.t_issued, 6);
    for (double v : {c.dir.x(), c.dir.y(), c.vz, c.yaw}) {
      out += ',';
      out += format_exact(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<PilotCommand> parse_command_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kLogHeader) {
    throw Error(ErrorCode::ParseError, std::string("command log: expected header '") +
                                                kLogHeader + "'");
  }
  std::vector<PilotCommand> log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<double> fields = parse_csv_numbers(line, 5, "command log line " +
                                                                       std::to_string(line_no));
    PilotCommand c;
    c.t_issued = fields[0];
    c.dir = Vec2(fields[1], fields[2]);
    c.vz = fields[3];
    c.yaw = fields[4];
    log.push_back(clamp_command(c));
  }
  check_monotone(log);
  return log;
}

void write_command_log(const std::filesystem::path& path, const std::vector<PilotCommand>& log) {
  write_text_file(path, format_command_log(log));
}

std::vector<PilotCommand> read_command_log(const std::filesystem::path& path) {
  return parse_command_log(read_text_file(path));
}

std::unique_ptr<Pilot> make_pilot(const PilotSpec& spec, std::uint64_t seed) {
  struct Visitor {
    std::uint64_t seed;
    std::unique_ptr<Pilot> operator()(const NullPilotSpec&) const {
      return std::make_unique<NullPilot>();
    }
    std::unique_ptr<Pilot> operator()(const WaypointPilotSpec& s) const {
      ReactionModel rm = s.reaction;
      rm.seed = seed;
      return std::make_unique<WaypointPilot>(s.plan, rm);
    }
    std::unique_ptr<Pilot> operator()(const ChaoticPilotSpec& s) const {
      ReactionModel rm = s.reaction;
      rm.seed = seed;
      return std::make_unique<ChaoticPilot>(rm);
    }
    std::unique_ptr<Pilot> operator()(const ReplayPilotSpec& s) const {
      return std::make_unique<ReplayPilot>(read_command_log(s.log));
    }
    std::unique_ptr<Pilot> operator()(const InteractivePilotSpec&) const {
      throw Error(ErrorCode::InvalidScenario, "pilot.kind: interactive pilots need a live session");
    }
  };
  return std::visit(Visitor{seed}, spec);
}

}  // namespace blimpassist
