#pragma once

// JSON frames exchanged with piloting clients. Every frame is an object with
// a "type" tag.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "blimpassist/controllers.hpp"
#include "blimpassist/model.hpp"

namespace blimpassist {

struct CmdMessage {
  double t_client = 0.0;
  Vec2 dir = Vec2::Zero();
  double vz = 0.0;
  double yaw = 0.0;

  bool operator==(const CmdMessage&) const = default;
};

struct StateMessage {
  std::int64_t tick = 0;
  double t = 0.0;
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec2 tilt = Vec2::Zero();
  Vec2 tilt_rate = Vec2::Zero();
  double psi = 0.0;
  double omega_z = 0.0;
  Mode mode = Mode::Idle;
  bool assist = true;

  bool operator==(const StateMessage&) const = default;
};

/// Either field may be absent; an empty config only restarts the controller.
struct ConfigMessage {
  std::optional<bool> assist;
  bool reset = false;

  bool operator==(const ConfigMessage&) const = default;
};

struct AckMessage {
  double t_server = 0.0;
  double last_cmd_t = 0.0;

  bool operator==(const AckMessage&) const = default;
};

struct ErrorMessage {
  std::string code;
  std::string detail;

  bool operator==(const ErrorMessage&) const = default;
};

using WireMessage =
    std::variant<CmdMessage, StateMessage, ConfigMessage, AckMessage, ErrorMessage>;

/// Throws MalformedMessage if a numeric field is not finite.
std::string encode(const WireMessage& msg);

/// Throws MalformedMessage on invalid JSON, a missing or unknown tag, or a
/// field of the wrong shape.
WireMessage decode(std::string_view text);

StateMessage make_state_message(const BlimpState& s, std::int64_t tick, Mode mode, bool assist);

/// Clamped command stamped with the server time.
PilotCommand to_command(const CmdMessage& msg, double t_server);

}  // namespace blimpassist
