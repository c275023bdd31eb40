#include "blimpassist/wire.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "blimpassist/error.hpp"

namespace blimpassist {

namespace {

using json = nlohmann::json;

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedMessage, why); }

double finite(double v, const char* field) {
  if (!std::isfinite(v)) malformed(std::string(field) + ": not finite");
  return v;
}

json array(const Vec2& v, const char* field) { return {finite(v.x(), field), finite(v.y(), field)}; }
json array(const Vec3& v, const char* field) {
  return {finite(v.x(), field), finite(v.y(), field), finite(v.z(), field)};
}

double number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  const auto it = j.find(key);
  if (it == j.end()) {
    if (fallback) return *fallback;
    malformed(std::string(key) + ": missing");
  }
  if (!it->is_number()) malformed(std::string(key) + ": expected a number");
  return it->get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array() || it->size() != N) {
    malformed(std::string(key) + ": expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!(*it)[i].is_number()) malformed(std::string(key) + ": expected numbers");
    out[i] = (*it)[i].get<double>();
  }
  return out;
}

bool on_off(const json& v) {
  if (v == "on") return true;
  if (v == "off") return false;
  malformed("assist: expected \"on\" or \"off\"");
}

struct Encoder {
  json operator()(const CmdMessage& m) const {
    return {{"type", "cmd"},
            {"t_client", finite(m.t_client, "t_client")},
            {"dir", array(m.dir, "dir")},
            {"vz", finite(m.vz, "vz")},
            {"yaw", finite(m.yaw, "yaw")}};
  }
  json operator()(const StateMessage& m) const {
    return {{"type", "state"},
            {"tick", m.tick},
            {"t", finite(m.t, "t")},
            {"pos", array(m.pos, "pos")},
            {"vel", array(m.vel, "vel")},
            {"tilt", array(m.tilt, "tilt")},
            {"tilt_rate", array(m.tilt_rate, "tilt_rate")},
            {"psi", finite(m.psi, "psi")},
            {"omega_z", finite(m.omega_z, "omega_z")},
            {"mode", to_string(m.mode)},
            {"assist", m.assist ? "on" : "off"}};
  }
  json operator()(const ConfigMessage& m) const {
    json j = {{"type", "config"}, {"reset", m.reset}};
    if (m.assist) j["assist"] = *m.assist ? "on" : "off";
    return j;
  }
  json operator()(const AckMessage& m) const {
    return {{"type", "ack"},
            {"t_server", finite(m.t_server, "t_server")},
            {"last_cmd_t", finite(m.last_cmd_t, "last_cmd_t")}};
  }
  json operator()(const ErrorMessage& m) const {
    return {{"type", "error"}, {"code", m.code}, {"detail", m.detail}};
  }
};

}  // namespace

std::string encode(const WireMessage& msg) { return std::visit(Encoder{}, msg).dump(); }

WireMessage decode(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) malformed("expected a JSON object");
  const auto tag = j.find("type");
  if (tag == j.end()) malformed("missing type");
  if (!tag->is_string()) malformed("type: expected a string");
  const std::string type = tag->get<std::string>();

  if (type == "cmd") {
    CmdMessage m;
    m.t_client = number(j, "t_client", 0.0);
    m.dir = vector<2>(j, "dir");
    m.vz = number(j, "vz", 0.0);
    m.yaw = number(j, "yaw", 0.0);
    return m;
  }
  if (type == "state") {
    StateMessage m;
    if (const auto it = j.find("tick"); it != j.end()) {
      if (!it->is_number_integer()) malformed("tick: expected an integer");
      m.tick = it->get<std::int64_t>();
    }
    m.t = number(j, "t");
    m.pos = vector<3>(j, "pos");
    m.vel = vector<3>(j, "vel");
    m.tilt = vector<2>(j, "tilt");
    if (j.contains("tilt_rate")) m.tilt_rate = vector<2>(j, "tilt_rate");
    m.psi = number(j, "psi", 0.0);
    m.omega_z = number(j, "omega_z");
    const auto mode = j.find("mode");
    if (mode == j.end() || !mode->is_string()) malformed("mode: expected a string");
    try {
      m.mode = mode_from_string(mode->get<std::string>());
    } catch (const Error&) {
      malformed("mode: unknown value");
    }
    if (const auto it = j.find("assist"); it != j.end()) m.assist = on_off(*it);
    return m;
  }
  if (type == "config") {
    ConfigMessage m;
    if (const auto it = j.find("assist"); it != j.end()) m.assist = on_off(*it);
    if (const auto it = j.find("reset"); it != j.end()) {
      if (!it->is_boolean()) malformed("reset: expected a boolean");
      m.reset = it->get<bool>();
    }
    return m;
  }
  if (type == "ack") {
    return AckMessage{number(j, "t_server"), number(j, "last_cmd_t")};
  }
  if (type == "error") {
    ErrorMessage m;
    if (const auto it = j.find("code"); it != j.end() && it->is_string()) m.code = *it;
    if (const auto it = j.find("detail"); it != j.end() && it->is_string()) m.detail = *it;
    return m;
  }
  malformed("unknown type '" + type + "'");
}

StateMessage make_state_message(const BlimpState& s, std::int64_t tick, Mode mode, bool assist) {
  StateMessage m;
  m.tick = tick;
  m.t = s.t;
  m.pos = Vec3(s.p_xy.x(), s.p_xy.y(), s.z);
  m.vel = Vec3(s.v_xy.x(), s.v_xy.y(), s.v_z);
  m.tilt = s.tilt;
  m.tilt_rate = s.tilt_rate;
  m.psi = s.psi;
  m.omega_z = s.omega_z;
  m.mode = mode;
  m.assist = assist;
  return m;
}

PilotCommand to_command(const CmdMessage& msg, double t_server) {
  PilotCommand c;
  c.dir = msg.dir;
  c.vz = msg.vz;
  c.yaw = msg.yaw;
  c.t_issued = t_server;
  return clamp_command(c);
}

}  // namespace blimpassist
