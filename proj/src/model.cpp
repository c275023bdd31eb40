#include "blimpassist/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blimpassist/error.hpp"

namespace blimpassist {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::ThrustExceedsBalanceRange: return "ThrustExceedsBalanceRange";
    case ErrorCode::TiltOutOfRange: return "TiltOutOfRange";
    case ErrorCode::ModelRegionViolation: return "ModelRegionViolation";
    case ErrorCode::NonMonotoneClock: return "NonMonotoneClock";
    case ErrorCode::NonMonotoneLog: return "NonMonotoneLog";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)) {}

const BlimpParams& validate_params(const BlimpParams& p) {
  for (std::size_t i = 0; i < kParamFields.size(); ++i) {
    const double value = p.*kParamFields[i];
    // written so that NaN fails too
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::NonPositiveParameter, std::string(kParamNames[i]));
    }
  }
  return p;
}

namespace {

double clamp_unit(double x) {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, -1.0, 1.0);
}

}  // namespace

PilotCommand clamp_command(const PilotCommand& raw) {
  PilotCommand out = raw;
  out.dir = Vec2(clamp_unit(raw.dir.x()), clamp_unit(raw.dir.y()));
  out.vz = clamp_unit(raw.vz);
  out.yaw = clamp_unit(raw.yaw);
  return out;
}

bool is_finite(const BlimpState& s) {
  return s.p_xy.allFinite() && std::isfinite(s.z) && s.v_xy.allFinite() && std::isfinite(s.v_z) &&
         s.tilt.allFinite() && s.tilt_rate.allFinite() && std::isfinite(s.psi) &&
         std::isfinite(s.omega_z) && std::isfinite(s.t);
}

bool is_finite(const Wrench& w) {
  return w.f_xy.allFinite() && std::isfinite(w.f_z) && std::isfinite(w.tau_z);
}

}  // namespace blimpassist
