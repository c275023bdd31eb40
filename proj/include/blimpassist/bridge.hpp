#pragma once

// Live piloting service: a fixed-rate simulation loop fed by WebSocket
// clients on /pilot, with telemetry fan-out, /health and /config endpoints,
// and per-segment recording that replays headlessly.

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blimpassist/error.hpp"
#include "blimpassist/harness.hpp"
#include "blimpassist/wire.hpp"

namespace blimpassist {

struct SessionConfig {
  /// Pilot must be interactive; duration is ignored.
  Scenario scenario;
  double tick_rate = 100.0;
  double telemetry_rate = 20.0;
  std::string address = "127.0.0.1";
  /// 0 binds an ephemeral port.
  std::uint16_t port = 0;
  /// Ring positions shown by clients.
  std::vector<Vec3> targets;
  double target_radius = 0.3;
  /// Slow clients are dropped once this many frames are queued.
  std::size_t max_backlog = 64;
  std::optional<std::filesystem::path> record_dir;
  /// Keep each segment's trace and command log in memory as well.
  bool keep_trace = false;
  /// Stop on SIGINT / SIGTERM.
  bool handle_signals = false;
};

/// Throws InvalidScenario naming the field.
void validate(const SessionConfig& cfg);

/// Session settings for a harness scenario: the pilot becomes interactive,
/// a waypoint plan becomes the target list, and the tick rate follows dt.
SessionConfig session_from_scenario(const Scenario& sc);

/// Body of the /config endpoint.
std::string describe(const SessionConfig& cfg);

/// Outgoing frames for one client. The producer never waits: once more
/// than `limit` frames are pending the client is too slow and is dropped.
class Backlog {
 public:
  using Frame = std::shared_ptr<const std::string>;

  explicit Backlog(std::size_t limit) : limit_(limit) {}

  /// False when the frame pushed the backlog over the limit.
  bool push(Frame frame);
  const Frame& front() const { return frames_.front(); }
  void pop() { frames_.pop_front(); }
  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }

 private:
  std::size_t limit_;
  std::deque<Frame> frames_;
};

/// Work for one tick, in arrival order.
using Ingress = std::variant<PilotCommand, ConfigMessage>;

/// A stretch of the session with fixed controller settings. Each config
/// message closes the current segment.
struct Segment {
  std::filesystem::path dir;
  /// Replays the segment through run_scenario (log path relative to dir).
  Scenario scenario;
  std::int64_t ticks = 0;
  /// Filled only with keep_trace.
  std::vector<PilotCommand> commands;
  Trace trace;
};

/// The single-threaded part of a session: owns the simulation and the
/// recorder. Sessions drive it from their loop thread; tests drive it
/// directly.
class SessionCore {
 public:
  explicit SessionCore(SessionConfig cfg);
  ~SessionCore();

  SessionCore(const SessionCore&) = delete;
  SessionCore& operator=(const SessionCore&) = delete;

  /// Applies the inputs (config messages restart the controller; of the
  /// commands after the last config, the latest wins), advances one tick and
  /// records it. Returns telemetry on broadcast ticks. Throws
  /// ModelRegionViolation if the state leaves the model or turns non-finite.
  std::optional<StateMessage> tick(const std::vector<Ingress>& inputs);

  /// Closes the open segment. Safe to call more than once.
  void finish();

  std::int64_t ticks() const { return ticks_; }
  double now() const { return sim_.now(); }
  bool assist() const { return sim_.scenario().assist; }
  const Simulation& simulation() const { return sim_; }
  const SessionConfig& config() const { return cfg_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool recording() const { return recording_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void open_segment();
  void close_segment();
  void restart(const ConfigMessage& cfg);
  void disable_recording(const std::string& why);

  SessionConfig cfg_;
  Simulation sim_;
  std::int64_t ticks_ = 0;
  std::int64_t telemetry_every_ = 1;
  std::vector<Segment> segments_;
  std::optional<Segment> open_;
  std::vector<PilotCommand> open_log_;
  std::ofstream trace_out_;
  bool recording_ = false;
  std::vector<std::string> warnings_;
};

/// Network front end. Binding happens in the constructor so a busy port is
/// reported before anything runs.
class Session {
 public:
  /// Throws InvalidScenario or PortInUse.
  explicit Session(SessionConfig cfg);
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void start();
  /// Stops the loop, closes clients and finalizes recording. Idempotent.
  void stop();
  /// Blocks until the session ends (stop, signal or simulation failure).
  void wait();
  bool wait_for(std::chrono::milliseconds timeout);

  std::uint16_t port() const;
  std::int64_t ticks() const;
  std::size_t clients() const;
  /// Wall-clock seconds since the loop started.
  double elapsed() const;
  /// The simulation error that ended the session, if any.
  std::optional<Error> failure() const;
  /// Complete after stop().
  std::vector<Segment> segments() const;
  std::vector<std::string> warnings() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace blimpassist
