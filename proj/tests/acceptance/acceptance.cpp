// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "blimpassist/actuation.hpp"
#include "blimpassist/bridge.hpp"
#include "blimpassist/config.hpp"
#include "blimpassist/controllers.hpp"
#include "blimpassist/dynamics.hpp"
#include "blimpassist/harness.hpp"
#include "blimpassist/text.hpp"
#include "ws_client.hpp"

namespace fs = std::filesystem;
using namespace blimpassist;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- AC-1 ------------------------------------------------------------------

Outcome balanced_fixed_point() {
  const BlimpParams p;
  const double theta0 = 0.1;
  const double force = thrust_for_balanced_pitch(theta0, p);
  const double v0 = force * std::cos(theta0) / p.Dh;
  BlimpState s;
  s.tilt = Vec2(theta0, 0.0);
  s.v_xy = Vec2(v0, 0.0);
  Wrench w;
  w.f_xy = Vec2(force, 0.0);
  double worst_tilt = 0.0, worst_v = 0.0;
  for (int k = 0; k < 3000; ++k) {
    s = step_rk4(s, w, p, 0.01);
    worst_tilt = std::max(worst_tilt, std::abs(s.tilt.x() - theta0));
    worst_v = std::max(worst_v, std::abs(s.v_xy.x() - v0));
  }
  return {std::abs(force - 0.88143) < 5e-6 && worst_tilt < 1e-6 && worst_v < 1e-6,
          fmt("F=%.5f N, max|dtilt|=%.2e rad, max|dv|=%.2e m/s", force, worst_tilt, worst_v)};
}

// --- AC-2 ------------------------------------------------------------------

Outcome bang_bang_energy() {
  const BlimpParams p;
  const BangBangConfig bb;
  const double dt = 0.01;
  const double drag = yaw_damping(p);
  bool monotone = true;
  double worst_rate = 0.0;
  for (double omega0 : {0.1, 0.25, 0.5, 1.0}) {
    std::vector<double> omega{omega0}, energy{rotational_energy(omega0, p)}, tau;
    BlimpState s;
    s.omega_z = omega0;
    for (int k = 0; k < 2000; ++k) {
      Wrench w;
      w.tau_z = bang_bang_step(s.omega_z, bb);
      tau.push_back(w.tau_z);
      const bool active = std::abs(s.omega_z) >= bb.deadband;
      s = step_rk4(s, w, p, dt);
      omega.push_back(s.omega_z);
      energy.push_back(rotational_energy(s.omega_z, p));
      if (active && energy[k + 1] > energy[k] + 1e-12) monotone = false;
    }
    // central differences where the torque is the same on both sides
    for (std::size_t i = 1; i + 1 < omega.size(); ++i) {
      if (tau[i - 1] != tau[i] || tau[i] == 0.0) continue;
      const double dEdt = (energy[i + 1] - energy[i - 1]) / (2.0 * dt);
      const double expected = -bb.u * std::abs(omega[i]);
      const double rate = dEdt + drag * omega[i] * omega[i];
      worst_rate = std::max(worst_rate, std::abs(rate - expected) / std::abs(expected));
    }
  }
  return {monotone && worst_rate < 0.02,
          fmt("energy non-increasing=%s, worst |dE/dt + D w^2 + u|w|| / u|w| = %.3f%%",
              monotone ? "yes" : "no", 100.0 * worst_rate)};
}

// --- AC-3 ------------------------------------------------------------------

double time_to_settle(double omega0, const std::function<double(double)>& law, double horizon) {
  const BlimpParams p;
  BlimpState s;
  s.omega_z = omega0;
  const double dt = 0.01;
  for (int k = 0; k * dt <= horizon; ++k) {
    if (std::abs(s.omega_z) < 0.02) return k * dt;
    Wrench w;
    w.tau_z = law(s.omega_z);
    s = step_rk4(s, w, p, dt);
  }
  return std::numeric_limits<double>::infinity();
}

Outcome time_optimality() {
  const BangBangConfig bb;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> gain(0.001, 1.0);
  std::vector<double> gains(20);
  for (double& k : gains) k = gain(rng);
  int violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    const double omega0 = (i % 2 == 0 ? 1.0 : -1.0) * (0.1 + 0.1 * i);
    const double t_bb = time_to_settle(omega0, [&](double w) { return bang_bang_step(w, bb); }, 120.0);
    for (double k : gains) {
      const double t_lin = time_to_settle(
          omega0, [&](double w) { return std::clamp(-k * w, -bb.u, bb.u); }, 120.0);
      worst_margin = std::max(worst_margin, t_bb - t_lin);
      if (t_bb > t_lin + 0.01 + 1e-9) ++violations;
    }
  }
  return {violations == 0, fmt("200 pairs, worst t_bb - t_linear = %+.3f s", worst_margin)};
}

// --- AC-4 ------------------------------------------------------------------

template <typename Scalar>
Scalar yaw_error(double dt_in) {
  const BlimpParams p;
  const double omega0 = 1.0;
  flat::State<Scalar> x = flat::State<Scalar>::Zero();
  x[11] = Scalar(omega0);
  const flat::Input<Scalar> u = flat::Input<Scalar>::Zero();
  const Scalar dt(dt_in);
  const int steps = static_cast<int>(std::lround(10.0 / dt_in));
  for (int k = 0; k < steps; ++k) x = flat::rk4<Scalar>(x, u, p, dt);
  const Scalar damping = Scalar(p.Dh) * Scalar(p.r3) * Scalar(p.r3) + Scalar(p.Dwz);
  const Scalar exact = Scalar(omega0) * std::exp(-damping / Scalar(p.Iz) * Scalar(10));
  return std::abs(x[11] - exact);
}

Outcome integrator_order() {
  const BlimpParams p;
  // sanity: the production stepper agrees with the closed form
  BlimpState s;
  s.omega_z = 1.0;
  for (int k = 0; k < 1000; ++k) s = step_rk4(s, Wrench{}, p, 0.01);
  const double production = std::abs(s.omega_z - closed_form_yaw(1.0, 0.0, p, 10.0));
  const long double e1 = yaw_error<long double>(0.01);
  const long double e2 = yaw_error<long double>(0.005);
  const double ratio = static_cast<double>(e1 / e2);
  const double ratio_double = yaw_error<double>(0.01) / yaw_error<double>(0.005);
  return {ratio >= 12.0 && ratio <= 20.0 && production < 1e-12,
          fmt("error ratio %.2f in extended precision, %.2f in double where roundoff dominates at %.1e",
              ratio, ratio_double, production)};
}

// --- AC-5 ------------------------------------------------------------------

Outcome assist_effectiveness() {
  Scenario on;
  on.pilot = ChaoticPilotSpec{};
  on.duration = 30.0;
  on.seed = 7;
  Scenario off = on;
  off.assist = false;
  const ComparisonReport r = compare(on, off);
  return {r.ratio_rms_omega_z <= 0.5 && r.ratio_rms_tilt_rate <= 0.8,
          fmt("rms omega_z on/off = %.3f, rms tilt rate on/off = %.3f", r.ratio_rms_omega_z,
              r.ratio_rms_tilt_rate)};
}

// --- AC-6 ------------------------------------------------------------------

Outcome supervisor_timing() {
  Scenario sc;
  sc.duration = 60.0;
  const double dt = sc.dt;
  const double window = sc.controller.supervisor.reaction_window;
  Simulation sim(sc);
  Rng rng(99);
  double next = 0.0;
  std::optional<double> last_cmd;
  int commands = 0, not_idle = 0, overruns = 0;
  while (sim.tick_index() < tick_count(sc)) {
    std::optional<PilotCommand> cmd;
    const double now = sim.now();
    if (now >= next - 1e-9) {
      PilotCommand c;
      c.dir = Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
      c.yaw = rng.uniform(-1, 1);
      c.t_issued = now;
      cmd = c;
      next = now + window + rng.uniform(0.0, 0.3);
    }
    const TraceRecord rec = sim.tick(cmd);
    if (cmd) {
      ++commands;
      if (sim.controller().mode_before_command() != Mode::Idle) ++not_idle;
      last_cmd = now;
    }
    if ((rec.mode == Mode::Balancing || rec.mode == Mode::Stabilizing) &&
        (!last_cmd || now - *last_cmd > window + dt + 1e-9)) {
      ++overruns;
    }
  }

  // preemption: a second command in the middle of each phase
  int preempt_failures = 0;
  for (int second : {5, 15}) {
    Simulation p(Scenario{});
    for (int k = 0; k < 40; ++k) {
      std::optional<PilotCommand> cmd;
      if (k == 0 || k == second) {
        PilotCommand c;
        c.dir = Vec2(k == 0 ? 1.0 : -1.0, 0.0);
        c.t_issued = p.now();
        cmd = c;
      }
      const TraceRecord rec = p.tick(cmd);
      const int since = k - (k >= second ? second : 0);
      const Mode expected = since < 10 ? Mode::Balancing : Mode::Stabilizing;
      if (k == second && rec.mode != Mode::Balancing) ++preempt_failures;
      if (k >= second && since < 10 && rec.mode != expected) ++preempt_failures;
    }
  }
  return {commands > 100 && not_idle == 0 && overruns == 0 && preempt_failures == 0,
          fmt("%d commands, %d not idle on arrival, %d overruns, %d preemption errors", commands,
              not_idle, overruns, preempt_failures)};
}

// --- AC-7 ------------------------------------------------------------------

Outcome allocation_round_trip() {
  const BlimpParams p;
  const ThrusterLayout layout = ThrusterLayout::x_configuration(p.r3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> thrust(0.0, 0.7);
  double worst = 0.0;
  bool non_negative = true;
  for (int i = 0; i < 1000; ++i) {
    MotorCommand m;
    for (double& t : m.h) t = thrust(rng);
    m.v[i % 2] = thrust(rng);
    const Wrench w = wrench_of(m, layout);
    const Allocation a = allocate(w, layout, p);
    const Wrench back = wrench_of(a.command, layout);
    worst = std::max({worst, std::abs(back.f_xy.x() - w.f_xy.x()), std::abs(back.f_xy.y() - w.f_xy.y()),
                      std::abs(back.f_z - w.f_z), std::abs(back.tau_z - w.tau_z)});
    for (double t : a.command.h) non_negative = non_negative && t >= 0.0;
    for (double t : a.command.v) non_negative = non_negative && t >= 0.0;
  }
  return {worst <= 1e-9 && non_negative,
          fmt("max component error %.2e, thrusts non-negative=%s", worst, non_negative ? "yes" : "no")};
}

// --- AC-8 ------------------------------------------------------------------

// Peak |tilt| over 5 s of a balancing step toward `target`, on the full
// plant or on its small-angle linearization.
double peak_tilt(double target, bool linear) {
  const BlimpParams p;
  const PidGains gains;
  const double dt = 0.01;
  BlimpState s;
  PidState pid;
  double peak = 0.0;
  for (int k = 0; k < 500; ++k) {
    const BalancingOutput out = balancing_step(Vec2(target, 0.0), s, gains, pid, dt, p);
    pid = out.state;
    const double f = out.force.x();
    if (linear) {
      auto accel = [&](double th, double rate) { return (f * p.r2 - p.m * p.g * p.r1 * th - p.Dwy * rate) / p.Iy; };
      const double th = s.tilt.x(), w = s.tilt_rate.x();
      const double k1t = w, k1w = accel(th, w);
      const double k2t = w + dt / 2 * k1w, k2w = accel(th + dt / 2 * k1t, w + dt / 2 * k1w);
      const double k3t = w + dt / 2 * k2w, k3w = accel(th + dt / 2 * k2t, w + dt / 2 * k2w);
      const double k4t = w + dt * k3w, k4w = accel(th + dt * k3t, w + dt * k3w);
      s.tilt.x() = th + dt / 6 * (k1t + 2 * k2t + 2 * k3t + k4t);
      s.tilt_rate.x() = w + dt / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    } else {
      BlimpState next = step_rk4(s, Wrench{out.force, 0.0, 0.0}, p, dt);
      // only the tilt axis is compared; keep the rest of the state at rest
      s.tilt = next.tilt;
      s.tilt_rate = next.tilt_rate;
    }
    peak = std::max(peak, std::abs(s.tilt.x()));
  }
  return peak;
}

Outcome small_angle_validity() {
  double worst = 0.0;
  for (double target : {0.02, 0.05, 0.08, 0.1, -0.1}) {
    const double nl = peak_tilt(target, false);
    const double lin = peak_tilt(target, true);
    worst = std::max(worst, std::abs(nl - lin) / lin);
  }
  return {worst <= 0.01, fmt("worst peak-tilt difference %.3f%%", 100.0 * worst)};
}

// --- AC-9 ------------------------------------------------------------------

Outcome record_replay_closure() {
  const fs::path dir = fs::temp_directory_path() / "blimpassist_acceptance_record";
  fs::remove_all(dir);
  Scenario sc;
  sc.pilot = InteractivePilotSpec{};
  SessionConfig cfg = session_from_scenario(sc);
  cfg.record_dir = dir;
  cfg.keep_trace = true;
  std::vector<Segment> segments;
  {
    Session session(cfg);
    session.start();
    testing::WsClient ws(session.port());
    const char* script[] = {
        R"({"type":"cmd","t_client":0.0,"dir":[1,0],"vz":0,"yaw":0})",
        R"({"type":"cmd","t_client":0.3,"dir":[0.6,0.8],"vz":0.2,"yaw":0.5})",
        R"({"type":"cmd","t_client":0.4,"dir":[-1,0],"vz":0,"yaw":-1})",
        R"({"type":"config","assist":"off"})",
        R"({"type":"cmd","t_client":0.9,"dir":[0,1],"vz":-0.3,"yaw":0})",
        R"({"type":"config","assist":"on","reset":true})",
        R"({"type":"cmd","t_client":1.4,"dir":[0.5,-0.5],"vz":0,"yaw":0.2})",
        R"({"type":"cmd","t_client":1.5,"dir":[0,0],"vz":0,"yaw":0})",
    };
    for (const char* frame : script) {
      ws.send(frame);
      std::this_thread::sleep_for(std::chrono::milliseconds(150));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    session.stop();
    segments = session.segments();
  }
  std::size_t commands = 0;
  std::int64_t ticks = 0;
  bool identical = !segments.empty();
  for (const Segment& seg : segments) {
    const Trace replay = run_scenario(load_scenario(seg.dir / "scenario.json"));
    identical = identical && replay == seg.trace &&
                format_trace(replay) == read_text_file(seg.dir / "trace.csv");
    commands += seg.commands.size();
    ticks += seg.ticks;
  }
  fs::remove_all(dir);
  return {identical && commands >= 6 && segments.size() == 3,
          fmt("%zu segments, %lld ticks, %zu commands, bit-identical=%s", segments.size(),
              static_cast<long long>(ticks), commands, identical ? "yes" : "no")};
}

struct Criterion {
  const char* id;
  const char* name;
  Outcome (*check)();
  double budget;  // seconds; 0 means no limit
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"AC-1", "balanced fixed point", balanced_fixed_point, 1.0},
      {"AC-2", "bang-bang energy decay", bang_bang_energy, 1.0},
      {"AC-3", "bang-bang time optimality", time_optimality, 5.0},
      {"AC-4", "integrator order", integrator_order, 1.0},
      {"AC-5", "assist effectiveness", assist_effectiveness, 10.0},
      {"AC-6", "supervisor timing", supervisor_timing, 5.0},
      {"AC-7", "allocation round trip", allocation_round_trip, 1.0},
      {"AC-8", "small-angle validity", small_angle_validity, 0.0},
      {"AC-9", "record/replay closure", record_replay_closure, 0.0},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget > 0.0 && elapsed > c.budget) {
      out.pass = false;
      out.detail += fmt(" [over the %.0f s budget]", c.budget);
    }
    if (!out.pass) ++failures;
    std::printf("%s %s: %s (%s, %.2f s)\n", c.id, out.pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
