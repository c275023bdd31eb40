// blimpsim: headless runs, assist comparisons, trace metrics and the live
// piloting service.
//
// Exit codes: 0 success, 1 validation error, 2 IO error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blimpassist/config.hpp"
#include "blimpassist/error.hpp"
#include "blimpassist/harness.hpp"
#include "blimpassist/text.hpp"
#ifdef BLIMPASSIST_HAVE_BRIDGE
#include "blimpassist/bridge.hpp"
#endif

namespace fs = std::filesystem;
using namespace blimpassist;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kIo = 2;

bool parse_on_off(const std::string& s) { return s == "on"; }

int run_cmd(const fs::path& scenario, const fs::path& out, const std::string& assist,
            const std::optional<std::uint64_t>& seed) {
  Scenario sc = load_scenario(scenario);
  if (!assist.empty()) sc.assist = parse_on_off(assist);
  if (seed) sc.seed = *seed;
  const Trace tr = run_scenario(sc);
  write_trace(tr, out);
  std::cout << to_json(compute_metrics(tr, sc)).dump(2) << "\n";
  return kOk;
}

int compare_cmd(const fs::path& scenario, const fs::path& out) {
  const Scenario sc = load_scenario(scenario);
  Scenario on = sc;
  on.assist = true;
  Scenario off = sc;
  off.assist = false;
  const std::string report = to_json(compare(on, off)).dump(2) + "\n";
  write_text_file(out, report);
  std::cout << report;
  return kOk;
}

int metrics_cmd(const fs::path& trace, const std::optional<fs::path>& scenario) {
  const Trace tr = read_trace(trace);
  Scenario sc;
  if (scenario) {
    sc = load_scenario(*scenario, true);
  } else if (tr.records.size() > 1) {
    sc.dt = tr.records[1].t - tr.records[0].t;
  }
  std::cout << to_json(compute_metrics(tr, sc)).dump(2) << "\n";
  return kOk;
}

#ifdef BLIMPASSIST_HAVE_BRIDGE
int serve_cmd(const fs::path& scenario, std::uint16_t port, const std::string& address,
              double telemetry_rate, const std::optional<fs::path>& record) {
  SessionConfig cfg = session_from_scenario(load_scenario(scenario, true));
  cfg.port = port;
  cfg.address = address;
  cfg.telemetry_rate = telemetry_rate;
  cfg.record_dir = record;
  cfg.handle_signals = true;
  Session session(cfg);
  session.start();
  std::cout << "listening on " << address << ":" << session.port() << " (ws /pilot, GET /health, GET /config)"
            << std::endl;
  session.wait();
  session.stop();
  for (const Segment& seg : session.segments()) {
    std::cout << "recorded " << seg.dir.string() << " (" << seg.ticks << " ticks)\n";
  }
  if (const auto failure = session.failure()) throw *failure;
  return kOk;
}
#endif

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blimp assistive-control simulator"};
  app.require_subcommand(1);

  fs::path scenario;
  fs::path out;
  fs::path trace;
  std::optional<fs::path> metrics_scenario;
  std::string assist;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run a scenario and write its trace");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out, "Trace CSV to write")->required();
  run->add_option("--assist", assist, "Override the scenario's assist flag")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--seed", seed, "Override the scenario seed");

  auto* cmp = app.add_subcommand("compare", "Run with assist on and off and compare");
  cmp->add_option("--scenario", scenario, "Scenario file")->required();
  cmp->add_option("--out", out, "Report JSON to write")->required();

  auto* met = app.add_subcommand("metrics", "Compute metrics of a trace");
  met->add_option("--trace", trace, "Trace CSV")->required();
  met->add_option("--scenario", metrics_scenario, "Scenario with the waypoint plan");

#ifdef BLIMPASSIST_HAVE_BRIDGE
  std::uint16_t port = 8765;
  std::string address = "127.0.0.1";
  double telemetry_rate = 20.0;
  std::optional<fs::path> record;
  auto* serve = app.add_subcommand("serve", "Host a live piloting session");
  serve->add_option("--scenario", scenario, "Scenario file")->required();
  serve->add_option("--port", port, "Listen port (0 picks one)")->capture_default_str();
  serve->add_option("--address", address, "Listen address")->capture_default_str();
  serve->add_option("--telemetry-rate", telemetry_rate, "Broadcast rate in Hz")->capture_default_str();
  serve->add_option("--record", record, "Directory for recorded segments");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return run_cmd(scenario, out, assist, seed);
    if (*cmp) return compare_cmd(scenario, out);
    if (*met) return metrics_cmd(trace, metrics_scenario);
#ifdef BLIMPASSIST_HAVE_BRIDGE
    if (*serve) return serve_cmd(scenario, port, address, telemetry_rate, record);
#endif
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.detail() << "\n";
    return e.is_io() || e.code() == ErrorCode::PortInUse ? kIo : kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}
