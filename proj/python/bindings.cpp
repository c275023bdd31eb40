// Python extension: scenario runs, comparisons, metrics and the small
// physics helpers. Scenarios cross the boundary as canonical JSON text.

#include <string>
#include <tuple>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blimpassist/actuation.hpp"
#include "blimpassist/config.hpp"
#include "blimpassist/controllers.hpp"
#include "blimpassist/dynamics.hpp"
#include "blimpassist/error.hpp"
#include "blimpassist/harness.hpp"
#include "blimpassist/wire.hpp"

namespace py = pybind11;
using namespace blimpassist;

namespace {

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("scenario: ") + e.what());
  }
  Scenario sc = scenario_from_json(j, base_dir);
  validate(sc, true);
  return sc;
}

BlimpParams parse_params(const std::string& text) {
  return text.empty() ? BlimpParams{} : params_from_json(json::parse(text));
}

constexpr int kColumns = 23;

py::tuple trace_to_numpy(const Trace& tr) {
  py::array_t<double> data({static_cast<py::ssize_t>(tr.records.size()), static_cast<py::ssize_t>(kColumns)});
  auto out = data.mutable_unchecked<2>();
  std::vector<std::string> modes;
  modes.reserve(tr.records.size());
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const TraceRecord& r = tr.records[i];
    const double row[kColumns] = {
        r.t,           r.position.x(),  r.position.y(),    r.position.z(),    r.velocity.x(),
        r.velocity.y(), r.velocity.z(), r.tilt.x(),        r.tilt.y(),        r.tilt_rate.x(),
        r.tilt_rate.y(), r.psi,         r.omega_z,         r.wrench.f_xy.x(), r.wrench.f_xy.y(),
        r.wrench.f_z,  r.wrench.tau_z,  r.motors.h[0],     r.motors.h[1],     r.motors.h[2],
        r.motors.h[3], r.motors.v[0],   r.motors.v[1]};
    for (int c = 0; c < kColumns; ++c) out(static_cast<py::ssize_t>(i), c) = row[c];
    modes.emplace_back(to_string(r.mode));
  }
  return py::make_tuple(data, modes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Blimp simulator with hybrid assistive control";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    const auto raise = [](const char* message, const char* code, const std::string& detail) {
      py::object inst = py::reinterpret_borrow<py::object>(error)(message);
      inst.attr("code") = code;
      inst.attr("detail") = detail;
      PyErr_SetObject(error.ptr(), inst.ptr());
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      raise(e.what(), to_string(e.code()), e.detail());
    } catch (const json::exception& e) {
      raise(e.what(), "ParseError", e.what());
    }
  });

  m.attr("TRACE_HEADER") = kTraceHeader;

  m.def("default_scenario", [] { return to_json(Scenario{}).dump(); },
        "Canonical JSON of the default scenario.");

  m.def(
      "normalize_scenario",
      [](const std::string& text, const std::string& base_dir) {
        return to_json(parse_scenario(text, base_dir)).dump();
      },
      py::arg("scenario"), py::arg("base_dir") = "",
      "Validates scenario JSON and returns it with every default filled in.");

  m.def(
      "load_scenario", [](const std::string& path) { return to_json(load_scenario(path, true)).dump(); },
      py::arg("path"), "Reads a scenario file and returns its canonical JSON.");

  m.def(
      "run",
      [](const std::string& text, const std::string& base_dir) {
        const Scenario sc = parse_scenario(text, base_dir);
        Trace tr;
        {
          py::gil_scoped_release release;
          tr = run_scenario(sc);
        }
        return trace_to_numpy(tr);
      },
      py::arg("scenario"), py::arg("base_dir") = "",
      "Runs a scenario. Returns (N x 23 array of the numeric trace columns, list of modes).");

  m.def(
      "run_csv",
      [](const std::string& text, const std::string& base_dir) {
        const Scenario sc = parse_scenario(text, base_dir);
        py::gil_scoped_release release;
        return format_trace(run_scenario(sc));
      },
      py::arg("scenario"), py::arg("base_dir") = "", "Runs a scenario and returns the trace CSV.");

  m.def(
      "metrics",
      [](const std::string& trace_csv, const std::string& scenario) {
        const Scenario sc = scenario.empty() ? Scenario{} : parse_scenario(scenario, "");
        return to_json(compute_metrics(parse_trace(trace_csv), sc)).dump();
      },
      py::arg("trace_csv"), py::arg("scenario") = "", "Metrics of a trace CSV as JSON.");

  m.def(
      "compare",
      [](const std::string& text, const std::string& base_dir) {
        Scenario on = parse_scenario(text, base_dir);
        on.assist = true;
        Scenario off = on;
        off.assist = false;
        py::gil_scoped_release release;
        return to_json(compare(on, off)).dump();
      },
      py::arg("scenario"), py::arg("base_dir") = "",
      "Runs the scenario with assist on and off; returns the comparison report JSON.");

  m.def(
      "allocate",
      [](double fx, double fy, double fz, double tau_z, const std::string& params) {
        const BlimpParams p = parse_params(params);
        Wrench w;
        w.f_xy = Vec2(fx, fy);
        w.f_z = fz;
        w.tau_z = tau_z;
        const Allocation a = allocate(w, ThrusterLayout::x_configuration(p.r3), p);
        return std::make_tuple(a.command.h, a.command.v, a.saturated, a.scale);
      },
      py::arg("fx"), py::arg("fy"), py::arg("fz"), py::arg("tau_z"), py::arg("params") = "",
      "Motor thrusts for a wrench: (horizontal[4], vertical[2], saturated, scale).");

  m.def(
      "wrench_of",
      [](const std::array<double, 4>& h, const std::array<double, 2>& v, const std::string& params) {
        const BlimpParams p = parse_params(params);
        const Wrench w = wrench_of(MotorCommand{h, v}, ThrusterLayout::x_configuration(p.r3));
        return std::make_tuple(w.f_xy.x(), w.f_xy.y(), w.f_z, w.tau_z);
      },
      py::arg("h"), py::arg("v"), py::arg("params") = "", "Wrench (fx, fy, fz, tau_z) of motor thrusts.");

  m.def(
      "thrust_for_balanced_pitch",
      [](double tilt, const std::string& params) { return thrust_for_balanced_pitch(tilt, parse_params(params)); },
      py::arg("tilt"), py::arg("params") = "");
  m.def(
      "balanced_pitch_for_thrust",
      [](double thrust, const std::string& params) { return balanced_pitch_for_thrust(thrust, parse_params(params)); },
      py::arg("thrust"), py::arg("params") = "");
  m.def(
      "closed_form_yaw",
      [](double omega0, double tau_z, double t, const std::string& params) {
        return closed_form_yaw(omega0, tau_z, parse_params(params), t);
      },
      py::arg("omega0"), py::arg("tau_z"), py::arg("t"), py::arg("params") = "");
  m.def(
      "bang_bang_step",
      [](double omega_z, double u, double deadband) { return bang_bang_step(omega_z, BangBangConfig{u, deadband}); },
      py::arg("omega_z"), py::arg("u") = BangBangConfig{}.u, py::arg("deadband") = BangBangConfig{}.deadband);

  m.def(
      "normalize_message", [](const std::string& text) { return encode(decode(text)); }, py::arg("text"),
      "Parses one wire frame and re-encodes it; raises Error(MalformedMessage) if invalid.");
}
