// Python bindings. Scenarios cross the boundary as JSON text and traces as
// JSONL text, the same formats the CLI reads and writes, so anything produced
// here can be re-checked from the command line and vice versa.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "leasesim/analysis.hpp"
#include "leasesim/object_model.hpp"
#include "leasesim/sim.hpp"

namespace py = pybind11;
using namespace leasesim;

namespace {

Trace trace_from_text(const std::string& jsonl) {
  std::istringstream is(jsonl);
  return read_jsonl(is);
}

py::list violations_to_list(const std::vector<Violation>& vs) {
  py::list out;
  for (const auto& v : vs) out.append(py::make_tuple(v.check, v.detail));
  return out;
}

py::dict stats_to_dict(const BlockStats& b) {
  py::dict d;
  d["max_update"] = b.max_rmw;
  d["max_read"] = b.max_read;
  d["n_update"] = b.n_rmw;
  d["n_read"] = b.n_read;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "simulator for lease-based replicated objects with local reads";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "run",
      [](const std::string& scenario_json, std::int64_t seed) {
        Scenario sc = scenario_from_json_text(scenario_json);
        if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
        return to_jsonl(run_scenario(sc));
      },
      py::arg("scenario_json"), py::arg("seed") = -1,
      "run a scenario given as json text; returns the trace as jsonl text");

  m.def(
      "check",
      [](const std::string& trace_jsonl, const std::string& scenario_json) {
        Scenario sc = scenario_from_json_text(scenario_json);
        Trace tr = trace_from_text(trace_jsonl);
        return violations_to_list(check_all(tr, sc));
      },
      py::arg("trace_jsonl"), py::arg("scenario_json"),
      "run every audit over a trace; returns (check, detail) pairs, empty when clean");

  m.def(
      "blocking",
      [](const std::string& trace_jsonl, const std::string& scenario_json) {
        Scenario sc = scenario_from_json_text(scenario_json);
        Trace tr = trace_from_text(trace_jsonl);
        BlockingReport rep = blocking_times(tr, sc);
        py::dict d;
        d["stable"] = stats_to_dict(rep.stable);
        d["nice"] = stats_to_dict(rep.nice);
        d["other"] = stats_to_dict(rep.other);
        return d;
      },
      py::arg("trace_jsonl"), py::arg("scenario_json"),
      "maximum observed blocking per period class");

  m.def(
      "bounds",
      [](const std::string& scenario_json) {
        Scenario sc = scenario_from_json_text(scenario_json);
        BoundSet b = theoretical_bound(sc.params);
        py::dict d;
        d["stable_update"] = b.stable_rmw;
        d["stable_read"] = b.stable_read;
        d["nice_update"] = b.nice_rmw;
        d["nice_read"] = b.nice_read;
        return d;
      },
      py::arg("scenario_json"),
      "closed-form worst-case blocking for the scenario's parameters");

  m.def(
      "brute_force_linearizable",
      [](const std::string& trace_jsonl, const std::string& object, size_t cap) {
        History h = extract_history(trace_from_text(trace_jsonl), object);
        return brute_force_linearizable(h, cap);
      },
      py::arg("trace_jsonl"), py::arg("object"), py::arg("cap") = 12,
      "exhaustive linearizability check over a small trace's history");

  m.def("objects", [] { return object_type_names(); },
        "names of the available replicated object types");
}
