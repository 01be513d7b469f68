"""Simulator for lease-based replicated objects with local reads.

Thin convenience layer over the compiled ``_core`` module: scenarios may be
passed as dicts, JSON text, or file paths, and traces travel as JSONL text
compatible with the ``leasesim`` CLI.
"""

from pkgutil import extend_path

__path__ = extend_path(__path__, __name__)  # _core may sit in a build tree

import json
import os

from . import _core

ConfigError = _core.ConfigError

__all__ = [
    "ConfigError",
    "blocking",
    "bounds",
    "brute_force_linearizable",
    "check",
    "load_scenario",
    "objects",
    "parse_trace",
    "run",
]


def _scenario_text(scenario):
    """Accept a dict, JSON text, or a path to a scenario file."""
    if isinstance(scenario, dict):
        return json.dumps(scenario)
    if isinstance(scenario, os.PathLike) or (
        isinstance(scenario, str) and not scenario.lstrip().startswith("{")
    ):
        with open(scenario, "r", encoding="utf-8") as f:
            return f.read()
    return scenario


def load_scenario(path):
    """Read a scenario file into a dict."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def run(scenario, seed=None):
    """Run a scenario and return the trace as JSONL text."""
    return _core.run(_scenario_text(scenario), -1 if seed is None else seed)


def check(trace_jsonl, scenario):
    """All audits over a trace; returns a list of (check, detail), empty when clean."""
    return _core.check(trace_jsonl, _scenario_text(scenario))


def blocking(trace_jsonl, scenario):
    """Measured blocking maxima per period class (stable / nice / other)."""
    return _core.blocking(trace_jsonl, _scenario_text(scenario))


def bounds(scenario):
    """Closed-form worst-case blocking for the scenario's parameters."""
    return _core.bounds(_scenario_text(scenario))


def brute_force_linearizable(trace_jsonl, object_name, cap=12):
    """Exhaustively check a small trace's history for linearizability."""
    return _core.brute_force_linearizable(trace_jsonl, object_name, cap)


def objects():
    """Names of the available replicated object types."""
    return _core.objects()


def parse_trace(trace_jsonl):
    """Decode JSONL trace text into a list of event dicts."""
    return [json.loads(line) for line in trace_jsonl.splitlines() if line]
