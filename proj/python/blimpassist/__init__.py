"""Blimp simulator with hybrid assistive control.

Scenarios are plain dicts mirroring the scenario JSON format; omitted keys
take their defaults.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping

import numpy as np

from . import _core
from ._core import (
    Error,
    allocate,
    balanced_pitch_for_thrust,
    bang_bang_step,
    closed_form_yaw,
    thrust_for_balanced_pitch,
    wrench_of,
)

__all__ = [
    "COLUMNS",
    "Error",
    "Trace",
    "allocate",
    "balanced_pitch_for_thrust",
    "bang_bang_step",
    "closed_form_yaw",
    "compare",
    "default_scenario",
    "load_scenario",
    "metrics",
    "normalize_message",
    "run",
    "run_csv",
    "scenario",
    "thrust_for_balanced_pitch",
    "wrench_of",
]

#: Numeric trace columns, in order; the mode column is kept separately.
COLUMNS: tuple[str, ...] = tuple(_core.TRACE_HEADER.split(",")[:-1])


class Trace:
    """Result of a run: numeric columns plus the supervisor mode per tick."""

    def __init__(self, data: np.ndarray, modes: list[str]):
        self.data = data
        self.modes = modes

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, column: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(column)]

    def __repr__(self) -> str:
        return f"Trace({len(self)} records)"


def _dump(sc: Mapping[str, Any] | str) -> str:
    return sc if isinstance(sc, str) else json.dumps(sc)


def default_scenario() -> dict:
    return json.loads(_core.default_scenario())


def scenario(sc: Mapping[str, Any] | str = "{}", base_dir: str | os.PathLike = "") -> dict:
    """Validated scenario with every default filled in."""
    return json.loads(_core.normalize_scenario(_dump(sc), os.fspath(base_dir)))


def load_scenario(path: str | os.PathLike) -> dict:
    return json.loads(_core.load_scenario(os.fspath(path)))


def run(sc: Mapping[str, Any] | str, base_dir: str | os.PathLike = "", **overrides: Any) -> Trace:
    """Runs a scenario headless. Keyword overrides replace top-level keys,
    e.g. ``run(sc, assist="off", seed=3)``."""
    text = _dump(sc)
    if overrides:
        merged = json.loads(text)
        merged.update(overrides)
        text = json.dumps(merged)
    data, modes = _core.run(text, os.fspath(base_dir))
    return Trace(data, modes)


def run_csv(sc: Mapping[str, Any] | str, base_dir: str | os.PathLike = "") -> str:
    return _core.run_csv(_dump(sc), os.fspath(base_dir))


def metrics(trace_csv: str, sc: Mapping[str, Any] | str = "") -> dict:
    return json.loads(_core.metrics(trace_csv, _dump(sc) if sc else ""))


def compare(sc: Mapping[str, Any] | str, base_dir: str | os.PathLike = "") -> dict:
    """Assist on versus off on the same scenario."""
    return json.loads(_core.compare(_dump(sc), os.fspath(base_dir)))


def normalize_message(frame: str | Mapping[str, Any]) -> dict:
    """Parses a wire frame as the live service would; raises Error if invalid."""
    return json.loads(_core.normalize_message(_dump(frame)))
