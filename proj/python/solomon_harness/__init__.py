# Copyright 2026 The solomon-harness Authors
# SPDX-License-Identifier: Apache-2.0
"""Layout generation benchmark harness: GDSII codec, evaluator and runner."""

import json
import os
from pathlib import Path

from . import _core
from ._core import (
    BenchError,
    GdsError,
    GeometryError,
    circumradius,
    decode_real64,
    encode_real64,
    extract_code,
    gds_round_trip,
    regular_polygon,
    sanitize,
    summary_csv,
)

__all__ = [
    "BenchError",
    "GdsError",
    "GeometryError",
    "circumradius",
    "decode_real64",
    "default_tasks_dir",
    "encode_real64",
    "evaluate",
    "extract_code",
    "gds_round_trip",
    "gds_summary",
    "load_tasks",
    "regular_polygon",
    "run_cli",
    "sanitize",
    "summary_csv",
]

CATEGORIES = ("correct", "scaling_error", "partially_correct", "shape_error", "runtime_error")


def default_tasks_dir() -> Path:
    """Benchmark shipped with the package, or the source tree in a development build."""
    env = os.environ.get("SOLOMON_TASKS")
    if env:
        return Path(env)
    packaged = Path(__file__).parent / "benchmark"
    if (packaged / "manifest.json").is_file():
        return packaged
    return Path(__file__).resolve().parents[2] / "benchmark"


def load_tasks(tasks_dir=None):
    return json.loads(_core.tasks_json(str(tasks_dir or default_tasks_dir())))


def evaluate(gds_file, task_id, tasks_dir=None):
    """Verdict dict for one GDSII file; unreadable files are runtime errors."""
    return json.loads(_core.evaluate_json(str(gds_file), task_id, str(tasks_dir or default_tasks_dir())))


def gds_summary(data: bytes):
    return json.loads(_core.gds_summary_json(data))


def run_cli(args, input=""):
    """Runs the command-line tool in process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args], input)
