"""CSV export with full-precision decimals and a commented provenance header.

Column order is part of the public schema and is frozen:

trajectory file   t_s, agent, xI_1..xI_n, xP_1..xP_n, theta, V, phi_norm
edges companion   t_s, agent_i, agent_j, theta_error
field file        x, y, theta, u_x, u_y[, u_z], theta_dot, field_norm, singular

Agent ids are 1-based in files.  Floats are written with repr() so a
round-trip through the file is bit-exact.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .gridsample import FieldSampleResult
from .sim import TrajectoryRecord

__all__ = ["write_trajectory_csv", "write_field_csv"]


def _fmt(value) -> str:
    return repr(float(value))


def _write_header_comments(handle, header: dict) -> None:
    for key, value in header.items():
        handle.write(f"# {key}={value}\n")


def write_trajectory_csv(record: TrajectoryRecord, path) -> list[Path]:
    """Write a run record to `path`; returns the files written.

    When the record carries edge errors a companion file named
    `<stem>_edges.csv` is written next to the main file.
    """
    if record.t.size == 0:
        raise ValueError("record holds no samples; nothing to write")
    path = Path(path)
    samples, agents, n = record.x_inertial.shape

    written = [path]
    with open(path, "w", newline="") as handle:
        _write_header_comments(handle, record.header)
        writer = csv.writer(handle)
        cols = (
            ["t_s", "agent"]
            + [f"xI_{k + 1}" for k in range(n)]
            + [f"xP_{k + 1}" for k in range(n)]
            + ["theta", "V", "phi_norm"]
        )
        writer.writerow(cols)
        for s in range(samples):
            for i in range(agents):
                writer.writerow(
                    [_fmt(record.t[s]), i + 1]
                    + [_fmt(v) for v in record.x_inertial[s, i]]
                    + [_fmt(v) for v in record.x_path_frame[s, i]]
                    + [_fmt(record.theta[s, i]), _fmt(record.lyapunov[s, i]), _fmt(record.error_norm[s, i])]
                )

    if record.edges:
        edges_path = path.with_name(path.stem + "_edges" + path.suffix)
        with open(edges_path, "w", newline="") as handle:
            _write_header_comments(handle, record.header)
            writer = csv.writer(handle)
            writer.writerow(["t_s", "agent_i", "agent_j", "theta_error"])
            for s in range(samples):
                for e, (i, j) in enumerate(record.edges):
                    writer.writerow([_fmt(record.t[s]), i + 1, j + 1, _fmt(record.edge_errors[s, e])])
        written.append(edges_path)
    return written


def write_field_csv(result: FieldSampleResult, path) -> Path:
    """Write a grid-sampling result to `path`."""
    if result.rows.shape[0] == 0:
        raise ValueError("field sample holds no rows; nothing to write")
    path = Path(path)
    with open(path, "w", newline="") as handle:
        _write_header_comments(
            handle,
            {"min_field_norm": result.min_norm, "num_singular": result.num_singular},
        )
        writer = csv.writer(handle)
        writer.writerow(result.columns)
        flag_col = len(result.columns) - 1
        for row in result.rows:
            out = [_fmt(v) for v in row[:flag_col]]
            out.append(str(int(row[flag_col])))
            writer.writerow(out)
    return path
