"""File formats for observations, latent paths, curves, and reports.

Floats serialize with 17 significant digits so IEEE doubles round-trip
bit-exactly through text.  Every writer is atomic: content is staged in a
temporary file next to the target and moved into place with a rename, so a
crash mid-write never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import StructuralError
from .sampling import GridSpec, build_grid

__all__ = [
    "atomic_write_text",
    "format_float",
    "grid_from_dict",
    "grid_to_dict",
    "load_json",
    "read_latent_csv",
    "read_observation_csv",
    "write_curve_csv",
    "write_estimate_json",
    "write_latent_csv",
    "write_observation_csv",
    "write_report_csv",
    "write_report_manifest",
    "write_report_summary_csv",
]


def format_float(value) -> str:
    """Shortest text form that recovers the exact double: 17 significant digits."""
    return format(float(value), ".17g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def _render_csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _read_csv_rows(path, header) -> list:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as handle:
            rows = [row for row in csv.reader(handle) if row]
    except OSError as exc:
        raise StructuralError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise StructuralError(f"{path} is empty, expected header {','.join(header)}")
    found = [cell.strip() for cell in rows[0]]
    if found != list(header):
        raise StructuralError(
            f"{path} has header {','.join(found)}, expected {','.join(header)}"
        )
    return rows[1:]


def _parse_float(cell, path, line) -> float:
    try:
        return float(cell)
    except ValueError as exc:
        raise StructuralError(f"{path} line {line}: {cell!r} is not a number") from exc


def write_observation_csv(path, times, values) -> Path:
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    rows = [(format_float(t), format_float(v)) for t, v in zip(times, values)]
    return atomic_write_text(path, _render_csv(("time", "value"), rows))


def read_observation_csv(path):
    rows = _read_csv_rows(path, ("time", "value"))
    times, values = [], []
    for offset, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise StructuralError(f"{path} line {offset}: expected 2 columns, got {len(row)}")
        times.append(_parse_float(row[0], path, offset))
        values.append(_parse_float(row[1], path, offset))
    return np.array(times), np.array(values)


def write_latent_csv(path, times1, values1, times2, values2) -> Path:
    rows = [("1", format_float(t), format_float(v)) for t, v in zip(times1, values1)]
    rows += [("2", format_float(t), format_float(v)) for t, v in zip(times2, values2)]
    return atomic_write_text(path, _render_csv(("component", "time", "value"), rows))


def read_latent_csv(path):
    rows = _read_csv_rows(path, ("component", "time", "value"))
    parts = {"1": ([], []), "2": ([], [])}
    for offset, row in enumerate(rows, start=2):
        if len(row) != 3:
            raise StructuralError(f"{path} line {offset}: expected 3 columns, got {len(row)}")
        label = row[0].strip()
        if label not in parts:
            raise StructuralError(f"{path} line {offset}: component must be 1 or 2, got {label!r}")
        parts[label][0].append(_parse_float(row[1], path, offset))
        parts[label][1].append(_parse_float(row[2], path, offset))
    for label, (times, _) in parts.items():
        if not times:
            raise StructuralError(f"{path} holds no rows for component {label}")
    return (
        np.array(parts["1"][0]),
        np.array(parts["1"][1]),
        np.array(parts["2"][0]),
        np.array(parts["2"][1]),
    )


def write_curve_csv(path, curve) -> Path:
    rows = [
        (format_float(g), format_float(u)) for g, u in zip(curve.grid_points, curve.values)
    ]
    return atomic_write_text(path, _render_csv(("theta", "contrast"), rows))


def write_estimate_json(path, result) -> Path:
    payload = {
        "theta_hat": result.theta_hat,
        "contrast_at_max": result.contrast_at_max,
        "argmax_count": result.argmax_count,
        "grid_size": int(result.curve.grid_points.size),
        "T": result.curve.T,
        "delta": result.curve.delta,
    }
    return atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def grid_to_dict(grid: GridSpec) -> dict:
    return {
        "points": [float(p) for p in grid.points],
        "rho_n": float(grid.rho_n),
        "v_n": float(grid.v_n),
    }


def grid_from_dict(spec: dict, delta=None) -> GridSpec:
    """Build a GridSpec from a config mapping.

    Two shapes are accepted: explicit ``{"points", "rho_n", "v_n"}`` or a
    constructor form ``{"variant", "step"/"v_n"/"h1"/"h2"/"epsilon_exp"}``
    resolved against ``delta``.
    """
    if not isinstance(spec, dict):
        raise StructuralError("grid config must be a mapping")
    if "points" in spec:
        for key in ("rho_n", "v_n"):
            if key not in spec:
                raise StructuralError(f"explicit grid config needs {key}")
        return GridSpec(
            points=np.asarray(spec["points"], dtype=np.float64),
            rho_n=float(spec["rho_n"]),
            v_n=float(spec["v_n"]),
        )
    if delta is None:
        if "delta" not in spec:
            raise StructuralError("grid config needs delta when none is supplied")
        delta = spec["delta"]
    variant = spec.get("variant", "affine")
    return build_grid(
        variant,
        delta,
        step=spec.get("step"),
        v_n=spec.get("v_n"),
        h1=spec.get("h1"),
        h2=spec.get("h2"),
        epsilon_exp=spec.get("epsilon_exp", 0.0),
    )


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StructuralError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise StructuralError(f"{path} must hold a JSON object at top level")
    return data


def _config_dict(config) -> dict:
    return {
        "h1": float(config.h1),
        "h2": float(config.h2),
        "rhos": list(config.rhos),
        "intensities": list(config.intensities),
        "theta": config.theta,
        "delta": config.delta,
        "T": config.T,
        "grid": grid_to_dict(config.grid),
        "replications": config.replications,
        "base_seed": config.base_seed,
        "driver_m": config.driver_m,
    }


def write_report_csv(path, report) -> Path:
    """Long-form estimates: one row per (cell, replication)."""
    rows = []
    for cell in report.cells:
        for rep, value in enumerate(cell.estimates):
            rows.append((format_float(cell.rho), cell.intensity, rep, format_float(value)))
    return atomic_write_text(path, _render_csv(("rho", "n", "replication", "theta_hat"), rows))


def write_report_summary_csv(path, report) -> Path:
    header = (
        "rho",
        "n",
        "replications",
        "mean",
        "median",
        "stdev",
        "frac_within_step",
        "frac_within_2step",
    )
    rows = []
    for cell in report.cells:
        s = cell.summary
        rows.append(
            (
                format_float(cell.rho),
                cell.intensity,
                cell.estimates.size,
                format_float(s.mean),
                format_float(s.median),
                format_float(s.stdev),
                format_float(s.frac_within_step),
                format_float(s.frac_within_2step),
            )
        )
    return atomic_write_text(path, _render_csv(header, rows))


def write_report_manifest(path, report) -> Path:
    """Reproduction manifest: the full configuration plus seed derivation."""
    payload = {
        "config": _config_dict(report.config),
        "seed_convention": (
            "per replication, streams are SeedSequence(entropy=base_seed, "
            "spawn_key=(cell_index, replication, stream)) with stream 0 drawing "
            "component-1 observation times, 1 component-2 times, 2 the shared "
            "fractional driver; cells are ordered rhos-outer, intensities-inner"
        ),
        "wall_time_seconds": report.wall_time_seconds,
        "cells": [
            {
                "rho": cell.rho,
                "n": cell.intensity,
                "summary": {
                    "mean": cell.summary.mean,
                    "median": cell.summary.median,
                    "stdev": cell.summary.stdev,
                    "frac_within_step": cell.summary.frac_within_step,
                    "frac_within_2step": cell.summary.frac_within_2step,
                },
            }
            for cell in report.cells
        ],
    }
    return atomic_write_text(path, json.dumps(payload, indent=2) + "\n")
