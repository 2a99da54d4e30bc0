"""Serialization: profiles to CSV, reports to JSON, rasters to PGM/PPM.

All outputs are deterministic: keys are sorted, floats use repr round-trip
formatting, line endings are LF, and every file embeds the resolved config
and the tool version.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float):
        if obj != obj:
            return {"nan": True}
        if obj in (float("inf"), float("-inf")):
            return {"inf": "+" if obj > 0 else "-"}
        return obj
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, payload: dict, config: dict) -> None:
    """Write a report with embedded config and version; stable key order."""
    doc = {
        "tool": "tractlab",
        "version": __version__,
        "config": _jsonable(config),
        "result": _jsonable(payload),
    }
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")


def write_profile_csv(path, profile, config: dict | None = None) -> None:
    """Two-column CSV (r, value); '.' decimal separator, LF endings."""
    lines = ["r,value"]
    for r, v in zip(profile.radii, profile.values):
        lines.append(f"{float(r)!r},{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_orbit_csv(path, record) -> None:
    """Orbit dump: n, Re z, Im z, Re F, Im F plus exit/escape flags."""
    lines = ["n,re_z,im_z,re_F,im_F,exited,escape_certified"]
    exit_index = record.exit_index
    for n, xr, xi, fr, fi in record.to_rows():
        exited = int(exit_index is not None and n >= exit_index)
        lines.append(f"{n},{xr!r},{xi!r},{fr!r},{fi!r},{exited},{int(record.escape_flag)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_pgm(path, report) -> None:
    """P5 raster of first-failure indices.

    Byte 0 marks never-failed cells; failures at level k map to min(k+1, 255)
    so level 0 stays distinguishable from the sentinel.
    """
    exit_idx = report.cell_exit
    img = np.where(
        exit_idx < 0, 0, np.minimum(exit_idx.astype(np.int32) + 1, 255)
    ).astype(np.uint8)
    h, w = img.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())


_PALETTE = np.array(
    [[40, 40, 40]] + [[int(255 * (k / 255)), int(96 + 120 * ((255 - k) / 255)), 160] for k in range(255)],
    dtype=np.uint8,
)


def write_ppm(path, report) -> None:
    """P6 raster: sentinel cells dark, failure index over a fixed palette."""
    exit_idx = report.cell_exit
    img = np.where(exit_idx < 0, 0, np.minimum(exit_idx.astype(np.int32) + 1, 255))
    rgb = _PALETTE[img]
    h, w = img.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + rgb.tobytes())
