"""On-disk artifacts: field CSVs and JSON reports, written atomically."""
from __future__ import annotations

import io
import json
import math
import os
from pathlib import Path

import numpy as np

from .analysis import FieldProfile

__all__ = ["CSV_HEADER", "atomic_write_text", "fields_csv", "write_fields_csv", "write_report",
           "read_fields_csv"]

CSV_HEADER = "x,psi_re,psi_im,xi_re,xi_im,Z_re,Z_im,valid_Z"


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    tmp.replace(path)
    return path


def fields_csv(profile: FieldProfile) -> str:
    cols = np.column_stack([
        profile.x, profile.psi.real, profile.psi.imag, profile.xi.real, profile.xi.imag,
        profile.Z.real, profile.Z.imag,
    ])
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row, ok in zip(cols, profile.valid_Z):
        buf.write(",".join("%.17g" % v for v in row) + f",{int(ok)}\n")
    return buf.getvalue()


def write_fields_csv(path, profile: FieldProfile) -> Path:
    return atomic_write_text(path, fields_csv(profile))


def read_fields_csv(path) -> FieldProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FieldProfile(data[:, 0], data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4],
                        data[:, 5] + 1j * data[:, 6], data[:, 7].astype(bool))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_report(path, report: dict) -> Path:
    """JSON with sorted keys so that equal reports are equal files."""
    return atomic_write_text(path, json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
