"""Solution and branch file formats.

Solutions are stored as versioned JSON with hex-float encoded numbers
(float.hex round-trips every finite double bit-for-bit), so a written
solution re-reads to exactly the state that produced it and all
recomputed diagnostics match bitwise.  Branch tables are plain CSV with a
fixed column order; per-point diagnostics go to NDJSON, one record per
accepted branch point.  All writes are atomic (write to a temp file in
the same directory, then rename).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

from .continuation import Branch
from .strip_harmonics import ModeBasis, SurfaceTrace
from .wave_operator import Parameters, ReducedState

__all__ = [
    "SOLUTION_SCHEMA",
    "BRANCH_CSV_COLUMNS",
    "save_solution",
    "load_solution",
    "write_branch_csv",
    "write_diagnostics_ndjson",
    "atomic_write_text",
]

SOLUTION_SCHEMA = "solwave/solution/1"

BRANCH_CSV_COLUMNS = [
    "step", "s", "alpha", "F", "crest_w1", "m1", "m2", "m3",
    "lopatinskii", "flow_force", "newton_iters", "nodal", "overhang",
]


def atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _hex(x: float) -> str:
    return float(x).hex()


def _unhex(s) -> float:
    if isinstance(s, str):
        return float.fromhex(s)
    return float(s)  # tolerate plain numbers in hand-written files


def save_solution(path: str, state: ReducedState) -> None:
    doc = {
        "schema": SOLUTION_SCHEMA,
        "gamma": _hex(state.params.gamma),
        "alpha": _hex(state.params.alpha),
        "basis": {"L": _hex(state.basis.L), "N": int(state.basis.N)},
        "w1_coeffs": [_hex(c) for c in state.w1.coeffs],
    }
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def load_solution(path: str) -> ReducedState:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != SOLUTION_SCHEMA:
        raise ValueError(f"unsupported solution schema: {doc.get('schema')!r}")
    basis = ModeBasis(_unhex(doc["basis"]["L"]), int(doc["basis"]["N"]))
    coeffs = np.array([_unhex(c) for c in doc["w1_coeffs"]])
    params = Parameters(_unhex(doc["gamma"]), _unhex(doc["alpha"]))
    return ReducedState(SurfaceTrace(coeffs), params, basis)


def _branch_rows(branch: Branch):
    for i, p in enumerate(branch.points):
        m = p.diagnostics.monitor
        yield {
            "step": i,
            "s": repr(float(p.s)),
            "alpha": repr(float(p.alpha)),
            "F": repr(float(p.state.params.froude)),
            "crest_w1": repr(float(p.state.crest_value())),
            "m1": repr(float(m.m1)),
            "m2": repr(float(m.m2)),
            "m3": repr(float(m.m3)),
            "lopatinskii": repr(float(p.diagnostics.lopatinskii)),
            "flow_force": repr(float(p.diagnostics.flow_force_values[0])),
            "newton_iters": p.newton_iters,
            "nodal": int(p.diagnostics.nodal),
            "overhang": int(p.diagnostics.overhang),
        }


def write_branch_csv(path: str, branch: Branch) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BRANCH_CSV_COLUMNS)
    writer.writeheader()
    for row in _branch_rows(branch):
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def write_diagnostics_ndjson(path: str, branch: Branch) -> None:
    lines = []
    for i, p in enumerate(branch.points):
        rec = {"step": i, "s": p.s, "alpha": p.alpha,
               "residual_norm": p.residual_norm}
        rec.update(p.diagnostics.to_json_dict())
        lines.append(json.dumps(rec))
    atomic_write_text(path, "\n".join(lines) + "\n")
