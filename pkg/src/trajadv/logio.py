"""CSV log files: one row per control step, 17 significant digits."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import TrajAdvError
from .scenario import StandUpPhase
from .simulation import LogRow

VECTOR_FIELDS = ("x", "x_d", "xdot", "xdot_d", "f_hands", "f_feet")


class OutputError(TrajAdvError, OSError):
    """Writing or reading an output file failed."""


def header(n_tau: int) -> list:
    cols = ["t", "phase", "psi", "psi_dot"]
    for name in VECTOR_FIELDS:
        cols += [f"{name}_{i}" for i in range(6)]
    cols.append("alpha")
    cols += [f"tau_{i}" for i in range(n_tau)]
    return cols


def _fmt(v) -> str:
    return format(float(v), ".17g")


def row_values(row: LogRow) -> list:
    out = [_fmt(row.t), row.phase.label, _fmt(row.psi), _fmt(row.psi_dot)]
    for name in VECTOR_FIELDS:
        out += [_fmt(v) for v in getattr(row, name)]
    out.append(_fmt(row.alpha))
    out += [_fmt(v) for v in row.tau]
    return out


def write_csv(rows, path, n_tau: int | None = None) -> Path:
    """Write ``rows`` to ``path``; an empty log yields the header only."""
    path = Path(path)
    n = len(rows[0].tau) if rows else (n_tau or 0)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header(n))
            for r in rows:
                w.writerow(row_values(r))
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> list:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            cols = next(reader)
            data = list(reader)
    except (OSError, StopIteration) as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    n_tau = sum(c.startswith("tau_") for c in cols)
    if cols != header(n_tau):
        raise OutputError(f"{path}: unexpected header")
    rows = []
    for rec in data:
        vals = [float(v) for v in rec[2:]]
        vecs = {name: np.array(vals[2 + 6 * i : 8 + 6 * i]) for i, name in enumerate(VECTOR_FIELDS)}
        rows.append(
            LogRow(
                t=float(rec[0]),
                phase=StandUpPhase.from_label(rec[1]),
                psi=vals[0],
                psi_dot=vals[1],
                alpha=vals[2 + 6 * len(VECTOR_FIELDS)],
                tau=np.array(vals[3 + 6 * len(VECTOR_FIELDS) :]),
                **vecs,
            )
        )
    return rows
