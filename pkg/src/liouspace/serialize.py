"""CSV (+ JSON sidecar) serialization for densities and dense operators.

Layout: one CSV row per bra-axis index; complex matrices interleave
re/im columns.  The sidecar records grid bounds, sizes, hbar and mass so
a file round-trips into an identical object.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .superspace import PhaseDensity, PhaseGrid, SuperDensity, SuperGrid

_FMT = "%.17g"


def _write_rows(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([_FMT % v for v in row])


def _interleave(mat: np.ndarray):
    out = np.empty((mat.shape[0], 2 * mat.shape[1]))
    out[:, 0::2] = mat.real
    out[:, 1::2] = mat.imag
    return out


def save_super_density(
    base_path, sd: SuperDensity, hbar: float = 1.0, mass: float = 1.0
) -> tuple[Path, Path]:
    base = Path(base_path)
    csv_path = base.with_suffix(".csv")
    meta_path = base.with_suffix(".json")
    _write_rows(csv_path, _interleave(sd.values))
    meta = {
        "kind": "super_density",
        "q_min": sd.grid.q_min,
        "q_max": sd.grid.q_max,
        "n": sd.grid.n,
        "hbar": hbar,
        "mass": mass,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


def load_super_density(base_path) -> tuple[SuperDensity, dict]:
    base = Path(base_path)
    meta = json.loads(base.with_suffix(".json").read_text())
    raw = np.loadtxt(base.with_suffix(".csv"), delimiter=",", ndmin=2)
    values = raw[:, 0::2] + 1j * raw[:, 1::2]
    grid = SuperGrid(meta["q_min"], meta["q_max"], meta["n"])
    return SuperDensity(grid, values), meta


def save_phase_density(
    base_path, pd: PhaseDensity, hbar: float = 1.0, mass: float = 1.0
) -> tuple[Path, Path]:
    base = Path(base_path)
    csv_path = base.with_suffix(".csv")
    meta_path = base.with_suffix(".json")
    _write_rows(csv_path, pd.values)
    g = pd.grid
    meta = {
        "kind": "phase_density",
        "x_min": g.x_min,
        "x_max": g.x_max,
        "p_min": g.p_min,
        "p_max": g.p_max,
        "n_x": g.n_x,
        "n_p": g.n_p,
        "hbar": hbar,
        "mass": mass,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


def load_phase_density(base_path) -> tuple[PhaseDensity, dict]:
    base = Path(base_path)
    meta = json.loads(base.with_suffix(".json").read_text())
    values = np.loadtxt(base.with_suffix(".csv"), delimiter=",", ndmin=2)
    grid = PhaseGrid(
        meta["x_min"], meta["x_max"], meta["p_min"], meta["p_max"],
        meta["n_x"], meta["n_p"],
    )
    return PhaseDensity(grid, values), meta


def save_complex_matrix(path, mat: np.ndarray) -> Path:
    """Dense operator export (re/im interleaved), e.g. Liouvillians or E."""
    path = Path(path)
    _write_rows(path, _interleave(np.asarray(mat, dtype=complex)))
    return path


def save_real_matrix(path, mat: np.ndarray) -> Path:
    path = Path(path)
    _write_rows(path, np.asarray(mat, dtype=float))
    return path
