"""CSV export with a provenance comment line.

Layout::

    # config-hash=<hex> seed=<n> method=<tag>
    col_a,col_b,...
    1.0000000000000000,...

Floats are written with 17 significant digits so values round-trip exactly.
"""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path

import numpy as np

ENV_OUT = "DRIFTMIMO_OUT"


def default_out_dir() -> Path:
    return Path(os.environ.get(ENV_OUT, "."))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: str | Path, columns: list[str], rows, config_hash: str, seed: int,
              method: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config-hash={config_hash} seed={seed} method={method}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
            w.writerow([_fmt(v) for v in row])
    return path


def _num(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        return math.nan


def read_csv(path: str | Path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Read back a CSV written by :func:`write_csv`.

    Label columns (such as ``reference``) come back as NaN in ``data``.
    """
    with open(path) as fh:
        first = fh.readline().lstrip("#").split()
        meta = dict(item.split("=", 1) for item in first)
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[_num(x) for x in row] for row in reader], dtype=float)
    return meta, header, data.reshape(-1, len(header))
