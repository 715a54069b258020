"""Text formats: matrix snapshots and objective files.

Matrix text format: first line holds the integer n, followed by n lines
of n whitespace-separated decimals (written with 17 significant digits).

Objective file: key=value header lines, then the P matrices of the
inverse-trace terms and the Q matrices of the trace terms, concatenated
in matrix text format.  Keys: n, p, q, g (quadlogdet | logdetcomposite),
k (quadlogdet), a, b1, b2, c (logdetcomposite), s (optional finite-sum
size).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .objective import LogDetComposite, ObjectiveSpec, QuadLogDet


def write_matrix_text(fh, m: np.ndarray) -> None:
    n = m.shape[0]
    fh.write(f"{n}\n")
    for row in np.asarray(m, dtype=np.float64):
        fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix_text(fh) -> np.ndarray:
    line = fh.readline()
    if not line:
        raise ValueError("expected a matrix dimension line")
    n = int(line.strip())
    rows = []
    for _ in range(n):
        parts = fh.readline().split()
        if len(parts) != n:
            raise ValueError(f"expected {n} values per matrix row")
        rows.append([float(v) for v in parts])
    return np.array(rows)


def save_matrix(path, m: np.ndarray) -> None:
    with open(path, "w") as fh:
        write_matrix_text(fh, m)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return read_matrix_text(fh)


def write_objective_file(fh, spec: ObjectiveSpec) -> None:
    fh.write(f"n={spec.n}\n")
    fh.write(f"p={spec.p}\n")
    fh.write(f"q={spec.q}\n")
    if isinstance(spec.g, QuadLogDet):
        fh.write("g=quadlogdet\n")
        fh.write(f"k={spec.g.k:.17g}\n")
    elif isinstance(spec.g, LogDetComposite):
        fh.write("g=logdetcomposite\n")
        fh.write(f"a={spec.g.a:.17g}\n")
        fh.write(f"b1={spec.g.b1:.17g}\n")
        fh.write(f"b2={spec.g.b2:.17g}\n")
        fh.write(f"c={spec.g.c:.17g}\n")
    else:
        raise ConfigError(f"cannot serialize outer function {spec.g!r}")
    if spec.s is not None:
        fh.write(f"s={spec.s}\n")
    for m in spec.c_list + spec.d_list:
        write_matrix_text(fh, m)


def read_objective_file(fh) -> ObjectiveSpec:
    header = {}
    pos = fh.tell()
    while True:
        line = fh.readline()
        if not line:
            break
        stripped = line.strip()
        if not stripped:
            pos = fh.tell()
            continue
        if "=" not in stripped:
            fh.seek(pos)
            break
        key, _, val = stripped.partition("=")
        header[key.strip()] = val.strip()
        pos = fh.tell()
    try:
        n = int(header["n"])
        p = int(header.get("p", "0"))
        q = int(header.get("q", "0"))
        g_name = header.get("g", "quadlogdet")
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad objective header: {exc}") from exc
    if g_name == "quadlogdet":
        g = QuadLogDet(float(header.get("k", "0")))
    elif g_name == "logdetcomposite":
        try:
            g = LogDetComposite(
                float(header["a"]), float(header["b1"]),
                float(header["b2"]), float(header["c"]),
            )
        except KeyError as exc:
            raise ConfigError(f"logdetcomposite needs a, b1, b2, c: missing {exc}") from exc
    else:
        raise ConfigError(f"unknown outer function {g_name!r}")
    c_list = [read_matrix_text(fh) for _ in range(p)]
    d_list = [read_matrix_text(fh) for _ in range(q)]
    s = int(header["s"]) if "s" in header else None
    return ObjectiveSpec(n, c_list, d_list, g, s)


def save_objective(path, spec: ObjectiveSpec) -> None:
    with open(path, "w") as fh:
        write_objective_file(fh, spec)


def load_objective(path) -> ObjectiveSpec:
    with open(path) as fh:
        return read_objective_file(fh)
