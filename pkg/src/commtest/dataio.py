"""Readers and writers for weight matrices, models, reports and curves.

Formats
-------
dense CSV    n rows of n comma-separated numbers, no header
edge list    one ``i j [w]`` line per edge, 0-based, ``#`` comments allowed;
             missing ``w`` means 1, unlisted pairs are 0
report JSON  see :func:`report_document`
"""
import json
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    DataWarning,
    DuplicateEdge,
    IndexOutOfRange,
    ParseError,
    ShapeError,
    SymmetryError,
)
from .inference import TestConfig, TestReport

SCHEMA_VERSION = 1
BUNDLED = {"karate": "karate.edgelist"}


def bundled_path(name):
    """Filesystem path of a bundled benchmark edge list (``"karate"``)."""
    try:
        fname = BUNDLED[name]
    except KeyError:
        raise KeyError(f"unknown bundled graph {name!r}; available: {sorted(BUNDLED)}") from None
    return Path(str(resources.files("commtest") / "data" / fname))


def _finish(W, sym_rtol=1e-10):
    scale = np.max(np.abs(W)) if W.size else 0.0
    asym = np.max(np.abs(W - W.T)) if W.size else 0.0
    if asym > sym_rtol * scale:
        raise SymmetryError(f"matrix asymmetry {asym:.3g} exceeds tolerance")
    if asym > 0:
        warnings.warn("tiny asymmetries removed by averaging W and W.T", DataWarning, stacklevel=3)
        W = (W + W.T) / 2.0
    if np.any(np.diag(W) != 0):
        warnings.warn("nonzero diagonal set to 0", DataWarning, stacklevel=3)
        W = W.copy()
        np.fill_diagonal(W, 0.0)
    return W


def load_dense(path):
    """Read a square comma-separated matrix.

    Raises
    ------
    ParseError, ShapeError, SymmetryError
    """
    try:
        W = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if W.shape[0] != W.shape[1]:
        raise ShapeError(f"{path}: matrix is {W.shape[0]}x{W.shape[1]}, not square")
    if W.shape[0] < 2:
        raise ShapeError(f"{path}: need at least 2 nodes")
    if not np.all(np.isfinite(W)):
        raise ParseError(f"{path}: non-finite entries")
    return _finish(W)


def save_dense(W, path):
    """Write ``W`` with 17 significant digits so :func:`load_dense` reads it back exactly."""
    np.savetxt(path, np.asarray(W, dtype=float), delimiter=",", fmt="%.17g")


def load_edgelist(path, n=None):
    """Read a whitespace-separated ``i j [w]`` edge list into a dense matrix.

    ``n`` defaults to one more than the largest index seen.
    """
    edges = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"{path}:{lineno}: expected 'i j [w]', got {raw.strip()!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if i == j:
                raise ParseError(f"{path}:{lineno}: self-loop {i} {j}")
            if i < 0 or j < 0:
                raise IndexOutOfRange(f"{path}:{lineno}: negative node index")
            if not np.isfinite(w):
                raise ParseError(f"{path}:{lineno}: non-finite weight")
            key = (min(i, j), max(i, j))
            if key in edges:
                raise DuplicateEdge(f"{path}:{lineno}: edge {key} listed twice")
            edges[key] = w
    top = max((j for _, j in edges), default=-1) + 1
    n = top if n is None else int(n)
    if top > n:
        raise IndexOutOfRange(f"{path}: node index {top - 1} out of range for n={n}")
    if n < 2:
        raise ShapeError(f"{path}: need at least 2 nodes")
    W = np.zeros((n, n))
    if edges:
        idx = np.array(list(edges), dtype=int)
        W[idx[:, 0], idx[:, 1]] = list(edges.values())
    return W + W.T


def load_matrix(path, fmt="dense", n=None):
    """Dispatch on ``fmt``; ``path`` may also be ``builtin:<name>`` for a bundled graph."""
    path = str(path)
    if path.startswith("builtin:"):
        return load_edgelist(bundled_path(path.split(":", 1)[1]), n=n)
    if fmt == "dense":
        return load_dense(path)
    if fmt == "edgelist":
        return load_edgelist(path, n=n)
    raise ValueError(f"unknown format {fmt!r}")


def report_document(report, cfg, input_path=None, input_format=None, elapsed=None):
    """Assemble the JSON-serializable report dictionary."""
    return {
        "schema_version": SCHEMA_VERSION,
        "input": {"path": None if input_path is None else str(input_path),
                  "format": input_format, "n": report.n},
        "config": {"alpha": cfg.alpha, "t0": cfg.t0, "critical_method": cfg.critical_method,
                   "permutations": cfg.permutations, "seed": cfg.seed},
        "report": report.to_dict(),
        "timing": {"seconds": elapsed},
        "warnings": list(report.warnings),
    }


def write_report(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_report(path):
    """Load a report document; returns ``(doc, TestReport, TestConfig)``."""
    with open(path) as fh:
        doc = json.load(fh)
    if "schema_version" not in doc:
        raise ParseError(f"{path}: missing schema_version")
    return doc, TestReport.from_dict(doc["report"]), TestConfig(**doc["config"])


def write_power_curve(curve, path):
    cols = [curve.levels, curve.rejection_rate,
            curve.mean_extremes["T_max"], curve.mean_extremes["T_min"],
            curve.mean_extremes["Te_max"], curve.mean_extremes["Te_min"]]
    header = "level,rejection_rate,mean_lambda_max_T,mean_lambda_min_T,mean_lambda_max_Te,mean_lambda_min_Te"
    np.savetxt(path, np.column_stack(cols), delimiter=",", fmt="%.17g", header=header, comments="")
