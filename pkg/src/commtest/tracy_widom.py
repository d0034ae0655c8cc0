"""Tracy-Widom (beta = 1) distribution computed from the Painleve II equation.

The Hastings-McLeod solution ``q`` of ``q'' = x q + 2 q^3`` with
``q(x) ~ Ai(x)`` as ``x -> inf`` is integrated backward from ``x = 8`` with
an 8th-order Dormand-Prince scheme, carrying three running integrals alongside
``q``::

    I(x) = int_x^inf q^2,   J(x) = int_x^inf (y - x) q^2,   K(x) = int_x^inf q

so that ``F2 = exp(-J)`` and ``F1 = exp(-(J + K) / 2)``. Backward integration
is unstable (any admixture of Bi grows), so below ``x = -6`` the solution is
replaced by its left-tail asymptotic expansion
``q ~ sqrt(-x/2) (1 + 1/(8x^3) - 73/(128x^6) + ...)``; the two agree to
about 1e-6 at the switch point and F1 < 1e-8 there anyway.

The resulting table is checked against two reference quantiles
(0.95 -> 0.979, 0.9875 -> 1.889) and rejected if either is off.
"""
import functools
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import airy

from .errors import ConvergenceFailure, OutOfRange

X_RIGHT = 8.0
X_LEFT = -10.0
X_SWITCH = -6.0
GRID_STEP = 0.01

# (probability, quantile, tolerance) reference points for validation
ANCHORS = ((0.95, 0.979, 0.005), (0.9875, 1.889, 0.010))


@dataclass(frozen=True, eq=False)
class Tw1Table:
    """Tabulated F1 on an ascending grid with monotone cubic interpolation."""

    grid: np.ndarray
    cdf: np.ndarray
    tolerance: float = float("nan")
    step: float = GRID_STEP
    _interp: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        cdf = np.asarray(self.cdf, dtype=float)
        if grid.ndim != 1 or grid.shape != cdf.shape or grid.size < 4:
            raise ValueError("grid and cdf must be 1-D arrays of equal length >= 4")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly ascending")
        if np.any(np.diff(cdf) < 0) or cdf[0] < 0 or cdf[-1] > 1:
            raise ValueError("cdf must be nondecreasing within [0, 1]")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "cdf", cdf)
        object.__setattr__(self, "_interp", PchipInterpolator(grid, cdf, extrapolate=False))

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        y = self._interp(np.clip(x, self.grid[0], self.grid[-1]))
        y = np.where(x < self.grid[0], 0.0, np.where(x > self.grid[-1], 1.0, y))
        y = np.clip(y, 0.0, 1.0)
        return y if y.ndim else float(y)

    def quantile(self, p):
        p = float(p)
        if not 0.0 < p < 1.0:
            raise OutOfRange(f"p must lie in (0, 1), got {p}")
        lo_i = np.searchsorted(self.cdf, p, side="left")
        if lo_i == 0 or lo_i >= self.grid.size:
            raise OutOfRange(f"p={p} lies outside the tabulated range")
        lo, hi = self.grid[lo_i - 1], self.grid[lo_i]
        if self.cdf[lo_i] == p:
            return float(hi)
        return float(brentq(lambda x: self._interp(x) - p, lo, hi, xtol=1e-12))


def _q_asymptotic(x):
    x3 = x**3
    return np.sqrt(-x / 2.0) * (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3)
                                + 10657.0 / (1024.0 * x3**3))


def _painleve_rhs(x, y):
    q, dq, I, J, K = y
    return [dq, x * q + 2.0 * q**3, -q * q, -I, -q]


def _tail_rhs(x, y):
    I, J, K = y
    q = _q_asymptotic(x)
    return [-q * q, -I, -q]


def _solve_integrals(grid, tolerance):
    """Return J(x) + K(x) on ``grid`` (ascending)."""
    ai, aip, _, _ = airy(X_RIGHT)
    # beyond X_RIGHT, q equals Ai to well below double precision
    I0 = quad(lambda s: airy(s)[0] ** 2, X_RIGHT, np.inf, epsabs=0, epsrel=1e-12)[0]
    J0 = quad(lambda s: (s - X_RIGHT) * airy(s)[0] ** 2, X_RIGHT, np.inf, epsabs=0, epsrel=1e-12)[0]
    K0 = quad(lambda s: airy(s)[0], X_RIGHT, np.inf, epsabs=0, epsrel=1e-12)[0]

    head = solve_ivp(_painleve_rhs, (X_RIGHT, X_SWITCH), [ai, aip, I0, J0, K0],
                     method="DOP853", rtol=tolerance, atol=1e-30, dense_output=True)
    if head.status != 0:
        raise ConvergenceFailure(f"Painleve II integration failed: {head.message}")
    _, _, Is, Js, Ks = head.y[:, -1]
    tail = solve_ivp(_tail_rhs, (X_SWITCH, grid[0]), [Is, Js, Ks],
                     method="DOP853", rtol=tolerance, atol=1e-30, dense_output=True)
    if tail.status != 0:
        raise ConvergenceFailure(f"tail integration failed: {tail.message}")

    out = np.empty_like(grid)
    right = grid >= X_SWITCH
    Yr = head.sol(grid[right])
    out[right] = Yr[3] + Yr[4]
    Yl = tail.sol(grid[~right])
    out[~right] = Yl[1] + Yl[2]
    return out


def validate_table(table):
    """Raise :class:`ConvergenceFailure` unless ``table`` matches the reference quantiles."""
    if table.cdf[0] >= 1e-6 or table.cdf[-1] <= 1 - 1e-6:
        raise ConvergenceFailure("F1 table does not span (1e-6, 1 - 1e-6)")
    for p, expected, tol in ANCHORS:
        got = table.quantile(p)
        if abs(got - expected) > tol:
            raise ConvergenceFailure(
                f"F1 quantile at p={p} is {got:.4f}, expected {expected} +/- {tol}")
    return table


def build_tw1(tolerance=1e-9):
    """Solve Painleve II and tabulate F1 on ``[-10, 8]`` with step 0.01.

    Parameters
    ----------
    tolerance : float
        Relative tolerance of the ODE integrator, in ``[1e-12, 1e-6]``.

    Raises
    ------
    ConvergenceFailure
        If the table misses the reference quantiles.
    """
    if not 1e-12 <= tolerance <= 1e-6:
        raise OutOfRange("tolerance must lie in [1e-12, 1e-6]")
    npts = int(round((X_RIGHT - X_LEFT) / GRID_STEP)) + 1
    grid = np.linspace(X_LEFT, X_RIGHT, npts)
    F1 = np.exp(-0.5 * _solve_integrals(grid, tolerance))
    # rounding-level wiggles near F1 = 1
    F1 = np.minimum(np.maximum.accumulate(F1), 1.0)
    return validate_table(Tw1Table(grid, F1, tolerance=tolerance, step=GRID_STEP))


@functools.lru_cache(maxsize=None)
def default_table():
    """Process-wide F1 table built at the default tolerance."""
    return build_tw1()


def tw1_cdf(table, x):
    return table.evaluate(x)


def tw1_quantile(table, p):
    """Inverse of F1; raises :class:`OutOfRange` unless ``0 < p < 1``."""
    return table.quantile(p)


def critical_eigenvalue(table, n, p):
    """Largest-eigenvalue critical value ``2 + x_p / n^(2/3)`` for an n-node matrix."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return 2.0 + table.quantile(p) / float(n) ** (2.0 / 3.0)


def save_table(table, path):
    """Write ``table`` as a two-column ``x,F1`` CSV with a metadata comment."""
    header = f"tolerance={table.tolerance!r} step={table.step!r}\nx,F1"
    np.savetxt(path, np.column_stack([table.grid, table.cdf]), delimiter=",",
               fmt="%.17g", header=header, comments="# ")


def load_table(path):
    """Read a table written by :func:`save_table` and re-validate it."""
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            for token in line[1:].split():
                if "=" in token:
                    key, val = token.split("=", 1)
                    meta[key] = float(val)
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    table = Tw1Table(data[:, 0], data[:, 1],
                     tolerance=meta.get("tolerance", float("nan")),
                     step=meta.get("step", GRID_STEP))
    return validate_table(table)


def cache_path():
    root = os.environ.get("COMMTEST_CACHE_DIR") or Path.home() / ".cache" / "commtest"
    return Path(root) / "tw1.csv"


def cached_table(path=None):
    """Load the on-disk table if it exists and validates, else build and store it."""
    path = Path(path) if path is not None else cache_path()
    if path.exists():
        try:
            return load_table(path)
        except (ConvergenceFailure, ValueError, OSError):
            pass
    table = build_tw1()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_table(table, path)
    except OSError:
        pass
    return table
