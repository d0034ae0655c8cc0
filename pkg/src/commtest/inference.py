"""Four-way extreme-eigenvalue test for community structure.

The observed graph is reduced to two matrices, ``normalize_t(W)`` and
``pipeline_te(W, t0)``. Their largest and smallest eigenvalues are compared
with one-sided critical values at level ``alpha / 4`` each (Bonferroni). The
null hypothesis of no community structure is accepted only if all four
statistics fall inside their intervals.

For two-valued (binary) graphs both matrices coincide, so only the two
``T`` sub-tests run, each at level ``alpha / 2``.

Critical values come from the Tracy-Widom F1 law (``critical_method="tw"``)
or from element-wise shuffles of ``W`` (``critical_method="permutation"``).
"""
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import tracy_widom
from .core_matrix import (
    is_two_valued,
    normalize_t,
    pipeline_te,
    shuffle_null,
    upper_values,
    validate_weight_matrix,
)
from .spectra import extreme_eigs

SUBTEST_NAMES = ("T_max", "T_min", "Te_max", "Te_min")
CRITICAL_METHODS = ("tw", "permutation")
HEAVY_TAIL_KURTOSIS = 1.0


@dataclass(frozen=True)
class TestConfig:
    """Settings for :func:`run_test`.

    ``seed`` only matters for permutation critical values.
    """

    __test__ = False  # not a pytest class

    alpha: float = 0.05
    t0: float = 0.5
    critical_method: str = "tw"
    permutations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if self.t0 == 0 or not math.isfinite(self.t0):
            raise ValueError("t0 must be finite and nonzero")
        if self.critical_method not in CRITICAL_METHODS:
            raise ValueError(f"critical_method must be one of {CRITICAL_METHODS}")
        if self.critical_method == "permutation" and self.permutations < 100:
            raise ValueError("permutation criticals need at least 100 permutations")


@dataclass
class SubTestResult:
    name: str
    statistic: float
    critical: float
    reject: bool

    @property
    def upper(self):
        """True for the largest-eigenvalue sub-tests, whose interval is ``(-inf, critical)``."""
        return self.name.endswith("_max")


@dataclass
class TestReport:
    __test__ = False

    n: int
    alpha: float
    t0: float
    critical_method: str
    seed: int
    binary_mode: bool
    level: float
    subtests: list
    overall_reject: bool
    warnings: list = field(default_factory=list)

    @property
    def accepted_count(self):
        """Number of sub-tests whose statistic lies inside its interval."""
        return sum(not s.reject for s in self.subtests)

    def subtest(self, name):
        for s in self.subtests:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["subtests"] = [SubTestResult(**s) for s in d["subtests"]]
        d["warnings"] = list(d.get("warnings", []))
        return cls(**d)


def _decide(name, statistic, critical):
    if name.endswith("_max"):
        return statistic >= critical
    return statistic <= critical


def tw_bounds(table, n, level):
    """Tracy-Widom critical values for all four sub-tests at per-test ``level``.

    Upper bounds ``q`` apply to the largest eigenvalues, lower bounds ``-q``
    to the smallest.
    """
    if not 0.0 < level < 0.5:
        raise ValueError(f"level must lie in (0, 0.5), got {level}")
    q = tracy_widom.critical_eigenvalue(table, n, 1.0 - level)
    return {"T_max": q, "T_min": -q, "Te_max": q, "Te_min": -q}


def _order_index(level, B):
    # ceil((1 - level) * B), guarded against float noise such as 987.4999999
    return int(math.ceil((1.0 - level) * B - 1e-9))


def null_extremes(W, cfg, include_te=True):
    """Extreme eigenvalues of ``cfg.permutations`` shuffles of ``W``.

    Replicate ``b`` is seeded by ``SeedSequence(cfg.seed, spawn_key=(b,))``,
    so each replicate is reproducible on its own and the collection does not
    depend on evaluation order. Returns an array of shape ``(B, 4)`` with
    columns in :data:`SUBTEST_NAMES` order (NaN for skipped T_e columns).
    """
    W = validate_weight_matrix(W)
    B = cfg.permutations
    out = np.full((B, 4), np.nan)
    for b in range(B):
        Wb = shuffle_null(W, np.random.SeedSequence(cfg.seed, spawn_key=(b,)))
        out[b, 1], out[b, 0] = extreme_eigs(normalize_t(Wb))
        if include_te:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                out[b, 3], out[b, 2] = extreme_eigs(pipeline_te(Wb, cfg.t0))
    return out


def permutation_bounds(W, cfg, level=None, include_te=True):
    """Shuffle-based critical values for the four sub-tests.

    The upper bound is the order statistic at ``ceil((1 - level) B)`` of the
    B null maxima; the lower bound is the mirror order statistic of the null
    minima. ``level`` defaults to ``cfg.alpha / 4``.
    """
    level = cfg.alpha / 4.0 if level is None else level
    ext = null_extremes(W, cfg, include_te=include_te)
    B = ext.shape[0]
    k = _order_index(level, B)
    bounds = {}
    for j, name in enumerate(SUBTEST_NAMES):
        if not include_te and name.startswith("Te"):
            continue
        col = np.sort(ext[:, j])
        bounds[name] = float(col[k - 1] if name.endswith("_max") else col[B - k])
    return bounds


def _offdiag_excess_kurtosis(W):
    vals = upper_values(W)
    if vals.size < 4:
        return 0.0
    return float(stats.kurtosis(vals, fisher=True, bias=True))


def run_test(W, cfg=None, table=None):
    """Test ``W`` for community structure.

    Parameters
    ----------
    W : array_like, (n, n)
        Symmetric weight matrix with zero diagonal.
    cfg : TestConfig, optional
    table : Tw1Table, optional
        F1 table for Tracy-Widom criticals; the process default is used if omitted.

    Returns
    -------
    TestReport

    Raises
    ------
    DegenerateMatrix
        If the off-diagonal weights are constant.
    """
    cfg = cfg or TestConfig()
    W = validate_weight_matrix(W)
    n = W.shape[0]
    binary = is_two_valued(W)
    active = SUBTEST_NAMES[:2] if binary else SUBTEST_NAMES
    level = cfg.alpha / (len(active))
    notes = []

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        stat = {}
        stat["T_min"], stat["T_max"] = extreme_eigs(normalize_t(W))
        if not binary:
            stat["Te_min"], stat["Te_max"] = extreme_eigs(pipeline_te(W, cfg.t0))
    notes.extend(str(w.message) for w in caught)

    if cfg.critical_method == "tw":
        bounds = tw_bounds(table or tracy_widom.default_table(), n, level)
        kurt = _offdiag_excess_kurtosis(W)
        if kurt > HEAVY_TAIL_KURTOSIS:
            notes.append(
                f"off-diagonal excess kurtosis {kurt:.2f} > {HEAVY_TAIL_KURTOSIS:g}; "
                "Tracy-Widom criticals may be unreliable, consider permutation criticals")
    else:
        bounds = permutation_bounds(W, cfg, level=level, include_te=not binary)

    subtests = [
        SubTestResult(name, float(stat[name]), float(bounds[name]),
                      bool(_decide(name, stat[name], bounds[name])))
        for name in active
    ]
    return TestReport(
        n=n,
        alpha=cfg.alpha,
        t0=cfg.t0,
        critical_method=cfg.critical_method,
        seed=cfg.seed,
        binary_mode=binary,
        level=level,
        subtests=subtests,
        overall_reject=any(s.reject for s in subtests),
        warnings=notes,
    )
