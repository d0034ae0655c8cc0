"""Block-model weight matrices and Monte Carlo power experiments.

Weights in block ``(k, k')`` are drawn as ``mu[k, k'] + sigma[k, k'] * g``
with ``g`` a standardized base distribution (mean 0, variance 1).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import IndivisibleSize, InvalidModel
from .inference import SUBTEST_NAMES, TestConfig, run_test

BASE_DISTRIBUTIONS = ("gaussian", "uniform", "laplace")


@dataclass(frozen=True, eq=False)
class CommunityModel:
    """K cluster sizes with symmetric K x K block means and standard deviations."""

    sizes: tuple
    mu: np.ndarray
    sigma: np.ndarray
    base: str = "gaussian"

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        mu = np.atleast_2d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        K = len(sizes)
        if K == 0 or any(s <= 0 for s in sizes):
            raise InvalidModel("cluster sizes must be positive")
        if mu.shape != (K, K) or sigma.shape != (K, K):
            raise InvalidModel(f"mu and sigma must be {K}x{K}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise InvalidModel("mu and sigma must be finite")
        if not (np.array_equal(mu, mu.T) and np.array_equal(sigma, sigma.T)):
            raise InvalidModel("mu and sigma must be symmetric")
        if np.any(sigma < 0):
            raise InvalidModel("sigma must be nonnegative")
        if self.base not in BASE_DISTRIBUTIONS:
            raise InvalidModel(f"base must be one of {BASE_DISTRIBUTIONS}")
        if np.all(sigma == 0) and np.all(mu == mu.flat[0]):
            raise InvalidModel("degenerate model: constant means and zero variances")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def K(self):
        return len(self.sizes)

    @property
    def n(self):
        return sum(self.sizes)

    @property
    def proportions(self):
        return np.asarray(self.sizes, dtype=float) / self.n

    @property
    def labels(self):
        return np.repeat(np.arange(self.K), self.sizes)

    def to_dict(self):
        return {"sizes": list(self.sizes), "mu": self.mu.tolist(),
                "sigma": self.sigma.tolist(), "base": self.base}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["sizes"], d["mu"], d["sigma"], d.get("base", "gaussian"))
        except (KeyError, TypeError) as exc:
            raise InvalidModel(f"malformed model description: {exc}") from exc


def _base_draws(rng, base, size):
    if base == "gaussian":
        return rng.standard_normal(size)
    if base == "uniform":
        s3 = np.sqrt(3.0)
        return rng.uniform(-s3, s3, size)
    return rng.laplace(0.0, 1.0 / np.sqrt(2.0), size)


def generate(model, seed):
    """Draw one weight matrix from ``model``.

    Nodes are ordered by cluster. Returns ``(W, labels)``.
    """
    if not isinstance(model, CommunityModel):
        raise InvalidModel("expected a CommunityModel")
    rng = np.random.default_rng(seed)
    n = model.n
    labels = model.labels
    iu = np.triu_indices(n, k=1)
    li, lj = labels[iu[0]], labels[iu[1]]
    g = _base_draws(rng, model.base, iu[0].size)
    W = np.zeros((n, n))
    W[iu] = model.mu[li, lj] + model.sigma[li, lj] * g
    return W + W.T, labels


def permute_nodes(W, seed, labels=None):
    """Relabel nodes by a random permutation; returns ``(W', labels', perm)``."""
    W = np.asarray(W)
    perm = np.random.default_rng(seed).permutation(W.shape[0])
    Wp = W[np.ix_(perm, perm)]
    return Wp, (None if labels is None else np.asarray(labels)[perm]), perm


def fig3_model(s, mode, level, seed):
    """Five clusters of sizes ``(10s, 20s, 30s, 40s, 50s)`` with random block parameters.

    ``mode="mean"``: every block mean is ``-level`` or ``+level`` with equal
    probability, all standard deviations 1.
    ``mode="variance"``: all means 0, every block variance is ``1`` or
    ``level**2`` with equal probability.

    Draws are made for ``k <= k'`` and mirrored.
    """
    if s < 1:
        raise ValueError("s must be a positive integer")
    if level < 0:
        raise ValueError("level must be nonnegative")
    K = 5
    sizes = tuple(10 * s * (k + 1) for k in range(K))
    rng = np.random.default_rng(seed)
    coin = np.triu(rng.integers(0, 2, size=(K, K)).astype(bool))
    coin = coin | coin.T
    if mode == "mean":
        mu = np.where(coin, level, -level) + 0.0
        sigma = np.ones((K, K))
    elif mode == "variance":
        mu = np.zeros((K, K))
        sigma = np.where(coin, float(level), 1.0)
    else:
        raise ValueError("mode must be 'mean' or 'variance'")
    return CommunityModel(sizes, mu, sigma)


def example1_model(n, K):
    """Equal clusters, zero means, unit variance inside clusters and none between.

    The resulting matrix is block diagonal, yet its normalized spectrum still
    follows the semicircle law; only the exponential branch exposes it.
    """
    if K < 1 or n % K:
        raise IndivisibleSize(f"K={K} does not divide n={n}")
    sizes = (n // K,) * K
    return CommunityModel(sizes, np.zeros((K, K)), np.eye(K))


@dataclass
class PowerCurve:
    """Rejection rates of :func:`run_test` along a grid of effect levels."""

    levels: np.ndarray
    rejection_rate: np.ndarray
    subtest_rate: dict
    mean_extremes: dict
    replicates: int
    seed: int
    mode: str
    s: int
    redraw_model_per_replicate: bool = True
    extra: dict = field(default_factory=dict)

    def family_rate(self, prefix):
        """Per-level fraction of replicates where any sub-test named ``prefix_*`` rejected."""
        return self.extra[f"{prefix}_any"]


def power_experiment(levels, mode, s, replicates, cfg=None, seed=0, table=None):
    """Monte Carlo rejection rate of :func:`run_test` for :func:`fig3_model` designs.

    Block parameters are redrawn for every replicate. Replicate ``r`` at grid
    index ``i`` uses ``SeedSequence(seed, spawn_key=(i, r))``, split into one
    stream for the model and one for the weights.
    """
    if replicates < 10:
        raise ValueError("replicates must be at least 10")
    cfg = cfg or TestConfig()
    levels = np.asarray(levels, dtype=float)
    L = levels.size
    rejects = np.zeros((L, replicates), dtype=bool)
    sub = np.zeros((L, replicates, 4), dtype=bool)
    ext = np.full((L, replicates, 4), np.nan)
    for i, level in enumerate(levels):
        for r in range(replicates):
            model_ss, data_ss = np.random.SeedSequence(seed, spawn_key=(i, r)).spawn(2)
            model = fig3_model(s, mode, level, model_ss)
            W, _ = generate(model, data_ss)
            rep = run_test(W, cfg, table=table)
            rejects[i, r] = rep.overall_reject
            for st in rep.subtests:
                j = SUBTEST_NAMES.index(st.name)
                sub[i, r, j] = st.reject
                ext[i, r, j] = st.statistic
    return PowerCurve(
        levels=levels,
        rejection_rate=rejects.mean(axis=1),
        subtest_rate={name: sub[:, :, j].mean(axis=1) for j, name in enumerate(SUBTEST_NAMES)},
        mean_extremes={name: ext[:, :, j].mean(axis=1) for j, name in enumerate(SUBTEST_NAMES)},
        replicates=replicates,
        seed=seed,
        mode=mode,
        s=s,
        extra={
            "T_any": sub[:, :, :2].any(axis=2).mean(axis=1),
            "Te_any": sub[:, :, 2:].any(axis=2).mean(axis=1),
        },
    )
