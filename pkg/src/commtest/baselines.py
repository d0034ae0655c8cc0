"""Clustering-based comparison methods.

Two spectral clusterings (conventional on min-shifted weights, and signed
with absolute-value degrees) feed a clustering-entropy (CE) stability
statistic. ``ce_test`` calibrates CE against shuffled copies of the graph.

The contamination noise model and the CE decision rule are our own choices:
additive symmetric Gaussian noise with sd ``0.1 * sigma_emp``, and a
one-sided rank test on the lower tail of the shuffle-null CE values.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.special import comb

from .core_matrix import shuffle_null, upper_values, validate_weight_matrix
from .errors import IsolatedNode

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100
CONTAMINATION_SCALE = 0.1


def _kmeans_pp_init(X, K, rng):
    n = X.shape[0]
    centers = np.empty((K, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for k in range(1, K):
        total = d2.sum()
        idx = rng.choice(n, p=d2 / total) if total > 0 else rng.integers(n)
        centers[k] = X[idx]
        d2 = np.minimum(d2, np.sum((X - centers[k]) ** 2, axis=1))
    return centers


def _lloyd(X, centers, max_iter):
    n, K = X.shape[0], centers.shape[0]
    rows = np.arange(n)
    xx = np.einsum("ij,ij->i", X, X)[:, None]
    eye = np.eye(K)
    labels = None
    for _ in range(max_iter):
        d2 = np.maximum(xx - 2.0 * X @ centers.T + np.einsum("ij,ij->i", centers, centers), 0.0)
        new = np.argmin(d2, axis=1)
        counts = np.bincount(new, minlength=K)
        for k in np.flatnonzero(counts == 0):
            # re-seed an empty cluster at the point farthest from its center
            own = d2[rows, new]
            far = np.argmax(own)
            if own[far] <= 1e-12 * (1.0 + xx[far, 0]):
                break
            centers[k] = X[far]
            new[far] = k
            d2[far] = 0.0
        counts = np.bincount(new, minlength=K)
        sums = eye[new].T @ X
        filled = counts > 0
        centers[filled] = sums[filled] / counts[filled, None]
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
    inertia = float(np.sum((X - centers[labels]) ** 2))
    return labels, inertia


def child_seed(seed, index):
    """Counter-based child of ``seed`` (an int or a SeedSequence)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + (index,))
    return np.random.SeedSequence(seed, spawn_key=(index,))


def kmeans(points, K, seed, restarts=KMEANS_RESTARTS, max_iter=KMEANS_MAX_ITER):
    """Lloyd's k-means with k-means++ seeding, best of ``restarts`` runs.

    Each restart draws from its own counter-split stream of ``seed``. The
    lowest inertia wins; ties go to the earlier restart.
    Returns integer labels in ``[0, K)``.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"need 1 <= K <= n, got K={K}, n={n}")
    best, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng(child_seed(seed, r))
        labels, inertia = _lloyd(X, _kmeans_pp_init(X, K, rng), max_iter)
        if inertia < best_inertia:
            best, best_inertia = labels, inertia
    return best


def _inv_sqrt_degrees(deg):
    zero = deg <= 0
    if np.any(zero):
        warnings.warn(f"{int(zero.sum())} node(s) with zero degree; they are assigned arbitrarily",
                      IsolatedNode, stacklevel=3)
    out = np.zeros_like(deg)
    out[~zero] = 1.0 / np.sqrt(deg[~zero])
    return out


def _embed_and_cluster(A, deg, K, seed):
    """Cluster the K bottom eigenvectors of ``I - D^-1/2 A D^-1/2``."""
    dis = _inv_sqrt_degrees(deg)
    n = A.shape[0]
    L = np.eye(n) - dis[:, None] * A * dis[None, :]
    L = (L + L.T) / 2.0
    _, vecs = sla.eigh(L, subset_by_index=[0, K - 1])
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    emb = np.divide(vecs, norms, out=np.zeros_like(vecs), where=norms > 0)
    return kmeans(emb, K, seed)


def laplacian_eigenvalues(W, method="conv"):
    """Eigenvalues of the normalized Laplacian used by the clustering methods."""
    A, deg = _affinity(validate_weight_matrix(W), method, shift=True)
    dis = _inv_sqrt_degrees(deg)
    L = np.eye(A.shape[0]) - dis[:, None] * A * dis[None, :]
    return np.linalg.eigvalsh((L + L.T) / 2.0)


def _affinity(W, method, shift):
    if method == "conv":
        A = W.copy()
        if shift:
            A = A - upper_values(W).min()
            np.fill_diagonal(A, 0.0)
        return A, A.sum(axis=1)
    if method == "signed":
        return W, np.abs(W).sum(axis=1)
    raise ValueError("method must be 'conv' or 'signed'")


def conv_spectral(W, K, seed, shift=True):
    """Normalized-Laplacian spectral clustering on nonnegative weights.

    With ``shift=True`` the smallest off-diagonal weight is subtracted first,
    making all weights nonnegative.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    A, deg = _affinity(validate_weight_matrix(W), "conv", shift)
    return _embed_and_cluster(A, deg, K, seed)


def signed_spectral(W, K, seed):
    """Spectral clustering with the signed Laplacian ``Dbar^-1/2 (Dbar - W) Dbar^-1/2``.

    ``Dbar`` holds absolute-value degrees, so for all-positive ``W`` this is
    the ordinary normalized Laplacian.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    A, deg = _affinity(validate_weight_matrix(W), "signed", False)
    return _embed_and_cluster(A, deg, K, seed)


def _cluster(W, K, method, seed):
    if method == "conv":
        return conv_spectral(W, K, seed)
    if method == "signed":
        return signed_spectral(W, K, seed)
    raise ValueError("method must be 'conv' or 'signed'")


def in_cluster_probability(base, ensemble, edges=None):
    """Per-edge agreement rate of co-membership between ``base`` and each ensemble member.

    ``edges`` is a pair of index arrays ``(i, j)``; all pairs ``i < j`` by default.
    """
    base = np.asarray(base)
    if not len(ensemble):
        raise ValueError("ensemble must be nonempty")
    if edges is None:
        edges = np.triu_indices(base.size, k=1)
    i, j = edges
    same = base[i] == base[j]
    agree = np.zeros(i.size)
    for labels in ensemble:
        labels = np.asarray(labels)
        if labels.shape != base.shape:
            raise ValueError("all assignments must have the same length")
        agree += (labels[i] == labels[j]) == same
    return agree / len(ensemble)


def clustering_entropy(p, L=None):
    """Mean binary entropy (bits) of the in-cluster probabilities; ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    L = p.size if L is None else L
    if L != p.size:
        raise ValueError("L must equal the number of indexed edges")
    if L == 0:
        return 0.0
    q = 1.0 - p
    h = -(np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
          + np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0))
    return float(np.clip(h.sum() / L, 0.0, 1.0))


def _contaminate(W, rng, scale):
    n = W.shape[0]
    noise = np.triu(rng.standard_normal((n, n)), k=1) * scale
    return W + noise + noise.T


def _ce_statistic(W, K, method, contaminations, seed):
    base = _cluster(W, K, method, child_seed(seed, 0))
    nz = np.nonzero(np.triu(W, k=1))
    scale = CONTAMINATION_SCALE * upper_values(W).std()
    noise_rng = np.random.default_rng(child_seed(seed, 1))
    cluster_root = child_seed(seed, 2)
    ensemble = [_cluster(_contaminate(W, noise_rng, scale), K, method, child_seed(cluster_root, c))
                for c in range(contaminations)]
    p = in_cluster_probability(base, ensemble, edges=nz)
    return clustering_entropy(p)


@dataclass
class CETestResult:
    statistic: float
    null_statistics: np.ndarray
    p_value: float
    reject: bool
    method: str
    K: int
    alpha: float
    contaminations: int
    nulls: int
    seed: int
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "null_statistics": self.null_statistics.tolist(),
            "p_value": self.p_value,
            "reject": self.reject,
            "method": self.method,
            "K": self.K,
            "alpha": self.alpha,
            "contaminations": self.contaminations,
            "nulls": self.nulls,
            "seed": self.seed,
            "metadata": self.metadata,
        }


def ce_test(W, K, method="signed", contaminations=100, nulls=200, alpha=0.05, seed=0):
    """Clustering-entropy significance test.

    CE of ``W`` is compared with CE of ``nulls`` shuffled copies, each run
    through the identical cluster-and-contaminate pipeline. Low entropy means
    a stable partition, so the p-value is the lower-tail rank
    ``(1 + #{null CE <= observed}) / (nulls + 1)`` and the test rejects when
    it is at most ``alpha``.
    """
    W = validate_weight_matrix(W)
    observed = _ce_statistic(W, K, method, contaminations, child_seed(seed, 0))
    null_root = child_seed(seed, 1)
    null_ce = np.empty(nulls)
    for b in range(nulls):
        rep = child_seed(null_root, b)
        Wb = shuffle_null(W, child_seed(rep, 0))
        null_ce[b] = _ce_statistic(Wb, K, method, contaminations, child_seed(rep, 1))
    p_value = (1.0 + np.sum(null_ce <= observed)) / (nulls + 1.0)
    return CETestResult(
        statistic=observed,
        null_statistics=null_ce,
        p_value=float(p_value),
        reject=bool(p_value <= alpha),
        method=method,
        K=K,
        alpha=alpha,
        contaminations=contaminations,
        nulls=nulls,
        seed=seed,
        metadata={
            "noise": f"additive symmetric gaussian, sd = {CONTAMINATION_SCALE} * sigma_emp",
            "decision": "lower-tail rank against shuffle-null CE",
        },
    )


def ari(a, b):
    """Adjusted Rand index between two labelings."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("labelings must have equal length")
    n = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1)
    sum_comb = comb(table, 2).sum()
    sum_a = comb(table.sum(axis=1), 2).sum()
    sum_b = comb(table.sum(axis=0), 2).sum()
    total = comb(n, 2)
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((sum_comb - expected) / (max_index - expected))
