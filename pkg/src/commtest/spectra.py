"""Symmetric spectra, the semicircle reference law and mean-matrix diagnostics."""
import numpy as np

from .errors import NonSymmetric, ShapeError


def _check_symmetric(M, rtol=1e-10):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(M)) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > rtol * scale:
        raise NonSymmetric("matrix is not symmetric")
    return M


def eigvals_sym(M):
    """All eigenvalues of a real symmetric matrix, ascending.

    Repeated eigenvalues are kept. The input is never modified.

    Raises
    ------
    NonSymmetric
        If ``max|M - M.T| > 1e-10 * max|M|``.
    """
    M = _check_symmetric(M)
    return np.linalg.eigvalsh(M)


def extreme_eigs(M):
    """``(lambda_min, lambda_max)`` of a symmetric matrix."""
    ev = eigvals_sym(M)
    return float(ev[0]), float(ev[-1])


def semicircle_pdf(x):
    """Semicircle density ``sqrt(4 - x^2) / (2 pi)`` on ``[-2, 2]``, 0 outside."""
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)
    return out if out.ndim else float(out)


def semicircle_cdf(x):
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    out = 0.5 + xc * np.sqrt(4.0 - xc * xc) / (4.0 * np.pi) + np.arcsin(xc / 2.0) / np.pi
    out = np.where(x <= -2.0, 0.0, np.where(x >= 2.0, 1.0, out))
    return out if out.ndim else float(out)


def esd_ks_distance(eigenvalues):
    """Kolmogorov-Smirnov distance between an empirical spectrum and the semicircle.

    The empirical CDF is evaluated on both sides of every jump, the usual
    two-sided KS convention. Returns a value in ``[0, 1]``.
    """
    ev = np.sort(np.asarray(eigenvalues, dtype=float).ravel())
    m = ev.size
    if m == 0:
        raise ValueError("empty spectrum")
    F = semicircle_cdf(ev)
    k = np.arange(1, m + 1)
    d_plus = np.max(k / m - F)
    d_minus = np.max(F - (k - 1) / m)
    return float(max(d_plus, d_minus))


def _reduced_mean_matrix(model, n):
    sizes = np.asarray(model.sizes, dtype=float)
    if int(sizes.sum()) != n:
        raise ValueError(f"cluster sizes sum to {int(sizes.sum())}, expected n={n}")
    r = sizes / n
    mu = np.asarray(model.mu, dtype=float)
    sr = np.sqrt(r)
    return np.sqrt(n) * mu * np.outer(sr, sr)


def mean_matrix(model, n):
    """Explicit ``n x n`` normalized mean matrix, block ``(k, k')`` = ``mu[k, k'] / sqrt(n)``.

    The diagonal is not zeroed. Intended as a brute-force reference for small n.
    """
    labels = np.repeat(np.arange(len(model.sizes)), model.sizes)
    mu = np.asarray(model.mu, dtype=float)
    return mu[np.ix_(labels, labels)] / np.sqrt(n)


def mean_matrix_top_eig(model, n):
    """Largest eigenvalue of the normalized block-mean matrix, via its K x K reduction.

    The n x n mean matrix has rank at most K, so its nonzero eigenvalues are
    those of ``sqrt(n) * mu[k, k'] * sqrt(r_k r_k')`` with ``r_k = n_k / n``.
    When ``n > K`` the remaining eigenvalues are 0, which bounds the result
    from below.
    """
    ev = np.linalg.eigvalsh(_reduced_mean_matrix(model, n))
    top = float(ev[-1])
    if n > len(model.sizes):
        top = max(top, 0.0)
    return top


def mean_matrix_norm(model, n):
    """Spectral norm (largest |eigenvalue|) of the normalized block-mean matrix."""
    ev = np.linalg.eigvalsh(_reduced_mean_matrix(model, n))
    return float(np.max(np.abs(ev)))


def epsilon_bound(model, v):
    """Squared lower-bound constant for the block-mean matrix.

    ``v`` holds one value per cluster and is rescaled so that
    ``sum_k r_k v_k^2 = 1`` (a unit vector once expanded to nodes). Returns

        eps2 = sum_k r_k (sum_k' r_k' mu[k, k'] v_k')^2

    so that ``sqrt(n * eps2)`` never exceeds the spectral norm of the
    normalized mean matrix (see :func:`mean_matrix_lower_bound`).
    """
    sizes = np.asarray(model.sizes, dtype=float)
    r = sizes / sizes.sum()
    v = np.asarray(v, dtype=float)
    if v.shape != r.shape:
        raise ValueError(f"v must have one entry per cluster ({r.size})")
    norm2 = np.sum(r * v * v)
    if norm2 == 0:
        raise ValueError("v must be nonzero")
    v = v / np.sqrt(norm2)
    inner = np.asarray(model.mu, dtype=float) @ (r * v)
    return float(np.sum(r * inner * inner))


def mean_matrix_lower_bound(model, n, v):
    """``sqrt(n * eps2)``, a lower bound on the mean matrix's spectral norm."""
    return float(np.sqrt(n * epsilon_bound(model, v)))
