"""Weight-matrix validation and the element-wise transforms used by the test.

A weight matrix is a plain ``(n, n)`` float ndarray that is symmetric, has a
zero diagonal and finite entries. Every transform here returns a new array and
keeps those three properties.

Transforms
----------
standardize    off-diagonal entries mapped to mean 0, population variance 1
normalize_t    standardize, then divide by sqrt(n)
exp_map        off-diagonal entries mapped to exp(t * w)
normalize_te   normalize_t(exp_map(W, t))
pipeline_te    normalize_te(standardize(W), t0), the exponential-branch matrix
shuffle_null   random permutation of the upper-triangle entries
"""
import warnings

import numpy as np

from .errors import DegenerateMatrix, NonSymmetric, OverflowSaturated, ShapeError

EXP_CLAMP = 700.0
_DEGENERATE_RTOL = 1e-14


def validate_weight_matrix(W, *, sym_rtol=1e-10):
    """Return ``W`` as a float array after checking the weight-matrix invariants.

    Raises
    ------
    ShapeError
        If ``W`` is not a square 2-D array with n >= 2.
    NonSymmetric
        If the largest asymmetry exceeds ``sym_rtol * max|W|``.
    ValueError
        If entries are non-finite or the diagonal is nonzero.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ShapeError(f"weight matrix must be square, got shape {W.shape}")
    if W.shape[0] < 2:
        raise ShapeError("weight matrix needs at least 2 nodes")
    if not np.all(np.isfinite(W)):
        raise ValueError("weight matrix has non-finite entries")
    scale = np.max(np.abs(W))
    if np.max(np.abs(W - W.T)) > sym_rtol * scale:
        raise NonSymmetric("weight matrix is not symmetric")
    if np.any(np.diag(W) != 0):
        raise ValueError("weight matrix must have a zero diagonal")
    return W


def offdiag_mask(n):
    return ~np.eye(n, dtype=bool)


def upper_values(W):
    """Upper-triangle (i < j) entries, row-major."""
    W = np.asarray(W)
    return W[np.triu_indices(W.shape[0], k=1)]


def _standardize_unchecked(W):
    n = W.shape[0]
    off = W[offdiag_mask(n)]
    mu = off.mean()
    sd = off.std()
    if sd == 0 or sd < _DEGENERATE_RTOL * np.max(np.abs(off)):
        raise DegenerateMatrix("off-diagonal weights have zero variance")
    out = (W - mu) / sd
    np.fill_diagonal(out, 0.0)
    return out


def standardize(W):
    """Shift and scale off-diagonal weights to mean 0 and population variance 1.

    The moments are taken over all ``n(n-1)`` off-diagonal entries. The
    diagonal stays zero.

    Raises
    ------
    DegenerateMatrix
        If the off-diagonal standard deviation is zero, or below ``1e-14``
        times the largest off-diagonal magnitude.
    """
    return _standardize_unchecked(validate_weight_matrix(W))


def normalize_t(W):
    """Standardized weights divided by ``sqrt(n)``.

    For any nondegenerate input the squared Frobenius norm of the result is
    exactly ``n - 1`` up to rounding.
    """
    S = standardize(W)
    return S / np.sqrt(S.shape[0])


def exp_map(W, t):
    """Element-wise ``exp(t * w)`` on the off-diagonal, zero on the diagonal.

    Exponents are clamped to ``[-700, 700]``; when that happens an
    :class:`OverflowSaturated` warning is emitted.
    """
    W = validate_weight_matrix(W)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    z = t * W
    if np.any(np.abs(z) > EXP_CLAMP):
        warnings.warn(
            f"|t*w| exceeded {EXP_CLAMP:g} for {int(np.sum(np.abs(z) > EXP_CLAMP))} "
            "entries; exponent clamped",
            OverflowSaturated,
            stacklevel=2,
        )
        z = np.clip(z, -EXP_CLAMP, EXP_CLAMP)
    out = np.exp(z)
    np.fill_diagonal(out, 0.0)
    return out


def normalize_te(W, t):
    """``standardize(exp_map(W, t)) / sqrt(n)``."""
    E = exp_map(W, t)
    return _standardize_unchecked(E) / np.sqrt(E.shape[0])


def pipeline_te(W, t0=0.5):
    """Exponential-branch matrix: standardize, exponentiate, restandardize, scale.

    This is the matrix whose extreme eigenvalues the exponential sub-tests use.
    For a two-valued ``W`` and ``t0 > 0`` it coincides with :func:`normalize_t`.
    """
    return normalize_te(standardize(W), t0)


def shuffle_null(W, seed):
    """Randomly permute the upper-triangle weights and mirror them.

    The multiset of off-diagonal values is preserved exactly, so any block
    structure is destroyed while the marginal weight distribution is kept.
    ``seed`` is anything accepted by :func:`numpy.random.default_rng`.
    """
    W = validate_weight_matrix(W)
    n = W.shape[0]
    iu = np.triu_indices(n, k=1)
    vals = W[iu]
    rng = np.random.default_rng(seed)
    out = np.zeros_like(W)
    out[iu] = vals[rng.permutation(vals.size)]
    return out + out.T


def is_two_valued(W):
    """True when the off-diagonal value set has at most two distinct values."""
    return np.unique(upper_values(W)).size <= 2
