import numpy as np
import pytest

from commtest.synthetic import CommunityModel, generate
from commtest.tracy_widom import default_table


@pytest.fixture(scope="session")
def tw_table():
    return default_table()


def gaussian_null(n, seed, base="gaussian"):
    W, _ = generate(CommunityModel((n,), [[0.0]], [[1.0]], base), seed)
    return W


def random_weight_matrix(rng, n, dist="normal"):
    if dist == "normal":
        vals = rng.standard_normal((n, n))
    elif dist == "uniform":
        vals = rng.uniform(-5, 3, (n, n))
    elif dist == "exponential":
        vals = rng.exponential(2.0, (n, n))
    else:
        vals = rng.integers(-3, 4, (n, n)).astype(float)
    W = np.triu(vals, k=1)
    return W + W.T


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("COMMTEST_CACHE_DIR", str(tmp_path / "cache"))
