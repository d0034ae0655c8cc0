import numpy as np
import pytest

from commtest.core_matrix import normalize_t
from commtest.errors import ConvergenceFailure, OutOfRange
from commtest.spectra import extreme_eigs
from commtest.tracy_widom import (
    Tw1Table,
    build_tw1,
    cached_table,
    critical_eigenvalue,
    load_table,
    save_table,
    tw1_cdf,
    tw1_quantile,
    validate_table,
)

from .conftest import gaussian_null


def test_reference_quantiles(tw_table):
    assert tw1_quantile(tw_table, 0.95) == pytest.approx(0.979, abs=0.005)
    assert tw1_quantile(tw_table, 0.9875) == pytest.approx(1.889, abs=0.010)


def test_reference_cdf(tw_table):
    assert tw1_cdf(tw_table, 0.979) == pytest.approx(0.95, abs=0.005)
    assert tw1_cdf(tw_table, 1.889) == pytest.approx(0.9875, abs=0.002)
    assert tw1_cdf(tw_table, -10.0) < 1e-5
    assert tw1_cdf(tw_table, -50.0) == 0.0
    assert tw1_cdf(tw_table, 50.0) == 1.0


def test_known_moments(tw_table):
    # literature values for the GOE Tracy-Widom law: mean -1.2065, variance 1.6078
    x = tw_table.grid
    dens = np.gradient(tw_table.cdf, x)
    mean = np.trapezoid(x * dens, x)
    var = np.trapezoid((x - mean) ** 2 * dens, x)
    assert mean == pytest.approx(-1.2065, abs=2e-3)
    assert var == pytest.approx(1.6078, abs=5e-3)


@pytest.mark.parametrize("p", [0.5, 0.9, 0.99])
def test_roundtrip(tw_table, p):
    assert tw1_cdf(tw_table, tw1_quantile(tw_table, p)) == pytest.approx(p, abs=1e-4)


def test_roundtrip_uniform(tw_table):
    ps = np.linspace(0.01, 0.995, 200)
    err = [abs(tw1_cdf(tw_table, tw1_quantile(tw_table, p)) - p) for p in ps]
    assert max(err) <= 1e-4


def test_quantile_increasing(tw_table):
    qs = [tw1_quantile(tw_table, p) for p in (0.5, 0.9, 0.95, 0.99)]
    assert np.all(np.diff(qs) > 0)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_quantile_out_of_range(tw_table, p):
    with pytest.raises(OutOfRange):
        tw1_quantile(tw_table, p)


def test_table_invariants(tw_table):
    assert np.all(np.diff(tw_table.cdf) >= 0)
    assert tw_table.cdf[0] < 1e-6 and tw_table.cdf[-1] > 1 - 1e-6
    assert tw_table.grid[0] == pytest.approx(-10) and tw_table.grid[-1] == pytest.approx(8)
    assert tw_table.step == pytest.approx(0.01)
    fine = np.linspace(-10, 8, 20001)
    assert np.all(np.diff(tw_table.evaluate(fine)) >= 0)


def test_tolerance_insensitive():
    a, b = build_tw1(1e-7), build_tw1(1e-12)
    assert np.max(np.abs(a.cdf - b.cdf)) < 1e-5


def test_bad_tolerance():
    with pytest.raises(OutOfRange):
        build_tw1(1e-3)


def test_wrong_table_fails_validation(tw_table):
    shifted = Tw1Table(tw_table.grid + 0.2, tw_table.cdf)
    with pytest.raises(ConvergenceFailure):
        validate_table(shifted)


class TestCriticalEigenvalue:
    def test_n750(self, tw_table):
        assert critical_eigenvalue(tw_table, 750, 0.9875) == pytest.approx(2 + 1.889 / 750 ** (2 / 3), abs=1e-3)
        assert critical_eigenvalue(tw_table, 750, 0.9875) == pytest.approx(2.0229, abs=1e-3)

    def test_n150(self, tw_table):
        assert critical_eigenvalue(tw_table, 150, 0.95) == pytest.approx(2.0347, abs=1e-3)

    def test_limit(self, tw_table):
        vals = [critical_eigenvalue(tw_table, n, 0.95) for n in (10, 100, 10**4, 10**8)]
        assert np.all(np.diff(vals) < 0)
        assert vals[-1] > 2 and vals[-1] - 2 < 1e-5

    def test_increasing_in_p(self, tw_table):
        vals = [critical_eigenvalue(tw_table, 300, p) for p in (0.5, 0.9, 0.95, 0.99)]
        assert np.all(np.diff(vals) > 0)


def test_csv_roundtrip(tmp_path, tw_table):
    path = tmp_path / "tw1.csv"
    save_table(tw_table, path)
    loaded = load_table(path)
    assert np.array_equal(loaded.grid, tw_table.grid)
    assert np.array_equal(loaded.cdf, tw_table.cdf)
    assert loaded.tolerance == tw_table.tolerance


def test_corrupt_cache_rebuilt(tmp_path):
    path = tmp_path / "tw1.csv"
    path.write_text("x,F1\n0,0.1\n1,0.2\n2,0.3\n3,0.4\n")
    table = cached_table(path)
    assert table.quantile(0.95) == pytest.approx(0.979, abs=0.005)
    assert load_table(path).quantile(0.95) == pytest.approx(0.979, abs=0.005)


def test_empirical_exceedance_rate(tw_table):
    n, reps = 500, 500
    crit = critical_eigenvalue(tw_table, n, 0.95)
    hits = sum(extreme_eigs(normalize_t(gaussian_null(n, 50_000 + r)))[1] > crit for r in range(reps))
    assert 0.02 <= hits / reps <= 0.09
