import itertools
import math
import time

import numpy as np
import pytest

from hermvar import farima
from hermvar.errors import CoverageError, DomainError, HorizonError, UnsupportedOrder
from hermvar.meyer import cached_weight_table
from hermvar.simulator import (HermiteParams, SimGrid, build_path, eval_path, farima_for_grid,
                               fbm_path, pairings, partial_sum_bruteforce, partial_sums,
                               sigma_coefficient, sigma_explicit, sigma_generic)


# -- parameters and grid --------------------------------------------------------------

def test_delta():
    assert HermiteParams(1, 0.7).delta == pytest.approx(0.2)
    assert HermiteParams(2, 0.7).delta == pytest.approx(0.35)
    assert HermiteParams(3, 0.6).delta == pytest.approx(0.5 - 0.4 / 3)


@pytest.mark.parametrize("q,H,err", [(1, 0.5, DomainError), (2, 1.0, DomainError),
                                     (0, 0.7, DomainError), (4, 0.7, UnsupportedOrder),
                                     (1.5, 0.7, DomainError)])
def test_param_validation(q, H, err):
    with pytest.raises(err):
        HermiteParams(q, H)


def test_grid_nodes():
    g = SimGrid(J=18, a=0.99, eps=1e-3, horizon=1 + 2.0 ** -17)
    assert g.m0 == math.ceil(2 ** (18 * 0.01)) == 2
    assert g.max_diff == 1
    t = g.node_times
    assert t[0] == pytest.approx(g.m0 * 2.0 ** -18 + 2.0 ** (-0.99 * 18))
    np.testing.assert_allclose(np.diff(t), 2.0 ** -18, rtol=1e-9)
    # the last node is the first one past the horizon
    assert t[-2] <= g.horizon < t[-1]


def test_grid_m0_exact_power():
    # 2^{J(1-a)} = 2 exactly: the infimum is 2 itself
    assert SimGrid(J=10, a=0.9).m0 == 2


@pytest.mark.parametrize("kw", [dict(J=0), dict(J=10, a=0.5), dict(J=10, eps=0),
                                dict(J=10, horizon=-1)])
def test_grid_validation(kw):
    with pytest.raises(DomainError):
        SimGrid(**kw)


# -- sigma coefficients ------------------------------------------------------------------

def test_pairing_counts():
    # number of partial matchings of q points: 1, 2, 4, 10
    assert [len(pairings(q)) for q in (1, 2, 3, 4)] == [1, 2, 4, 10]


def test_generic_matches_explicit():
    rng = np.random.default_rng(0)
    for q in (1, 2, 3):
        zs = list(rng.standard_normal(q))
        c = rng.standard_normal((q, q))
        cov = lambda i, j: c[min(i, j), max(i, j)]
        assert sigma_generic(zs, cov) == pytest.approx(sigma_explicit(zs, cov), abs=1e-13)


def test_generic_q4_is_fourth_hermite():
    x = 1.3
    assert sigma_generic([x] * 4, lambda i, j: 1.0) == pytest.approx(x ** 4 - 6 * x ** 2 + 3)


def test_sigma_explicit_forms():
    seq = farima.generate(farima.FarimaParams(0.35, 20, 4))
    g0 = farima.autocovariance(0.35, 0)
    z5 = seq[5]
    assert sigma_coefficient(HermiteParams(2, 0.7), seq, (5, 5)) == pytest.approx(z5 ** 2 - g0)
    seq3 = farima.generate(farima.FarimaParams(HermiteParams(3, 0.7).delta, 20, 4))
    g3 = farima.autocovariance(seq3.delta, 0)
    z0 = seq3[0]
    assert sigma_coefficient(HermiteParams(3, 0.7), seq3, (0, 0, 0)) == pytest.approx(
        z0 ** 3 - 3 * g3 * z0)


def test_sigma_errors():
    seq = farima.generate(farima.FarimaParams(0.35, 10, 1))
    with pytest.raises(CoverageError):
        sigma_coefficient(HermiteParams(2, 0.7), seq, (3, 10))
    with pytest.raises(DomainError):
        sigma_coefficient(HermiteParams(2, 0.7), seq, (1, 2, 3))


def test_sigma_is_centred():
    params = HermiteParams(2, 0.7)
    vals = np.array([sigma_coefficient(params, farima.generate(
        farima.FarimaParams(params.delta, 8, s)), (3, 4)) for s in range(10_000)])
    assert abs(vals.mean()) < 4 * vals.std(ddof=1) / math.sqrt(len(vals))


# -- partial sums -------------------------------------------------------------------------

def _setup(q, H, J, eps, seed=7):
    params = HermiteParams(q, H)
    grid = SimGrid(J=J, eps=eps)
    weights = cached_weight_table(q, params.delta, grid.max_diff)
    return params, grid, weights, farima_for_grid(params, grid, seed)


@pytest.mark.parametrize("normalization", ["unit", "raw"])
def test_q1_collapse(normalization):
    params, grid, weights, seq = _setup(1, 0.7, 10, 1e-3)
    s = partial_sums(params, grid, weights, seq, normalization)
    z = seq.values / (math.sqrt(farima.autocovariance(seq.delta, 0))
                      if normalization == "unit" else 1.0)
    np.testing.assert_allclose(np.diff(s), 2.0 ** (-10 * 0.7) * z[1:], rtol=1e-12, atol=1e-15)
    assert s[0] == pytest.approx(2.0 ** (-7) * z[0])


@pytest.mark.parametrize("q,eps", [(2, 0.2), (3, 0.1)])
@pytest.mark.parametrize("normalization", ["unit", "raw"])
def test_incremental_equals_bruteforce(q, eps, normalization):
    params, grid, weights, seq = _setup(q, 0.7, 10, eps)
    assert weights.max_diff >= 2
    s = partial_sums(params, grid, weights, seq, normalization)
    m = grid.m0 + 100
    ref = partial_sum_bruteforce(params, grid, weights, seq, m, normalization)
    assert s[m - grid.m0] == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_normalizations_differ_by_a_constant(q):
    params, grid, weights, seq = _setup(q, 0.8, 10, 0.2)
    unit = partial_sums(params, grid, weights, seq, "unit")
    raw = partial_sums(params, grid, weights, seq, "raw")
    g0 = farima.autocovariance(seq.delta, 0)
    np.testing.assert_allclose(raw, unit * g0 ** (q / 2) * math.sqrt(math.factorial(q)),
                               rtol=1e-12)


def test_partial_sum_guards():
    params, grid, weights, seq = _setup(2, 0.7, 10, 1e-3)
    short = farima.FarimaSequence(seq.values[:-1], seq.delta, seq.start_index)
    with pytest.raises(CoverageError):
        partial_sums(params, grid, weights, short)
    with pytest.raises(DomainError):
        partial_sums(params, SimGrid(J=10, eps=0.2), weights, seq)
    with pytest.raises(DomainError):
        partial_sums(params, grid, weights, seq, normalization="other")


# -- paths ---------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def path():
    return build_path(HermiteParams(2, 0.7), SimGrid(J=10, horizon=1.2), seed=11)


def test_path_nodes_and_ramp(path):
    g = path.grid
    t = path.node_times[:-1]
    np.testing.assert_array_equal(path(t), path.node_values[:-1])
    assert path(t[0]) == path.node_values[0]
    assert path(t[0] / 2) == pytest.approx(path.node_values[0] / 2, rel=1e-14)
    assert path(0.0) == 0.0
    mid = 0.5 * (t[5] + t[6])
    assert eval_path(path, mid) == pytest.approx(0.5 * (path.node_values[5] + path.node_values[6]))
    w = (g.horizon - t[-1]) / g.step
    assert path(g.horizon) == pytest.approx((1 - w) * path.node_values[-2] + w * path.node_values[-1])


def test_path_horizon(path):
    with pytest.raises(HorizonError):
        path(1.3)
    with pytest.raises(HorizonError):
        path(-0.1)


def test_path_determinism():
    a = build_path(HermiteParams(3, 0.8), SimGrid(J=10), seed=5)
    b = build_path(HermiteParams(3, 0.8), SimGrid(J=10), seed=5)
    c = build_path(HermiteParams(3, 0.8), SimGrid(J=10), seed=6)
    assert a.node_values.tobytes() == b.node_values.tobytes()
    assert not np.array_equal(a.node_values, c.node_values)


def test_rosenblatt_variance_at_the_last_node():
    params, grid = HermiteParams(2, 0.7), SimGrid(J=12)
    end = np.array([build_path(params, grid, s).node_values[-1] for s in range(500)])
    target = grid.node_times[-1] ** 1.4
    assert abs(end.var(ddof=1) / target - 1) < 0.10


@pytest.mark.parametrize("H", [0.6, 0.9])
def test_q1_increment_scaling(H):
    grid = SimGrid(J=12)
    paths = [build_path(HermiteParams(1, H), grid, s) for s in range(1000)]
    i = 100
    for lag in (4, 6, 8):
        n = 2 ** (12 - lag)
        d = np.array([p.node_values[i + n] - p.node_values[i] for p in paths])
        target = (n * grid.step) ** (2 * H)
        se = np.std(d ** 2, ddof=1) / math.sqrt(len(d))
        assert abs(np.mean(d ** 2) - target) < 4 * se, lag


def test_fbm_path():
    p = fbm_path(0.7, 10, 1 + 2.0 ** -10, seed=3)
    assert p.step == 2.0 ** -10 and p.first_time == p.step
    assert p.horizon == pytest.approx(1 + 2.0 ** -10)
    assert p(0.0) == 0.0
    ends = np.array([fbm_path(0.7, 8, 1.0, s)(1.0) for s in range(2000)])
    assert abs(np.mean(ends ** 2) - 1) < 4 * np.std(ends ** 2) / math.sqrt(len(ends))


def test_throughput_guard():
    params = HermiteParams(3, 0.7)
    grid = SimGrid(J=18, horizon=1 + 2.0 ** -17)
    cached_weight_table(3, params.delta, grid.max_diff)
    t0 = time.perf_counter()
    p = build_path(params, grid, seed=0)
    assert time.perf_counter() - t0 < 60
    assert np.all(np.isfinite(p.node_values))
