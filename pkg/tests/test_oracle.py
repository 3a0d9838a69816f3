import itertools
import math
import warnings

import numpy as np
import pytest
from scipy.special import beta as beta_fn

from hermvar import oracle
from hermvar.errors import (DomainError, RefinementError, ResolutionError, TractabilityError,
                            UnsupportedOrder)
from hermvar.oracle import (IncrementLayout, KernelGrid, calibrate_normalization, calibrated,
                            contraction, discrete_hermite_sample, exact_covariance,
                            hermite_covariance, increment_decomposition, increment_grid,
                            product_formula_check, symmetrize, unit_grid, wick_integral)


@pytest.fixture(scope="module")
def grid_q2():
    return calibrated(unit_grid(2, 0.8))


# -- normalisation ----------------------------------------------------------------------

@pytest.mark.parametrize("H", [0.6, 0.7, 0.9])
def test_analytic_normalization_q1(H):
    expected = math.sqrt(H * (2 * H - 1) / beta_fn(2 - 2 * H, H - 0.5))
    assert oracle.analytic_normalization(1, H) == pytest.approx(expected, rel=1e-13)
    assert calibrate_normalization(unit_grid(1, H)) == pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("q", [2, 3])
def test_calibration_close_to_beta_formula(q):
    d = calibrate_normalization(unit_grid(q, 0.8))
    assert d == pytest.approx(oracle.analytic_normalization(q, 0.8), rel=0.03)


def test_calibration_pins_unit_variance(grid_q2):
    assert exact_covariance(grid_q2, 1.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_refinement_gate_fires():
    # at H = 0.6 the discretisation error decays like du^{2H-1}: too slowly
    with pytest.raises(RefinementError):
        calibrate_normalization(unit_grid(2, 0.6, du=2.0 ** -6))


def test_kernel_norm_stable_under_refinement():
    u, cut = 0.5, 0.4

    def tail_norm(du):
        g = unit_grid(1, 0.7, du)
        A = g.kernel_matrix(np.array([u]))[0]
        right = np.append(g.edges[1:], -np.inf)
        keep = right <= cut + 1e-12
        return float(np.sum(A[keep] ** 2 * g.cell_weights[keep]))

    a = oracle.kernel_exponent(1, 0.7)
    exact = (u - cut) ** (2 * a + 1) / (-2 * a - 1)
    coarse, fine = tail_norm(2.0 ** -7), tail_norm(2.0 ** -8)
    assert np.isfinite(coarse) and abs(fine / coarse - 1) < 1e-3
    assert coarse == pytest.approx(exact, rel=0.02)


def test_grid_validation():
    with pytest.raises(UnsupportedOrder):
        KernelGrid(4, 0.7, 0.01)
    with pytest.raises(DomainError):
        KernelGrid(2, 0.4, 0.01)
    with pytest.raises(ResolutionError):
        KernelGrid(2, 0.7, 0.3)
    g = unit_grid(2, 0.7)
    with pytest.raises(ResolutionError):
        g.u_points(0.0, 1.5)
    with pytest.raises(TractabilityError):
        g.kernel_matrix(np.linspace(0, 1, 2 ** 16))


# -- sampling -----------------------------------------------------------------------------

def test_sampling_basics(grid_q2):
    z = discrete_hermite_sample(grid_q2, [0.25, 1.0], 100, seed=3)
    assert z.shape == (100, 2)
    assert np.array_equal(z, discrete_hermite_sample(grid_q2, [0.25, 1.0], 100, seed=3))
    assert not np.array_equal(z, discrete_hermite_sample(grid_q2, [0.25, 1.0], 100, seed=4))
    assert np.all(discrete_hermite_sample(grid_q2, [0.0], 5, 1) == 0)
    with pytest.raises(ResolutionError):
        discrete_hermite_sample(grid_q2, [0.3], 10, 0)
    with pytest.raises(DomainError):
        discrete_hermite_sample(unit_grid(2, 0.8), [1.0], 10, 0)


def test_chunked_sampling_is_consistent(grid_q2, monkeypatch):
    a = discrete_hermite_sample(grid_q2, [1.0], 300, seed=9)
    monkeypatch.setattr(oracle, "CHUNK", 300)
    assert np.array_equal(a, discrete_hermite_sample(grid_q2, [1.0], 300, seed=9))


def test_gaussian_case_variance():
    g = calibrated(unit_grid(1, 0.7))
    z = discrete_hermite_sample(g, [1.0], 10_000, seed=0)[:, 0]
    se = np.std(z ** 2, ddof=1) / 100
    assert abs(np.mean(z ** 2) - 1) < 4 * se


@pytest.mark.parametrize("q,H", [(1, 0.8), (2, 0.8), (3, 0.8)])
def test_covariance(q, H):
    res = oracle.covariance_check(q, H, reps=10_000, seed=1)
    assert res["passed"], res
    for row in res["rows"]:
        assert row["exact_discrete"] == pytest.approx(row["target"], rel=0.02)


def test_hermite_covariance_formula():
    assert hermite_covariance(0.7, 1.0, 1.0) == 1.0
    assert hermite_covariance(0.7, 0.5, 1.0) == pytest.approx(0.5 * (0.5 ** 1.4 + 1 - 0.5 ** 1.4))


@pytest.mark.parametrize("q", [2, 3])
def test_hypercontractivity(q):
    g = calibrated(unit_grid(q, 0.8))
    z = discrete_hermite_sample(g, [1.0], 10_000, seed=q)[:, 0]
    assert np.mean(z ** 4) <= 3 * 9 ** q * np.mean(z ** 2) ** 2


# -- increments ---------------------------------------------------------------------------

def test_layout_geometry():
    lay = IncrementLayout(6, gamma=0.5, beta=0.6)
    assert lay.n_incr == 4 and lay.back == 4
    assert lay.window(1) == pytest.approx((0.25 - 3 / 64, 0.25 + 1 / 64))
    assert lay.windows_disjoint()
    assert not IncrementLayout(6, gamma=0.5, beta=0.95).windows_disjoint()


def test_windows_disjoint_brute_force():
    for N, g, b in itertools.product(range(3, 9), (0.3, 0.5, 0.7), (0.5, 0.6, 0.8, 0.95)):
        lay = IncrementLayout(N, g, b)
        wins = sorted(lay.window(l) for l in range(1, lay.n_incr + 1))
        brute = all(w1[1] <= w2[0] + 1e-15 for w1, w2 in zip(wins, wins[1:]))
        assert brute == lay.windows_disjoint(), (N, g, b)


def test_overlapping_windows_rejected():
    with pytest.raises(DomainError):
        oracle.independence_check(N=6, gamma=0.5, beta=0.95, reps=100)


def test_standing_assumption_warns():
    with pytest.warns(UserWarning):
        oracle.check_part_bound(Ns=(4,), reps=200)


def test_decomposition_additivity():
    lay = IncrementLayout(5, 0.5, 0.6)
    for q in (1, 2, 3):
        g = increment_grid(q, 0.8, lay, [1])
        full, tilde, check = increment_decomposition(g, lay, 1, 500, seed=q)
        assert np.max(np.abs(full - tilde - check)) <= 1e-12 * max(1, np.abs(full).max())
        assert np.std(check) > 0 and np.std(tilde) > 0


def test_increment_calibration():
    lay = IncrementLayout(5, 0.5, 0.6)
    g = increment_grid(2, 0.7, lay, [1])
    m = oracle.decomposition_moments(g, lay, 1)
    assert m["full"] == pytest.approx(2.0 ** (-2 * 0.7 * 5), rel=1e-10)
    assert 0 < m["check"] < m["full"]


def test_increment_grid_guards():
    with pytest.raises(ResolutionError):
        increment_grid(2, 0.7, IncrementLayout(11, 0.5, 0.6), [1])
    with pytest.raises(ResolutionError):
        increment_grid(2, 0.7, IncrementLayout(5, 0.5, 0.6), [1], cells_per_incr=1)


def test_independence_rejects_many_increments():
    with pytest.raises(TractabilityError):
        oracle.independence_check(N=10, gamma=0.95, reps=10)


# -- product formula -----------------------------------------------------------------------

W8 = np.full(8, 0.125)


def test_first_order_product():
    rng = np.random.default_rng(0)
    f, g = rng.standard_normal(8), rng.standard_normal(8)
    x = np.sqrt(W8) * rng.standard_normal(8)
    lhs = wick_integral(f, x, W8) * wick_integral(g, x, W8)
    rhs = wick_integral(np.outer(f, g), x, W8) + float(np.sum(f * g * W8))
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2), (1, 3)])
def test_product_formula(p, q):
    rng = np.random.default_rng(p * 10 + q)
    f, g = rng.standard_normal((8,) * p), rng.standard_normal((8,) * q)
    lhs, rhs = product_formula_check(f, g, W8, reps=10, seed=1)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


def test_product_formula_negative_control():
    # dropping the r! combinatorial factor must break the (2, 2) identity
    rng = np.random.default_rng(5)
    f, g = symmetrize(rng.standard_normal((8, 8))), symmetrize(rng.standard_normal((8, 8)))
    x = np.sqrt(W8) * rng.standard_normal(8)
    lhs = wick_integral(f, x, W8) * wick_integral(g, x, W8)
    wrong = sum(math.comb(2, r) ** 2 * (wick_integral(contraction(f, g, r, W8), x, W8)
                                        if r < 2 else float(contraction(f, g, r, W8)))
                for r in range(3))
    assert abs(lhs - wrong) > 1e-3 * max(1, abs(lhs))


def test_disjoint_contraction_vanishes():
    f, g = np.zeros(8), np.zeros(8)
    f[:4], g[4:] = 1.0, 2.0
    assert contraction(f, g, 1, W8) == 0.0


def test_isometry():
    rng = np.random.default_rng(2)
    f = symmetrize(rng.standard_normal((6, 6)))
    w = np.full(6, 1 / 6)
    draws = np.array([wick_integral(f, np.sqrt(w) * rng.standard_normal(6), w)
                      for _ in range(4000)])
    target = 2 * np.sum(f ** 2 * np.outer(w, w))
    se = np.std(draws ** 2, ddof=1) / math.sqrt(len(draws))
    assert abs(np.mean(draws ** 2) - target) < 4 * se
    assert abs(draws.mean()) < 4 * draws.std() / math.sqrt(len(draws))


def test_tensor_guards():
    w = np.full(65, 1 / 65)
    with pytest.raises(TractabilityError):
        product_formula_check(np.ones(65), np.ones(65), w)
    with pytest.raises(TractabilityError):
        product_formula_check(np.ones((4, 4)), np.ones((4, 4, 4)), np.full(4, 0.25))
    with pytest.raises(DomainError):
        product_formula_check(np.ones(5), np.ones(5), np.full(4, 0.25))


# -- suites -----------------------------------------------------------------------------------

def test_suites_are_reproducible():
    a = oracle.run_suite("product-formula", seed=3)
    assert a == oracle.run_suite("product-formula", seed=3)
    assert a["passed"]
    with pytest.raises(DomainError):
        oracle.run_suite("nope")
