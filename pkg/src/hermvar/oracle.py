"""Desk-scale chaos oracle: discretised multiple Wiener integrals of the
Hermite kernel, independent of the wavelet simulator.

The kernel ``L_t(y) = int_0^t prod_l (u - y_l)_+^alpha du`` with
``alpha = -(1/2 + (1 - H)/q)`` is discretised by a u-midpoint rule and a
projection onto y-cells (cell averages, computed analytically).  The y-mesh is
uniform near the support and geometrically graded to the left, with a final
semi-infinite cell on which the kernel is constant in u to ~1e-12.  After
discretisation the kernel is ``du * sum_j g_j^{(x) q}``, whose q-fold integral
is exactly ``du * sum_j s_j^q He_q(X_j / s_j)`` with ``X_j = sum_i g_j(i) dB_i``.
Second moments follow in closed form from the Gram matrix of the ``g_j``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.special import beta as beta_fn

from ._rng import generator
from .errors import (DomainError, RefinementError, ResolutionError, TractabilityError,
                     UnsupportedOrder)

MAX_ORDER = 3
MAX_KERNEL_ENTRIES = 2 ** 24
MAX_TENSOR_CELLS = 64
CHUNK = 2048


def kernel_exponent(q: int, H: float) -> float:
    return -(0.5 + (1.0 - H) / q)


def analytic_normalization(q: int, H: float) -> float:
    """``d(q, H)`` from the Beta-function reduction of ``E Z_1^2 = 1``."""
    a = kernel_exponent(q, H)
    b = beta_fn(a + 1.0, -2.0 * a - 1.0)
    return math.sqrt(H * (2.0 * H - 1.0) / (math.factorial(q) * b ** q))


@dataclass(frozen=True)
class KernelGrid:
    """Discretisation of the Hermite kernel.

    ``du`` is the u-step and also the y-step on the uniform region
    ``[y_lo, y_hi]``; cells left of ``y_lo`` grow by ``tail_ratio`` until the
    distance ``y_far`` is reached.
    """

    q: int
    H: float
    du: float
    y_lo: float = 0.0
    y_hi: float = 1.0
    tail_ratio: float = 1.08
    y_far: float = 2.0 ** 40
    d_qH: float | None = None

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"q must be a positive integer, got {self.q!r}")
        if self.q > MAX_ORDER:
            raise UnsupportedOrder(f"oracle supports q <= {MAX_ORDER}")
        if not 0.5 < self.H < 1.0:
            raise DomainError(f"H must lie in (1/2, 1), got {self.H!r}")
        if self.du <= 0 or self.y_hi <= self.y_lo:
            raise DomainError("need du > 0 and y_hi > y_lo")
        if self.tail_ratio <= 1.0:
            raise DomainError("tail_ratio must exceed 1")
        cells = (self.y_hi - self.y_lo) / self.du
        if abs(cells - round(cells)) > 1e-9:
            raise ResolutionError("the uniform region must be a whole number of du cells")

    @property
    def alpha(self) -> float:
        return kernel_exponent(self.q, self.H)

    @cached_property
    def edges(self) -> np.ndarray:
        n = int(round((self.y_hi - self.y_lo) / self.du))
        fine = self.y_lo + self.du * np.arange(n + 1)
        widths = []
        dist, w = 0.0, self.du
        while dist < self.y_far:
            widths.append(w)
            dist += w
            w *= self.tail_ratio
        left = self.y_lo - np.cumsum(widths)[::-1]
        return np.concatenate([left, fine])

    @property
    def n_cells(self) -> int:
        """Finite cells plus the semi-infinite far cell."""
        return len(self.edges)

    @cached_property
    def cell_weights(self) -> np.ndarray:
        """Variance of ``dB`` on each cell (the last entry is the far cell)."""
        a = self.alpha
        far = (self.y_hi - self.edges[0]) ** (2 * a + 1) / (-2 * a - 1)
        return np.append(np.diff(self.edges), far)

    def u_points(self, lo: float, hi: float) -> np.ndarray:
        """Midpoints of the u-cells of ``[lo, hi]``; both ends must be on the mesh."""
        n = (hi - lo) / self.du
        if n < 1 - 1e-9 or abs(n - round(n)) > 1e-9:
            raise ResolutionError(f"[{lo}, {hi}] is not a whole number of u-cells of {self.du}")
        if hi > self.y_hi + 1e-12:
            raise ResolutionError(f"u = {hi} lies beyond the meshed region ({self.y_hi})")
        return lo + self.du * (np.arange(int(round(n))) + 0.5)

    def kernel_matrix(self, u) -> np.ndarray:
        """Cell averages of ``(u_j - y)_+^alpha``; last column is the far cell."""
        u = np.asarray(u, dtype=float)[:, None]
        if u.size * self.n_cells > MAX_KERNEL_ENTRIES:
            raise TractabilityError(f"kernel matrix {u.size} x {self.n_cells} is too large")
        a1 = self.alpha + 1.0
        lo, hi = self.edges[:-1][None, :], self.edges[1:][None, :]
        upper = np.clip(u - lo, 0.0, None) ** a1
        lower = np.clip(u - hi, 0.0, None) ** a1
        avg = (upper - lower) / (a1 * (hi - lo))
        return np.hstack([avg, np.ones((u.shape[0], 1))])


def unit_grid(q: int, H: float, du: float = 2.0 ** -7, **kw) -> KernelGrid:
    return KernelGrid(q=q, H=H, du=du, y_lo=0.0, y_hi=1.0, **kw)


def gram(grid: KernelGrid, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
    B = A if B is None else B
    return (A * grid.cell_weights) @ B.T


def wick_power(x, var, q: int):
    """``s^q He_q(x / s)`` with ``s^2 = var``: the q-fold integral of ``g^{(x) q}``."""
    if q == 0:
        return np.ones_like(x)
    if q == 1:
        return x
    if q == 2:
        return x * x - var
    if q == 3:
        return x * (x * x - 3.0 * var)
    raise UnsupportedOrder(f"q = {q}")


def _second_moment(grid: KernelGrid, d: float, A, B=None) -> float:
    return float(d * d * grid.du ** 2 * math.factorial(grid.q) * np.sum(gram(grid, A, B) ** grid.q))


def calibrate_normalization(grid: KernelGrid, window=(0.0, 1.0), check: bool = True) -> float:
    """``d`` such that the discrete ``E (Z_b - Z_a)^2`` equals ``(b - a)^{2H}``.

    With the default window this is the textbook ``E Z_1^2 = 1``.  When
    ``check`` is set, the grid is refined once (halved steps) and a change of
    more than 1% raises :class:`RefinementError`.
    """
    lo, hi = window
    A = grid.kernel_matrix(grid.u_points(lo, hi))
    d = (hi - lo) ** grid.H / math.sqrt(_second_moment(grid, 1.0, A))
    if check:
        fine = replace(grid, du=grid.du / 2, tail_ratio=math.sqrt(grid.tail_ratio))
        d_fine = calibrate_normalization(fine, window, check=False)
        if abs(d_fine / d - 1.0) > 0.01:
            raise RefinementError(f"d changes by {abs(d_fine / d - 1):.2%} under refinement")
    return d


def calibrated(grid: KernelGrid, window=(0.0, 1.0), check: bool = True) -> KernelGrid:
    return replace(grid, d_qH=calibrate_normalization(grid, window, check))


def _require_d(grid: KernelGrid) -> float:
    if grid.d_qH is None:
        raise DomainError("grid is not calibrated; use calibrated(grid) first")
    return grid.d_qH


def _draw_noise(grid: KernelGrid, reps: int, rng) -> np.ndarray:
    return np.sqrt(grid.cell_weights)[:, None] * rng.standard_normal((grid.n_cells, reps))


def discrete_hermite_sample(grid: KernelGrid, times, reps: int, seed: int) -> np.ndarray:
    """Draws of ``(Z_t)_{t in times}`` on shared noise, shape ``(reps, len(times))``."""
    d = _require_d(grid)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise DomainError("times must be non-negative")
    cut = np.rint(times / grid.du).astype(int)
    if np.any(np.abs(cut * grid.du - times) > 1e-9):
        raise ResolutionError("times must be multiples of du")
    if not cut.any():
        return np.zeros((reps, len(times)))
    u = grid.u_points(0.0, float(times.max()))
    A = grid.kernel_matrix(u)
    var = np.einsum("ij,j,ij->i", A, grid.cell_weights, A)[:, None]
    rng = generator(seed)
    out = np.empty((reps, len(times)))
    for start in range(0, reps, CHUNK):
        n = min(CHUNK, reps - start)
        X = A @ _draw_noise(grid, n, rng)
        csum = np.vstack([np.zeros((1, n)), np.cumsum(wick_power(X, var, grid.q), axis=0)])
        out[start:start + n] = (d * grid.du * csum[cut]).T
    return out


def exact_covariance(grid: KernelGrid, s: float, t: float) -> float:
    """Discrete ``E Z_s Z_t`` from the Gram matrix (no sampling)."""
    d = _require_d(grid)
    As = grid.kernel_matrix(grid.u_points(0.0, s))
    At = grid.kernel_matrix(grid.u_points(0.0, t))
    return _second_moment(grid, d, As, At)


def hermite_covariance(H: float, s, t):
    s, t = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
    return 0.5 * (s ** (2 * H) + t ** (2 * H) - np.abs(t - s) ** (2 * H))


# -- special increments and their decomposition ----------------------------------

@dataclass(frozen=True)
class IncrementLayout:
    """Positions of the special increments and of their windows ``A_{l,N}``."""

    N: int
    gamma: float
    beta: float

    @property
    def n_incr(self) -> int:
        return 2 ** math.floor(self.N ** self.gamma + 1e-12)

    @property
    def back(self) -> int:
        return 2 ** math.floor(self.N ** self.beta + 1e-12)

    def start(self, l: int) -> float:
        return l / self.n_incr

    def window(self, l: int) -> tuple[float, float]:
        h = 2.0 ** -self.N
        return self.start(l) - self.back * h + h, self.start(l) + h

    def windows_disjoint(self) -> bool:
        """``A_{l,N}`` has length ``2^(floor(N^beta) - N)`` and they are ``1/L``
        apart, so they are disjoint iff ``floor(N^beta) + floor(N^gamma) <= N``."""
        return self.back * self.n_incr <= 2 ** self.N


def _check_standing_assumption(layout: IncrementLayout) -> None:
    if layout.N < 2.0 ** (1.0 / (1.0 - layout.beta)):
        warnings.warn(f"N={layout.N} is below 2^(1/(1-beta)) = "
                      f"{2.0 ** (1.0 / (1.0 - layout.beta)):.1f}", stacklevel=3)


def increment_grid(q: int, H: float, layout: IncrementLayout, ls, cells_per_incr: int = 32,
                   **kw) -> KernelGrid:
    """Grid resolving ``2^-N`` with ``cells_per_incr`` cells, uniform over every
    window of the listed increments, calibrated so that ``E dZ^2 = 2^{-2HN}``."""
    if cells_per_incr < 2:
        raise ResolutionError("need at least 2 u-cells per increment")
    if layout.N > 10:
        raise ResolutionError("oracle is desk scale: N <= 10")
    h = 2.0 ** -layout.N
    du = h / cells_per_incr
    lo = min(layout.window(l)[0] for l in ls)
    hi = max(layout.window(l)[1] for l in ls)
    lo = math.floor(lo / du + 1e-9) * du
    grid = KernelGrid(q=q, H=H, du=du, y_lo=lo, y_hi=hi, **kw)
    l0 = ls[0]
    return calibrated(grid, (layout.start(l0), layout.start(l0) + h))


def _split_parts(grid: KernelGrid, layout: IncrementLayout, l: int):
    """Kernel rows of the increment, and the mask of cells inside ``A_{l,N}``."""
    t0 = layout.start(l)
    A = grid.kernel_matrix(grid.u_points(t0, t0 + 2.0 ** -layout.N))
    a_lo, a_hi = layout.window(l)
    mids = np.append(0.5 * (grid.edges[:-1] + grid.edges[1:]), -np.inf)
    inside = (mids > a_lo) & (mids < a_hi)
    return A, inside


def decomposition_moments(grid: KernelGrid, layout: IncrementLayout, l: int) -> dict:
    """Exact discrete second moments of ``dZ``, its windowed part and the rest."""
    d = _require_d(grid)
    A, inside = _split_parts(grid, layout, l)
    At = A * inside
    full = _second_moment(grid, d, A)
    tilde = _second_moment(grid, d, At)
    return {"full": full, "tilde": tilde, "check": full - tilde}


def increment_decomposition(grid: KernelGrid, layout: IncrementLayout, l: int, reps: int,
                            seed: int):
    """Draws of ``(dZ, dZ_tilde, dZ_check)`` on shared noise.

    ``dZ_check`` is computed from its own expansion (mixed Wick products of the
    inside and outside parts), so additivity is a genuine identity check.
    """
    d = _require_d(grid)
    q = grid.q
    A, inside = _split_parts(grid, layout, l)
    Ain, Aout = A * inside, A * ~inside
    w = grid.cell_weights
    v_in = np.einsum("ij,j,ij->i", Ain, w, Ain)[:, None]
    v_out = np.einsum("ij,j,ij->i", Aout, w, Aout)[:, None]
    rng = generator(seed)
    out = np.empty((3, reps))
    for start in range(0, reps, CHUNK):
        n = min(CHUNK, reps - start)
        dB = _draw_noise(grid, n, rng)
        x_in, x_out = Ain @ dB, Aout @ dB
        full = wick_power(x_in + x_out, v_in + v_out, q).sum(axis=0)
        tilde = wick_power(x_in, v_in, q).sum(axis=0)
        check = sum(math.comb(q, r) * wick_power(x_in, v_in, r) * wick_power(x_out, v_out, q - r)
                    for r in range(q)).sum(axis=0)
        out[:, start:start + n] = d * grid.du * np.vstack([full, tilde, check])
    return out[0], out[1], out[2]


def check_part_bound(q: int = 2, H: float = 0.7, beta: float = 0.6, Ns=(4, 5, 6),
                  reps: int = 10_000, seed: int = 0, cells_per_incr: int = 32,
                  max_spread: float = 4.0) -> dict:
    """``E dZ_check^2 / (2^{-2HN} 2^{floor(N^beta)(2H-2)/q})`` across N."""
    rows = []
    for N in Ns:
        layout = IncrementLayout(N, gamma=0.5, beta=beta)
        _check_standing_assumption(layout)
        grid = increment_grid(q, H, layout, [1], cells_per_incr)
        scale = 2.0 ** (-2 * H * N) * 2.0 ** (math.floor(N ** beta + 1e-12) * (2 * H - 2) / q)
        exact = decomposition_moments(grid, layout, 1)["check"]
        _, _, chk = increment_decomposition(grid, layout, 1, reps, seed + N)
        sq = chk ** 2
        rows.append({"N": N, "ratio_exact": exact / scale, "ratio_mc": float(sq.mean() / scale),
                     "ratio_se": float(sq.std(ddof=1) / math.sqrt(reps) / scale)})
    ratios = [r["ratio_mc"] for r in rows]
    spread = max(ratios) / min(ratios)
    return {"rows": rows, "spread": spread, "tolerance": max_spread,
            "passed": bool(np.all(np.isfinite(ratios)) and min(ratios) > 0 and spread <= max_spread)}


def window_part_gap(q: int = 2, H: float = 0.7, beta: float = 0.9, Ns=(4, 5, 6),
                  reps: int = 10_000, seed: int = 0, cells_per_incr: int = 32) -> dict:
    """Gap ``|2^{2HN} E dZ_tilde^2 - 1|`` across N (p = 2).

    The verdict uses the exact discrete moments; the Monte Carlo gap is
    reported alongside with its standard error.
    """
    rows = []
    for N in Ns:
        layout = IncrementLayout(N, gamma=0.5, beta=beta)
        _check_standing_assumption(layout)
        grid = increment_grid(q, H, layout, [1], cells_per_incr)
        norm = 2.0 ** (2 * H * N)
        exact = decomposition_moments(grid, layout, 1)["tilde"]
        _, tilde, _ = increment_decomposition(grid, layout, 1, reps, seed + N)
        sq = norm * tilde ** 2
        rows.append({"N": N, "k": math.floor(N ** beta + 1e-12), "gap_exact": abs(norm * exact - 1),
                     "gap_mc": float(abs(sq.mean() - 1)),
                     "gap_se": float(sq.std(ddof=1) / math.sqrt(reps))})
    gaps = [r["gap_exact"] for r in rows]
    return {"rows": rows, "passed": bool(all(b < a for a, b in zip(gaps, gaps[1:])))}


def independence_check(q: int = 2, H: float = 0.7, gamma: float = 0.5, beta: float = 0.6,
                       N: int = 6, reps: int = 10_000, seed: int = 0,
                       cells_per_incr: int = 32) -> dict:
    """Largest off-diagonal sample correlation among the windowed increments
    and among their squares."""
    layout = IncrementLayout(N, gamma, beta)
    if layout.n_incr > 8:
        raise TractabilityError(f"L = {layout.n_incr} increments; keep L <= 8")
    if not layout.windows_disjoint():
        raise DomainError("the windows A_{l,N} overlap for these (N, gamma, beta)")
    _check_standing_assumption(layout)
    ls = list(range(1, layout.n_incr + 1))
    grid = increment_grid(q, H, layout, ls, cells_per_incr)
    d = _require_d(grid)
    masks, rows, vars_ = [], [], []
    for l in ls:
        A, inside = _split_parts(grid, layout, l)
        Ain = A * inside
        rows.append(Ain)
        vars_.append(np.einsum("ij,j,ij->i", Ain, grid.cell_weights, Ain)[:, None])
        masks.append(inside)
    rng = generator(seed)
    samples = np.empty((reps, len(ls)))
    for start in range(0, reps, CHUNK):
        n = min(CHUNK, reps - start)
        dB = _draw_noise(grid, n, rng)
        for c, (Ain, v) in enumerate(zip(rows, vars_)):
            samples[start:start + n, c] = d * grid.du * wick_power(Ain @ dB, v, q).sum(axis=0)
    off = ~np.eye(len(ls), dtype=bool)
    c1 = float(np.abs(np.corrcoef(samples, rowvar=False)[off]).max())
    c2 = float(np.abs(np.corrcoef(samples ** 2, rowvar=False)[off]).max())
    tol = 3.0 * 4.0 / math.sqrt(reps)
    return {"L": len(ls), "max_corr": c1, "max_corr_sq": c2, "tolerance": tol,
            "disjoint": True, "passed": bool(c1 < tol and c2 < tol)}


def covariance_check(q: int, H: float, pairs=((0.5, 1.0), (1.0, 1.0)), reps: int = 10_000,
                     seed: int = 0, du: float = 2.0 ** -7) -> dict:
    grid = calibrated(unit_grid(q, H, du))
    times = sorted({t for p in pairs for t in p})
    z = discrete_hermite_sample(grid, times, reps, seed)
    col = {t: i for i, t in enumerate(times)}
    rows, ok = [], True
    for s, t in pairs:
        prod = z[:, col[s]] * z[:, col[t]]
        se = float(prod.std(ddof=1) / math.sqrt(reps))
        target = float(hermite_covariance(H, s, t))
        passed = abs(prod.mean() - target) <= 4 * se
        ok &= passed
        rows.append({"s": s, "t": t, "mc": float(prod.mean()), "se": se, "target": target,
                     "exact_discrete": exact_covariance(grid, s, t), "passed": bool(passed)})
    return {"q": q, "H": H, "d_calibrated": grid.d_qH,
            "d_analytic": analytic_normalization(q, H), "rows": rows, "passed": bool(ok)}


# -- product formula on tiny grids -----------------------------------------------

def _check_tensor(f: np.ndarray, w: np.ndarray):
    if f.ndim and any(n != len(w) for n in f.shape):
        raise DomainError("kernel axes must match the number of cells")
    if len(w) > MAX_TENSOR_CELLS:
        raise TractabilityError(f"{len(w)} cells; tensor checks allow <= {MAX_TENSOR_CELLS}")


def symmetrize(f: np.ndarray) -> np.ndarray:
    perms = list(itertools.permutations(range(f.ndim)))
    return sum(np.transpose(f, p) for p in perms) / len(perms)


def contraction(f: np.ndarray, g: np.ndarray, r: int, w: np.ndarray) -> np.ndarray:
    """``f (x)_r g``: contract the last r axes of f with the last r axes of g,
    weighting each shared cell by its length."""
    if r > min(f.ndim, g.ndim):
        raise DomainError("r exceeds the kernel orders")
    f = np.asarray(f, dtype=float)
    for _ in range(r):
        f = f * w
    return np.tensordot(f, g, axes=(list(range(f.ndim - r, f.ndim)),
                                    list(range(g.ndim - r, g.ndim))))


def wick_integral(f: np.ndarray, x: np.ndarray, w: np.ndarray) -> float:
    """Multiple integral of a step kernel: Wick polynomial in the cell
    increments ``x`` (variances ``w``) contracted with the symmetrised ``f``."""
    f = symmetrize(np.asarray(f, dtype=float)) if f.ndim > 1 else np.asarray(f, dtype=float)
    p = f.ndim
    total = 0.0
    for n in range(p // 2 + 1):
        t = f
        for _ in range(n):
            t = np.einsum("ii...->...", t * w.reshape((-1,) + (1,) * (t.ndim - 1)))
        for _ in range(p - 2 * n):
            t = np.tensordot(x, t, axes=(0, 0))
        count = math.comb(p, 2 * n) * math.prod(range(2 * n - 1, 0, -2))
        total += (-1) ** n * count * float(t)
    return total


def product_formula_check(f: np.ndarray, g: np.ndarray, w, reps: int = 20, seed: int = 0):
    """Both sides of ``I_p(f) I_q(g) = sum_r r! C(p,r) C(q,r) I_{p+q-2r}(f (x)_r g)``.

    Returns two arrays (lhs, rhs), one entry per draw of the cell increments.
    """
    w = np.asarray(w, dtype=float)
    f, g = symmetrize(np.asarray(f, float)), symmetrize(np.asarray(g, float))
    _check_tensor(f, w)
    _check_tensor(g, w)
    p, q = f.ndim, g.ndim
    if p + q > 4:
        raise TractabilityError("product-formula checks are limited to p + q <= 4")
    terms = [(math.factorial(r) * math.comb(p, r) * math.comb(q, r), contraction(f, g, r, w))
             for r in range(min(p, q) + 1)]
    rng = generator(seed)
    lhs, rhs = np.empty(reps), np.empty(reps)
    for i in range(reps):
        x = np.sqrt(w) * rng.standard_normal(len(w))
        lhs[i] = wick_integral(f, x, w) * wick_integral(g, x, w)
        rhs[i] = sum(c * (wick_integral(k, x, w) if np.ndim(k) else float(k)) for c, k in terms)
    return lhs, rhs


def additivity_check(q: int = 2, H: float = 0.7, N: int = 5, beta: float = 0.6,
                     reps: int = 1000, seed: int = 0) -> dict:
    layout = IncrementLayout(N, gamma=0.5, beta=beta)
    grid = increment_grid(q, H, layout, [1])
    full, tilde, check = increment_decomposition(grid, layout, 1, reps, seed)
    resid = float(np.abs(full - tilde - check).max())
    tol = 1e-12 * max(1.0, float(np.abs(full).max()))
    return {"max_residual": resid, "tolerance": tol, "passed": resid <= tol}


def product_formula_suite(cells: int = 16, reps: int = 20, seed: int = 0) -> dict:
    """Per-draw identity for (p, q) in {(1,1), (1,2), (2,2), (1,3)} on random
    kernels, plus the vanishing contraction of disjointly supported kernels."""
    rng = generator(seed)
    w = np.full(cells, 1.0 / cells)
    rows, ok = [], True
    for p, q in ((1, 1), (1, 2), (2, 2), (1, 3)):
        f = rng.standard_normal((cells,) * p)
        g = rng.standard_normal((cells,) * q)
        lhs, rhs = product_formula_check(f, g, w, reps, seed + 10 * p + q)
        err = float(np.max(np.abs(lhs - rhs)))
        tol = 1e-9 * max(1.0, float(np.max(np.abs(lhs))))
        ok &= err <= tol
        rows.append({"p": p, "q": q, "max_abs_error": err, "tolerance": tol})
    f, g = np.zeros(cells), np.zeros(cells)
    f[: cells // 2] = rng.standard_normal(cells // 2)
    g[cells // 2:] = rng.standard_normal(cells - cells // 2)
    disjoint = float(contraction(f, g, 1, w))
    ok &= disjoint == 0.0
    return {"rows": rows, "disjoint_contraction": disjoint, "passed": bool(ok)}


SUITES = ("covariance", "decomposition", "independence", "product-formula")


def run_suite(name: str, seed: int = 0, reps: int = 10_000, q: int = 2, H: float = 0.7) -> dict:
    if name == "covariance":
        out = covariance_check(q, H, reps=reps, seed=seed)
    elif name == "decomposition":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            parts = {"additivity": additivity_check(q, H, seed=seed),
                     "check_part_bound": check_part_bound(q, H, reps=reps, seed=seed),
                     "window_part_gap": window_part_gap(q, H, reps=reps, seed=seed)}
        out = {**parts, "warnings": sorted({str(c.message) for c in caught}),
               "passed": all(p["passed"] for p in parts.values())}
    elif name == "independence":
        out = independence_check(q, H, reps=reps, seed=seed)
    elif name == "product-formula":
        out = product_formula_suite(seed=seed)
    else:
        raise DomainError(f"unknown suite {name!r}; choose from {SUITES}")
    return {"suite": name, "seed": seed, **out}
