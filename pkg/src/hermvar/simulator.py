"""Wavelet-type simulation of Hermite processes of order q <= 3.

A path is built from one FARIMA(0, delta, 0) draw with ``delta = (H - 1)/q + 1/2``:
Wick-centred q-fold products ``sigma_k`` of the sequence are weighted by the
product integrals of the fractional Meyer scaling function, summed over the
thin set of index tuples of diameter at most ``floor(2^(eps J))``, and the
partial sums ``s_m`` become the nodes of a piecewise-linear path at times
``t_m = m 2^-J + 2^-(aJ)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import farima
from .errors import CoverageError, DomainError, HorizonError, UnsupportedOrder
from .meyer import WeightTable, cached_weight_table

MAX_ORDER = 3

# "unit": standardised FARIMA and sigma / sqrt(q!), so every diagonal chaos
# coefficient sigma_(k,...,k) has unit variance (reproduces the published
# q = 1 tables).  "raw": unit innovations and unscaled Wick products.
NORMALIZATIONS = ("unit", "raw")


@dataclass(frozen=True)
class HermiteParams:
    q: int
    H: float

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"chaos order must be a positive integer, got {self.q!r}")
        if self.q > MAX_ORDER:
            raise UnsupportedOrder(f"only orders q <= {MAX_ORDER} are supported, got {self.q}")
        if not 0.5 < self.H < 1.0:
            raise DomainError(f"Hurst index must lie in (1/2, 1), got {self.H!r}")

    @property
    def delta(self) -> float:
        return (self.H - 1.0) / self.q + 0.5


@dataclass(frozen=True)
class SimGrid:
    J: int
    a: float = 0.99
    eps: float = 1e-3
    horizon: float = 1.0

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 1:
            raise DomainError(f"resolution J must be a positive integer, got {self.J!r}")
        if not 0.5 < self.a < 1.0:
            raise DomainError(f"a must lie in (1/2, 1), got {self.a!r}")
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        if self.horizon <= 0:
            raise DomainError("horizon must be positive")
        if self.horizon < self.offset + self.m0 * self.step:
            raise HorizonError("horizon ends before the first simulation node")

    @property
    def step(self) -> float:
        return 2.0 ** -self.J

    @property
    def offset(self) -> float:
        return 2.0 ** (-self.a * self.J)

    @property
    def m0(self) -> int:
        return math.ceil(2.0 ** (self.J * (1.0 - self.a)) - 1e-12)

    @property
    def m_max(self) -> int:
        return math.floor((self.horizon - self.offset) / self.step + 1e-9) + 1

    @property
    def max_diff(self) -> int:
        return math.floor(2.0 ** (self.eps * self.J) + 1e-12)

    def node_time(self, m):
        return np.asarray(m) * self.step + self.offset

    @property
    def node_times(self) -> np.ndarray:
        return self.node_time(np.arange(self.m0, self.m_max + 1))


class PiecewiseLinearPath:
    """Continuous path: linear ramp from ``(0, 0)`` to the first node, then
    linear interpolation between uniformly spaced nodes."""

    def __init__(self, first_time: float, step: float, values, horizon: float):
        self.first_time = float(first_time)
        self.step = float(step)
        self.values = np.asarray(values, dtype=float)
        self.horizon = float(horizon)

    @property
    def times(self) -> np.ndarray:
        return self.first_time + self.step * np.arange(len(self.values))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon + 1e-12):
            raise HorizonError(f"evaluation outside [0, {self.horizon}]")
        x = (t - self.first_time) / self.step
        near = np.rint(x)
        snap = np.abs(x - near) < 1e-9
        x = np.where(snap, near, x)
        i = np.clip(np.floor(x).astype(np.int64), 0, len(self.values) - 2)
        frac = x - i
        v = self.values
        inner = v[i] + frac * (v[i + 1] - v[i])
        ramp = v[0] * t / self.first_time
        out = np.where(x < 0, ramp, inner)
        return float(out) if out.ndim == 0 else out


@dataclass
class HermitePath:
    params: HermiteParams
    grid: SimGrid
    node_values: np.ndarray = field(repr=False)
    seed: int

    def __post_init__(self):
        self._path = PiecewiseLinearPath(self.grid.node_time(self.grid.m0), self.grid.step,
                                         self.node_values, self.grid.horizon)

    @property
    def node_times(self) -> np.ndarray:
        return self.grid.node_times

    @property
    def horizon(self) -> float:
        return self.grid.horizon

    # same surface as PiecewiseLinearPath
    @property
    def values(self) -> np.ndarray:
        return self._path.values

    @property
    def times(self) -> np.ndarray:
        return self._path.times

    @property
    def step(self) -> float:
        return self.grid.step

    def __call__(self, t):
        return self._path(t)


def eval_path(path, t):
    return path(t)


# -- sigma coefficients ------------------------------------------------------------

@lru_cache(maxsize=None)
def pairings(q: int):
    """All partitions of ``range(q)`` into unordered pairs and singletons.

    Returns a tuple of ``(pairs, singles)``; the empty pairing comes first.
    """
    out = []

    def rec(rest, pairs):
        if not rest:
            out.append((tuple(pairs), None))
            return
        first, others = rest[0], rest[1:]
        rec(others, pairs)  # first stays a singleton
        for j, other in enumerate(others):
            rec(others[:j] + others[j + 1:], pairs + [(first, other)])

    rec(tuple(range(q)), [])
    result = []
    for pairs, _ in out:
        used = {i for p in pairs for i in p}
        result.append((pairs, tuple(i for i in range(q) if i not in used)))
    return tuple(sorted(result, key=lambda ps: len(ps[0])))


def sigma_generic(zs, cov) -> np.ndarray:
    """Wick product of ``zs[0], ..., zs[q-1]`` over all partial pairings.

    ``cov(i, j)`` returns ``E[Z_i Z_j]`` for the tuple positions ``i, j``.
    """
    q = len(zs)
    total = 0.0
    for pairs, singles in pairings(q):
        term = (-1.0) ** len(pairs)
        for i, j in pairs:
            term = term * cov(i, j)
        for s in singles:
            term = term * zs[s]
        total = total + term
    return total


def sigma_explicit(zs, cov):
    q = len(zs)
    if q == 1:
        return zs[0]
    if q == 2:
        return zs[0] * zs[1] - cov(0, 1)
    if q == 3:
        return (zs[0] * zs[1] * zs[2] - cov(0, 1) * zs[2] - cov(0, 2) * zs[1]
                - cov(1, 2) * zs[0])
    return sigma_generic(zs, cov)


def sequence_covariance(seq: farima.FarimaSequence, unit_variance: bool):
    if unit_variance:
        return lambda lag: farima.autocorrelation(seq.delta, lag)
    return lambda lag: farima.autocovariance(seq.delta, lag)


def sigma_coefficient(params: HermiteParams, seq: farima.FarimaSequence, k,
                      unit_variance: bool = False) -> float:
    """Centred chaos coefficient for the index tuple ``k``.

    ``seq`` must already be on the scale whose covariance is used: raw
    (``unit_variance=False``, covariance ``gamma``) or standardised (``rho``).
    """
    k = tuple(int(x) for x in k)
    if len(k) != params.q:
        raise DomainError(f"tuple length {len(k)} does not match q={params.q}")
    try:
        zs = [float(seq[x]) for x in k]
    except IndexError as exc:
        raise CoverageError(str(exc)) from None
    acov = sequence_covariance(seq, unit_variance)
    return float(sigma_explicit(zs, lambda i, j: acov(k[i] - k[j])))


# -- partial sums -----------------------------------------------------------------

def offset_patterns(q: int, max_diff: int):
    """Sorted offset multisets ``e`` (entries in ``[0, max_diff]``, min 0) with
    the number of distinct orderings of each."""
    out = []
    for e in itertools.combinations_with_replacement(range(max_diff + 1), q):
        if e[0] != 0:
            continue
        counts = [e.count(v) for v in set(e)]
        mult = math.factorial(q)
        for c in counts:
            mult //= math.factorial(c)
        out.append((e, mult))
    return out


def node_contributions(q: int, z: np.ndarray, acov, weights: WeightTable) -> np.ndarray:
    """Weighted sum of ``sigma_k`` over ordered tuples whose largest entry is ``m``.

    ``z`` holds the sequence on indices ``m0, m0+1, ...``; entry ``i`` of the
    result is the contribution for ``m = m0 + i`` (tuples entries must be >= m0).
    """
    n = len(z)
    out = np.zeros(n)
    for e, mult in offset_patterns(q, weights.max_diff):
        # e is ascending with e[0] = 0; tuple entries are m - e_l
        span = e[-1]
        if span >= n:
            continue
        w = weights.entries[tuple(span - x for x in reversed(e[:-1]))] if q > 1 else 1.0
        zs = [z[span - x:n - x] for x in e]
        sig = sigma_explicit(zs, lambda i, j: acov(e[i] - e[j]))
        out[span:] += mult * w * sig
    return out


def _check_normalization(normalization: str) -> bool:
    if normalization not in NORMALIZATIONS:
        raise DomainError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    return normalization == "unit"


def partial_sums(params: HermiteParams, grid: SimGrid, weights: WeightTable,
                 seq: farima.FarimaSequence, normalization: str = "unit") -> np.ndarray:
    """Node values ``s_m`` for ``m = m0 .. m_max``, computed incrementally."""
    unit = _check_normalization(normalization)
    if weights.q != params.q:
        raise DomainError("weight table order does not match q")
    if weights.max_diff != grid.max_diff:
        raise DomainError(f"weight table max_diff {weights.max_diff} != grid {grid.max_diff}")
    if seq.start_index > grid.m0 or seq.stop_index <= grid.m_max:
        raise CoverageError(f"FARIMA indices [{seq.start_index}, {seq.stop_index}) do not "
                            f"cover [{grid.m0}, {grid.m_max}]")
    z = seq.values[grid.m0 - seq.start_index: grid.m_max + 1 - seq.start_index]
    scale = 2.0 ** (-grid.J * params.H)
    if unit:
        z = z / math.sqrt(farima.autocovariance(seq.delta, 0))
        scale /= math.sqrt(math.factorial(params.q))
    acov = sequence_covariance(seq, unit)
    incr = node_contributions(params.q, z, acov, weights)
    return scale * np.cumsum(incr)


def partial_sum_bruteforce(params: HermiteParams, grid: SimGrid, weights: WeightTable,
                           seq: farima.FarimaSequence, m: int,
                           normalization: str = "unit") -> float:
    """``s_m`` by enumerating every admissible tuple (reference implementation)."""
    unit = _check_normalization(normalization)
    scale = 1.0 / math.sqrt(farima.autocovariance(seq.delta, 0)) if unit else 1.0
    scaled = farima.FarimaSequence(seq.values * scale, seq.delta, seq.start_index)
    total = 0.0
    idx = range(grid.m0, m + 1)
    for k in itertools.product(idx, repeat=params.q):
        if max(k) - min(k) > weights.max_diff:
            continue
        total += sigma_coefficient(params, scaled, k, unit) * weights.weight(k)
    out = 2.0 ** (-grid.J * params.H) * total
    return out / math.sqrt(math.factorial(params.q)) if unit else out


def farima_for_grid(params: HermiteParams, grid: SimGrid, seed: int) -> farima.FarimaSequence:
    length = grid.m_max - grid.m0 + 1
    return farima.generate(farima.FarimaParams(params.delta, length, seed), start_index=grid.m0)


def build_path(params: HermiteParams, grid: SimGrid, seed: int,
               weights: WeightTable | None = None, normalization: str = "unit",
               cache_dir=None) -> HermitePath:
    """Simulate one path of the approximating process on ``[0, grid.horizon]``."""
    if weights is None:
        weights = cached_weight_table(params.q, params.delta, grid.max_diff, cache_dir=cache_dir)
    seq = farima_for_grid(params, grid, seed)
    values = partial_sums(params, grid, weights, seq, normalization)
    return HermitePath(params=params, grid=grid, node_values=values, seed=int(seed))


def fbm_path(hurst: float, n_steps_log2: int, horizon: float, seed: int) -> PiecewiseLinearPath:
    """Exact fractional Brownian motion on the dyadic grid of step ``2^-n``,
    linearly interpolated; used as the exact q = 1 reference path."""
    step = 2.0 ** -n_steps_log2
    n = int(math.ceil(horizon / step - 1e-9))
    incs = farima.generate_fgn(hurst, n, seed) * step ** hurst
    return PiecewiseLinearPath(step, step, np.cumsum(incs), n * step)
