"""Modified (special-increment) power variations and their moment constants.

Only ``L = 2^floor(N^gamma)`` increments of length ``2^-N``, anchored at
``l / L`` for ``l = 1..L``, enter the statistics.  Powers are signed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, HorizonError


@dataclass(frozen=True)
class VariationConfig:
    N: int
    gamma: float = 0.95
    p: int = 2

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p!r}")

    @property
    def log2_L(self) -> int:
        return math.floor(self.N ** self.gamma + 1e-12)

    @property
    def L(self) -> int:
        return 2 ** self.log2_L

    @property
    def anchors(self) -> np.ndarray:
        return np.arange(1, self.L + 1) / self.L

    @property
    def horizon(self) -> float:
        return 1.0 + 2.0 ** -self.N


# -- weight functions -------------------------------------------------------------

@dataclass(frozen=True)
class WeightFn:
    name: str
    fn: Callable = field(repr=False, compare=False)
    holder_alpha: float = 1.0
    constant: float | None = None

    def __call__(self, s):
        return self.fn(np.asarray(s, dtype=float))


def const_fn(c: float) -> WeightFn:
    return WeightFn("const", lambda s: np.full_like(s, float(c), dtype=float), 1.0, float(c))


def table_fn(grid, values, holder_alpha: float = 1.0) -> WeightFn:
    """Custom weight given by samples on ``[0, 1]``, linearly interpolated."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    return WeightFn("custom-table", lambda s: np.interp(s, grid, values), holder_alpha)


BUILTIN_WEIGHTS = {
    "identity": WeightFn("identity", lambda s: s, 1.0),
    "cube": WeightFn("cube", lambda s: s ** 3, 1.0),
    "exp": WeightFn("exp", np.exp, 1.0),
    "sqrt": WeightFn("sqrt", np.sqrt, 0.5),
    "one": const_fn(1.0),
}


def weight_fn(name: str) -> WeightFn:
    """Look up a built-in weight; ``const:<c>`` gives the constant ``c``."""
    if name.startswith("const"):
        _, _, c = name.partition(":")
        return const_fn(float(c) if c else 1.0)
    try:
        return BUILTIN_WEIGHTS[name]
    except KeyError:
        raise DomainError(f"unknown weight function {name!r}; "
                          f"choose from {sorted(BUILTIN_WEIGHTS)} or const:<c>") from None


# -- statistics -------------------------------------------------------------------

def special_increments(path, cfg: VariationConfig) -> np.ndarray:
    """``Z(l/L + 2^-N) - Z(l/L)`` for ``l = 1..L``."""
    horizon = getattr(path, "horizon", math.inf)
    if horizon < cfg.horizon - 1e-12:
        raise HorizonError(f"path horizon {horizon} < 1 + 2^-N = {cfg.horizon}")
    left = cfg.anchors
    return np.asarray(path(left + 2.0 ** -cfg.N)) - np.asarray(path(left))


def modified_power_variation(incs, cfg: VariationConfig, H: float) -> float:
    incs = np.asarray(incs, dtype=float)
    return float(2.0 ** (cfg.p * H * cfg.N) * np.mean(incs ** cfg.p))


def centered_stat(S_value: float, cfg: VariationConfig, mu_p: float) -> float:
    return math.sqrt(cfg.L) * (S_value - mu_p)


def weighted_variation(incs, cfg: VariationConfig, H: float, h: WeightFn, mu_p: float) -> float:
    incs = np.asarray(incs, dtype=float)
    scale = 2.0 ** (cfg.p * H * cfg.N)
    centred = scale * incs ** cfg.p - mu_p
    return float(np.sum(h(cfg.anchors) * centred) / math.sqrt(cfg.L))


# -- moments ------------------------------------------------------------------------

def gaussian_moment(p: int) -> float:
    """``E G^p`` for a standard normal ``G``."""
    if p % 2:
        return 0.0
    return float(math.prod(range(p - 1, 0, -2))) if p else 1.0


@dataclass(frozen=True)
class MomentTable:
    q: int
    p: int
    mu_p: float
    m_p: float
    source: str
    mu_se: float = 0.0
    m_se: float = 0.0
    n_samples: int = 0


@dataclass(frozen=True)
class MomentMcConfig:
    J: int = 12
    reps: int = 400
    base_seed: int = 0
    a: float = 0.99
    eps: float = 1e-3


def hermite_one_samples(q: int, H: float, mc: MomentMcConfig) -> np.ndarray:
    from ._rng import replication_seed
    from .simulator import HermiteParams, SimGrid, build_path

    params = HermiteParams(q, H)
    grid = SimGrid(J=mc.J, a=mc.a, eps=mc.eps, horizon=1.0)
    return np.array([build_path(params, grid, replication_seed(mc.base_seed, r))(1.0)
                     for r in range(mc.reps)])


def moment_mu(q: int, p: int, H: float, mc: MomentMcConfig | None = None) -> tuple[float, str]:
    """``mu_p`` alone, skipping the Monte Carlo whenever a closed form exists."""
    if q == 1:
        return gaussian_moment(p), "closed_form"
    if p == 2:
        return 1.0, "closed_form"
    tab = moment_table(q, p, H, mc)
    return tab.mu_p, tab.source


def moment_table(q: int, p: int, H: float, mc: MomentMcConfig | None = None,
                 samples: np.ndarray | None = None) -> MomentTable:
    """``mu_p = E Z_1^p`` and ``m_p = Var Z_1^p``.

    Closed form for q = 1 (Gaussian moments).  For q > 1 only ``mu_2 = 1`` is
    known; everything else is estimated from simulated ``Z_1`` values, with
    standard errors.
    """
    if q == 1:
        mu = gaussian_moment(p)
        return MomentTable(q, p, mu, gaussian_moment(2 * p) - mu ** 2, "closed_form")
    if samples is None:
        samples = hermite_one_samples(q, H, mc or MomentMcConfig())
    x = np.asarray(samples, dtype=float) ** p
    n = len(x)
    m = float(np.var(x, ddof=1))
    # delta-method standard error of the sample variance
    m_se = float(np.std((x - x.mean()) ** 2, ddof=1) / math.sqrt(n))
    if p == 2:
        return MomentTable(q, p, 1.0, m, "monte_carlo", 0.0, m_se, n)
    return MomentTable(q, p, float(x.mean()), m, "monte_carlo",
                       float(x.std(ddof=1) / math.sqrt(n)), m_se, n)
