"""Integrated volatility of ``X_t = int_0^t h(s) dZ_s`` from simulated paths."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .simulator import HermitePath, PiecewiseLinearPath
from .variations import (VariationConfig, WeightFn, centered_stat, modified_power_variation,
                         special_increments)


def build_X_path(path: HermitePath | PiecewiseLinearPath, h: WeightFn) -> PiecewiseLinearPath:
    """Riemann-Stieltjes approximant on the nodes of ``path``.

    ``X(t_m) = h(0) s_m0 + sum_{k=m0}^{m-1} h(t_k) (s_{k+1} - s_k)``, linear in
    between, and the ramp ``h(0) s_m0 t / t_m0`` before the first node.
    """
    s = np.asarray(path.values, dtype=float)
    t = path.times
    steps = h(t[:-1]) * np.diff(s)
    values = np.empty_like(s)
    values[0] = float(h(0.0)) * s[0]
    values[1:] = values[0] + np.cumsum(steps)
    return PiecewiseLinearPath(t[0], path.step, values, path.horizon)


def estimate_integrated_volatility(x_path, cfg: VariationConfig, H: float) -> float:
    return modified_power_variation(special_increments(x_path, cfg), cfg, H)


_CLOSED_P2 = {
    "identity": 1.0 / 3.0,
    "cube": 1.0 / 7.0,
    "exp": (math.e ** 2 - 1.0) / 2.0,
    "sqrt": 0.5,
}


def target_value(h: WeightFn, p: int, mu_p: float) -> float:
    """``mu_p int_0^1 h(s)^p ds``."""
    if p == 2 and h.name in _CLOSED_P2:
        return mu_p * _CLOSED_P2[h.name]
    if h.name == "const":
        return mu_p * h.constant ** p
    val, _ = integrate.quad(lambda s: float(h(s)) ** p, 0.0, 1.0, limit=200)
    return mu_p * val


def centered_volatility_stat(S_value: float, cfg: VariationConfig, target: float) -> float:
    return centered_stat(S_value, cfg, target)
