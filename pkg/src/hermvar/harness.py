"""Monte Carlo runner, normality diagnostics and CLT sweeps."""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from ._rng import generator, replication_seed
from .errors import DegenerateSample, DomainError, HermvarError
from .meyer import cached_weight_table
from .simulator import HermiteParams, SimGrid, build_path, fbm_path
from .variations import (VariationConfig, centered_stat, modified_power_variation,
                         moment_table, special_increments, weight_fn, weighted_variation)
from .volatility import build_X_path, estimate_integrated_volatility, target_value

THREADS_ENV = "HERMVAR_THREADS"
SCHEMA_VERSION = 1

# Published m / s values for the identity (gamma 0.8 and 0.95), cube, exp and
# sqrt weights at J = 18, N = 17; rows q = 1..3, columns H = 0.6..0.9.
REFERENCE_HS = (0.6, 0.7, 0.8, 0.9)
REFERENCE = {
    ("identity", 0.8): {
        "m": [[0.295, 0.291, 0.298, 0.307], [0.374, 0.370, 0.331, 0.344],
              [0.392, 0.388, 0.347, 0.343]],
        "s": [[0.024, 0.025, 0.024, 0.023], [0.065, 0.075, 0.071, 0.070],
              [0.159, 0.212, 0.161, 0.053]]},
    ("identity", 0.95): {
        "m": [[0.291, 0.290, 0.296, 0.306], [0.386, 0.364, 0.345, 0.351],
              [0.412, 0.383, 0.350, 0.346]],
        "s": [[0.003, 0.003, 0.005, 0.013], [0.017, 0.018, 0.026, 0.034],
              [0.049, 0.051, 0.046, 0.026]]},
    ("cube", 0.95): {
        "m": [[0.125, 0.124, 0.127, 0.131], [0.166, 0.155, 0.147, 0.147],
              [0.174, 0.164, 0.148, 0.147]],
        "s": [[0.002, 0.002, 0.003, 0.008], [0.011, 0.012, 0.019, 0.021],
              [0.032, 0.033, 0.031, 0.017]]},
    ("exp", 0.95): {
        "m": [[2.983, 2.803, 2.926, 3.268], [3.696, 3.501, 3.323, 3.397],
              [3.974, 3.682, 3.394, 3.335]],
        "s": [[0.032, 0.027, 0.038, 0.093], [0.135, 0.140, 0.172, 0.242],
              [0.355, 0.346, 0.317, 0.173]]},
    ("sqrt", 0.95): {
        "m": [[0.437, 0.436, 0.472, 0.459], [0.578, 0.547, 0.519, 0.531],
              [0.622, 0.575, 0.530, 0.521]],
        "s": [[0.005, 0.004, 0.006, 0.015], [0.020, 0.023, 0.027, 0.040],
              [0.057, 0.058, 0.052, 0.029]]},
}


def reference_cell(h: str, gamma: float, q: int, H: float) -> tuple[float, float] | None:
    table = REFERENCE.get((h, round(gamma, 4)))
    if table is None or H not in REFERENCE_HS:
        return None
    j = REFERENCE_HS.index(H)
    return table["m"][q - 1][j], table["s"][q - 1][j]


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentConfig:
    qs: tuple = (1,)
    hs: tuple = REFERENCE_HS
    J: int = 18
    a: float = 0.99
    eps: float = 1e-3
    N: int = 17
    gamma: float = 0.95
    p: int = 2
    h: str = "identity"
    reps: int = 100
    base_seed: int = 0
    normalization: str = "unit"

    def __post_init__(self):
        if self.reps < 1:
            raise DomainError("reps must be >= 1")
        if not self.qs or not self.hs:
            raise DomainError("need at least one q and one H")
        for q in self.qs:
            for H in self.hs:
                HermiteParams(q, H)
        VariationConfig(self.N, self.gamma, self.p)
        weight_fn(self.h)
        self.grid

    @classmethod
    def reduced(cls, **kw) -> "ExperimentConfig":
        """Fast preset: J = 14, N = 13."""
        return cls(**{"J": 14, "N": 13, **kw})

    @property
    def variation(self) -> VariationConfig:
        return VariationConfig(self.N, self.gamma, self.p)

    @property
    def grid(self) -> SimGrid:
        return SimGrid(J=self.J, a=self.a, eps=self.eps, horizon=1.0 + 2.0 ** -self.N)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["qs"], d["hs"] = list(self.qs), list(self.hs)
        return d


@dataclass(frozen=True)
class CellResult:
    q: int
    H: float
    values: list
    seeds: list
    errors: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def ok_values(self) -> np.ndarray:
        v = np.asarray(self.values, dtype=float)
        return v[np.isfinite(v)]

    @property
    def mean(self) -> float:
        v = self.ok_values
        return float(v.mean()) if len(v) else math.nan

    @property
    def std(self) -> float:
        v = self.ok_values
        return float(v.std(ddof=1)) if len(v) > 1 else math.nan

    @property
    def status(self) -> str:
        return "ok" if not self.errors else "partial"


@dataclass(frozen=True)
class McReport:
    config: ExperimentConfig
    cells: tuple
    status: str = "complete"
    started: str = ""
    wall_clock: float = 0.0

    def cell(self, q: int, H: float) -> CellResult:
        for c in self.cells:
            if c.q == q and c.H == H:
                return c
        raise KeyError((q, H))

    def payload(self) -> dict:
        """Deterministic content; every timing field lives under ``timing``."""
        cells = []
        for c in self.cells:
            cells.append({"q": c.q, "H": c.H, "mean": finite_or_none(c.mean),
                          "std": finite_or_none(c.std), "status": c.status,
                          "n_failed": len(c.errors), "errors": c.errors,
                          "values": [finite_or_none(v) for v in c.values],
                          "seeds": c.seeds})
        return {
            "schema_version": SCHEMA_VERSION,
            "toolkit_version": __version__,
            "status": self.status,
            "config": self.config.to_dict(),
            "cells": cells,
            "timing": {"started": self.started, "wall_clock_s": self.wall_clock,
                       "cells": {f"q={c.q},H={c.H}": c.runtime for c in self.cells}},
        }

    def write_json(self, path) -> None:
        _write_text(path, dumps(self.payload()))

    def table_rows(self) -> list[list[str]]:
        """Rows q with m / s sub-rows, columns H, three decimals."""
        hs = list(self.config.hs)
        rows = [["q", "stat"] + [f"H={H}" for H in hs]]
        for q in self.config.qs:
            done = {c.H: c for c in self.cells if c.q == q}
            for name in ("m", "s"):
                row = [str(q), name]
                for H in hs:
                    c = done.get(H)
                    val = None if c is None else (c.mean if name == "m" else c.std)
                    row.append("" if val is None or not math.isfinite(val) else f"{val:.3f}")
                rows.append(row)
        return rows

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(self.table_rows())


def finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# -- replication workers ------------------------------------------------------------

def _one_rep(task):
    cfg, q, H, seed, weights = task
    try:
        path = build_path(HermiteParams(q, H), cfg.grid, seed, weights=weights,
                          normalization=cfg.normalization)
        x = build_X_path(path, weight_fn(cfg.h))
        return estimate_integrated_volatility(x, cfg.variation, H), None
    except (HermvarError, ArithmeticError, ValueError) as exc:
        return math.nan, f"rep seed {seed}: {type(exc).__name__}: {exc}"


def map_reps(fn, tasks, threads: int):
    """Ordered map over replications, in a process pool when threads > 1."""
    if threads <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


def run_cell(cfg: ExperimentConfig, q: int, H: float, threads: int = 1,
             cache_dir=None) -> CellResult:
    params = HermiteParams(q, H)
    weights = cached_weight_table(q, params.delta, cfg.grid.max_diff, cache_dir=cache_dir)
    seeds = [replication_seed(cfg.base_seed, r) for r in range(cfg.reps)]
    t0 = time.perf_counter()
    out = map_reps(_one_rep, [(cfg, q, H, s, weights) for s in seeds], threads)
    return CellResult(q=q, H=H, values=[float(v) for v, _ in out], seeds=seeds,
                      errors=[e for _, e in out if e], runtime=time.perf_counter() - t0)


def run_table(cfg: ExperimentConfig, threads: int = 1, json_path=None, csv_path=None,
              cache_dir=None) -> McReport:
    """Every (q, H) cell of the experiment; partial results are written if a
    cell raises."""
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    cells = []
    status = "complete"
    try:
        for q in cfg.qs:
            for H in cfg.hs:
                cells.append(run_cell(cfg, q, H, threads, cache_dir))
    except BaseException:
        status = "aborted"
        raise
    finally:
        report = McReport(cfg, tuple(cells), status, started, time.perf_counter() - t0)
        if json_path:
            report.write_json(json_path)
        if csv_path:
            report.write_csv(csv_path)
    return report


# -- normality diagnostics -----------------------------------------------------------

def normality_diagnostics(sample, target_sd: float = 1.0) -> dict:
    """KS distance and order-statistic Wasserstein-1 distance to ``N(0, target_sd^2)``."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if n < 30:
        raise DomainError(f"need at least 30 observations, got {n}")
    if target_sd <= 0:
        raise DomainError("target_sd must be positive")
    if np.ptp(x) == 0.0:
        raise DegenerateSample("sample has zero variance")
    ks = stats.kstest(x / target_sd, "norm").statistic
    q = target_sd * stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return {"ks_stat": float(ks), "wasserstein1": float(np.mean(np.abs(x - q))), "n": n}


def bootstrap_w1_se(sample, target_sd: float, n_boot: int = 200, seed: int = 0) -> float:
    x = np.asarray(sample, dtype=float)
    rng = generator(seed)
    idx = rng.integers(0, len(x), size=(n_boot, len(x)))
    w = [normality_diagnostics(x[i], target_sd)["wasserstein1"] for i in idx]
    return float(np.std(w, ddof=1))


# -- CLT sweeps ---------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    Ns: tuple = (11, 13, 15)
    q: int = 1
    H: float = 0.7
    gamma: float = 0.95
    p: int = 2
    stat: str = "V"
    h: str = "identity"
    reps: int = 500
    base_seed: int = 0
    J: int | None = None
    a: float = 0.99
    eps: float = 1e-3

    def __post_init__(self):
        if self.stat not in ("V", "U"):
            raise DomainError("stat must be V or U")
        if not self.Ns:
            raise DomainError("need at least one N")
        if self.reps < 30:
            raise DomainError("a sweep needs at least 30 replications")
        HermiteParams(self.q, self.H)
        for N in self.Ns:
            VariationConfig(N, self.gamma, self.p)
        weight_fn(self.h)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["Ns"] = list(self.Ns)
        return d


def _sweep_rep(task):
    """Statistics at every N from one path (coupled across N)."""
    cfg, seed, mu_p = task
    n_max = max(cfg.Ns)
    horizon = 1.0 + 2.0 ** -min(cfg.Ns)
    if cfg.q == 1 and cfg.J is None:
        # exact fBm on the finest dyadic grid any N needs
        path = fbm_path(cfg.H, n_max, horizon, seed)
    else:
        J = cfg.J or n_max + 1
        grid = SimGrid(J=J, a=cfg.a, eps=cfg.eps, horizon=horizon)
        path = build_path(HermiteParams(cfg.q, cfg.H), grid, seed)
    out = []
    for N in cfg.Ns:
        vc = VariationConfig(N, cfg.gamma, cfg.p)
        incs = special_increments(path, vc)
        if cfg.stat == "V":
            out.append(centered_stat(modified_power_variation(incs, vc, cfg.H), vc, mu_p))
        else:
            out.append(weighted_variation(incs, vc, cfg.H, weight_fn(cfg.h), mu_p))
    return out


def clt_sweep(cfg: SweepConfig, threads: int = 1) -> dict:
    """Normality diagnostics of V (or U) at each N; W1 must not increase by
    more than one combined bootstrap standard error between consecutive N."""
    mom = moment_table(cfg.q, cfg.p, cfg.H)
    h = weight_fn(cfg.h)
    limit_var = mom.m_p * (1.0 if cfg.stat == "V" else target_value(h, 2, 1.0))
    seeds = [replication_seed(cfg.base_seed, r) for r in range(cfg.reps)]
    vals = np.asarray(map_reps(_sweep_rep, [(cfg, s, mom.mu_p) for s in seeds], threads))
    rows = []
    sd = math.sqrt(limit_var)
    for i, N in enumerate(cfg.Ns):
        x = vals[:, i]
        diag = normality_diagnostics(x, sd)
        diag.update({"N": N, "L": VariationConfig(N, cfg.gamma, cfg.p).L,
                     "mean": float(x.mean()), "variance": float(x.var(ddof=1)),
                     "w1_se": bootstrap_w1_se(x, sd, seed=cfg.base_seed + N)})
        rows.append(diag)
    monotone = all(b["wasserstein1"] <= a["wasserstein1"] + math.hypot(a["w1_se"], b["w1_se"])
                   for a, b in zip(rows, rows[1:]))
    return {"schema_version": SCHEMA_VERSION, "toolkit_version": __version__,
            "config": cfg.to_dict(), "limit_variance": limit_var, "moment_source": mom.source,
            "rows": rows, "w1_non_increasing": bool(monotone),
            "values": vals.tolist(), "seeds": seeds}
