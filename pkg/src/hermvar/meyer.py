"""Meyer fractional scaling function and the simulator's product-integral weights.

Fourier convention: ``f_hat(xi) = int f(s) exp(-i xi s) ds``; the inverse carries
``1 / (2 pi)``.  The fractional scaling function is band limited to
``|xi| < 4 pi / 3``, so it is synthesised exactly (up to aliasing from a
far-away period) by an inverse FFT on a padded grid.
"""

from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import DomainError, NyquistViolation, UnsupportedOrder

TWO_PI_3 = 2.0 * np.pi / 3.0
FOUR_PI_3 = 4.0 * np.pi / 3.0

DEFAULT_HALFWIDTH = 64.0
DEFAULT_DS = 2.0 ** -8
# period of the synthesis grid, in multiples of the window width 2 S
PAD_FACTOR = 4


def meyer_nu(x):
    """Degree-7 auxiliary polynomial: 0 below 0, 1 above 1, ``nu(x) + nu(1 - x) = 1``."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x ** 4 * (35.0 - 84.0 * x + 70.0 * x ** 2 - 20.0 * x ** 3)


def hat_phi(xi):
    """Fourier transform of the Meyer scaling function."""
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.where(a <= TWO_PI_3, 1.0,
                   np.cos(0.5 * np.pi * meyer_nu(3.0 * a / (2.0 * np.pi) - 1.0)))
    out = np.where(a >= FOUR_PI_3, 0.0, out)
    return float(out) if out.ndim == 0 else out


def hat_phi_delta(xi, delta: float):
    """Fourier transform of the fractional scaling function of order ``delta``.

    ``((1 - exp(-i xi)) / (i xi)) ** delta`` is written as
    ``exp(-i delta xi / 2) * sinc(xi / 2) ** delta``; on the support the
    sinc factor is positive and the phase stays in ``(-pi, pi)``, which is the
    principal branch.
    """
    xi = np.asarray(xi, dtype=float)
    half = 0.5 * xi
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(half == 0.0, 1.0, np.sin(half) / np.where(half == 0.0, 1.0, half))
    support = np.abs(xi) < FOUR_PI_3
    mag = np.where(support, np.abs(sinc) ** delta, 0.0)
    out = np.exp(-0.5j * delta * xi) * mag * hat_phi(xi)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MeyerProfile:
    delta: float
    xi: np.ndarray = field(repr=False)
    hat_values: np.ndarray = field(repr=False)
    dxi: float
    s: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    ds: float
    halfwidth: float

    @property
    def steps_per_unit(self) -> int:
        return int(round(1.0 / self.ds))

    def __call__(self, s):
        """Linear interpolation of the tabulated profile (zero outside the window)."""
        return np.interp(s, self.s, self.values, left=0.0, right=0.0)

    def integral(self) -> float:
        return float(self.ds * self.values.sum())


def build_profile(delta: float, spatial_halfwidth: float = DEFAULT_HALFWIDTH,
                  ds: float = DEFAULT_DS) -> MeyerProfile:
    """Tabulate the fractional scaling function on ``[-S, S]`` with step ``ds``.

    ``1 / ds`` must be an integer so integer shifts land on grid points.
    """
    if not 0.0 <= delta < 0.5:
        raise DomainError(f"delta must lie in [0, 1/2), got {delta!r}")
    if np.pi / ds <= FOUR_PI_3:
        raise NyquistViolation(f"ds={ds} puts the Nyquist frequency below 4 pi / 3")
    per_unit = 1.0 / ds
    if abs(per_unit - round(per_unit)) > 1e-9:
        raise DomainError("1 / ds must be an integer")
    half_n = int(round(spatial_halfwidth * per_unit))
    n = 1 << int(np.ceil(np.log2(PAD_FACTOR * 2 * half_n)))
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=ds)
    hat = hat_phi_delta(xi, delta)
    raw = np.fft.ifft(hat) / ds
    if np.max(np.abs(raw.imag)) > 1e-10:
        raise ArithmeticError("synthesised profile is not real")
    values = np.concatenate([raw.real[n - half_n:], raw.real[:half_n + 1]])
    s = np.arange(-half_n, half_n + 1) * ds
    keep = np.abs(xi) < FOUR_PI_3
    order = np.argsort(xi[keep])
    return MeyerProfile(delta=float(delta), xi=xi[keep][order], hat_values=hat[keep][order],
                        dxi=2.0 * np.pi / (n * ds), s=s, values=values, ds=float(ds),
                        halfwidth=half_n * ds)


def pair_weight_parseval(delta: float, d: int) -> float:
    """``int Phi(s) Phi(s - d) ds`` through Parseval: ``(1/pi) int_0^{4pi/3} |hat|^2 cos(d xi)``."""
    f = lambda x: abs(hat_phi_delta(x, delta)) ** 2 * np.cos(d * x)
    pieces = [(0.0, TWO_PI_3), (TWO_PI_3, FOUR_PI_3)]
    total = sum(integrate.quad(f, a, b, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
                for a, b in pieces)
    return total / np.pi


def difference_vectors(q: int, max_diff: int):
    """Sorted difference vectors ``(d_2, ..., d_q)`` with ``0 <= d_2 <= ... <= max_diff``."""
    return list(itertools.combinations_with_replacement(range(max_diff + 1), q - 1))


@dataclass(frozen=True)
class WeightTable:
    q: int
    delta: float
    max_diff: int
    entries: dict
    ds: float = DEFAULT_DS
    halfwidth: float = DEFAULT_HALFWIDTH

    def __len__(self) -> int:
        return len(self.entries)

    def key(self, ks) -> tuple:
        ks = sorted(int(k) for k in ks)
        return tuple(k - ks[0] for k in ks[1:])

    def weight(self, ks) -> float:
        """Weight of an index tuple; depends only on its sorted differences."""
        return self.entries[self.key(ks)]


def product_integral(profile: MeyerProfile, shifts) -> float:
    """``int prod_l Phi(s - k_l) ds`` by grid summation (shifts are integers)."""
    per_unit = profile.steps_per_unit
    n = len(profile.values)
    prod = np.ones(n)
    for k in shifts:
        j = int(k) * per_unit
        shifted = np.zeros(n)
        if j >= 0:
            shifted[j:] = profile.values[:n - j]
        else:
            shifted[:n + j] = profile.values[-j:]
        prod *= shifted
    return float(profile.ds * prod.sum())


def build_weight_table(q: int, profile: MeyerProfile, max_diff: int) -> WeightTable:
    if q not in (1, 2, 3):
        raise UnsupportedOrder(f"weight tables exist only for q in {{1, 2, 3}}, got {q}")
    if max_diff < 0:
        raise DomainError("max_diff must be non-negative")
    if q == 1:
        entries = {(): 1.0}
    else:
        entries = {d: product_integral(profile, (0,) + d) for d in difference_vectors(q, max_diff)}
    return WeightTable(q=q, delta=profile.delta, max_diff=int(max_diff), entries=entries,
                       ds=profile.ds, halfwidth=profile.halfwidth)


# -- persistence ---------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get("HERMVAR_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "hermvar"


def _cache_name(q, delta, max_diff, ds, halfwidth) -> str:
    tag = f"{q}|{float(delta)!r}|{max_diff}|{float(ds)!r}|{float(halfwidth)!r}"
    return f"weights_q{q}_{hashlib.sha1(tag.encode()).hexdigest()[:16]}.csv"


def save_weight_table(table: WeightTable, path) -> None:
    """CSV with ``#`` header lines, then one row ``d_2,...,d_q,weight`` per entry."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [f"d{i}" for i in range(2, table.q + 1)] + ["weight"]
    lines = [f"# q={table.q}", f"# delta={table.delta!r}", f"# ds={table.ds!r}",
             f"# S={table.halfwidth!r}", f"# max_diff={table.max_diff}", ",".join(cols)]
    for d, w in sorted(table.entries.items()):
        lines.append(",".join([str(x) for x in d] + [repr(float(w))]))
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def load_weight_table(path) -> WeightTable:
    meta, rows = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            k, v = line[1:].strip().split("=", 1)
            meta[k] = v
        elif line and not line.startswith("d") and not line.startswith("weight"):
            rows.append(line.split(","))
    q = int(meta["q"])
    entries = {tuple(int(x) for x in r[:-1]): float(r[-1]) for r in rows}
    return WeightTable(q=q, delta=float(meta["delta"]), max_diff=int(meta["max_diff"]),
                       entries=entries, ds=float(meta["ds"]), halfwidth=float(meta["S"]))


def cached_weight_table(q: int, delta: float, max_diff: int, ds: float = DEFAULT_DS,
                        halfwidth: float = DEFAULT_HALFWIDTH, cache_dir=None) -> WeightTable:
    """Build a weight table once per parameter set and reuse it from disk afterwards."""
    if q == 1:
        return WeightTable(q=1, delta=delta, max_diff=max_diff, entries={(): 1.0},
                           ds=ds, halfwidth=halfwidth)
    path = Path(cache_dir or default_cache_dir()) / _cache_name(q, delta, max_diff, ds, halfwidth)
    if path.exists():
        try:
            return load_weight_table(path)
        except (OSError, ValueError, KeyError):
            pass
    table = build_weight_table(q, build_profile(delta, halfwidth, ds), max_diff)
    try:
        save_weight_table(table, path)
    except OSError:
        pass
    return table
