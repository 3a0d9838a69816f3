"""Exact simulation of the Gaussian FARIMA(0, delta, 0) sequence.

The sequence is ``Z_l = sum_{p >= 0} psi_p g_{l-p}`` with i.i.d. standard normal
innovations ``g`` and moving-average coefficients
``psi_p = delta Gamma(p + delta) / (Gamma(p + 1) Gamma(delta + 1))`` (``psi_0 = 1``).
Draws are produced by circulant embedding of the Toeplitz covariance, which
is exact up to floating point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from ._rng import generator
from .errors import DomainError, NonPositiveEigenvalue

logger = logging.getLogger(__name__)

EIGEN_CLIP_RTOL = 1e-8
MAX_EMBED_DOUBLINGS = 4


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 < delta < 0.5:
        raise DomainError(f"memory order delta must lie in (0, 1/2), got {delta!r}")
    return delta


@dataclass(frozen=True)
class FarimaParams:
    delta: float
    length: int
    seed: int = 0

    def __post_init__(self):
        _check_delta(self.delta)
        if int(self.length) < 1:
            raise DomainError(f"length must be >= 1, got {self.length!r}")


@dataclass(frozen=True)
class FarimaSequence:
    """A block of consecutive FARIMA values ``Z_start, ..., Z_{start+n-1}``."""

    values: np.ndarray = field(repr=False)
    delta: float
    start_index: int = 0

    def __len__(self) -> int:
        return len(self.values)

    @property
    def stop_index(self) -> int:
        return self.start_index + len(self.values)

    def __getitem__(self, index):
        """Look up values by lattice index (not by array position)."""
        idx = np.asarray(index) - self.start_index
        if np.any(idx < 0) or np.any(idx >= len(self.values)):
            raise IndexError(
                f"index {index!r} outside [{self.start_index}, {self.stop_index})")
        return self.values[idx]


def ma_coefficient(delta: float, p: int) -> float:
    """Moving-average coefficient ``psi_p`` of the fractional integration filter."""
    delta = _check_delta(delta)
    if p < 0:
        raise DomainError("p must be non-negative")
    if p == 0:
        return 1.0
    return float(np.exp(np.log(delta) + gammaln(p + delta) - gammaln(p + 1.0)
                        - gammaln(delta + 1.0)))


def autocovariance(delta: float, lag):
    """Autocovariance ``E[Z_l Z_{l+k}]`` for unit-variance innovations.

    Closed form ``Gamma(1-2d) Gamma(k+d) / (Gamma(d) Gamma(1-d) Gamma(k+1-d))``,
    evaluated through log-gamma so large lags do not overflow.  ``lag`` may be
    a scalar or an integer array; negative lags are folded by symmetry.
    """
    delta = _check_delta(delta)
    k = np.abs(np.asarray(lag, dtype=float))
    out = np.exp(gammaln(1.0 - 2.0 * delta) + gammaln(k + delta) - gammaln(delta)
                 - gammaln(1.0 - delta) - gammaln(k + 1.0 - delta))
    return float(out) if out.ndim == 0 else out


def autocorrelation(delta: float, lag):
    return autocovariance(delta, lag) / autocovariance(delta, 0)


def circulant_eigenvalues(first_row: np.ndarray) -> np.ndarray:
    """Eigenvalues of the symmetric circulant whose first row is ``first_row``."""
    return np.fft.fft(first_row).real


def embedding_size(n: int) -> int:
    """Smallest power of two that is at least ``2 (n - 1)``."""
    target = max(2 * (n - 1), 1)
    return 1 << (target - 1).bit_length()


def sqrt_eigenvalues(acov, n: int, max_doublings: int = MAX_EMBED_DOUBLINGS):
    """Square-rooted circulant eigenvalues for a stationary covariance.

    ``acov`` maps an integer lag array to covariances.  The embedding size
    starts at :func:`embedding_size` and is doubled while an eigenvalue falls
    below ``-EIGEN_CLIP_RTOL * max``; residual negative dust is clipped.
    """
    size = embedding_size(n)
    for _ in range(max_doublings + 1):
        lags = np.arange(size)
        row = acov(np.minimum(lags, size - lags))
        lam = circulant_eigenvalues(row)
        lo, hi = lam.min(), lam.max()
        if lo >= -EIGEN_CLIP_RTOL * hi:
            if lo < 0:
                logger.warning("clipping circulant eigenvalues down to %.3e (max %.3e)", lo, hi)
            return np.sqrt(np.clip(lam, 0.0, None) / size)
        size *= 2
    raise NonPositiveEigenvalue(
        f"circulant embedding of size {size // 2} still has eigenvalue {lo:.3e}")


def gaussian_from_spectrum(sqrt_lam: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    m = len(sqrt_lam)
    noise = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return np.fft.fft(sqrt_lam * noise).real[:n]


def generate(params: FarimaParams, start_index: int = 0) -> FarimaSequence:
    """Draw ``params.length`` consecutive FARIMA values, deterministic in the seed."""
    n = int(params.length)
    rng = generator(params.seed)
    if n == 1:
        values = np.sqrt(autocovariance(params.delta, 0)) * rng.standard_normal(1)
    else:
        root = sqrt_eigenvalues(lambda k: autocovariance(params.delta, k), n)
        values = gaussian_from_spectrum(root, n, rng)
    return FarimaSequence(values=values, delta=params.delta, start_index=start_index)


def fgn_autocovariance(hurst: float, lag):
    """Autocovariance of unit-step fractional Gaussian noise."""
    k = np.abs(np.asarray(lag, dtype=float))
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2 * k ** h2 + np.abs(k - 1) ** h2)


def generate_fgn(hurst: float, n: int, seed: int) -> np.ndarray:
    """Exact fractional Gaussian noise with unit-step variance 1 (Davies-Harte)."""
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"hurst must lie in (0, 1), got {hurst!r}")
    rng = generator(seed)
    if n == 1:
        return rng.standard_normal(1)
    root = sqrt_eigenvalues(lambda k: fgn_autocovariance(hurst, k), n)
    return gaussian_from_spectrum(root, n, rng)
