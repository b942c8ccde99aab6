"""Undecimated (a trous) 2-D wavelet transform with periodic boundaries.

Each level filters with the orthonormal low/high-pass pair scaled by
``1/sqrt(2)`` and upsampled by ``2**(level - 1)``. With that scaling the
squared band responses sum to one at every frequency, so the analysis
operator is an isometry and synthesis (its adjoint) inverts it exactly.

Circular convolution is carried out as a product in the DFT domain, which
is the same operator as direct periodic filtering and costs O(N log N).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .core import as_image

__all__ = [
    "FILTERS",
    "WaveletCoefficients",
    "WaveletConfig",
    "WaveletTransform",
    "analyze",
    "daubechies",
    "orthogonal_dwt_matrix",
    "synthesize",
]


def daubechies(p: int) -> np.ndarray:
    """Orthonormal Daubechies scaling filter with ``p`` vanishing moments.

    Minimum-phase spectral factorization; ``2 p`` taps summing to sqrt(2).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    # z^(p-1) * sum_k C(p-1+k, k) y^k with y = (2 - z - 1/z) / 4
    zy = np.array([-0.25, 0.5, -0.25])
    poly = np.zeros(2 * p - 1)
    for k in range(p):
        term = np.array([1.0])
        for _ in range(k):
            term = np.polymul(term, zy)
        term = np.concatenate([term, np.zeros(p - 1 - k)])
        poly[poly.size - term.size:] += math.comb(p - 1 + k, k) * term
    roots = np.roots(poly) if p > 1 else np.zeros(0)
    roots = roots[np.abs(roots) < 1]
    h = np.real(np.poly(np.concatenate([-np.ones(p), roots])))
    return h * math.sqrt(2.0) / h.sum()


# Named by tap count: "db4" is the 4-tap filter with two vanishing moments.
FILTERS = {
    "haar": daubechies(1),
    "db4": daubechies(2),
    "db6": daubechies(3),
    "db8": daubechies(4),
}


def _highpass(lo: np.ndarray) -> np.ndarray:
    k = np.arange(lo.size)
    return ((-1.0) ** k) * lo[::-1]


@dataclass(frozen=True)
class WaveletConfig:
    filter_id: str = "db4"
    levels: int = 3

    def __post_init__(self):
        if self.filter_id not in FILTERS:
            raise ValueError(f"unknown filter {self.filter_id!r}; choose from {sorted(FILTERS)}")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")

    def check_shape(self, shape):
        side = min(shape)
        if 2**self.levels > side:
            raise ValueError(
                f"{self.levels} levels need a side of at least {2 ** self.levels}, got {shape}"
            )


@dataclass(frozen=True)
class WaveletCoefficients:
    """Undecimated coefficients, one image-sized band per entry of ``bands``.

    Band order: for each level from finest to coarsest the three details
    (low-high, high-low, high-high along rows, cols), then the final
    approximation, giving ``3 * levels + 1`` bands.
    """

    bands: np.ndarray
    levels: int
    filter_id: str

    @property
    def approximation(self) -> np.ndarray:
        return self.bands[-1]

    def details(self, level: int) -> np.ndarray:
        if not 1 <= level <= self.levels:
            raise IndexError(level)
        return self.bands[3 * (level - 1): 3 * level]


def _axis_responses(n: int, lo: np.ndarray, levels: int):
    """Per-level DFT responses of the scaled, upsampled filter pair."""
    hi = _highpass(lo)
    out = []
    for j in range(levels):
        step = 2**j
        taps_lo = np.zeros(n)
        taps_hi = np.zeros(n)
        pos = (np.arange(lo.size) * step) % n
        np.add.at(taps_lo, pos, lo / math.sqrt(2.0))
        np.add.at(taps_hi, pos, hi / math.sqrt(2.0))
        out.append((np.fft.fft(taps_lo), np.fft.fft(taps_hi)))
    return out


class WaveletTransform:
    """Precomputed band responses for one image shape and configuration."""

    def __init__(self, shape, cfg: WaveletConfig = WaveletConfig()):
        cfg.check_shape(shape)
        self.shape = tuple(shape)
        self.cfg = cfg
        self.responses = _band_responses(self.shape, cfg.filter_id, cfg.levels)

    @property
    def n_bands(self) -> int:
        return self.responses.shape[0]

    def analyze_array(self, x: np.ndarray) -> np.ndarray:
        spec = scipy.fft.fft2(x)
        return scipy.fft.ifft2(self.responses * spec, axes=(-2, -1))

    def synthesize_array(self, c: np.ndarray) -> np.ndarray:
        spec = scipy.fft.fft2(c, axes=(-2, -1))
        spec *= np.conj(self.responses)
        return scipy.fft.ifft2(spec.sum(axis=0))


@functools.lru_cache(maxsize=16)
def _band_responses(shape, filter_id: str, levels: int) -> np.ndarray:
    rows, cols = shape
    lo = FILTERS[filter_id]
    ry = _axis_responses(rows, lo, levels)
    rx = _axis_responses(cols, lo, levels)
    bands = []
    acc_y = np.ones(rows, dtype=complex)
    acc_x = np.ones(cols, dtype=complex)
    for (ly, hy), (lx, hx) in zip(ry, rx):
        gy, gx = acc_y * ly, acc_x * lx
        dy, dx = acc_y * hy, acc_x * hx
        bands.append(np.outer(gy, dx))
        bands.append(np.outer(dy, gx))
        bands.append(np.outer(dy, dx))
        acc_y, acc_x = gy, gx
    bands.append(np.outer(acc_y, acc_x))
    out = np.stack(bands)
    out.flags.writeable = False
    return out


def analyze(img, cfg: WaveletConfig = WaveletConfig()) -> WaveletCoefficients:
    """Forward undecimated transform; norm preserving."""
    x = as_image(img)
    wt = WaveletTransform(x.shape, cfg)
    return WaveletCoefficients(wt.analyze_array(x), cfg.levels, cfg.filter_id)


def synthesize(coeffs: WaveletCoefficients, cfg: WaveletConfig = WaveletConfig()) -> np.ndarray:
    """Adjoint of :func:`analyze` and its exact left inverse."""
    if coeffs.levels != cfg.levels or coeffs.filter_id != cfg.filter_id:
        raise ValueError(
            f"coefficients were made with ({coeffs.filter_id}, {coeffs.levels} levels), "
            f"config is ({cfg.filter_id}, {cfg.levels} levels)"
        )
    bands = np.asarray(coeffs.bands)
    if bands.ndim != 3 or bands.shape[0] != 3 * cfg.levels + 1:
        raise ValueError(f"expected {3 * cfg.levels + 1} bands, got array of shape {bands.shape}")
    wt = WaveletTransform(bands.shape[1:], cfg)
    return wt.synthesize_array(bands)


def orthogonal_dwt_matrix(n: int, filter_id: str = "db4", levels: int | None = None) -> np.ndarray:
    """Dense orthonormal (decimated, periodic) wavelet basis of size ``n``.

    Columns are the synthesis atoms, so ``W.T @ x`` gives the coefficients.
    ``levels`` defaults to the full depth ``log2(n)``.
    """
    max_levels = int(math.log2(n)) if n >= 2 else 0
    if 2**max_levels != n:
        raise ValueError(f"n must be a power of two, got {n}")
    if levels is None:
        levels = max_levels
    if not 1 <= levels <= max_levels:
        raise ValueError(f"levels must lie in [1, {max_levels}], got {levels}")
    lo = FILTERS[filter_id]
    hi = _highpass(lo)

    def dwt(x):
        out = []
        a = x
        for _ in range(levels):
            m = a.size
            idx = (2 * np.arange(m // 2)[:, None] + np.arange(lo.size)[None, :]) % m
            out.append(a[idx] @ hi)
            a = a[idx] @ lo
        out.append(a)
        return np.concatenate(out[::-1])

    analysis = np.stack([dwt(e) for e in np.eye(n)], axis=1)
    return analysis.T
