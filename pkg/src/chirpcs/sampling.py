"""Phase-encode line masks (the undersampling operator U)."""

from __future__ import annotations

import math

import numpy as np

from .core import SamplingMask

__all__ = ["central_lines", "mask_rate", "random_line_mask"]


def central_lines(n: int, count: int) -> np.ndarray:
    """Indices, in unshifted FFT order, of the ``count`` lines nearest DC.

    The block is contiguous after ``fftshift``, starting ``count // 2``
    lines below DC.
    """
    if not 0 <= count <= n:
        raise ValueError(f"cannot pick {count} central lines out of {n}")
    start = n // 2 - count // 2
    shifted = np.arange(start, start + count)
    return np.sort((shifted - n // 2) % n)


def _floor_fraction(frac: float, n: int) -> int:
    # guards against 0.29 * 100 == 28.999999999999996
    return int(math.floor(frac * n + 1e-9))


def random_line_mask(N: int, rate: float, center_fraction: float = 0.04, seed: int = 0) -> SamplingMask:
    """Uniform random phase-encode lines plus a fully sampled center block.

    Exactly ``floor(rate * N)`` lines are selected. The
    ``floor(center_fraction * N)`` lines closest to DC are always included;
    the rest are drawn without replacement from the remaining lines.

    Parameters
    ----------
    N : int
        Number of phase-encode lines.
    rate : float
        Sampling rate in ``(0, 1]``.
    center_fraction : float
        Fraction of lines in the guaranteed center block, in ``[0, 1)``.
    seed : int
        Seed for a Philox generator; equal arguments give equal masks.

    Returns
    -------
    SamplingMask
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    if not 0.0 <= center_fraction < 1.0:
        raise ValueError(f"center_fraction must lie in [0, 1), got {center_fraction}")
    n_total = _floor_fraction(rate, N)
    n_center = _floor_fraction(center_fraction, N)
    if n_total < max(1, n_center):
        raise ValueError(
            f"rate {rate} selects {n_total} lines, fewer than max(1, {n_center} center lines)"
        )

    selected = np.zeros(N, dtype=bool)
    selected[central_lines(N, n_center)] = True
    rest = np.flatnonzero(~selected)
    rng = np.random.Generator(np.random.Philox(seed))
    picks = rng.choice(rest, size=n_total - n_center, replace=False)
    selected[picks] = True
    return SamplingMask(selected, seed=seed)


def mask_rate(mask: SamplingMask) -> float:
    return mask.count / mask.length
