"""Forward acquisition model ``s = U F Phi rho`` and its adjoint.

``F`` is the unitary 2-D DFT with k-space kept in unshifted FFT order,
``Phi`` scales image row ``n`` by the chirp phase of line ``n`` and ``U``
zeroes unsampled k-space rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .core import KSpaceData, SamplingMask, as_image
from .modulation import (
    PhaseModulation,
    SequenceParams,
    build_modulation,
    nyquist_scan_count,
    sequence_phase_profile,
)
from .sampling import _floor_fraction, central_lines

__all__ = [
    "EncodingOperator",
    "add_noise",
    "adjoint",
    "apply_modulation",
    "continuous_signal_oracle",
    "discretization_scale",
    "forward",
    "oracle_row",
    "spectrum_spread",
]


@dataclass(frozen=True)
class EncodingOperator:
    modulation: PhaseModulation
    mask: SamplingMask
    rows: int
    cols: int

    def __post_init__(self):
        if not (self.modulation.n_lines == self.mask.length == self.rows):
            raise ValueError(
                f"modulation ({self.modulation.n_lines}), mask ({self.mask.length}) "
                f"and image rows ({self.rows}) must agree"
            )
        if self.cols < 1:
            raise ValueError("cols must be >= 1")

    @classmethod
    def create(cls, shape, h: float, mask: SamplingMask | None = None) -> "EncodingOperator":
        rows, cols = shape
        if mask is None:
            mask = SamplingMask.full(rows)
        return cls(build_modulation(h, rows), mask, rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    # array-level versions used inside the solver loop; no validation
    def _forward(self, x: np.ndarray) -> np.ndarray:
        k = scipy.fft.fft2(x * self.modulation.phases[:, None], norm="ortho")
        k[~self.mask.selected] = 0
        return k

    def _adjoint(self, s: np.ndarray) -> np.ndarray:
        s = np.where(self.mask.selected[:, None], s, 0)
        return scipy.fft.ifft2(s, norm="ortho") * np.conj(self.modulation.phases)[:, None]


def _check_shape(arr: np.ndarray, op: EncodingOperator, what: str):
    if arr.shape != op.shape:
        raise ValueError(f"{what} shape {arr.shape} does not match operator shape {op.shape}")


def apply_modulation(img, mod: PhaseModulation) -> np.ndarray:
    """Multiply each phase-encode row of ``img`` by its chirp phase."""
    x = as_image(img)
    if x.shape[0] != mod.n_lines:
        raise ValueError(f"image has {x.shape[0]} rows, modulation has {mod.n_lines} lines")
    return x * mod.phases[:, None]


def forward(img, op: EncodingOperator) -> KSpaceData:
    x = as_image(img)
    _check_shape(x, op, "image")
    return KSpaceData(op._forward(x), op.mask)


def adjoint(ks: KSpaceData, op: EncodingOperator) -> np.ndarray:
    """Apply ``Phi^H F^H U^H``; the exact adjoint of :func:`forward`."""
    s = ks.samples if isinstance(ks, KSpaceData) else as_image(ks, "k-space")
    _check_shape(s, op, "k-space")
    return op._adjoint(s)


def add_noise(ks: KSpaceData, sigma: float, seed: int = 0) -> KSpaceData:
    """Add complex white Gaussian noise to the sampled k-space rows.

    ``sigma`` is the standard deviation of each real and imaginary part.
    The noise stream is a child of ``seed`` distinct from the one
    :func:`~chirpcs.sampling.random_line_mask` uses, so a sweep can pass the
    same integer to both without correlating mask and noise.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return ks
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(1,))))
    sel = ks.mask.selected
    n_sel = (int(sel.sum()), ks.cols)
    noise = rng.normal(0.0, sigma, n_sel) + 1j * rng.normal(0.0, sigma, n_sel)
    samples = ks.samples.copy()
    samples[sel] += noise
    return KSpaceData(samples, ks.mask)


def spectrum_spread(ks, band_fraction: float) -> float:
    """Fraction of k-space energy outside the central phase-encode band.

    The band holds the ``floor(band_fraction * rows)`` lines nearest DC.
    Returns 0 for all-zero k-space.
    """
    s = ks.samples if isinstance(ks, KSpaceData) else np.asarray(ks)
    if s.ndim == 1:
        s = s[:, None]
    rows = s.shape[0]
    if not 0.0 < band_fraction < 1.0:
        raise ValueError(f"band_fraction must lie in (0, 1), got {band_fraction}")
    count = _floor_fraction(band_fraction, rows)
    if count < 1 or count >= rows:
        raise ValueError(f"band of {count} lines out of {rows} is degenerate")
    energy = np.sum(np.abs(s) ** 2, axis=1)
    total = energy.sum()
    if total == 0:
        return 0.0
    inside = energy[central_lines(rows, count)].sum()
    return float(max(total - inside, 0.0) / total)


def discretization_scale(params: SequenceParams) -> float:
    """Factor ``dy * sqrt(N)`` between the continuous signal and ``forward``."""
    N = nyquist_scan_count(params)
    return params.L_Y / N * math.sqrt(N)


def oracle_row(m_index: int, N: int) -> int:
    """k-space row (FFT order) that decoding index ``m`` lands on.

    Valid when the sequence decodes at Nyquist, i.e. the phase product per
    line equals ``2 pi``; the encoding wavenumber ``k_m`` carries a minus
    sign, hence ``row = -m mod N``.
    """
    return (-m_index) % N


def continuous_signal_oracle(profile, m_index: int, params: SequenceParams, oversample: int = 1) -> complex:
    """Riemann sum of the acquired signal integral for decoding index ``m``.

    Evaluates ``sum_j rho(y_j) exp(i phi(y_j, m)) dy`` on
    ``oversample * N`` equispaced points ``y_j = j dy`` in ``[0, L_Y)``.
    Used as an independent test oracle for :func:`forward`.

    Parameters
    ----------
    profile : callable
        Complex density, called on an array of positions in metres.
    m_index : int
    params : SequenceParams
    oversample : int
        Grid refinement relative to the ``N``-point image grid.
    """
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    N = nyquist_scan_count(params)
    n_points = oversample * N
    dy = params.L_Y / n_points
    y = np.arange(n_points) * dy
    rho = np.asarray(profile(y), dtype=np.complex128)
    phase = sequence_phase_profile(y, m_index, params)
    return complex(np.sum(rho * np.exp(1j * phase)) * dy)
