"""Reconstruction error and sensing/sparsity coherence."""

from __future__ import annotations

import numpy as np

from .core import SamplingMask
from .modulation import PhaseModulation

__all__ = ["mutual_coherence", "rlne"]

MAX_COHERENCE_N = 64


def rlne(reference, estimate) -> float:
    """Relative l2-norm error ``||ref - est|| / ||ref||``."""
    ref = np.asarray(reference)
    est = np.asarray(estimate)
    if ref.shape != est.shape:
        raise ValueError(f"shape mismatch: reference {ref.shape}, estimate {est.shape}")
    denom = np.linalg.norm(ref.ravel())
    if denom == 0:
        raise ValueError("reference image has zero norm")
    return float(np.linalg.norm((ref - est).ravel()) / denom)


def mutual_coherence(mask: SamplingMask, mod: PhaseModulation, dictionary, N: int) -> float:
    """Brute-force coherence between the sampled rows of ``F Phi`` and a dictionary.

    Returns ``sqrt(N) * max |<row_k, d_j>|`` over selected rows ``k`` of the
    unitary DFT times the modulation and all dictionary columns ``d_j``.
    For orthonormal bases the value lies in ``[1, sqrt(N)]``.
    """
    if N > MAX_COHERENCE_N:
        raise ValueError(f"coherence is a dense diagnostic; N={N} exceeds {MAX_COHERENCE_N}")
    if mask.length != N or mod.n_lines != N:
        raise ValueError(f"mask ({mask.length}) and modulation ({mod.n_lines}) must have N={N} lines")
    D = np.asarray(dictionary, dtype=np.complex128)
    if D.ndim != 2 or D.shape[0] != N:
        raise ValueError(f"dictionary must have {N} rows, got shape {D.shape}")
    norms = np.linalg.norm(D, axis=0)
    if not np.allclose(norms, 1.0, rtol=0, atol=1e-8):
        raise ValueError("dictionary columns must have unit norm")
    F = np.fft.fft(np.eye(N), norm="ortho")
    sensing = F[mask.selected] * mod.phases[None, :]
    return float(np.sqrt(N) * np.abs(sensing @ D).max())
