"""Quadratic phase modulation produced by a chirp excitation pulse.

The simulator is driven by the dimensionless modulation intensity ``h``;
the physical pulse-sequence helpers below only document (and test) how a
linear frequency sweep yields that quadratic phase.

For comparison, a second-order shim gradient ``G(r) = G0 + G1 r`` applied
for ``T0`` leaves ``gamma*G0*T0*r + gamma/2*G1*T0*r**2``; its curvature is
bounded by the weak shim hardware, which is what the chirp approach avoids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhaseModulation",
    "SequenceParams",
    "build_modulation",
    "chirp_bandwidth",
    "chirp_frequency",
    "modulation_intensity",
    "nyquist_scan_count",
    "sequence_phase_profile",
]


@dataclass(frozen=True)
class PhaseModulation:
    """Diagonal unit-modulus phase applied along the phase-encode axis.

    ``c = h * n_lines`` is the phase product (bandwidth times excitation
    duration) and ``phases[n]`` is the diagonal entry for line ``n``.
    """

    n_lines: int
    h: float
    c: float
    phases: np.ndarray

    def conj(self) -> "PhaseModulation":
        """Modulation with conjugated phases (the Hermitian transpose)."""
        return PhaseModulation(self.n_lines, -self.h, -self.c, np.conj(self.phases))

    def angles(self) -> np.ndarray:
        """Closed-form (unwrapped) phase in radians for every line."""
        n = np.arange(self.n_lines, dtype=np.float64)
        return -(self.c / (2.0 * self.n_lines**2) * n**2 + self.c / 8.0 + np.pi / 2.0)


def modulation_intensity(delta_O: float, T_enco: float, N: int) -> float:
    """Modulation intensity ``h = delta_O * T_enco / N``.

    The units of ``delta_O`` are passed through untouched, so callers must
    pick a convention (rad/s or Hz) and stay with it.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if T_enco <= 0:
        raise ValueError(f"T_enco must be positive, got {T_enco}")
    return delta_O * T_enco / N


def build_modulation(h: float, N: int) -> PhaseModulation:
    """Build the chirp phase modulation for ``N`` phase-encode lines.

    ``phases[n] = exp(-i (c n^2 / (2 N^2) + c/8 + pi/2))`` with ``c = h N``.
    The constant ``c/8 + pi/2`` is physically inert but kept so that the
    operator matches the acquisition model exactly.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if h < 0:
        raise ValueError(f"modulation intensity must be non-negative, got {h}")
    c = float(h) * N
    n = np.arange(N, dtype=np.float64)
    angle = c / (2.0 * N * N) * n * n + c / 8.0 + np.pi / 2.0
    phases = np.exp(-1j * angle)
    phases.flags.writeable = False
    return PhaseModulation(n_lines=int(N), h=float(h), c=c, phases=phases)


@dataclass(frozen=True)
class SequenceParams:
    """Chirp spin-echo sequence parameters, SI units.

    gamma in rad/(s T), gradients in T/m, durations in s, ``L_Y`` in m,
    ``O_0`` in rad/s and the chirp rate ``R`` in rad/s^2.
    """

    gamma: float
    G_enco: float
    T_enco: float
    L_Y: float
    delta_g_deco: float
    t_deco: float
    O_0: float
    R: float

    def __post_init__(self):
        for name in ("gamma", "T_enco", "L_Y", "t_deco"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def symmetric(cls, gamma, G_enco, T_enco, L_Y, delta_g_deco, t_deco) -> "SequenceParams":
        """Sweep centered on zero: ``O_0 = -gamma G L / 2`` and ``R = dO / T``."""
        delta_O = gamma * G_enco * L_Y
        return cls(
            gamma=gamma,
            G_enco=G_enco,
            T_enco=T_enco,
            L_Y=L_Y,
            delta_g_deco=delta_g_deco,
            t_deco=t_deco,
            O_0=-0.5 * delta_O,
            R=delta_O / T_enco,
        )


def chirp_frequency(t: float, params: SequenceParams) -> float:
    """Instantaneous RF frequency ``O_0 + R t`` during the excitation."""
    if not 0.0 <= t <= params.T_enco:
        raise ValueError(f"t={t} outside the excitation window [0, {params.T_enco}]")
    return params.O_0 + params.R * t


def chirp_bandwidth(params: SequenceParams) -> float:
    """Sweep bandwidth needed to excite the whole field of view."""
    return params.gamma * params.G_enco * params.L_Y


def nyquist_scan_count(params: SequenceParams) -> int:
    """Number of scans ``G_enco T_enco / (delta_g t_deco)``; must be integral."""
    step = params.delta_g_deco * params.t_deco
    if not step > 0:
        raise ValueError("delta_g_deco * t_deco must be positive")
    ratio = params.G_enco * params.T_enco / step
    n = round(ratio)
    if abs(ratio - n) > 1e-9 * max(1.0, abs(ratio)) or n < 1:
        raise ValueError(f"scan count ratio {ratio!r} is not a positive integer")
    return int(n)


def sequence_phase_profile(y, m_index: int, params: SequenceParams):
    """Total phase after encoding and the ``m``-th decoding step.

    Adds the chirp excitation phase (quadratic in ``y`` once the resonance
    condition and symmetric sweep are substituted) to the linear phase of
    the decoding gradient::

        phi(y, m) = -c y^2 / (2 L^2) + (m / N) c y / L - c / 8 - pi / 2

    with ``c = delta_O * T_enco``.

    Parameters
    ----------
    y : float or array_like
        Position(s) along the phase-encode axis, in ``[0, L_Y]``.
    m_index : int
        Decoding index in ``[-N/2, N/2)``.
    params : SequenceParams

    Returns
    -------
    float or numpy.ndarray
        Phase in radians, same shape as ``y``.
    """
    N = nyquist_scan_count(params)
    if not -(N / 2) <= m_index < N / 2:
        raise ValueError(f"m_index {m_index} outside [-N/2, N/2) for N={N}")
    y_arr = np.asarray(y, dtype=np.float64)
    L = params.L_Y
    slack = 1e-12 * L
    if np.any(y_arr < -slack) or np.any(y_arr > L + slack):
        raise ValueError(f"y outside the field of view [0, {L}]")
    c = chirp_bandwidth(params) * params.T_enco
    phase = -c / (2.0 * L * L) * y_arr**2 + (m_index / N) * (c / L) * y_arr - c / 8.0 - math.pi / 2.0
    return float(phase) if np.ndim(y) == 0 else phase
