"""Shared data containers and the synthetic ellipse phantom.

Images are plain 2-D ``complex128`` numpy arrays. Rows are always the
phase-encode axis (``N_y``); columns are the readout axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Ellipse",
    "KSpaceData",
    "PhantomSpec",
    "SamplingMask",
    "as_image",
    "default_phantom_spec",
    "generate_phantom",
    "image_norm",
]


def as_image(img, name: str = "image") -> np.ndarray:
    """Validate ``img`` as a complex image and return it as ``complex128``."""
    arr = np.asarray(img)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def image_norm(img) -> float:
    """Euclidean norm over all entries of a (complex) image."""
    return float(np.linalg.norm(np.asarray(img).ravel()))


@dataclass(frozen=True)
class SamplingMask:
    """Selection of phase-encode lines, i.e. the undersampling operator U.

    ``selected[k]`` refers to k-space row ``k`` in unshifted FFT order, so
    row 0 is the DC line.
    """

    selected: np.ndarray
    seed: int = 0

    def __post_init__(self):
        sel = np.asarray(self.selected, dtype=bool).ravel().copy()
        if sel.size < 1:
            raise ValueError("mask must have at least one line")
        if not sel.any():
            raise ValueError("mask must select at least one line")
        sel.flags.writeable = False
        object.__setattr__(self, "selected", sel)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def length(self) -> int:
        return int(self.selected.size)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.selected))

    @classmethod
    def full(cls, n: int) -> "SamplingMask":
        return cls(np.ones(n, dtype=bool))

    def __eq__(self, other):
        if not isinstance(other, SamplingMask):
            return NotImplemented
        return self.seed == other.seed and np.array_equal(self.selected, other.selected)

    __hash__ = None


@dataclass(frozen=True)
class KSpaceData:
    """Acquired k-space samples together with the mask that produced them.

    ``samples`` has the image shape; rows not selected by ``mask`` are zero.
    """

    samples: np.ndarray
    mask: SamplingMask

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2:
            raise ValueError(f"k-space samples must be 2-D, got shape {s.shape}")
        if s.shape[0] != self.mask.length:
            raise ValueError(
                f"k-space has {s.shape[0]} rows but mask has {self.mask.length} lines"
            )
        if not np.all(np.isfinite(s)):
            raise ValueError("k-space contains non-finite entries")
        if np.any(s[~self.mask.selected]):
            raise ValueError("k-space has nonzero entries on unsampled lines")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape

    @property
    def rows(self) -> int:
        return self.samples.shape[0]

    @property
    def cols(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class Ellipse:
    """One phantom ellipse.

    Centers are offsets from the image center and axes are semi-axis
    lengths, all as fractions of the image side. ``angle`` is in radians,
    counter-clockwise.
    """

    center_y: float
    center_x: float
    axis_y: float
    axis_x: float
    angle: float = 0.0
    amplitude: float = 1.0


@dataclass(frozen=True)
class PhantomSpec:
    size: int = 256
    ellipses: tuple[Ellipse, ...] = field(default_factory=tuple)
    phase_amplitude: float = 0.0


# Modified Shepp-Logan head, rescaled from [-1, 1] units to fractions of the
# side. Columns: amplitude, axis_x, axis_y, center_x, center_y, angle (deg).
_HEAD_TABLE = (
    (1.00, 0.6900, 0.9200, 0.0000, 0.0000, 0.0),
    (-0.80, 0.6624, 0.8740, 0.0000, -0.0184, 0.0),
    (-0.20, 0.1100, 0.3100, 0.2200, 0.0000, -18.0),
    (-0.20, 0.1600, 0.4100, -0.2200, 0.0000, 18.0),
    (0.10, 0.2100, 0.2500, 0.0000, 0.3500, 0.0),
    (0.10, 0.0460, 0.0460, 0.0000, 0.1000, 0.0),
    (0.10, 0.0460, 0.0460, 0.0000, -0.1000, 0.0),
    (0.10, 0.0460, 0.0230, -0.0800, -0.6050, 0.0),
    (0.10, 0.0230, 0.0230, 0.0000, -0.6060, 0.0),
    (0.10, 0.0230, 0.0460, 0.0600, -0.6050, 0.0),
)


def default_phantom_spec(size: int = 256, phase_amplitude: float = 0.0) -> PhantomSpec:
    """The committed 10-ellipse head phantom used by all experiments."""
    ellipses = tuple(
        Ellipse(
            center_y=cy / 2,
            center_x=cx / 2,
            axis_y=ay / 2,
            axis_x=ax / 2,
            angle=np.deg2rad(deg),
            amplitude=amp,
        )
        for amp, ax, ay, cx, cy, deg in _HEAD_TABLE
    )
    return PhantomSpec(size=size, ellipses=ellipses, phase_amplitude=phase_amplitude)


def generate_phantom(spec: PhantomSpec) -> np.ndarray:
    """Rasterize an ellipse phantom.

    Amplitudes add where ellipses overlap and the sum is clipped to
    ``[0, 1]``. If ``spec.phase_amplitude`` is nonzero, a radially
    quadratic phase peaking at that value in the image corners is applied.

    Parameters
    ----------
    spec : PhantomSpec
        Image side and ellipse table.

    Returns
    -------
    numpy.ndarray
        ``(size, size)`` complex128 image.
    """
    size = int(spec.size)
    if size < 8:
        raise ValueError(f"phantom size must be >= 8, got {size}")
    if len(spec.ellipses) == 0:
        raise ValueError("phantom needs at least one ellipse")

    # pixel centers as fractions of the side, origin at the image center,
    # y pointing up
    coord = (np.arange(size) + 0.5) / size - 0.5
    y = -coord[:, None]
    x = coord[None, :]

    img = np.zeros((size, size), dtype=np.float64)
    for el in spec.ellipses:
        if el.axis_x <= 0 or el.axis_y <= 0:
            raise ValueError("ellipse semi-axes must be positive")
        cos, sin = np.cos(el.angle), np.sin(el.angle)
        dx = x - el.center_x
        dy = y - el.center_y
        u = (dx * cos + dy * sin) / el.axis_x
        v = (-dx * sin + dy * cos) / el.axis_y
        img += np.where(u * u + v * v <= 1.0, el.amplitude, 0.0)
    np.clip(img, 0.0, 1.0, out=img)

    out = img.astype(np.complex128)
    if spec.phase_amplitude != 0.0:
        r2 = y * y + x * x
        out *= np.exp(1j * spec.phase_amplitude * r2 / r2.max())
    return out
