"""Chirp-pulse spread-spectrum compressed-sensing MRI simulation and reconstruction."""

from .core import (
    Ellipse,
    KSpaceData,
    PhantomSpec,
    SamplingMask,
    default_phantom_spec,
    generate_phantom,
    image_norm,
)
from .encoding import EncodingOperator, add_noise, adjoint, apply_modulation, forward, spectrum_spread
from .metrics import mutual_coherence, rlne
from .modulation import PhaseModulation, SequenceParams, build_modulation, modulation_intensity
from .sampling import mask_rate, random_line_mask
from .solver import ReconResult, SolverConfig, reconstruct
from .wavelet import WaveletCoefficients, WaveletConfig, analyze, synthesize

__version__ = "0.1.0"
