import hashlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpcs.core import (
    Ellipse,
    KSpaceData,
    PhantomSpec,
    SamplingMask,
    as_image,
    default_phantom_spec,
    generate_phantom,
    image_norm,
)

# sha256 of the default 256x256 phantom as complex128 bytes, frozen once
PHANTOM_256_SHA256 = "f8ea5ef880a9507389462e434912bc9cb79d503e45da788535f9c25deb6b2118"


def test_full_field_ellipse_gives_ones():
    spec = PhantomSpec(size=16, ellipses=(Ellipse(0, 0, 1.0, 1.0, 0.0, 1.0),))
    img = generate_phantom(spec)
    assert img.dtype == np.complex128
    np.testing.assert_array_equal(img, np.ones((16, 16)))


def test_zero_amplitude_gives_zero_image():
    ellipses = (Ellipse(0, 0, 0.3, 0.2, 0.1, 0.0), Ellipse(0.1, 0, 0.1, 0.1, 0, 0.0))
    img = generate_phantom(PhantomSpec(size=32, ellipses=ellipses))
    assert not img.any()


def test_default_phantom_snapshot():
    img = generate_phantom(default_phantom_spec(256))
    assert img.shape == (256, 256)
    assert np.abs(img).max() == 1.0
    assert hashlib.sha256(img.tobytes()).hexdigest() == PHANTOM_256_SHA256
    # skull rim, brain interior
    assert img[10, 128] == 1.0
    assert img[128, 128] == pytest.approx(0.2)


def test_phantom_is_pure_function_of_spec():
    spec = default_phantom_spec(64, phase_amplitude=1.3)
    a = generate_phantom(spec)
    b = generate_phantom(default_phantom_spec(64, phase_amplitude=1.3))
    assert a.tobytes() == b.tobytes()


def test_overlaps_are_clipped():
    ellipses = (Ellipse(0, 0, 0.4, 0.4, 0, 0.8), Ellipse(0, 0, 0.2, 0.2, 0, 0.8))
    img = generate_phantom(PhantomSpec(size=32, ellipses=ellipses))
    assert img.real.max() == 1.0
    assert img.real.min() == 0.0


def test_background_phase_peaks_at_amplitude():
    spec = PhantomSpec(size=32, ellipses=(Ellipse(0, 0, 1.0, 1.0),), phase_amplitude=0.7)
    img = generate_phantom(spec)
    np.testing.assert_allclose(np.abs(img), 1.0)
    assert np.angle(img).max() == pytest.approx(0.7)
    assert np.angle(img).min() >= 0


@pytest.mark.parametrize(
    "spec",
    [
        PhantomSpec(size=7, ellipses=(Ellipse(0, 0, 0.2, 0.2),)),
        PhantomSpec(size=16, ellipses=()),
    ],
)
def test_phantom_rejects_bad_spec(spec):
    with pytest.raises(ValueError):
        generate_phantom(spec)


def test_image_norm_examples():
    assert image_norm(np.zeros((3, 4))) == 0.0
    assert image_norm(np.array([[3 + 4j]])) == 5.0
    assert image_norm(np.ones((2, 2))) == 2.0


@settings(max_examples=50, deadline=None)
@given(
    re=st.floats(-1e3, 1e3),
    im=st.floats(-1e3, 1e3),
    seed=st.integers(0, 2**32 - 1),
)
def test_image_norm_homogeneous(re, im, seed):
    rng = np.random.default_rng(seed)
    img = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    c = complex(re, im)
    assert image_norm(c * img) == pytest.approx(abs(c) * image_norm(img), rel=1e-12, abs=1e-12)


def test_as_image_validation():
    assert as_image(np.arange(4)).shape == (4, 1)
    with pytest.raises(ValueError):
        as_image(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        as_image(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        as_image(np.zeros((0, 3)))


def test_mask_invariants():
    m = SamplingMask([True, False, True], seed=3)
    assert (m.length, m.count, m.seed) == (3, 2, 3)
    with pytest.raises(ValueError):
        SamplingMask([False, False])
    with pytest.raises(ValueError):
        m.selected[0] = False


def test_kspace_rejects_energy_on_unsampled_rows():
    mask = SamplingMask([True, False])
    KSpaceData(np.array([[1.0], [0.0]]), mask)
    with pytest.raises(ValueError, match="unsampled"):
        KSpaceData(np.array([[1.0], [1e-300]]), mask)
    with pytest.raises(ValueError, match="rows"):
        KSpaceData(np.zeros((3, 1)), mask)
