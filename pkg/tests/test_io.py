import csv

import numpy as np
import pytest

from chirpcs.core import SamplingMask
from chirpcs.io import (
    CSV_FIELDS,
    FormatError,
    append_csv_row,
    read_complex_array,
    read_mask,
    write_complex_array,
    write_mask,
    write_pgm_magnitude,
)
from chirpcs.sampling import random_line_mask


def record(**over):
    rec = dict(h=0.25, rate=0.4, seed=3, beta=256.0, rlne=0.0123456789, iters=41, seconds=1.5)
    rec["lambda"] = 1000.0
    rec.update(over)
    return rec


class TestComplexArray:
    @pytest.mark.parametrize("shape", [(1, 1), (3, 5), (64, 64)])
    def test_roundtrip_bit_exact(self, tmp_path, shape):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        x.flat[0] = complex(-0.0, np.nextafter(0, 1))
        p = tmp_path / "a.cplx"
        write_complex_array(p, x)
        y = read_complex_array(p)
        assert y.dtype == np.complex128
        assert y.tobytes() == x.tobytes()

    def test_layout(self, tmp_path):
        p = tmp_path / "a.cplx"
        write_complex_array(p, np.array([[1 + 2j, 3 - 4j]]))
        raw = p.read_bytes()
        assert raw.startswith(b"CPLX1\nrows=1\ncols=2\n\n")
        payload = raw[len(b"CPLX1\nrows=1\ncols=2\n\n"):]
        np.testing.assert_array_equal(np.frombuffer(payload, "<f8"), [1, 2, 3, -4])

    def test_one_dimensional_becomes_column(self, tmp_path):
        p = tmp_path / "a.cplx"
        write_complex_array(p, np.arange(4) * 1j)
        assert read_complex_array(p).shape == (4, 1)

    def test_truncated(self, tmp_path):
        p = tmp_path / "a.cplx"
        write_complex_array(p, np.ones((4, 4)))
        p.write_bytes(p.read_bytes()[:-8])
        with pytest.raises(FormatError, match="expected 256 payload bytes, found 248"):
            read_complex_array(p)

    @pytest.mark.parametrize(
        "raw",
        [
            b"",
            b"CPLX2\nrows=1\ncols=1\n\n" + bytes(16),
            b"CPLX1\nrows=1\n\n" + bytes(16),
            b"CPLX1\nrows=x\ncols=1\n\n" + bytes(16),
            b"CPLX1\nrows=0\ncols=1\n\n",
            b"CPLX1\nrows=1\nrows=1\n\n" + bytes(16),
            b"CPLX1\nrows=100000\ncols=100000\n\n",
        ],
    )
    def test_bad_headers(self, tmp_path, raw):
        p = tmp_path / "bad.cplx"
        p.write_bytes(raw)
        with pytest.raises(FormatError):
            read_complex_array(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_complex_array(tmp_path / "nope.cplx")


class TestMask:
    def test_roundtrip(self, tmp_path):
        m = random_line_mask(64, 0.4, 0.04, 9)
        p = tmp_path / "m.txt"
        write_mask(p, m)
        back = read_mask(p)
        np.testing.assert_array_equal(back.selected, m.selected)
        assert back.seed == 0
        text = p.read_text()
        assert text.startswith("MASK1\n") and text.endswith("\n")
        assert len(text.split()) == 65

    @pytest.mark.parametrize("body", ["MASK1\n", "MASK0\n1 0\n", "MASK1\n1 2 0\n", "MASK1\n10 1\n", "MASK1\n0 0 0\n"])
    def test_bad(self, tmp_path, body):
        p = tmp_path / "m.txt"
        p.write_text(body)
        with pytest.raises(ValueError):
            read_mask(p)


class TestPGM:
    def test_sixteen_bit(self, tmp_path):
        p = tmp_path / "a.pgm"
        write_pgm_magnitude(p, np.array([[0, 1j], [0.5, -1]]))
        raw = p.read_bytes()
        header = b"P5\n2 2\n65535\n"
        assert raw.startswith(header)
        np.testing.assert_array_equal(np.frombuffer(raw[len(header):], ">u2"), [0, 65535, 32768, 65535])

    def test_eight_bit_and_zero(self, tmp_path):
        p = tmp_path / "a.pgm"
        write_pgm_magnitude(p, np.zeros((3, 2)), bit_depth=8)
        raw = p.read_bytes()
        assert raw == b"P5\n2 3\n255\n" + bytes(6)
        with pytest.raises(ValueError):
            write_pgm_magnitude(p, np.ones((2, 2)), bit_depth=12)


class TestCSV:
    def test_header_once_and_exact_floats(self, tmp_path):
        p = tmp_path / "r.csv"
        append_csv_row(p, record())
        append_csv_row(p, record(h=0.1 + 0.2, seed=4))
        with open(p, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == list(CSV_FIELDS)
        assert len(rows) == 3
        assert float(rows[2][0]) == 0.1 + 0.2
        assert rows[1][CSV_FIELDS.index("iters")] == "41"
        assert rows[1][CSV_FIELDS.index("rlne")] == repr(0.0123456789)

    def test_field_mismatch(self, tmp_path):
        rec = record()
        del rec["beta"]
        with pytest.raises(ValueError):
            append_csv_row(tmp_path / "r.csv", rec)
        with pytest.raises(ValueError):
            append_csv_row(tmp_path / "r.csv", record(extra=1))

    def test_foreign_header(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(FormatError):
            append_csv_row(p, record())
