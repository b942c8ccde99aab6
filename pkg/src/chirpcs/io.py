"""File formats: CPLX1 complex arrays, MASK1 masks, PGM panels, sweep CSV.

CPLX1 layout (all header lines end in a single ``\\n``)::

    CPLX1
    rows=<int>
    cols=<int>
    <blank line>
    rows*cols pairs of little-endian float64 (real, imag), row-major

MASK1 layout::

    MASK1
    <N space-separated 0/1 tokens>
"""

from __future__ import annotations

import csv
import io as _io
import os
import re

import numpy as np

from .core import SamplingMask

__all__ = [
    "CSV_FIELDS",
    "FormatError",
    "append_csv_row",
    "read_complex_array",
    "read_mask",
    "write_complex_array",
    "write_mask",
    "write_pgm_magnitude",
]

CSV_FIELDS = ("h", "rate", "seed", "lambda", "beta", "rlne", "iters", "seconds")

_MAX_ELEMENTS = 1 << 28
_DIM = re.compile(rb"(rows|cols)=(\d+)\Z")


class FormatError(ValueError):
    """Malformed or truncated file."""


def write_complex_array(path, array) -> None:
    arr = np.asarray(array)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
    rows, cols = arr.shape
    header = f"CPLX1\nrows={rows}\ncols={cols}\n\n".encode("ascii")
    payload = np.ascontiguousarray(arr, dtype="<c16").tobytes()
    with open(path, "wb") as f:
        f.write(header + payload)


def read_complex_array(path) -> np.ndarray:
    with open(path, "rb") as f:
        raw = f.read()
    lines = raw.split(b"\n", 4)
    if len(lines) < 5 or lines[0] != b"CPLX1" or lines[3] != b"":
        raise FormatError(f"{path}: missing CPLX1 header")
    dims = {}
    for line in lines[1:3]:
        m = _DIM.match(line)
        if m is None:
            raise FormatError(f"{path}: bad header line {line!r}")
        dims[m.group(1).decode()] = int(m.group(2))
    if set(dims) != {"rows", "cols"}:
        raise FormatError(f"{path}: header must give rows and cols")
    rows, cols = dims["rows"], dims["cols"]
    if rows < 1 or cols < 1:
        raise FormatError(f"{path}: empty array ({rows}x{cols}) is not allowed")
    if rows * cols > _MAX_ELEMENTS:
        raise FormatError(f"{path}: {rows}x{cols} exceeds the {_MAX_ELEMENTS}-element limit")
    payload = lines[4]
    expected = rows * cols * 16
    if len(payload) != expected:
        raise FormatError(f"{path}: expected {expected} payload bytes, found {len(payload)}")
    data = np.frombuffer(payload, dtype="<c16").reshape(rows, cols)
    return data.astype(np.complex128)


def write_mask(path, mask: SamplingMask) -> None:
    tokens = " ".join("1" if b else "0" for b in mask.selected)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(f"MASK1\n{tokens}\n")


def read_mask(path) -> SamplingMask:
    """Read a MASK1 file; the seed is not stored and comes back as 0."""
    with open(path, "r", encoding="ascii", newline="") as f:
        text = f.read()
    head, _, body = text.partition("\n")
    if head.rstrip("\r") != "MASK1":
        raise FormatError(f"{path}: missing MASK1 header")
    bad = set(body) - set("01 \t\r\n")
    if bad:
        raise FormatError(f"{path}: invalid characters {sorted(bad)!r} in mask body")
    tokens = body.split()
    if not tokens:
        raise FormatError(f"{path}: mask has no lines")
    if any(t not in ("0", "1") for t in tokens):
        raise FormatError(f"{path}: mask tokens must be single 0/1 digits")
    return SamplingMask(np.array([t == "1" for t in tokens]), seed=0)


def write_pgm_magnitude(path, img, bit_depth: int = 16) -> None:
    """Write ``|img|`` as a binary PGM, scaled so the maximum is full scale."""
    mag = np.abs(np.asarray(img))
    if mag.ndim == 1:
        mag = mag[:, None]
    if mag.ndim != 2 or mag.size == 0:
        raise ValueError(f"expected a non-empty 2-D image, got shape {mag.shape}")
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    maxval = (1 << bit_depth) - 1
    peak = mag.max()
    scaled = np.zeros(mag.shape) if peak == 0 else mag / peak * maxval
    pixels = np.rint(scaled).astype(">u2" if bit_depth == 16 else "u1")
    rows, cols = mag.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{cols} {rows}\n{maxval}\n".encode("ascii"))
        f.write(pixels.tobytes())


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def append_csv_row(path, record: dict) -> None:
    """Append one sweep record, writing the header if the file is new.

    Floats are written with ``repr`` so they round-trip exactly. The row
    (plus header, for a new file) goes out in a single ``write`` call.
    """
    missing = [k for k in CSV_FIELDS if k not in record]
    extra = [k for k in record if k not in CSV_FIELDS]
    if missing or extra:
        raise ValueError(f"record fields mismatch: missing {missing}, unexpected {extra}")

    exists = os.path.exists(path) and os.path.getsize(path) > 0
    if exists:
        with open(path, "r", encoding="utf-8", newline="") as f:
            first = f.readline().rstrip("\r\n")
        if first != ",".join(CSV_FIELDS):
            raise FormatError(f"{path}: header {first!r} does not match {','.join(CSV_FIELDS)!r}")

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if not exists:
        writer.writerow(CSV_FIELDS)
    writer.writerow([_format(record[k]) for k in CSV_FIELDS])
    with open(path, "a", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())
