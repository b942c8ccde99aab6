import subprocess
import sys

import numpy as np
import pytest

from chirpcs.cli import main
from chirpcs.core import default_phantom_spec, generate_phantom
from chirpcs.io import read_complex_array, read_mask
from chirpcs.metrics import rlne


@pytest.fixture
def phantom(tmp_path):
    path = tmp_path / "ph.cplx"
    assert main(["phantom", "--size", "32", "--out", str(path)]) == 0
    return path


def simulate(tmp_path, phantom, *extra):
    ks, mask = tmp_path / "ks.cplx", tmp_path / "mask.txt"
    argv = ["simulate", "--in", str(phantom), "--out-kspace", str(ks), "--out-mask", str(mask), *extra]
    assert main(argv) == 0
    return ks, mask


def test_phantom_matches_library(tmp_path, phantom, capsys):
    np.testing.assert_array_equal(read_complex_array(phantom), generate_phantom(default_phantom_spec(32)))
    pgm = tmp_path / "ph.pgm"
    assert main(["phantom", "--size", "32", "--phase", "0.5", "--out", str(phantom), "--pgm", str(pgm)]) == 0
    assert pgm.read_bytes().startswith(b"P5\n32 32\n65535\n")
    err = capsys.readouterr().err
    assert "[phantom] size=32 phase=0.5" in err


def test_simulate_outputs(tmp_path, phantom, capsys):
    ks, mask = simulate(tmp_path, phantom, "--h", "0.25", "--rate", "0.5", "--seed", "3", "--kspace-pgm",
                        str(tmp_path / "k.pgm"))
    m = read_mask(mask)
    samples = read_complex_array(ks)
    assert m.count == 16
    assert samples.shape == (32, 32)
    assert not samples[~m.selected].any()
    err = capsys.readouterr().err
    for key in ("h=0.25", "rate=0.5", "center=0.04", "sigma=0.0", "seed=3"):
        assert key in err


def test_full_sampling_reconstruction(tmp_path, phantom):
    ks, mask = simulate(tmp_path, phantom, "--h", "0.25", "--rate", "1.0")
    out = tmp_path / "rec.cplx"
    argv = ["reconstruct", "--kspace", str(ks), "--mask", str(mask), "--h", "0.25",
            "--lambda", str(1e6 * 256), "--ref", str(phantom), "--out", str(out)]
    assert main(argv) == 0
    assert rlne(read_complex_array(phantom), read_complex_array(out)) < 1e-3


def test_reconstruct_is_byte_reproducible(tmp_path, phantom):
    ks, mask = simulate(tmp_path, phantom, "--h", "0.125", "--rate", "0.5", "--sigma", "0.01")
    outputs = []
    for run in range(2):
        out, table = tmp_path / f"rec{run}.cplx", tmp_path / f"r{run}.csv"
        argv = ["reconstruct", "--kspace", str(ks), "--mask", str(mask), "--h", "0.125",
                "--ref", str(phantom), "--out", str(out), "--csv", str(table), "--no-timing"]
        assert main(argv) == 0
        outputs.append((out.read_bytes(), table.read_bytes()))
    assert outputs[0] == outputs[1]
    header, row = outputs[0][1].decode().splitlines()
    assert header == "h,rate,seed,lambda,beta,rlne,iters,seconds"
    assert row.startswith("0.125,0.5,0,1000.0,256.0,") and row.endswith(",0.0")


def test_sweep_parallel_matches_serial(tmp_path, phantom):
    tables = []
    for jobs in ("1", "2"):
        table = tmp_path / f"sweep{jobs}.csv"
        argv = ["sweep", "--in", str(phantom), "--h-list", "0,0.25", "--seeds", "0,1", "--rate", "0.5",
                "--csv", str(table), "--jobs", jobs, "--no-timing"]
        assert main(argv) == 0
        tables.append(table.read_text())
    assert tables[0] == tables[1]
    rows = tables[0].splitlines()[1:]
    assert [r.split(",")[:3] for r in rows] == [
        ["0.0", "0.5", "0"], ["0.0", "0.5", "1"], ["0.25", "0.5", "0"], ["0.25", "0.5", "1"]
    ]


def test_coherence_table(capsys):
    assert main(["coherence", "--n", "32", "--h-list", "0,0.25"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "h,mu"
    mu0, mu1 = (float(line.split(",")[1]) for line in lines[1:])
    assert mu0 == pytest.approx(np.sqrt(32))
    assert mu1 < mu0


def test_missing_input_names_flag_and_path(tmp_path, capsys):
    missing = tmp_path / "absent.cplx"
    argv = ["simulate", "--in", str(missing), "--out-kspace", str(tmp_path / "k"), "--out-mask", str(tmp_path / "m")]
    assert main(argv) == 2
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert "--in" in err and str(missing) in err


def test_corrupt_mask_is_reported(tmp_path, phantom, capsys):
    ks, mask = simulate(tmp_path, phantom)
    mask.write_text("MASK1\n1 0 7\n")
    argv = ["reconstruct", "--kspace", str(ks), "--mask", str(mask), "--h", "0", "--out", str(tmp_path / "o")]
    assert main(argv) == 2
    assert str(mask) in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [["phantom", "--out", "x", "--bogus"], ["frobnicate"], ["coherence", "--dict", "db5"], ["sweep", "--in", "x"]],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    err = capsys.readouterr().err.strip()
    assert err.startswith("error:") and "\n" not in err


def test_bad_values_exit_nonzero(tmp_path, phantom, capsys):
    argv = ["simulate", "--in", str(phantom), "--rate", "0", "--out-kspace", str(tmp_path / "k"),
            "--out-mask", str(tmp_path / "m")]
    assert main(argv) == 1
    assert "rate" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chirpcs", "coherence", "--n", "8", "--h-list", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "h,mu"
    assert proc.stderr.startswith("[coherence] n=8")
