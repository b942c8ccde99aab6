"""Command line front end.

Every subcommand prints its fully resolved configuration to stderr and
exits non-zero with a one-line message on failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as cio
from .core import KSpaceData, default_phantom_spec, generate_phantom
from .encoding import EncodingOperator, add_noise, forward
from .metrics import mutual_coherence, rlne
from .modulation import build_modulation
from .sampling import mask_rate, random_line_mask
from .solver import DEFAULT_LAMBDA, SolverConfig, reconstruct
from .wavelet import FILTERS, WaveletConfig, orthogonal_dwt_matrix

DEFAULT_H_LIST = "0,0.125,0.25,0.5"


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load(flag: str, path: str, loader):
    try:
        return loader(path)
    except FileNotFoundError:
        raise CLIError(f"{flag}: file not found: {path}")
    except (OSError, ValueError) as exc:
        raise CLIError(f"{flag}: cannot read {path}: {exc}")


def _report(command: str, **settings):
    parts = " ".join(f"{k}={v}" for k, v in settings.items())
    print(f"[{command}] {parts}", file=sys.stderr)


def _solver_args(p):
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--beta", type=float, default=2.0**8)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--wavelet", choices=sorted(FILTERS), default="db4")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--no-timing", action="store_true",
                   help="write 0 to the CSV seconds column so output is byte-reproducible")


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        lam=args.lam,
        beta=args.beta,
        tol=args.tol,
        max_iters=args.max_iters,
        wavelet=WaveletConfig(args.wavelet, args.levels),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chirpcs", description="Chirp spread-spectrum CS-MRI simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("phantom", help="write the committed head phantom")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--phase", type=float, default=0.0, help="peak background phase, rad")
    p.add_argument("--out", required=True)
    p.add_argument("--pgm", help="also write a magnitude PGM here")

    p = sub.add_parser("simulate", help="acquire undersampled, modulated k-space")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--h", type=float, default=0.25)
    p.add_argument("--rate", type=float, default=0.4)
    p.add_argument("--center", type=float, default=0.04)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-kspace", required=True)
    p.add_argument("--out-mask", required=True)
    p.add_argument("--kspace-pgm", help="also write centered k-space magnitude as PGM")

    p = sub.add_parser("reconstruct", help="run the alternating direction solver")
    p.add_argument("--kspace", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--h", type=float, required=True)
    _solver_args(p)
    p.add_argument("--ref")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--pgm")

    p = sub.add_parser("sweep", help="RLNE over modulation intensities and seeds")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--h-list", type=_float_list, default=_float_list(DEFAULT_H_LIST))
    p.add_argument("--rate", type=float, default=0.4)
    p.add_argument("--center", type=float, default=0.04)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seeds", type=_int_list, default=[0, 1, 2, 3, 4])
    p.add_argument("--csv", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _solver_args(p)

    p = sub.add_parser("coherence", help="dense mutual coherence table")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--h-list", type=_float_list, default=_float_list(DEFAULT_H_LIST))
    p.add_argument("--dict", dest="dictionary", default="db4",
                   choices=["identity", *sorted(FILTERS)])
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def cmd_phantom(args):
    _report("phantom", size=args.size, phase=args.phase, out=args.out, pgm=args.pgm)
    img = generate_phantom(default_phantom_spec(args.size, args.phase))
    cio.write_complex_array(args.out, img)
    if args.pgm:
        cio.write_pgm_magnitude(args.pgm, img)


def cmd_simulate(args):
    _report("simulate", inp=args.inp, h=args.h, rate=args.rate, center=args.center,
            sigma=args.sigma, seed=args.seed, out_kspace=args.out_kspace,
            out_mask=args.out_mask, kspace_pgm=args.kspace_pgm)
    img = _load("--in", args.inp, cio.read_complex_array)
    mask = random_line_mask(img.shape[0], args.rate, args.center, args.seed)
    op = EncodingOperator.create(img.shape, args.h, mask)
    ks = add_noise(forward(img, op), args.sigma, args.seed)
    cio.write_complex_array(args.out_kspace, ks.samples)
    cio.write_mask(args.out_mask, mask)
    if args.kspace_pgm:
        cio.write_pgm_magnitude(args.kspace_pgm, np.fft.fftshift(ks.samples))


def _record(h, rate, seed, cfg, err, result, timing: bool):
    return {
        "h": h,
        "rate": rate,
        "seed": seed,
        "lambda": cfg.lam,
        "beta": cfg.beta,
        "rlne": err,
        "iters": result.iterations,
        "seconds": result.elapsed if timing else 0.0,
    }


def cmd_reconstruct(args):
    cfg = _solver_config(args)
    _report("reconstruct", kspace=args.kspace, mask=args.mask, h=args.h, lam=cfg.lam,
            beta=cfg.beta, tol=cfg.tol, max_iters=cfg.max_iters, wavelet=cfg.wavelet.filter_id,
            levels=cfg.wavelet.levels, ref=args.ref, out=args.out, csv=args.csv, pgm=args.pgm,
            timing=not args.no_timing)
    samples = _load("--kspace", args.kspace, cio.read_complex_array)
    mask = _load("--mask", args.mask, cio.read_mask)
    ref = _load("--ref", args.ref, cio.read_complex_array) if args.ref else None
    if samples.shape[0] != mask.length:
        raise CLIError(f"--mask: {mask.length} lines but --kspace has {samples.shape[0]} rows")
    if ref is not None and ref.shape != samples.shape:
        raise CLIError(f"--ref: shape {ref.shape} differs from --kspace shape {samples.shape}")
    ks = KSpaceData(samples, mask)
    op = EncodingOperator.create(samples.shape, args.h, mask)
    result = reconstruct(ks, op, cfg, reference=ref)
    cio.write_complex_array(args.out, result.image)
    if args.pgm:
        cio.write_pgm_magnitude(args.pgm, result.image)
    err = rlne(ref, result.image) if ref is not None else math.nan
    print(f"iterations={result.iterations} converged={result.converged} rlne={err!r}", file=sys.stderr)
    if args.csv:
        cio.append_csv_row(args.csv, _record(args.h, mask_rate(mask), mask.seed, cfg, err, result,
                                             not args.no_timing))


def _sweep_cell(img, h, seed, rate, center, sigma, cfg, timing):
    mask = random_line_mask(img.shape[0], rate, center, seed)
    op = EncodingOperator.create(img.shape, h, mask)
    ks = add_noise(forward(img, op), sigma, seed)
    result = reconstruct(ks, op, cfg, reference=img)
    return _record(h, rate, seed, cfg, rlne(img, result.image), result, timing)


def cmd_sweep(args):
    cfg = _solver_config(args)
    _report("sweep", inp=args.inp, h_list=",".join(map(repr, args.h_list)), rate=args.rate,
            center=args.center, sigma=args.sigma, seeds=",".join(map(str, args.seeds)),
            lam=cfg.lam, beta=cfg.beta, tol=cfg.tol, max_iters=cfg.max_iters,
            wavelet=cfg.wavelet.filter_id, levels=cfg.wavelet.levels, csv=args.csv,
            jobs=args.jobs, timing=not args.no_timing)
    if args.jobs < 1:
        raise CLIError("--jobs: must be >= 1")
    img = _load("--in", args.inp, cio.read_complex_array)
    cells = [(h, seed) for h in args.h_list for seed in args.seeds]
    common = (args.rate, args.center, args.sigma, cfg, not args.no_timing)
    if args.jobs == 1:
        records = [_sweep_cell(img, h, seed, *common) for h, seed in cells]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_sweep_cell, img, h, seed, *common) for h, seed in cells]
            records = [f.result() for f in futures]
    # appended in cell order so the CSV does not depend on completion order
    for rec in records:
        cio.append_csv_row(args.csv, rec)
        print(f"h={rec['h']!r} seed={rec['seed']} rlne={rec['rlne']:.6g} iters={rec['iters']}",
              file=sys.stderr)


def cmd_coherence(args):
    _report("coherence", n=args.n, h_list=",".join(map(repr, args.h_list)), dict=args.dictionary,
            rate=args.rate, center=args.center, seed=args.seed)
    n = args.n
    if args.dictionary == "identity":
        D = np.eye(n)
    else:
        D = orthogonal_dwt_matrix(n, args.dictionary)
    mask = random_line_mask(n, args.rate, args.center, args.seed)
    print("h,mu")
    for h in args.h_list:
        mu = mutual_coherence(mask, build_modulation(h, n), D, n)
        print(f"{h!r},{mu!r}")


COMMANDS = {
    "phantom": cmd_phantom,
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "sweep": cmd_sweep,
    "coherence": cmd_coherence,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, FloatingPointError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
