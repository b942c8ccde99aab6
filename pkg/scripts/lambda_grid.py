"""Grid search for the data-consistency weight on the test phantom.

Scores each lambda by mean RLNE over the h grid and mask seeds, using the
default 256x256 phantom at 40% lines. On noiseless data the error plateaus
once the data term dominates, so the pick is the smallest lambda whose score
is within ``--within`` (relative) of the best; larger weights only fit noise
harder on real data.

    python3 scripts/lambda_grid.py --seeds 2
"""

import argparse
import sys
import time

import numpy as np

from chirpcs.core import default_phantom_spec, generate_phantom
from chirpcs.encoding import EncodingOperator, forward
from chirpcs.sampling import random_line_mask
from chirpcs.solver import SolverConfig, reconstruct
from chirpcs.metrics import rlne


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--rate", type=float, default=0.4)
    p.add_argument("--center", type=float, default=0.04)
    p.add_argument("--seeds", type=int, default=2)
    p.add_argument("--h-list", default="0,0.125,0.25,0.5")
    p.add_argument("--lambdas", default="1e1,1e2,1e3,1e4,1e5,1e6")
    p.add_argument("--within", type=float, default=0.01)
    args = p.parse_args(argv)

    hs = [float(t) for t in args.h_list.split(",")]
    lams = [float(t) for t in args.lambdas.split(",")]
    x = generate_phantom(default_phantom_spec(args.size))
    print("lambda " + " ".join(f"h={h:<6g}" for h in hs) + "   mean   seconds")
    scores = {}
    for lam in lams:
        cfg = SolverConfig(lam=lam)
        t0 = time.perf_counter()
        per_h = []
        for h in hs:
            errs = []
            for seed in range(args.seeds):
                op = EncodingOperator.create(x.shape, h, random_line_mask(args.size, args.rate, args.center, seed))
                errs.append(rlne(x, reconstruct(forward(x, op), op, cfg).image))
            per_h.append(float(np.mean(errs)))
        scores[lam] = float(np.mean(per_h))
        cells = " ".join(f"{e:<8.4f}" for e in per_h)
        print(f"{lam:<6g} {cells} {scores[lam]:.4f} {time.perf_counter() - t0:7.1f}", flush=True)
    best = min(scores.values())
    pick = min(lam for lam, s in scores.items() if s <= best * (1 + args.within))
    print(f"lowest mean RLNE: {best:.4f}; smallest lambda within {args.within:g} of it: {pick:g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
