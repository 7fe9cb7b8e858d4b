#!/usr/bin/env python3
"""Seeded repetition protocol for the independence experiments.

Runs the forward experiment (common scale: independence expected) and the
negative control (mismatched scales: rejection expected) over a fixed seed
set and prints the decision fractions plus a JSON summary.
"""

import argparse
import json
import sys
import time

from symcone.algebra import Algebra, unit
from symcone.geometry import ConeElement
from symcone.harness import forward_experiment, negative_experiment, run_repetitions


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--algebra", default="symr:3")
    parser.add_argument("--p1", type=float, default=4.0)
    parser.add_argument("--p2", type=float, default=4.0)
    parser.add_argument("--scale2-multiple", type=float, default=3.0,
                        help="negative-control scale a2 = k * e")
    parser.add_argument("--n", type=int, default=10000)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--level", type=float, default=0.05)
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    algebra = Algebra.from_spec(args.algebra)
    a = ConeElement.certify(unit(algebra))
    a2 = ConeElement.certify(args.scale2_multiple * unit(algebra))
    seeds = range(args.seeds)

    start = time.time()
    forward = run_repetitions(
        forward_experiment, seeds=seeds,
        p1=args.p1, p2=args.p2, a=a, n=args.n, level=args.level,
    )
    negative = run_repetitions(
        negative_experiment, seeds=seeds,
        p1=args.p1, p2=args.p2, a1=a, a2=a2, n=args.n, level=args.level,
    )
    elapsed = time.time() - start

    summary = {
        "algebra": args.algebra,
        "p1": args.p1,
        "p2": args.p2,
        "n": args.n,
        "level": args.level,
        "seeds": list(seeds),
        "forward": {
            "non_rejections": forward.non_rejections,
            "rejections": forward.rejections,
            "p_values": forward.p_values,
        },
        "negative": {
            "non_rejections": negative.non_rejections,
            "rejections": negative.rejections,
            "p_values": negative.p_values,
        },
        "elapsed_seconds": elapsed,
    }
    print(f"forward  (common scale):      non-reject {forward.non_rejections}/{forward.n_seeds}")
    print(f"negative (scale e vs {args.scale2_multiple}e): reject     {negative.rejections}/{negative.n_seeds}")
    print(f"elapsed: {elapsed:.0f}s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(summary, fh, indent=2)
        print(f"summary written to {args.out}")
    return 0 if (forward.non_rejections >= 18 and negative.rejections >= 19) else 1


if __name__ == "__main__":
    sys.exit(main())
