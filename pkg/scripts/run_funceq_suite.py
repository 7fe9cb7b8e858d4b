#!/usr/bin/env python3
"""Residual sweep across the functional-equation lab.

Prints a table of max residuals: regular solution families and the Wishart
log-density dictionary solve the sum/quotient equation at machine precision,
log det satisfies the log-quadratic identity, the trace control fails it,
and a Cauchy difference satisfies the cocycle equation.
"""

import argparse
import sys

import numpy as np

from symcone.algebra import Algebra, Element, unit
from symcone.funceq import (
    SolutionFamily,
    cauchy_difference,
    cocycle_residual,
    log_det_field,
    log_quadratic_residual,
    make_regular_solution,
    olkin_baker_residual,
    sample_cone_pairs,
    sample_cone_triples,
    trace_field,
    wishart_dictionary,
)
from symcone.geometry import ConeElement


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--algebra", default="symr:3")
    parser.add_argument("--n-pairs", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    algebra = Algebra.from_spec(args.algebra)
    rng = np.random.default_rng(args.seed)
    pairs = sample_cone_pairs(algebra, args.n_pairs, seed=args.seed)
    triples = sample_cone_triples(algebra, args.n_pairs // 2, seed=args.seed + 1)

    rows = []
    families = [
        ("family lam=0, c1=c2=0", SolutionFamily(0.0 * unit(algebra), 0.0, 0.0, 0.0)),
        ("family lam=-e, c1=1, c2=2", SolutionFamily(-1.0 * unit(algebra), 1.0, 2.0, 0.0)),
        ("family random lam, kappa=2", SolutionFamily(
            Element(algebra, rng.standard_normal(algebra.dim)), 0.7, -0.4, 2.0,
        )),
    ]
    for label, fam in families:
        rep = olkin_baker_residual(*make_regular_solution(fam), pairs, seed=args.seed)
        rows.append((f"olkin-baker | {label}", rep.max_residual))

    a0 = ConeElement.certify(unit(algebra))
    rep = olkin_baker_residual(*wishart_dictionary(3.0, 4.0, a0), pairs, seed=args.seed)
    rows.append(("olkin-baker | wishart dictionary p1=3 p2=4", rep.max_residual))

    prod, conj = log_quadratic_residual(log_det_field(), pairs[: args.n_pairs // 2])
    rows.append(("log-quadratic | log det (product form)", prod.max_residual))
    rows.append(("log-quadratic | log det (conjugation form)", conj.max_residual))
    prod, _ = log_quadratic_residual(trace_field(), pairs[:200])
    rows.append(("log-quadratic | trace (negative control)", prod.max_residual))

    rep = cocycle_residual(cauchy_difference(log_det_field()), triples, seed=args.seed)
    rows.append(("cocycle | Cauchy difference of log det", rep.max_residual))

    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        print(f"{label:<{width}}  {value:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
