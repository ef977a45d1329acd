"""Random search for the small qLDPC instances shipped in ``gnd/data``.

    python scripts/search_codes.py --l 3 --m 3 --k 4 --d 4 --out src/gnd/data/bb18_k4.qcode
    python scripts/search_codes.py --l 3 --m 5 --k 6 --d 4 --remove 2 --scramble \
        --seed 1 --out src/gnd/data/qldpc30_k6.qcode

Candidates are bivariate-bicycle style codes with three monomials per
polynomial.  The l=3, m=5 family only reaches k in {0, 4, 8, 20}, so
``--remove R`` searches base codes with k - R logical qubits and drops R
random generators.  ``--scramble`` applies a random qubit relabelling so
the shipped instance carries no visible lattice structure.
"""
from __future__ import annotations

import argparse
import itertools
import random

import numpy as np

from gnd.codes import StabilizerCode, bb_code, brute_distance, remove_stabilizers, save_code_file


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--l", type=int, required=True)
    ap.add_argument("--m", type=int, required=True)
    ap.add_argument("--k", type=int, required=True)
    ap.add_argument("--d", type=int, required=True)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--remove", type=int, default=0)
    ap.add_argument("--scramble", action="store_true")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    pyrng = random.Random(args.seed)
    monos = list(itertools.product(range(args.l), range(args.m)))
    triples = list(itertools.combinations(monos, 3))
    for _ in range(100_000):
        a, b = pyrng.choice(triples), pyrng.choice(triples)
        base = bb_code(args.l, args.m, a, b)
        if base.k != args.k - args.remove or brute_distance(base, args.d - 1) is not None:
            continue
        for _ in range(20 if args.remove else 1):
            drop = pyrng.sample(range(base.m), args.remove)
            code = remove_stabilizers(base, drop) if drop else base
            if brute_distance(code, args.d - 1) is None and brute_distance(code, args.d) == args.d:
                break
        else:
            continue
        print("found A =", a, "B =", b, "dropped", drop, code.params())
        if args.scramble:
            perm = np.random.default_rng(args.seed).permutation(code.n)
            g = code.stabilizers
            code = StabilizerCode(code.n, np.hstack([g[:, :code.n][:, perm], g[:, code.n:][:, perm]]))
        code.distance = args.d
        save_code_file(code, args.out)
        return
    raise SystemExit("no instance found")


if __name__ == "__main__":
    main()
