"""Galerkin gap versus K for both basis families.

Writes one CSV row per (N, nu, family, K) and prints the final gaps.

    python scripts/convergence_sweep.py --K-max 40 --out sweep.csv
"""
import argparse
import csv
import sys

from solenoidal_hup.galerkin import BASES, converge_constant, default_k_schedule
from solenoidal_hup.params import ProblemParams


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K-max", dest="K_max", type=int, default=30)
    ap.add_argument("--N", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--nu", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["n", "nu", "family", "k", "lambda_min", "c", "gap"])
    finals = []
    for N in args.N:
        for nu in args.nu:
            p = ProblemParams(N, nu)
            for family in BASES:
                table = converge_constant(p, args.K_max, 0.0, family=family,
                                          ks=default_k_schedule(args.K_max), stop_early=False)
                for K, lam in zip(table.ks, table.raw):
                    w.writerow([N, nu, family, K, repr(lam), repr(p.c), repr(lam - p.c)])
                finals.append((N, nu, family, table.raw[-1] - p.c))
    if args.out:
        fh.close()
    for N, nu, family, gap in finals:
        print(f"N={N} nu={nu} {family:>13s}  gap at K={args.K_max}: {gap:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
