"""Check both extremal families against the closed-form constants.

Poloidal: one-dimensional reduction for N = 3..8 at three scalings.
Toroidal (N = 3): tensor quadrature on a grid sequence.
"""
import argparse

from solenoidal_hup import fields as F
from solenoidal_hup.params import ProblemParams, best_constant_solenoidal


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N-max", dest="N_max", type=int, default=8)
    args = ap.parse_args(argv)

    print("poloidal, 1D reduction")
    for N in range(3, args.N_max + 1):
        target = best_constant_solenoidal(N)
        for lam in (0.5, 1.0, 2.0):
            q = F.quotient_poloidal_1d(ProblemParams(N, 1), lam).quotient
            print(f"  N={N} lam={lam:<4}  quotient={q:.12f}  closed={target:.12f}  "
                  f"rel={abs(q - target) / target:.2e}")

    print("toroidal, N=3 tensor quadrature")
    fld = F.ToroidalExtremal((1.0, 0.0, 0.0), 0.5)
    for n in (16, 24, 32, 48):
        rep = F.quotient_toroidal_3d(fld, n)
        print(f"  grid_n={n:<3d} quotient={rep.quotient:.12f}  "
              f"richardson_diff={rep.meta['richardson_diff']:.2e}  flagged={rep.flagged}")


if __name__ == "__main__":
    main()
