"""Distance-Hessian comparison chain on a (K, rho) grid.

Prints K coth(K rho), the radial-field index form at the root alpha, the
exact minimum over alpha, and the bound 1/rho + K.

    python3 scripts/comparison_table.py
"""

import argparse

import numpy as np
from scipy.optimize import minimize_scalar

from finslerium.comparison import JACOBI, ModelSpace, RadialField, index_form, optimal_alpha


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--curvatures", default="0,0.5,1,2")
    ap.add_argument("--radii", default="0.25,0.5,1,2,4")
    args = ap.parse_args()
    Ks = [float(x) for x in args.curvatures.split(",")]
    rhos = [float(x) for x in args.radii.split(",")]
    print(f"{'K':>4} {'rho':>5} {'Kcoth':>10} {'root a':>8} {'I(root)':>10} {'min a':>8} {'I(min)':>10} {'1/rho+K':>9}")
    for K in Ks:
        space = ModelSpace.of(K)
        for rho in rhos:
            a = optimal_alpha(K, rho)
            best = minimize_scalar(lambda x: RadialField(x, rho).closed_form(space), bounds=(1, 50), method="bounded",
                                   options={"xatol": 1e-10})
            print(f"{K:4.1f} {rho:5.2f} {index_form(space, rho, JACOBI):10.6f} {a:8.4f} "
                  f"{index_form(space, rho, RadialField(a, rho)):10.6f} {best.x:8.4f} {best.fun:10.6f} {1 / rho + K:9.4f}")


if __name__ == "__main__":
    main()
