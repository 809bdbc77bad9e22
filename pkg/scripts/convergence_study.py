"""Discretization error of the invariant chain and of the structure equations.

* invariants: error of a2 and f_rec for f = 1 against the exact values
  (a2 = e^{-2u}, f = 1) as a function of the lattice spacing, for
  second- and sixth-order stencils;
* structure equations: max residual as a function of the point-wise step.

    python3 scripts/convergence_study.py
"""

import numpy as np

from lightlike import classify as C
from lightlike.ode import Constant
from lightlike.surface import parametrize_nonconical


def main():
    S = parametrize_nonconical(Constant(1.0))
    us, vs = np.linspace(-0.5, 0.5, 11), np.linspace(-1, 1, 21)
    U, _ = np.meshgrid(us, vs, indexing="ij")

    print("invariant chain (f = 1)")
    print(f"{'order':>5s} {'spacing':>8s} {'max|a2 err|':>12s} {'max|f err|':>12s} {'ratio':>7s}")
    for order in (2, 4, 6):
        prev = None
        for h in (0.05, 0.025, 0.0125):
            rep = C.compute_invariants(S, us, vs, h=h, order=order)
            a2 = np.max(np.abs(rep.a2 - np.exp(-2 * U)))
            fe = np.max(np.abs(rep.f_rec - 1.0))
            ratio = f"{prev / fe:7.2f}" if prev else "      -"
            print(f"{order:5d} {h:8.4f} {a2:12.3e} {fe:12.3e} {ratio}")
            prev = fe

    print("\nstructure equations (f = 1, u in [-0.5, 0.5], v in (-1, 1))")
    print(f"{'h':>8s} {'max residual':>13s} {'ratio':>7s}")
    prev = None
    for h in (4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4):
        r = C.verify_structure_equations(S, S.frame, us, vs[1:-1], h)["max"]
        ratio = f"{prev / r:7.2f}" if prev else "      -"
        print(f"{h:8.1e} {r:13.3e} {ratio}")
        prev = r


if __name__ == "__main__":
    main()
