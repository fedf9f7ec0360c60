#!/usr/bin/env python3
"""Monte Carlo table of Coulomb superoperator matrix elements E_{ab,cd}.

Estimates every element over a small set of hydrogen orbitals, prints the
table with standard errors, and flags parity-forbidden combinations
(exact zeros by the selection rule).

Usage: python scripts/coulomb_elements.py [n_samples] [seed]
"""

import sys
from itertools import product

from liouspace.jaynescummings import HydrogenState, coulomb_superop_element

ORBITALS = {
    "1s": HydrogenState(1, 0, 0),
    "2s": HydrogenState(2, 0, 0),
    "2p": HydrogenState(2, 1, 0),
}


def main() -> None:
    n_samples = int(sys.argv[1]) if len(sys.argv) > 1 else 2 * 10**5
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    print(f"{'a':>3} {'b':>3} {'c':>3} {'d':>3}  {'value':>22}  {'stderr':>10}  note")
    for k, (na, nb, nc, nd) in enumerate(product(ORBITALS, repeat=4)):
        a, b, c, d = (ORBITALS[x] for x in (na, nb, nc, nd))
        parity = a.parity * b.parity * c.parity * d.parity
        res = coulomb_superop_element(
            a, b, c, d, mc_samples=n_samples, seed=seed + k
        )
        note = "forbidden (parity)" if parity == -1 else ""
        pull = abs(res.value) / res.stderr if res.stderr > 0 else 0.0
        if parity == -1 and pull > 3.0:
            note += "  ** inconsistent with zero"
        print(
            f"{na:>3} {nb:>3} {nc:>3} {nd:>3}  "
            f"{res.value.real:+.6f}{res.value.imag:+.6f}j  "
            f"{res.stderr:10.2e}  {note}"
        )


if __name__ == "__main__":
    main()
