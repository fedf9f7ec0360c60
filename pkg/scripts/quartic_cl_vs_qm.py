#!/usr/bin/env python3
"""Classical vs quantum evolution in the quartic well, side by side.

Evolves the same Gaussian initial state under the Liouville (CL) and von
Neumann (QM) grid dynamics and writes one CSV with both moment series.
The two runs share every ingredient except the superoperator E(Q, q).

The classical run filaments in phase space, so its (Q, q) support grows
with time; the script reports the final boundary mass, which bounds the
truncation artifacts of the late-time classical rows.

Usage: python scripts/quartic_cl_vs_qm.py [out.csv]
"""

import sys
import warnings

from liouspace.evolution import boundary_mass
from liouspace import (
    EvolutionConfig,
    EvolveMethod,
    PolynomialPotential,
    SuperGrid,
    SuperPotentialKind,
    evolve_trotter,
    expect_p,
    expect_x,
    expect_x2,
    gaussian_super_density,
    purity,
    trace,
)

LAM = 0.15
T_END = 4.0
N_OUT = 48


def moment_series(kind):
    grid = SuperGrid.centered(12.0, 192)
    # minimal-uncertainty Gaussian (sigma_x sigma_p = 1/2): purity 1 initially
    sd = gaussian_super_density(grid, 1.0, 0.0, 0.6, 1.0 / 1.2)
    v = PolynomialPotential.quartic(LAM)
    rows = []
    dt = T_END / N_OUT
    t = 0.0
    with warnings.catch_warnings():
        # low-level spectral ringing reaches the boundary during the long
        # run; track its size instead of warning every segment
        warnings.simplefilter("ignore", UserWarning)
        for _ in range(N_OUT):
            cfg = EvolutionConfig(t1=dt, n_steps=12, method=EvolveMethod.TROTTER_STRANG)
            sd = evolve_trotter(v, grid, kind, sd, cfg)
            t += dt
            rows.append((t, trace(sd), expect_x(sd), expect_p(sd), expect_x2(sd), purity(sd)))
    print(f"{kind.value}: final boundary mass {boundary_mass(sd.values):.2e}")
    return rows


def main() -> None:
    out = sys.argv[1] if len(sys.argv) > 1 else "quartic_cl_vs_qm.csv"
    cl = moment_series(SuperPotentialKind.CL)
    qm = moment_series(SuperPotentialKind.QM)
    with open(out, "w") as fh:
        fh.write("t,x_cl,x_qm,p_cl,p_qm,x2_cl,x2_qm,purity_cl,purity_qm\n")
        for row_cl, row_qm in zip(cl, qm):
            fh.write(
                ",".join(
                    "%.12g" % v
                    for v in (
                        row_cl[0],
                        row_cl[2], row_qm[2],
                        row_cl[3], row_qm[3],
                        row_cl[4], row_qm[4],
                        row_cl[5], row_qm[5],
                    )
                )
                + "\n"
            )
    gap = max(abs(a[2] - b[2]) for a, b in zip(cl, qm))
    print(f"wrote {out}; largest CL-QM <x> gap over the run: {gap:.4g}")


if __name__ == "__main__":
    main()
