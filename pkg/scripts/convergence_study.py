"""Energy drift, identity residuals and cross-solver differences under h-halving.

    python scripts/convergence_study.py --t-end 50 --spacings 0.1 0.05 0.025
"""

import argparse
import math

import numpy as np

from rnds_maxwell.diagnostics import identity_terms
from rnds_maxwell.evolution import EvolutionConfig, evolve_maxwell, evolve_wave
from rnds_maxwell.fields import Gaussian, Grid, make_maxwell_state, make_wave_state
from rnds_maxwell.geometry import BlackHoleParams, GeometryMap
from rnds_maxwell.oracles import ConvergenceStudy, dalembert_reference


def rel_drift(a):
    return float(np.max(np.abs(a - a[0])) / a[0])


def rel_identity(tr, factor=1.0):
    t = identity_terms(tr)
    return abs(t["delta"] - factor * t["integral"]) / abs(t["delta"])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=float, default=1.0)
    ap.add_argument("--Q", type=float, default=0.5)
    ap.add_argument("--Lambda", type=float, default=0.01)
    ap.add_argument("--L", type=float, default=100.0)
    ap.add_argument("--l", type=int, default=1)
    ap.add_argument("--t-end", type=float, default=50.0)
    ap.add_argument("--spacings", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    args = ap.parse_args()

    geom = GeometryMap(BlackHoleParams(args.M, args.Q, args.Lambda))
    cfg = EvolutionConfig(args.t_end, keep_states=False)
    cols = {k: [] for k in ("wave_drift", "E_C_identity", "E_C_identity_x2", "maxwell_drift",
                            "E_K_identity", "constraint", "cross_solver", "dalembert")}
    for h in args.spacings:
        grid = Grid.from_spacing(geom, args.L, h)
        w = evolve_wave(make_wave_state(args.l, grid, Gaussian()), cfg)
        m = evolve_maxwell(make_maxwell_state(args.l, grid, Gaussian()), cfg)
        free = grid.without_potential()
        f = evolve_wave(make_wave_state(args.l, free, Gaussian()), cfg)
        ref = dalembert_reference(Gaussian(), args.t_end, grid.r_star)
        cols["wave_drift"].append(rel_drift(w.series("E")))
        cols["E_C_identity"].append(rel_identity(w))
        cols["E_C_identity_x2"].append(rel_identity(w, 2.0))
        cols["maxwell_drift"].append(rel_drift(m.series("E_T")))
        cols["E_K_identity"].append(rel_identity(m))
        cols["constraint"].append(float(np.max(m.series("constraint"))))
        cols["cross_solver"].append(math.sqrt(grid.integrate(np.abs(w.final_state.u - m.final_state.psi_zero) ** 2)))
        cols["dalembert"].append(math.sqrt(grid.integrate(np.abs(f.final_state.u - ref) ** 2)))

    print("quantity," + ",".join(f"h={h:g}" for h in args.spacings) + ",order")
    for name, errs in cols.items():
        order = ConvergenceStudy(args.spacings, errs).order if len(errs) >= 3 else float("nan")
        print(name + "," + ",".join(f"{e:.6e}" for e in errs) + f",{order:.3f}")


if __name__ == "__main__":
    main()
