"""Mode amplitude at fixed r_* probes over a long run, with t * amplitude and its sup.

    python scripts/pointwise_decay.py --t-end 200 --probes -5 0 5 > amplitude.csv
"""

import argparse
import sys

from rnds_maxwell.diagnostics import decay_fit, pointwise_bound
from rnds_maxwell.evolution import EvolutionConfig, evolve_maxwell
from rnds_maxwell.fields import Gaussian, Grid, make_maxwell_state
from rnds_maxwell.geometry import BlackHoleParams, GeometryMap


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--Lambda", type=float, default=0.01)
    ap.add_argument("--L", type=float, default=100.0)
    ap.add_argument("--h", type=float, default=0.05)
    ap.add_argument("--t-end", type=float, default=200.0)
    ap.add_argument("--t-min", type=float, default=20.0)
    ap.add_argument("--record-every", type=int, default=5)
    ap.add_argument("--probes", type=float, nargs="+", default=[-5.0, 0.0, 5.0])
    args = ap.parse_args()

    geom = GeometryMap(BlackHoleParams(1.0, 0.5, args.Lambda))
    grid = Grid.from_spacing(geom, args.L, args.h)
    tr = evolve_maxwell(make_maxwell_state(1, grid, Gaussian()),
                        EvolutionConfig(args.t_end, record_every=args.record_every))
    out = pointwise_bound(tr, args.probes, t_min=args.t_min)
    print("probe,t,amplitude,t_times_amplitude")
    for p, d in out.items():
        for t, a in zip(d["t"], d["amplitude"]):
            print(f"{p:g},{t:.6f},{a:.6e},{t * a:.6e}")
    for p, d in out.items():
        fit = decay_fit(d["t"], d["amplitude"])
        print(f"# r*={p:g} sup={d['sup']:.4f} at t={d['t_at_sup']:.2f} log-log slope={fit.slope:.2f}",
              file=sys.stderr)


if __name__ == "__main__":
    main()
