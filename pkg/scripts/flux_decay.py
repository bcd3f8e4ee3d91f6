"""t0^2 times the energy flux through parabolic and conical surfaces on one long run.

    python scripts/flux_decay.py --t-end 200 --t0 5 10 20 40
"""

import argparse

from rnds_maxwell.diagnostics import HypersurfaceSpec, hypersurface_flux
from rnds_maxwell.evolution import EvolutionConfig, evolve_maxwell
from rnds_maxwell.fields import Gaussian, Grid, make_maxwell_state
from rnds_maxwell.geometry import BlackHoleParams, GeometryMap


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--Lambda", type=float, default=0.01)
    ap.add_argument("--L", type=float, default=100.0)
    ap.add_argument("--h", type=float, default=0.05)
    ap.add_argument("--t-end", type=float, default=200.0)
    ap.add_argument("--record-every", type=int, default=5)
    ap.add_argument("--t0", type=float, nargs="+", default=[5.0, 10.0, 20.0, 40.0])
    ap.add_argument("--interp", choices=("linear", "hermite"), default="linear")
    args = ap.parse_args()

    geom = GeometryMap(BlackHoleParams(1.0, 0.5, args.Lambda))
    grid = Grid.from_spacing(geom, args.L, args.h)
    tr = evolve_maxwell(make_maxwell_state(1, grid, Gaussian()),
                        EvolutionConfig(args.t_end, record_every=args.record_every))
    print("kind,t0,E_T_flux,t0sq_flux,E_K_flux")
    for kind in ("parabola", "cone", "slice"):
        for t0 in args.t0:
            s = HypersurfaceSpec(kind, t0)
            F = hypersurface_flux(tr, s, "T", args.interp)
            K = hypersurface_flux(tr, s, "K", args.interp)
            print(f"{kind},{t0:g},{F:.6e},{t0 * t0 * F:.6e},{K:.6e}")


if __name__ == "__main__":
    main()
