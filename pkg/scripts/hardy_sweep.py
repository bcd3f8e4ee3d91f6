"""Weighted Hardy ratio over a Gaussian family at three resolutions.

    python scripts/hardy_sweep.py --sigma 1 --t 10
"""

import argparse

import numpy as np

from rnds_maxwell.diagnostics import core_bump, hardy_check
from rnds_maxwell.fields import Gaussian


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--t", type=float, default=10.0)
    ap.add_argument("--spacings", type=float, nargs="+", default=[0.05, 0.025, 0.0125])
    args = ap.parse_args()

    half = 0.5 * args.t
    fam = [(c, w) for c in np.linspace(-3, 3, 13) for w in np.linspace(0.5, 4, 8)]
    print("h,center,width,ratio")
    worst = []
    for h in args.spacings:
        x = np.linspace(-half, half, int(round(2 * half / h)) + 1)
        xi = core_bump(x)
        ratios = [hardy_check(Gaussian(c, w)(x), x, args.sigma, args.t, xi)["ratio"] for c, w in fam]
        for (c, w), r in zip(fam, ratios):
            print(f"{h:g},{c:g},{w:g},{r:.8f}")
        worst.append(max(ratios))
    print("# max ratio per spacing: " + ", ".join(f"{v:.6f}" for v in worst))


if __name__ == "__main__":
    main()
