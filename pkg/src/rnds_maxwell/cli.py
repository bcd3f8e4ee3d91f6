"""Command-line interface: ``rnds-maxwell {geometry,scan,evolve,flux,check}``.

Exit codes: 0 ok, 1 usage or configuration error, 2 inadmissible parameters,
3 invariant failure, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys
from types import SimpleNamespace
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig, config_keys, load_config
from .errors import (
    ConfigurationError,
    CoverageError,
    DegenerateGeometryError,
    DomainError,
    InadmissibleParametersError,
    InvalidInputError,
    NumericError,
)

EXIT_OK, EXIT_USAGE, EXIT_INADMISSIBLE, EXIT_INVARIANT, EXIT_NUMERIC = 0, 1, 2, 3, 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _add_common(p: argparse.ArgumentParser, overrides: bool = True):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", help="output path (default: stdout)")
    if overrides:
        for key in config_keys():
            p.add_argument(f"--{key}", dest=f"ov:{key}", metavar="VALUE", help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rnds-maxwell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    _add_common(sub.add_parser("geometry", help="admissibility, horizons, photon sphere, trapping interval"))
    p = sub.add_parser("scan", help="admissibility over an (M, Q) grid at fixed Lambda")
    _add_common(p, overrides=False)
    p.add_argument("--M-range", required=True, help="start:stop:count")
    p.add_argument("--Q-range", required=True, help="start:stop:count")
    p.add_argument("--Lambda", required=True, type=float)
    p = sub.add_parser("evolve", help="evolve one mode and write the energy table")
    _add_common(p)
    p.add_argument("--snapshot", help="also write the final state in columnar text form")
    p = sub.add_parser("flux", help="energy fluxes through a family of hypersurfaces")
    _add_common(p)
    p.add_argument("--surfaces", default="parabola:5,parabola:10,parabola:20,parabola:40",
                   help="comma list of kind:t0 with kind in parabola, cone, slice")
    p.add_argument("--which", choices=("T", "K"), default="T")
    p.add_argument("--record-every", type=int, default=None, dest="flux_record_every")
    p = sub.add_parser("check", help="run the invariant suite")
    _add_common(p)
    p.add_argument("--corrupt-trapping", action="store_true",
                   help="add 1 to the trapping term (mutation test; the suite must fail)")
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    for k, v in vars(args).items():
        if k.startswith("ov:") and v is not None:
            cfg.set(k[3:], v)
    cfg.validate()
    return cfg


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _params(cfg: RunConfig):
    from .geometry import BlackHoleParams

    return BlackHoleParams(cfg.params.M, cfg.params.Q, cfg.params.Lambda)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_geometry(cfg: RunConfig, out: Optional[str]) -> int:
    from .geometry import GeometryMap, trapping_region, validate_params

    rep = validate_params(cfg.params.M, cfg.params.Q, cfg.params.Lambda)
    if not rep.admissible:
        raise InadmissibleParametersError(f"inadmissible parameters: clause '{rep.failed_clause}' fails", rep.failed_clause)
    geom = GeometryMap(_params(cfg))
    h = geom.horizons
    left, right = trapping_region(geom)
    rows = [
        ("M", cfg.params.M), ("Q", cfg.params.Q), ("Lambda", cfg.params.Lambda),
        ("admissible", 1), ("Delta", rep.Delta), ("M1", rep.M1), ("M2", rep.M2),
        ("r0", h.r0), ("r1", h.r1), ("r2", h.r2), ("r3", h.r3), ("P2", h.P2),
        ("a0", h.a[0]), ("a1", h.a[1]), ("a2", h.a[2]), ("a3", h.a[3]), ("a_offset", h.offset),
        ("trap_left", left), ("trap_right", right), ("default_L", geom.L),
    ]
    with _output(out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("quantity", "value"))
        for k, v in rows:
            w.writerow((k, repr(float(v))))
    return EXIT_OK


def parse_range(text: str):
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise ConfigurationError(f"malformed range {text!r}; expected start:stop:count") from None
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ConfigurationError("range bounds must be finite")
    if n < 1 or b < a:
        raise ConfigurationError(f"empty range {text!r}")
    if n == 1 and a != b:
        raise ConfigurationError(f"range {text!r} with one point needs start == stop")
    return np.linspace(a, b, n)


def cmd_scan(M_range: str, Q_range: str, Lambda: float, out: Optional[str]) -> int:
    from .geometry import photon_sphere, validate_params

    Ms, Qs = parse_range(M_range), parse_range(Q_range)
    with _output(out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("M", "Q", "Lambda", "admissible", "M1", "M2", "P2", "failed_clause"))
        for M in Ms:
            for Q in Qs:
                rep = validate_params(float(M), float(Q), float(Lambda))
                P2 = float("nan")
                if 9 * M * M >= 8 * Q * Q and M > 0:
                    P2 = photon_sphere(SimpleNamespace(M=float(M), Q=float(Q)))
                w.writerow((repr(float(M)), repr(float(Q)), repr(float(Lambda)), int(rep.admissible),
                            repr(rep.M1), repr(rep.M2), repr(P2), rep.failed_clause or ""))
    return EXIT_OK


def _initial_state(cfg: RunConfig):
    from .fields import Grid, make_maxwell_state, make_wave_state, profile_from_spec
    from .geometry import GeometryMap
    from .harmonics import ModeIndex

    geom = GeometryMap(_params(cfg))
    grid = Grid(geom, cfg.grid.L, cfg.grid.n_points)
    mode = ModeIndex(cfg.mode.l, cfg.mode.n)
    ini = cfg.initial
    prof = profile_from_spec(ini.type, ini.center, ini.width, ini.amplitude)
    if cfg.evolution.solver == "maxwell":
        return make_maxwell_state(mode, grid, prof)
    return make_wave_state(mode, grid, prof)


def _evolution_config(cfg: RunConfig, keep_states: bool, record_every: Optional[int] = None):
    from .evolution import EvolutionConfig

    ev = cfg.evolution
    return EvolutionConfig(
        t_end=ev.t_end, dt_factor=ev.dt_factor, record_every=record_every or ev.record_every,
        boundary=ev.boundary, keep_states=keep_states, constraint_ceiling=ev.constraint_ceiling,
    )


def cmd_evolve(cfg: RunConfig, out: Optional[str], snapshot: Optional[str] = None) -> int:
    from .evolution import evolve
    from .fields import write_snapshot

    state = _initial_state(cfg)
    traj = evolve(state, _evolution_config(cfg, keep_states=False))
    with _output(out or cfg.output.path or None) as fh:
        traj.to_csv(fh)
    if snapshot:
        write_snapshot(traj.final_state, snapshot)
    return EXIT_OK


def parse_surfaces(text: str):
    from .diagnostics import HypersurfaceSpec

    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        kind, sep, t0 = item.partition(":")
        if not sep:
            raise ConfigurationError(f"surface {item!r} must look like kind:t0")
        try:
            out.append(HypersurfaceSpec(kind, float(t0)))
        except ValueError:
            raise ConfigurationError(f"bad surface offset in {item!r}") from None
    if not out:
        raise ConfigurationError("no surfaces given")
    return out


def cmd_flux(cfg: RunConfig, surfaces: str, which: str, out: Optional[str], record_every: Optional[int] = None) -> int:
    from .diagnostics import hypersurface_flux
    from .evolution import evolve_maxwell

    specs = parse_surfaces(surfaces)
    if cfg.evolution.solver != "maxwell":
        raise ConfigurationError("flux needs evolution.solver = maxwell")
    state = _initial_state(cfg)
    traj = evolve_maxwell(state, _evolution_config(cfg, keep_states=True, record_every=record_every))
    with _output(out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("kind", "t0", "which", "flux", "t0sq_flux"))
        for s in specs:
            F = hypersurface_flux(traj, s, which)
            w.writerow((s.kind, repr(s.t0), which, repr(F), repr(s.t0**2 * F)))
    return EXIT_OK


def cmd_check(cfg: RunConfig, corrupt: bool = False, out: Optional[str] = None) -> int:
    from .checks import run_suite
    from .geometry import validate_params

    rep = validate_params(cfg.params.M, cfg.params.Q, cfg.params.Lambda)
    if not rep.admissible:
        raise InadmissibleParametersError(f"inadmissible parameters: clause '{rep.failed_clause}' fails", rep.failed_clause)
    results = run_suite(_params(cfg), trap_offset=1.0 if corrupt else 0.0)
    failed = [r for r in results if not r.passed]
    with _output(out) as fh:
        fh.write("invariant,status,value,threshold\n")
        for r in results:
            fh.write(r.line() + "\n")
    for r in failed:
        print(f"invariant failed: {r.name}", file=sys.stderr)
    return EXIT_INVARIANT if failed else EXIT_OK


# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "scan":
            return cmd_scan(args.M_range, args.Q_range, args.Lambda, args.out)
        cfg = _config_from_args(args)
        if args.command == "geometry":
            return cmd_geometry(cfg, args.out)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.out, args.snapshot)
        if args.command == "flux":
            return cmd_flux(cfg, args.surfaces, args.which, args.out, args.flux_record_every)
        return cmd_check(cfg, args.corrupt_trapping, args.out)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InadmissibleParametersError as exc:
        print(f"error: {exc} [clause: {exc.clause}]", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except DegenerateGeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except CoverageError as exc:
        print(f"error: {exc}; raise evolution.t_end", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, InvalidInputError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        step = getattr(exc, "step", None)
        where = f" (step {step})" if step is not None else ""
        print(f"numeric failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
