"""Flat ``section.key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Unknown keys are an error, and
every value is converted to the type of its default.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigurationError


@dataclass
class ParamsSection:
    M: float = 1.0
    Q: float = 0.5
    Lambda: float = 0.01


@dataclass
class GridSection:
    L: float = 100.0
    n_points: int = 4001


@dataclass
class ModeSection:
    l: int = 1
    n: int = 0


@dataclass
class EvolutionSection:
    solver: str = "wave"
    dt_factor: float = 0.9
    t_end: float = 50.0
    record_every: int = 1
    boundary: str = "outflow"
    constraint_ceiling: float = float("inf")


@dataclass
class InitialSection:
    type: str = "gaussian"
    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0


@dataclass
class OutputSection:
    path: str = ""
    format: str = "csv"


@dataclass
class RunConfig:
    params: ParamsSection = field(default_factory=ParamsSection)
    grid: GridSection = field(default_factory=GridSection)
    mode: ModeSection = field(default_factory=ModeSection)
    evolution: EvolutionSection = field(default_factory=EvolutionSection)
    initial: InitialSection = field(default_factory=InitialSection)
    output: OutputSection = field(default_factory=OutputSection)

    def set(self, key: str, raw) -> None:
        section, _, name = key.partition(".")
        sec = getattr(self, section, None) if section in _SECTIONS else None
        if sec is None or name not in {f.name for f in dataclasses.fields(sec)}:
            raise ConfigurationError(f"unknown config key {key!r}")
        typ = type(getattr(type(sec)(), name))
        try:
            if typ is int:
                value = int(raw)
            elif typ is float:
                value = float(raw)
            else:
                value = str(raw)
        except ValueError:
            raise ConfigurationError(f"bad value for {key}: {raw!r}") from None
        setattr(sec, name, value)

    def validate(self) -> None:
        ev = self.evolution
        if ev.solver not in ("wave", "maxwell"):
            raise ConfigurationError(f"evolution.solver must be wave or maxwell, got {ev.solver!r}")
        if self.initial.type not in ("gaussian", "bump", "zero"):
            raise ConfigurationError(f"initial.type must be gaussian, bump or zero, got {self.initial.type!r}")
        if self.output.format != "csv":
            raise ConfigurationError("output.format must be csv")
        if self.grid.n_points < 16:
            raise ConfigurationError("grid.n_points must be >= 16")
        if not self.grid.L > 0:
            raise ConfigurationError("grid.L must be positive")
        if not (0 < ev.dt_factor <= 1):
            raise ConfigurationError("evolution.dt_factor must lie in (0, 1]")
        if not ev.t_end > 0:
            raise ConfigurationError("evolution.t_end must be positive")
        if ev.record_every < 1:
            raise ConfigurationError("evolution.record_every must be >= 1")
        if ev.boundary != "outflow":
            raise ConfigurationError("evolution.boundary must be outflow")

    def items(self):
        for sec in _SECTIONS:
            obj = getattr(self, sec)
            for f in dataclasses.fields(obj):
                yield f"{sec}.{f.name}", getattr(obj, f.name)


_SECTIONS = ("params", "grid", "mode", "evolution", "initial", "output")


def config_keys():
    return [k for k, _ in RunConfig().items()]


def parse_config(text: str, base: Optional[RunConfig] = None) -> RunConfig:
    cfg = base or RunConfig()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg.set(key, value)
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config(text)
