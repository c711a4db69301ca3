"""Experiment configuration: a sectioned key-value file with # comments.

The format is deliberately plain so configs can be diffed and checked into
fixtures.  Unknown keys are rejected to catch typos early.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .loads import validate_occupancy_hist
from .profiles import MODELS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DiffusionConfig:
    model: str
    k_values: tuple[int, ...]
    seed_fractions: tuple[float, ...]
    step_durations_h: tuple[int, ...]
    lead_time_h: int
    n_networks: int
    n_nodes: int
    attachment: int
    # "synthetic" or a path to a behavior-profile CSV
    profile_source: str
    # optional second profile CSV; enables the link-omission comparison
    profiles_no_link: str | None
    n_profiles: int

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"diffusion.model must be one of {MODELS}")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ConfigError("diffusion.k needs at least one value >= 1")
        if not self.seed_fractions:
            raise ConfigError("diffusion.seed_fraction needs at least one value")
        for f in self.seed_fractions:
            if not 0.0 <= f <= 1.0:
                raise ConfigError(f"seed fraction {f} outside [0, 1]")
        if not self.step_durations_h or any(d < 1 for d in self.step_durations_h):
            raise ConfigError("diffusion.step_duration_h needs positive hours")
        if self.lead_time_h < 0:
            raise ConfigError("diffusion.lead_time_h must be >= 0")
        if self.n_networks < 1:
            raise ConfigError("diffusion.n_networks must be >= 1")
        if self.attachment < 1 or self.n_nodes <= self.attachment:
            raise ConfigError("need n_nodes > attachment >= 1")
        if self.profile_source == "synthetic":
            if self.n_profiles < 1:
                raise ConfigError("diffusion.n_profiles must be >= 1")
        elif not self.profile_source:
            raise ConfigError("diffusion.profiles must name a source")


@dataclass(frozen=True)
class GridConfig:
    geometry_path: str | None
    n_buildings: int
    n_substations: int
    extent_m: float
    occupancy_hist: dict[int, float]
    ev_rates: tuple[float, ...]
    follow_rates: tuple[float, ...]
    # None means "grid upgraded to support exactly the simulated EV rate"
    supported_ev_rate: float | None
    headroom: float
    n_trials: int
    max_children: int

    def validate(self) -> None:
        if self.geometry_path is None:
            if self.n_buildings < 1 or self.n_substations < 1:
                raise ConfigError("grid needs n_buildings and n_substations >= 1")
            if not self.extent_m > 0:
                raise ConfigError("grid.extent_m must be positive")
        try:
            validate_occupancy_hist(self.occupancy_hist)
        except ValueError as exc:
            raise ConfigError(f"grid.occupancy: {exc}") from exc
        for name, rates in (("ev_rates", self.ev_rates),
                            ("follow_rates", self.follow_rates)):
            if not rates:
                raise ConfigError(f"grid.{name} needs at least one value")
            for r in rates:
                if not 0.0 <= r <= 1.0:
                    raise ConfigError(f"grid.{name} value {r} outside [0, 1]")
        if self.supported_ev_rate is not None and not 0.0 <= self.supported_ev_rate <= 1.0:
            raise ConfigError("grid.supported_ev_rate outside [0, 1]")
        if self.headroom < 0:
            raise ConfigError("grid.headroom must be >= 0")
        if self.n_trials < 1:
            raise ConfigError("grid.n_trials must be >= 1")
        if self.max_children < 1:
            raise ConfigError("grid.max_children must be >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    output_dir: str
    diffusion: DiffusionConfig | None
    grid: GridConfig | None

    def validate(self) -> None:
        if self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")
        if self.diffusion is not None:
            self.diffusion.validate()
        if self.grid is not None:
            self.grid.validate()

    def require_diffusion(self) -> DiffusionConfig:
        if self.diffusion is None:
            raise ConfigError("this command needs a [diffusion] section")
        return self.diffusion

    def require_grid(self) -> GridConfig:
        if self.grid is None:
            raise ConfigError("this command needs a [grid] section")
        return self.grid


def _rate_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    if step <= 0 or stop < start:
        raise ConfigError(f"bad rate range {start}:{stop}:{step}")
    count = int(round((stop - start) / step)) + 1
    vals = np.round(np.linspace(start, stop, count), 10)
    return tuple(float(v) for v in vals)


def _parse_rates(text: str, *, where: str) -> tuple[float, ...]:
    """Either a comma list ("0, 0.05, 0.2") or a range ("0:1:0.05")."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{where}: range must be start:stop:step")
        try:
            return _rate_grid(*(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_ints(text: str, *, where: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_hist(text: str, *, where: str) -> dict[int, float]:
    """Occupancy histogram as "1:0.3, 2:0.35, ..." pairs."""
    out: dict[int, float] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            key, _, val = chunk.partition(":")
            out[int(key)] = float(val)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad entry {chunk!r}") from exc
    if not out:
        raise ConfigError(f"{where}: empty histogram")
    return out


class _Section:
    """Tracks which keys were consumed so leftovers can be flagged."""

    def __init__(self, name: str, raw: dict[str, str]):
        self.name = name
        self.raw = raw
        self.used: set[str] = set()

    def get(self, key: str, default: str | None = None) -> str | None:
        self.used.add(key)
        val = self.raw.get(key)
        if val is None or val.strip() == "":
            return default
        return val.strip()

    def get_int(self, key: str, default: int) -> int:
        val = self.get(key)
        if val is None:
            return default
        try:
            return int(val)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: not an integer: {val!r}") from exc

    def get_float(self, key: str, default: float | None) -> float | None:
        val = self.get(key)
        if val is None:
            return default
        try:
            return float(val)
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: not a number: {val!r}") from exc

    def check_leftovers(self) -> None:
        extra = set(self.raw) - self.used
        if extra:
            raise ConfigError(f"[{self.name}] unknown keys: {sorted(extra)}")


DEFAULT_FOLLOW_RATES = _rate_grid(0.0, 1.0, 0.01)
DEFAULT_EV_RATES = _rate_grid(0.0, 1.0, 0.05)

_DEFAULT_OCC = "1:0.3, 2:0.35, 3:0.16, 4:0.13, 5:0.06"


def _diffusion_from(sec: _Section) -> DiffusionConfig:
    cfg = DiffusionConfig(
        model=sec.get("model", "IC"),
        k_values=_parse_ints(sec.get("k", "3"), where="[diffusion] k"),
        seed_fractions=_parse_rates(sec.get("seed_fraction", "0.2"),
                                    where="[diffusion] seed_fraction"),
        step_durations_h=_parse_ints(sec.get("step_duration_h", "1, 2, 3"),
                                     where="[diffusion] step_duration_h"),
        lead_time_h=sec.get_int("lead_time_h", 6),
        n_networks=sec.get_int("n_networks", 1),
        n_nodes=sec.get_int("n_nodes", 10_000),
        attachment=sec.get_int("attachment", 5),
        profile_source=sec.get("profiles", "synthetic"),
        profiles_no_link=sec.get("profiles_no_link"),
        n_profiles=sec.get_int("n_profiles", 1_000),
    )
    sec.check_leftovers()
    return cfg


def _grid_from(sec: _Section) -> GridConfig:
    follow = sec.get("follow_rates")
    ev = sec.get("ev_rates")
    cfg = GridConfig(
        geometry_path=sec.get("geometry"),
        n_buildings=sec.get_int("n_buildings", 1_000),
        n_substations=sec.get_int("n_substations", 4),
        extent_m=sec.get_float("extent_m", 10_000.0),
        occupancy_hist=_parse_hist(sec.get("occupancy", _DEFAULT_OCC),
                                   where="[grid] occupancy"),
        ev_rates=(_parse_rates(ev, where="[grid] ev_rates")
                  if ev else DEFAULT_EV_RATES),
        follow_rates=(_parse_rates(follow, where="[grid] follow_rates")
                      if follow else DEFAULT_FOLLOW_RATES),
        supported_ev_rate=sec.get_float("supported_ev_rate", None),
        headroom=sec.get_float("headroom", 0.10),
        n_trials=sec.get_int("n_trials", 5),
        max_children=sec.get_int("max_children", 8),
    )
    sec.check_leftovers()
    return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",),
                                       interpolation=None)
    try:
        with open(p, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{p}: {exc}") from exc

    known = {"run", "diffusion", "grid"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")

    run = _Section("run", dict(parser["run"]) if parser.has_section("run") else {})
    cfg = ExperimentConfig(
        master_seed=run.get_int("master_seed", 0),
        output_dir=run.get("output_dir", "out"),
        diffusion=(_diffusion_from(_Section("diffusion", dict(parser["diffusion"])))
                   if parser.has_section("diffusion") else None),
        grid=(_grid_from(_Section("grid", dict(parser["grid"])))
              if parser.has_section("grid") else None),
    )
    run.check_leftovers()
    cfg.validate()
    return cfg
