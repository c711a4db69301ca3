"""Experiment orchestration: diffusion runs, grid sweeps, combined reports.

Scheduling is reproducible by construction: every trial derives its seeds by
hashing (master seed, experiment id, trial index), results are keyed by index
and assembled in sorted order, so output CSVs are byte-identical at any
worker count.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ConfigError, DiffusionConfig, ExperimentConfig, GridConfig
from .grid import (
    GridModel,
    InfeasibleTreeError,
    build_grid,
    calibrate_capacities,
    generate_synthetic_city,
    load_city,
    write_feeders_csv,
)
from .influence import PropagationConfig, follow_through_rate_at_peak, run_cascade
from .loads import LoadParams, assign_residents, build_attack_loads, build_regular_loads
from .powerflow import (
    attack_window_states,
    baseline_peak_flows,
    line_status_rows,
    merge_window_status,
    union_disconnected,
)
from .profiles import (
    ProfileSet,
    assign_profiles,
    default_distributions,
    load_profiles,
    synthesize_profiles,
)
from .seeding import int_seed
from .social_graph import generate_scale_free


def derive_seed(master_seed: int, experiment_id: str, trial: int) -> int:
    """Per-trial seed: hash of (master seed, experiment id, trial index)."""
    return int_seed(master_seed, experiment_id, str(trial))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RuntimeError(f"{path}: empty CSV") from None
        return header, list(reader)


def _run_tasks(worker, args_list: list, threads: int) -> list:
    """Map worker over args; result order always follows args order."""
    if threads <= 1 or len(args_list) <= 1:
        return [worker(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, a) for a in args_list]
        return [f.result() for f in futures]


def _mean_padded(arrays: list[np.ndarray]) -> np.ndarray:
    """Mean of cumulative curves, holding shorter runs at their final value."""
    length = max(len(a) for a in arrays)
    acc = np.zeros(length, dtype=np.float64)
    for a in arrays:
        acc[:len(a)] += a
        acc[len(a):] += a[-1]
    return acc / len(arrays)


# ---------------------------------------------------------------------------
# diffusion experiments

TRACE_HEADER = ["model", "k", "seed_fraction", "trial", "step",
                "cum_recipients", "cum_forwarders", "cum_followers"]
MEAN_TRACE_HEADER = ["model", "k", "seed_fraction", "step",
                     "mean_recipients", "mean_forwarders", "mean_followers"]
PEAK_RATE_HEADER = ["profile_set", "model", "k", "seed_fraction",
                    "step_duration_h", "lead_time_h", "mean_rate", "sd_rate"]
INCREMENT_HEADER = ["model", "k", "seed_fraction", "step_duration_h",
                    "rate_with_link", "rate_no_link", "increment"]

WITH_LINK = "with_link"
NO_LINK = "no_link"


def load_profile_sets(dcfg: DiffusionConfig, master_seed: int) -> list[tuple[str, ProfileSet]]:
    """Profile sets keyed by label; two sets enable the link-omission
    comparison."""
    if dcfg.profile_source == "synthetic":
        sets = []
        for label, with_link in ((WITH_LINK, True), (NO_LINK, False)):
            dist = default_distributions(dcfg.model, with_link=with_link)
            pset = synthesize_profiles(dcfg.n_profiles, dist,
                                       int_seed(master_seed, "profiles", label))
            sets.append((label, pset))
        return sets
    path = Path(dcfg.profile_source)
    if not path.is_file():
        raise ConfigError(f"profile CSV not found: {path}")
    sets = [(WITH_LINK, load_profiles(path))]
    if dcfg.profiles_no_link:
        other = Path(dcfg.profiles_no_link)
        if not other.is_file():
            raise ConfigError(f"profile CSV not found: {other}")
        sets.append((NO_LINK, load_profiles(other)))
    for _, pset in sets:
        if pset.model != dcfg.model:
            raise ConfigError(
                f"profile set is for model {pset.model}, config says {dcfg.model}")
    return sets


def _diffusion_replicate(args):
    """One network replicate: every (profile set, k, seed fraction) cascade."""
    (replicate, master_seed, dcfg, sets) = args
    net = generate_scale_free(dcfg.n_nodes, dcfg.attachment,
                              derive_seed(master_seed, "network", replicate))
    out = {}
    for label, pset in sets:
        asg = assign_profiles(net, pset,
                              int_seed(master_seed, "assign", label, str(replicate)))
        for k in dcfg.k_values:
            for frac in dcfg.seed_fractions:
                cfg = PropagationConfig(
                    model=dcfg.model, k=k, seed_fraction=frac,
                    rng_seed=int_seed(master_seed, "cascade", label, str(k),
                                      repr(frac), str(replicate)))
                tr = run_cascade(net, asg, cfg)
                rates = {dur: follow_through_rate_at_peak(tr, dur, dcfg.lead_time_h)
                         for dur in dcfg.step_durations_h}
                out[(label, k, frac)] = (tr.cum_recipients, tr.cum_forwarders,
                                         tr.cum_followers, rates)
    return replicate, out


@dataclass
class DiffusionResult:
    n_nodes: int
    # (label, k, seed_fraction, step_duration) -> (mean rate, sd)
    peak_rates: dict[tuple[str, int, float, int], tuple[float, float]]
    paths: dict[str, Path] = field(default_factory=dict)


def run_diffusion_experiment(cfg: ExperimentConfig, out_dir=None,
                             threads: int = 1) -> DiffusionResult:
    dcfg = cfg.require_diffusion()
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    sets = load_profile_sets(dcfg, cfg.master_seed)

    args = [(i, cfg.master_seed, dcfg, sets) for i in range(dcfg.n_networks)]
    by_replicate = dict(_run_tasks(_diffusion_replicate, args, threads))

    combos = [(label, k, frac) for label, _ in sets
              for k in dcfg.k_values for frac in dcfg.seed_fractions]
    result = DiffusionResult(n_nodes=dcfg.n_nodes, peak_rates={})

    for label, _ in sets:
        trace_rows = []
        mean_rows = []
        for _, k, frac in [c for c in combos if c[0] == label]:
            curves = [by_replicate[i][(label, k, frac)]
                      for i in range(dcfg.n_networks)]
            for trial, (rec, fwd, fol, _) in enumerate(curves):
                for step in range(len(rec)):
                    trace_rows.append([dcfg.model, k, frac, trial, step,
                                       int(rec[step]), int(fwd[step]), int(fol[step])])
            means = [_mean_padded([c[j] for c in curves]) for j in range(3)]
            for step in range(len(means[0])):
                mean_rows.append([dcfg.model, k, frac, step,
                                  means[0][step], means[1][step], means[2][step]])
        p = out / f"traces_{label}.csv"
        _write_csv(p, TRACE_HEADER, trace_rows)
        result.paths[f"traces_{label}"] = p
        p = out / f"mean_traces_{label}.csv"
        _write_csv(p, MEAN_TRACE_HEADER, mean_rows)
        result.paths[f"mean_traces_{label}"] = p

    rate_rows = []
    for label, k, frac in combos:
        for dur in dcfg.step_durations_h:
            vals = np.array([by_replicate[i][(label, k, frac)][3][dur]
                             for i in range(dcfg.n_networks)])
            mean, sd = float(vals.mean()), float(vals.std())
            result.peak_rates[(label, k, frac, dur)] = (mean, sd)
            rate_rows.append([label, dcfg.model, k, frac, dur,
                              dcfg.lead_time_h, mean, sd])
    p = out / "peak_rates.csv"
    _write_csv(p, PEAK_RATE_HEADER, rate_rows)
    result.paths["peak_rates"] = p

    labels = [label for label, _ in sets]
    if WITH_LINK in labels and NO_LINK in labels:
        inc_rows = []
        for k in dcfg.k_values:
            for frac in dcfg.seed_fractions:
                for dur in dcfg.step_durations_h:
                    with_l = result.peak_rates[(WITH_LINK, k, frac, dur)][0]
                    no_l = result.peak_rates[(NO_LINK, k, frac, dur)][0]
                    inc_rows.append([dcfg.model, k, frac, dur,
                                     with_l, no_l, no_l - with_l])
        p = out / "increments.csv"
        _write_csv(p, INCREMENT_HEADER, inc_rows)
        result.paths["increments"] = p

    validate_diffusion_outputs(result)
    return result


def validate_diffusion_outputs(result: DiffusionResult) -> None:
    """Re-read emitted CSVs and check schema plus basic invariants."""
    for key, path in result.paths.items():
        header, rows = _read_csv(path)
        expect = {"peak_rates": PEAK_RATE_HEADER, "increments": INCREMENT_HEADER}.get(
            key, MEAN_TRACE_HEADER if key.startswith("mean_traces") else TRACE_HEADER)
        if header != expect:
            raise RuntimeError(f"{path}: bad header {header}")
        if not rows:
            raise RuntimeError(f"{path}: no data rows")
    for (label, k, frac, dur), (mean, _) in result.peak_rates.items():
        if not 0.0 <= mean <= 1.0:
            raise RuntimeError(f"peak rate out of range for {label}/k={k}: {mean}")
    for key in result.paths:
        if not key.startswith("traces"):
            continue
        header, rows = _read_csv(result.paths[key])
        last: dict[tuple, tuple] = {}
        for row in rows:
            run = (row[1], row[2], row[3])
            cums = tuple(int(v) for v in row[5:8])
            if run in last and any(c < p for c, p in zip(cums, last[run])):
                raise RuntimeError(f"{result.paths[key]}: trace not monotone at {row}")
            last[run] = cums


# ---------------------------------------------------------------------------
# grid sweeps

SWEEP_HEADER = ["follow_rate", "ev_rate", "supported_ev_rate", "trial",
                "blackout_fraction"]
HEATMAP_HEADER = ["follow_rate", "ev_rate", "mean_blackout_fraction"]


def city_for(cfg: ExperimentConfig):
    """The configured city: loaded from geometry if given, else synthetic."""
    gcfg = cfg.require_grid()
    if gcfg.geometry_path is not None:
        path = Path(gcfg.geometry_path)
        if not path.is_file():
            raise ConfigError(f"geometry file not found: {path}")
        return load_city(path)
    return generate_synthetic_city(gcfg.n_buildings, gcfg.n_substations,
                                   gcfg.extent_m,
                                   seed=int_seed(cfg.master_seed, "city"))


def build_city_grid(cfg: ExperimentConfig) -> GridModel:
    gcfg = cfg.require_grid()
    city = city_for(cfg)
    try:
        return build_grid(city, max_children=gcfg.max_children)
    except InfeasibleTreeError as exc:
        raise RuntimeError(
            f"feeder construction failed for this city "
            f"(max_children={gcfg.max_children}): {exc}") from exc


def _calibrated_trees(grid: GridModel, gcfg: GridConfig, supported_ev: float,
                      res_seed: int, load_seed: int, params: LoadParams):
    """Capacities sized for the supported EV rate with no attack underway."""
    ids = np.array(sorted(b.id for b in grid.city.buildings))
    res = assign_residents(ids, gcfg.occupancy_hist, supported_ev, 0.0, res_seed)
    regular = build_regular_loads(res, params, load_seed)
    full = _scatter(ids, regular)
    return [calibrate_capacities(t, baseline_peak_flows(t, res, full), gcfg.headroom)
            for t in grid.trees]


def _scatter(ids: np.ndarray, loads: np.ndarray) -> np.ndarray:
    """Row-per-resident matrix -> array indexed by building id."""
    full = np.zeros((int(ids.max()) + 1, loads.shape[1]))
    full[ids] = loads
    return full


def _sweep_cell(args):
    """All follow rates for one (trial, EV rate) cell; calibration amortized."""
    (trial, ev_rate, grid, gcfg, master_seed, follow_rates) = args
    params = LoadParams()
    res_seed = derive_seed(master_seed, "sweep-residents", trial)
    load_seed = derive_seed(master_seed, "sweep-loads", trial)
    supported = gcfg.supported_ev_rate if gcfg.supported_ev_rate is not None else ev_rate
    trees = _calibrated_trees(grid, gcfg, supported, res_seed, load_seed, params)
    ids = np.array(sorted(b.id for b in grid.city.buildings))
    total = grid.total_buildings

    fractions = []
    for f in follow_rates:
        res = assign_residents(ids, gcfg.occupancy_hist, ev_rate, f, res_seed)
        attack = _scatter(ids, build_attack_loads(res, params, load_seed))
        dark = sum(len(union_disconnected(attack_window_states(t, attack)))
                   for t in trees)
        fractions.append(dark / total)
    return fractions


@dataclass
class SweepResult:
    follow_rates: tuple[float, ...]
    ev_rates: tuple[float, ...]
    # rows of (follow_rate, ev_rate, supported_ev_rate, trial, blackout_fraction)
    rows: list[tuple[float, float, float, int, float]]
    paths: dict[str, Path] = field(default_factory=dict)

    def mean_blackout(self, follow_rate: float, ev_rate: float) -> float:
        vals = [r[4] for r in self.rows
                if r[0] == follow_rate and r[1] == ev_rate]
        return sum(vals) / len(vals)


def run_grid_sweep(cfg: ExperimentConfig, out_dir=None, threads: int = 1,
                   follow_rates: tuple[float, ...] | None = None) -> SweepResult:
    gcfg = cfg.require_grid()
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    follow = tuple(follow_rates) if follow_rates is not None else gcfg.follow_rates
    grid = build_city_grid(cfg)

    cells = [(t, e) for t in range(gcfg.n_trials) for e in gcfg.ev_rates]
    args = [(t, e, grid, gcfg, cfg.master_seed, follow) for t, e in cells]
    outputs = _run_tasks(_sweep_cell, args, threads)

    rows = []
    for (trial, ev_rate), fractions in zip(cells, outputs):
        supported = (gcfg.supported_ev_rate
                     if gcfg.supported_ev_rate is not None else ev_rate)
        for f, bf in zip(follow, fractions):
            rows.append((f, ev_rate, supported, trial, bf))
    rows.sort(key=lambda r: (r[0], r[1], r[3]))

    result = SweepResult(follow_rates=follow, ev_rates=gcfg.ev_rates, rows=rows)
    p = out / "sweep.csv"
    _write_csv(p, SWEEP_HEADER, rows)
    result.paths["sweep"] = p

    heat_rows = [(f, e, result.mean_blackout(f, e))
                 for f in follow for e in gcfg.ev_rates]
    p = out / "heatmap.csv"
    _write_csv(p, HEATMAP_HEADER, heat_rows)
    result.paths["heatmap"] = p

    validate_sweep_outputs(result)
    return result


def validate_sweep_outputs(result: SweepResult) -> None:
    header, rows = _read_csv(result.paths["sweep"])
    if header != SWEEP_HEADER:
        raise RuntimeError(f"sweep.csv: bad header {header}")
    for row in rows:
        f, e, s, _, bf = (float(row[0]), float(row[1]), float(row[2]),
                          row[3], float(row[4]))
        for name, v in (("follow_rate", f), ("ev_rate", e),
                        ("supported_ev_rate", s), ("blackout_fraction", bf)):
            if not 0.0 <= v <= 1.0:
                raise RuntimeError(f"sweep.csv: {name} out of range: {row}")
    header, rows = _read_csv(result.paths["heatmap"])
    if header != HEATMAP_HEADER:
        raise RuntimeError(f"heatmap.csv: bad header {header}")
    want = len(result.follow_rates) * len(result.ev_rates)
    if len(rows) != want:
        raise RuntimeError(f"heatmap.csv: {len(rows)} cells, expected {want}")


# ---------------------------------------------------------------------------
# combined runs and exports

REPORT_HEADER = ["profile_set", "model", "k", "seed_fraction", "step_duration_h",
                 "follow_rate", "ev_rate", "mean_blackout_fraction",
                 "min_blackout_fraction", "max_blackout_fraction"]


def run_end_to_end(cfg: ExperimentConfig, out_dir=None, threads: int = 1):
    """Diffusion peak rates feed the sweep's follow axis; the report links
    each (profile set, model, k, step duration) to blackout outcomes."""
    dcfg = cfg.require_diffusion()
    cfg.require_grid()
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    diff = run_diffusion_experiment(cfg, out, threads)

    def axis_value(rate: float) -> float:
        return round(rate, 6)

    axis = tuple(sorted({axis_value(mean)
                         for mean, _ in diff.peak_rates.values()}))
    sweep = run_grid_sweep(cfg, out, threads, follow_rates=axis)

    by_cell: dict[tuple[float, float], list[float]] = {}
    for f, e, _, _, bf in sweep.rows:
        by_cell.setdefault((f, e), []).append(bf)

    rows = []
    for (label, k, frac, dur), (mean, _) in sorted(diff.peak_rates.items()):
        f = axis_value(mean)
        for e in sweep.ev_rates:
            vals = by_cell[(f, e)]
            rows.append([label, dcfg.model, k, frac, dur, f, e,
                         sum(vals) / len(vals), min(vals), max(vals)])
    p = out / "report.csv"
    _write_csv(p, REPORT_HEADER, rows)
    sweep.paths["report"] = p
    return diff, sweep


LINE_STATUS_HEADER = ["line_id", "parent", "child", "x1", "y1", "x2", "y2",
                      "status"]


def export_line_status(cfg: ExperimentConfig, out_dir=None, *,
                       follow_rate: float | None = None,
                       ev_rate: float | None = None, trial: int = 0) -> Path:
    """Simulate one sweep cell and dump per-line status for the map figure."""
    gcfg = cfg.require_grid()
    if follow_rate is None:
        follow_rate = gcfg.follow_rates[-1]
    if ev_rate is None:
        ev_rate = gcfg.ev_rates[-1]
    if not 0.0 <= follow_rate <= 1.0 or not 0.0 <= ev_rate <= 1.0:
        raise ConfigError("export rates must be inside [0, 1]")
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    grid = build_city_grid(cfg)
    params = LoadParams()
    res_seed = derive_seed(cfg.master_seed, "sweep-residents", trial)
    load_seed = derive_seed(cfg.master_seed, "sweep-loads", trial)
    supported = (gcfg.supported_ev_rate
                 if gcfg.supported_ev_rate is not None else ev_rate)
    trees = _calibrated_trees(grid, gcfg, supported, res_seed, load_seed, params)
    ids = np.array(sorted(b.id for b in grid.city.buildings))
    res = assign_residents(ids, gcfg.occupancy_hist, ev_rate, follow_rate, res_seed)
    attack = _scatter(ids, build_attack_loads(res, params, load_seed))

    rows = []
    for tree in trees:
        status = merge_window_status(attack_window_states(tree, attack))
        rows.extend(line_status_rows(tree, status))
    path = out / "lines.csv"
    _write_csv(path, LINE_STATUS_HEADER, rows)
    return path


def write_grid_artifacts(cfg: ExperimentConfig, out_dir=None) -> Path:
    """Feeder line CSV for the configured city (topology, uncalibrated)."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = build_city_grid(cfg)
    path = out / "feeders.csv"
    write_feeders_csv(grid, path)
    return path
