"""Line flows on radial feeders, overload trips, and blackout accounting.

Flows are computed bottom-up in one pass per hour: a line's flow is the sum
of all building loads in the subtree hanging from it.  A line whose flow
exceeds its capacity trips, taking its whole subtree dark.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import FeederTree

# order matters: merging hours keeps the strongest label
ACTIVE, DEENERGIZED, TRIPPED = 0, 1, 2
STATUS_NAMES = ("active", "deenergized", "tripped")
TRIP_MODES = ("simultaneous", "iterative")


@dataclass
class FlowState:
    """Per-line outcome for one feeder at one hour.

    Arrays are indexed by local tree node; entry v describes the line from
    parent(v) down to v, entry 0 the substation injection.
    """
    tree: FeederTree
    flow_kw: np.ndarray
    status: np.ndarray

    @property
    def disconnected_buildings(self) -> np.ndarray:
        """Global ids of buildings below any tripped line."""
        return self.tree.node_ids[1:][self.status[1:] != ACTIVE]

    @property
    def tripped_lines(self) -> int:
        return int(np.count_nonzero(self.status == TRIPPED))


def _local_loads(tree: FeederTree, loads) -> np.ndarray:
    """Per-local-node load array from a {building_id: kw} dict or a global
    array indexed by building id; 2D arrays carry an hour axis."""
    if isinstance(loads, dict):
        out = np.zeros(tree.n_nodes)
        for v in range(1, tree.n_nodes):
            gid = int(tree.node_ids[v])
            if gid not in loads:
                raise ValueError(f"no load value for building {gid}")
            out[v] = loads[gid]
        return out
    arr = np.asarray(loads, dtype=np.float64)
    ids = tree.node_ids[1:]
    if len(arr) == 0 or ids.max() >= arr.shape[0]:
        raise ValueError(f"no load value for building {int(ids.max())}")
    out = np.zeros((tree.n_nodes,) + arr.shape[1:])
    out[1:] = arr[ids]
    return out


def _accumulate(tree: FeederTree, local_loads: np.ndarray) -> np.ndarray:
    flow = local_loads.copy()
    for level in reversed(tree.levels[1:]):
        np.add.at(flow, tree.parent[level], flow[level])
    return flow


def compute_flows(tree: FeederTree, loads) -> np.ndarray:
    """Flow on every line (and total injection at index 0).

    Accepts per-hour vectors or (buildings, hours) matrices; children are
    folded into parents one depth level at a time.
    """
    return _accumulate(tree, _local_loads(tree, loads))


def baseline_peak_flows(tree: FeederTree, residents, loads_by_hour) -> np.ndarray:
    """Per-line maximum flow over the day under regular behavior.

    Refuses to run when any resident follows the notification: capacities
    must describe the grid before the attack.
    """
    if residents.any_followers:
        raise ValueError("baseline flows must be attack-free; "
                         "got residents with follows_through set")
    flows = compute_flows(tree, loads_by_hour)
    if flows.ndim != 2:
        raise ValueError("loads_by_hour must carry an hour axis")
    return flows.max(axis=1)


def _evaluate_trips(tree: FeederTree, flow: np.ndarray, mode: str) -> np.ndarray:
    if tree.capacity_kw is None:
        raise ValueError("tree has no calibrated capacities")
    if mode not in TRIP_MODES:
        raise ValueError(f"mode must be one of {TRIP_MODES}, got {mode!r}")
    overloaded = flow > tree.capacity_kw
    status = np.zeros(tree.n_nodes, dtype=np.int8)
    for level in tree.levels[1:]:
        parent_dark = status[tree.parent[level]] != ACTIVE
        if mode == "simultaneous":
            status[level] = np.where(overloaded[level], TRIPPED,
                                     np.where(parent_dark, DEENERGIZED, ACTIVE))
        else:
            status[level] = np.where(parent_dark, DEENERGIZED,
                                     np.where(overloaded[level], TRIPPED, ACTIVE))
    return status


def simulate_attack_hour(tree: FeederTree, loads, mode: str = "simultaneous") -> FlowState:
    """Trip evaluation at one hour against calibrated capacities.

    simultaneous: every overloaded line trips, judged on full-connected-load
    flows.  iterative: only overloaded lines without an overloaded ancestor
    trip; their subtrees are shed before deeper lines are judged.  Both modes
    disconnect the same buildings on a tree; the labels differ.
    """
    flow = compute_flows(tree, loads)
    if flow.ndim != 1:
        raise ValueError("attack simulation takes a single hour of loads")
    return FlowState(tree=tree, flow_kw=flow, status=_evaluate_trips(tree, flow, mode))


def attack_window_states(tree: FeederTree, loads_by_hour,
                         hours=(20, 21), mode: str = "simultaneous") -> list[FlowState]:
    """One FlowState per hour of the discount window."""
    flows = _accumulate(tree, _local_loads(tree, loads_by_hour))
    if flows.ndim != 2:
        raise ValueError("loads_by_hour must carry an hour axis")
    return [FlowState(tree=tree, flow_kw=flows[:, h],
                      status=_evaluate_trips(tree, flows[:, h], mode))
            for h in hours]


def merge_window_status(states: list[FlowState]) -> np.ndarray:
    """Strongest per-line label across the window (tripped beats
    de-energized beats active); used for map export."""
    if not states:
        raise ValueError("no states to merge")
    merged = states[0].status.copy()
    for s in states[1:]:
        np.maximum(merged, s.status, out=merged)
    return merged


def union_disconnected(states: list[FlowState]) -> np.ndarray:
    """Buildings dark at any hour of the window, as sorted global ids."""
    if not states:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate([s.disconnected_buildings for s in states]))


def blackout_fraction(state_or_ids, total_buildings: int) -> float:
    """Share of buildings disconnected; accepts a FlowState or an id array."""
    if total_buildings <= 0:
        raise ValueError("total_buildings must be positive")
    if isinstance(state_or_ids, FlowState):
        dark = len(state_or_ids.disconnected_buildings)
    else:
        dark = len(state_or_ids)
    return dark / total_buildings


def line_status_rows(tree: FeederTree, status: np.ndarray) -> list[tuple]:
    """Rows for the line-status CSV: line_id,parent,child,x1,y1,x2,y2,status."""
    rows = []
    for v in range(1, tree.n_nodes):
        p = int(tree.parent[v])
        rows.append((tree.line_id(v), int(tree.node_ids[p]), int(tree.node_ids[v]),
                     float(tree.xs[p]), float(tree.ys[p]),
                     float(tree.xs[v]), float(tree.ys[v]),
                     STATUS_NAMES[int(status[v])]))
    return rows
