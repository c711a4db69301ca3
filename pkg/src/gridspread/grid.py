"""Synthetic city geometry and radial distribution feeders.

A city is a set of building sites plus substation sites.  Each building
belongs to its nearest substation, and every substation feeds its buildings
through a spanning tree built from short edges under a fan-out cap, giving
the kind of radial network a distribution utility would run.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .seeding import rng_for


class InfeasibleTreeError(RuntimeError):
    """Raised when no spanning tree exists under the fan-out cap."""


@dataclass(frozen=True)
class Site:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class RoadEdge:
    a: int
    b: int
    length: float


@dataclass
class CityModel:
    buildings: list[Site]
    substations: list[Site]
    roads: list[RoadEdge] | None = None

    def validate(self) -> None:
        if not self.substations:
            raise ValueError("city needs at least one substation")
        ids = [s.id for s in self.buildings] + [s.id for s in self.substations]
        if len(set(ids)) != len(ids):
            raise ValueError("site ids must be unique across buildings and substations")
        for s in self.buildings + self.substations:
            if not (math.isfinite(s.x) and math.isfinite(s.y)):
                raise ValueError(f"site {s.id} has non-finite coordinates")
        if self.roads:
            known = set(ids)
            for r in self.roads:
                if r.a not in known or r.b not in known:
                    raise ValueError(f"road ({r.a}, {r.b}) references unknown site")
                if r.length <= 0 or not math.isfinite(r.length):
                    raise ValueError(f"road ({r.a}, {r.b}) has bad length {r.length}")

    def site_by_id(self) -> dict[int, Site]:
        out = {s.id: s for s in self.buildings}
        out.update({s.id: s for s in self.substations})
        return out


def generate_synthetic_city(n_buildings: int, n_substations: int,
                            extent_m: float = 10_000.0, seed: int = 0,
                            clusters: int | None = None,
                            cluster_spread_frac: float = 0.06) -> CityModel:
    """Clustered building placement in a square; substations sit at the
    centers of the busiest clusters.  Building ids are 0..n-1, substation
    ids continue from there.
    """
    if n_buildings < 1:
        raise ValueError(f"n_buildings must be >= 1, got {n_buildings}")
    if n_substations < 1:
        raise ValueError(f"n_substations must be >= 1, got {n_substations}")
    if extent_m <= 0:
        raise ValueError(f"extent_m must be positive, got {extent_m}")
    rng = rng_for(seed, "city")
    if clusters is None:
        clusters = max(n_substations, min(40, 1 + n_buildings // 250))
    centers = rng.uniform(0.08 * extent_m, 0.92 * extent_m, size=(clusters, 2))
    weights = rng.dirichlet(np.full(clusters, 1.5))
    member = rng.choice(clusters, size=n_buildings, p=weights)
    xy = centers[member] + rng.normal(0.0, extent_m * cluster_spread_frac,
                                      size=(n_buildings, 2))
    np.clip(xy, 0.0, extent_m, out=xy)

    buildings = [Site(i, float(xy[i, 0]), float(xy[i, 1])) for i in range(n_buildings)]
    counts = np.bincount(member, minlength=clusters)
    busiest = np.argsort(-counts, kind="stable")[:n_substations]
    substations = [Site(n_buildings + rank, float(centers[c, 0]), float(centers[c, 1]))
                   for rank, c in enumerate(busiest)]
    city = CityModel(buildings, substations)
    city.validate()
    return city


def partition_by_substation(city: CityModel) -> dict[int, np.ndarray]:
    """Nearest substation per building (squared Euclidean, ties to the lower
    substation id).  Returns substation id -> sorted building id array."""
    city.validate()
    subs = sorted(city.substations, key=lambda s: s.id)
    bx = np.asarray([b.x for b in city.buildings])
    by = np.asarray([b.y for b in city.buildings])
    sx = np.asarray([s.x for s in subs])
    sy = np.asarray([s.y for s in subs])
    d2 = (bx[:, None] - sx[None, :]) ** 2 + (by[:, None] - sy[None, :]) ** 2
    nearest = np.argmin(d2, axis=1)  # first minimum = lowest substation id
    bids = np.asarray([b.id for b in city.buildings])
    out = {}
    for j, s in enumerate(subs):
        out[s.id] = np.sort(bids[nearest == j])
    return out


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass
class FeederTree:
    """Radial feeder: node 0 is the substation, nodes 1.. are buildings.

    Per-node arrays describe the line from the node up to its parent; entry 0
    is padding for the root.
    """
    root_id: int
    node_ids: np.ndarray   # global site id per local node
    xs: np.ndarray
    ys: np.ndarray
    parent: np.ndarray     # local parent index, -1 at the root
    depth: np.ndarray
    length_m: np.ndarray   # line length to parent; 0 at the root
    capacity_kw: np.ndarray | None = None

    def __post_init__(self):
        # local index per building id, for load lookups
        self.building_index = {int(g): i for i, g in enumerate(self.node_ids) if i > 0}
        order = np.argsort(self.depth, kind="stable")
        bounds = np.searchsorted(self.depth[order], np.arange(self.depth.max() + 2))
        self.levels = [order[bounds[d]:bounds[d + 1]]
                       for d in range(len(bounds) - 1)]

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_buildings(self) -> int:
        return self.n_nodes - 1

    @property
    def building_ids(self) -> np.ndarray:
        return self.node_ids[1:]

    @property
    def total_length_m(self) -> float:
        return math.fsum(self.length_m[1:].tolist())

    def line_id(self, local: int) -> str:
        return f"L{self.node_ids[local]}"

    def with_capacities(self, capacity_kw: np.ndarray) -> "FeederTree":
        return replace(self, capacity_kw=capacity_kw)


def _euclidean_candidates(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Candidate edge endpoints (local indices, a < b).  Small point sets get
    every pair; larger ones get Delaunay edges, which contain the Euclidean
    MST, so the cap-free tree is still exactly minimal."""
    n = len(xs)
    if n > 256:
        from scipy.spatial import Delaunay, QhullError
        try:
            tri = Delaunay(np.column_stack([xs, ys]))
            s = tri.simplices
            pairs = np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
            pairs = np.sort(pairs, axis=1)
            pairs = np.unique(pairs, axis=0)
            return pairs[:, 0], pairs[:, 1]
        except QhullError:
            pass  # degenerate geometry: fall through to all pairs
    a, b = np.triu_indices(n, k=1)
    return a, b


def build_feeder_tree(buildings: list[Site], substation: Site,
                      road_edges: list[RoadEdge] | None = None,
                      max_children: int | None = 8) -> FeederTree:
    """Span the substation and its buildings with short lines.

    Edges are accepted in ascending length order (ties by endpoint ids) and
    skipped when either endpoint is already at its degree limit: max_children
    at the substation, max_children + 1 at a building (one slot goes to its
    own parent).  Pass max_children=None to disable the cap.
    """
    if not buildings:
        raise ValueError("feeder needs at least one building")
    if max_children is not None and max_children < 1:
        raise ValueError(f"max_children must be >= 1, got {max_children}")
    sites = [substation] + sorted(buildings, key=lambda s: s.id)
    n = len(sites)
    ids = np.asarray([s.id for s in sites], dtype=np.int64)
    xs = np.asarray([s.x for s in sites])
    ys = np.asarray([s.y for s in sites])

    if road_edges is not None:
        local = {int(g): i for i, g in enumerate(ids)}
        ea, eb, ew = [], [], []
        for r in road_edges:
            if r.a in local and r.b in local:
                a, b = sorted((local[r.a], local[r.b]))
                ea.append(a)
                eb.append(b)
                ew.append(r.length)
        ea = np.asarray(ea, dtype=np.int64)
        eb = np.asarray(eb, dtype=np.int64)
        lengths = np.asarray(ew)
    else:
        ea, eb = _euclidean_candidates(xs, ys)
        lengths = np.hypot(xs[ea] - xs[eb], ys[ea] - ys[eb])

    order = np.lexsort((eb, ea, lengths))
    dsu = _DisjointSet(n)
    degree = np.zeros(n, dtype=np.int64)
    cap = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    if max_children is not None:
        cap[0] = max_children
        cap[1:] = max_children + 1

    chosen: list[tuple[int, int]] = []
    merged = 1
    for idx in order:
        a, b = int(ea[idx]), int(eb[idx])
        if degree[a] >= cap[a] or degree[b] >= cap[b]:
            continue
        if dsu.union(a, b):
            chosen.append((a, b))
            degree[a] += 1
            degree[b] += 1
            merged += 1
            if merged == n:
                break
    if merged != n:
        raise InfeasibleTreeError(
            f"cannot span {n - 1} buildings from substation {substation.id} "
            f"under max_children={max_children}; retry with a larger cap")

    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in chosen:
        adj[a].append(b)
        adj[b].append(a)
    parent = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in sorted(adj[v]):
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                depth[w] = depth[v] + 1
                queue.append(w)

    length_m = np.zeros(n)
    mask = parent >= 0
    length_m[mask] = np.hypot(xs[mask] - xs[parent[mask]], ys[mask] - ys[parent[mask]])
    if road_edges is not None:
        # road lengths come from the supplied edges, not coordinates
        weight: dict[tuple[int, int], float] = {}
        for idx in order:
            key = (int(ea[idx]), int(eb[idx]))
            if key not in weight:
                weight[key] = float(lengths[idx])
        for v in range(1, n):
            p = int(parent[v])
            length_m[v] = weight[(min(p, v), max(p, v))]

    return FeederTree(root_id=substation.id, node_ids=ids, xs=xs, ys=ys,
                      parent=parent, depth=depth, length_m=length_m)


def calibrate_capacities(tree: FeederTree, baseline_peak_kw, headroom: float) -> FeederTree:
    """New tree whose line capacities are (1 + headroom) x the regular peak
    flow.  baseline_peak_kw is either an array over local nodes or a
    {line_id: kw} mapping."""
    if headroom < 0:
        raise ValueError(f"headroom must be >= 0, got {headroom}")
    n = tree.n_nodes
    if isinstance(baseline_peak_kw, dict):
        base = np.zeros(n)
        for v in range(1, n):
            lid = tree.line_id(v)
            if lid not in baseline_peak_kw:
                raise ValueError(f"no baseline flow for line {lid}")
            base[v] = baseline_peak_kw[lid]
    else:
        base = np.asarray(baseline_peak_kw, dtype=np.float64)
        if base.shape != (n,):
            raise ValueError(f"baseline array must have shape ({n},), got {base.shape}")
    if np.any(base[1:] < 0):
        raise ValueError("baseline flows must be >= 0")
    capacity = (1.0 + headroom) * base
    capacity[0] = np.inf  # the root is a bus, not a line
    return tree.with_capacities(capacity)


@dataclass
class GridModel:
    city: CityModel
    trees: list[FeederTree]

    @property
    def total_buildings(self) -> int:
        return sum(t.n_buildings for t in self.trees)

    @property
    def calibrated(self) -> bool:
        return all(t.capacity_kw is not None for t in self.trees)


def build_grid(city: CityModel, max_children: int | None = 8) -> GridModel:
    """Partition the city and build one feeder per substation that has
    buildings."""
    part = partition_by_substation(city)
    by_id = city.site_by_id()
    trees = []
    for sub_id in sorted(part):
        bids = part[sub_id]
        if len(bids) == 0:
            continue
        trees.append(build_feeder_tree([by_id[int(b)] for b in bids],
                                       by_id[sub_id], city.roads, max_children))
    return GridModel(city, trees)


# geometry and feeder files

def save_city(city: CityModel, path) -> None:
    doc = {
        "buildings": [{"id": s.id, "x": s.x, "y": s.y} for s in city.buildings],
        "substations": [{"id": s.id, "x": s.x, "y": s.y} for s in city.substations],
    }
    if city.roads:
        doc["roads"] = [{"a": r.a, "b": r.b, "length": r.length} for r in city.roads]
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_city(path) -> CityModel:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        buildings = [Site(int(b["id"]), float(b["x"]), float(b["y"]))
                     for b in doc["buildings"]]
        substations = [Site(int(s["id"]), float(s["x"]), float(s["y"]))
                       for s in doc["substations"]]
        roads = None
        if "roads" in doc:
            roads = [RoadEdge(int(r["a"]), int(r["b"]), float(r["length"]))
                     for r in doc["roads"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: bad geometry document: {exc}") from None
    city = CityModel(buildings, substations, roads)
    city.validate()
    return city


def write_feeders_csv(grid: GridModel, path) -> None:
    """One row per line: line_id,parent,child,length_m,capacity_kw."""
    with open(path, "w", newline="") as fh:
        fh.write("line_id,parent,child,length_m,capacity_kw\n")
        for tree in grid.trees:
            for v in range(1, tree.n_nodes):
                cap = "" if tree.capacity_kw is None else str(float(tree.capacity_kw[v]))
                fh.write(f"{tree.line_id(v)},{tree.node_ids[tree.parent[v]]},"
                         f"{tree.node_ids[v]},{float(tree.length_m[v])},{cap}\n")
