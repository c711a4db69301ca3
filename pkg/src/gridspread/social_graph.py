"""Synthetic scale-free social networks with flat-array adjacency.

Node ids are dense integers 0..n-1 and adjacency is stored in CSR form
(indptr/indices), which keeps million-node graphs small and cheap to scan.
"""

from __future__ import annotations

import array
import random

import numpy as np


class SocialNetwork:
    """Undirected graph over nodes 0..n-1, immutable after construction."""

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray,
                 generator_params: tuple[int, int] | None = None):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.generator_params = generator_params  # (m, rng_seed) when generated

    @classmethod
    def from_edge_arrays(cls, n: int, u: np.ndarray, v: np.ndarray,
                         generator_params: tuple[int, int] | None = None) -> "SocialNetwork":
        """Build CSR adjacency from undirected edge endpoint arrays.

        Each edge appears once in (u, v); both directions are materialized.
        Neighbor lists come out sorted, so equal edge sets give identical bytes.
        """
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src = src[order]
        dst = dst[order].astype(np.int32, copy=False)
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, dst, generator_params)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def validate(self) -> None:
        """Check undirectedness, no self-loops, no duplicate neighbors."""
        src = np.repeat(np.arange(self.n), self.degrees)
        if np.any(src == self.indices):
            raise ValueError("graph contains a self-loop")
        same_src = src[1:] == src[:-1]
        if np.any(same_src & (self.indices[1:] == self.indices[:-1])):
            raise ValueError("duplicate neighbor entry")
        # symmetry: the multiset of (src, dst) equals the multiset of (dst, src)
        fwd = src.astype(np.int64) * self.n + self.indices
        rev = self.indices.astype(np.int64) * self.n + src
        if not np.array_equal(np.sort(fwd), np.sort(rev)):
            raise ValueError("adjacency is not symmetric")


def generate_scale_free(n: int, m: int, seed: int) -> SocialNetwork:
    """Preferential-attachment graph: complete seed graph on m nodes, then
    each new node attaches to m distinct existing nodes with probability
    proportional to degree.

    Draw convention (part of the reproducibility contract): targets are drawn
    one at a time with random.Random(seed).randrange over the endpoint
    multiset, re-drawing duplicates until m distinct targets are found; after
    each node, accepted targets are appended to the multiset in acceptance
    order, followed by m copies of the new node.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n <= m:
        raise ValueError(f"need n > m, got n={n}, m={m}")

    rnd = random.Random(seed)
    n_edges = m * (m - 1) // 2 + m * (n - m)
    eu = np.empty(n_edges, dtype=np.int32)
    ev = np.empty(n_edges, dtype=np.int32)
    ptr = 0
    for i in range(m):
        for j in range(i + 1, m):
            eu[ptr] = i
            ev[ptr] = j
            ptr += 1

    # endpoint multiset: node id repeated once per incident edge; a compact
    # int array keeps million-node runs off the Python-object heap
    repeats = array.array("i")
    for i in range(m):
        repeats.extend([i] * (m - 1))

    randrange = rnd.randrange
    append = repeats.append
    for source in range(m, n):
        if repeats:
            size = len(repeats)
            targets = []
            seen: set[int] = set()
            while len(targets) < m:
                t = repeats[randrange(size)]
                if t not in seen:
                    seen.add(t)
                    targets.append(t)
        else:
            # m == 1 and only node 0 exists: attachment is forced
            targets = list(range(source))[:m]
        for t in targets:
            eu[ptr] = source
            ev[ptr] = t
            ptr += 1
            append(t)
        repeats.extend([source] * m)

    assert ptr == n_edges
    return SocialNetwork.from_edge_arrays(n, eu, ev, generator_params=(m, seed))


def sample_stranger_recipients(net: SocialNetwork, fraction: float, seed: int) -> np.ndarray:
    """Uniform sample of round(fraction * n) distinct node ids, sorted."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    size = int(round(fraction * net.n))
    rng = np.random.default_rng(seed)
    ids = rng.choice(net.n, size=size, replace=False)
    return np.sort(ids).astype(np.int64)


def degree_histogram(net: SocialNetwork) -> dict[int, int]:
    counts = np.bincount(net.degrees, minlength=1)
    return {int(d): int(c) for d, c in enumerate(counts) if c > 0}


def save_edge_list(net: SocialNetwork, path) -> None:
    """Text export: header `# nodes=<n>`, then one `u v` pair per edge, u < v."""
    with open(path, "w") as fh:
        fh.write(f"# nodes={net.n}\n")
        src = np.repeat(np.arange(net.n), net.degrees)
        mask = src < net.indices
        np.savetxt(fh, np.column_stack([src[mask], net.indices[mask]]), fmt="%d")


def load_edge_list(path) -> SocialNetwork:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# nodes="):
            raise ValueError(f"{path}: missing '# nodes=<n>' header")
        n = int(header.split("=", 1)[1])
        us, vs = [], []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            u, v = int(parts[0]), int(parts[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"{path}:{lineno}: node id out of range")
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop")
            us.append(u)
            vs.append(v)
    net = SocialNetwork.from_edge_arrays(
        n, np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64))
    net.validate()
    return net
