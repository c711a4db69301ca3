"""Independent reference implementations used to check the fast engines.

Everything here favors clarity over speed: plain dicts, sets, and python
loops, no shared code with the package internals.
"""

from __future__ import annotations

import itertools
import random


def reference_preferential_attachment(n: int, m: int, seed: int) -> dict[int, set[int]]:
    """Step-by-step preferential attachment on dict-of-sets adjacency.

    Mirrors the documented draw convention of generate_scale_free: a
    random.Random(seed) stream, targets drawn one at a time by indexing the
    endpoint multiset, duplicates re-drawn, accepted targets appended to the
    multiset in acceptance order followed by m copies of the new node.
    """
    rnd = random.Random(seed)
    adj: dict[int, set[int]] = {v: set() for v in range(n)}

    def connect(a: int, b: int) -> None:
        adj[a].add(b)
        adj[b].add(a)

    for i in range(m):
        for j in range(i + 1, m):
            connect(i, j)

    multiset: list[int] = []
    for i in range(m):
        multiset.extend([i] * len(adj[i]))

    for source in range(m, n):
        if multiset:
            targets: list[int] = []
            while len(targets) < m:
                t = multiset[rnd.randrange(len(multiset))]
                if t not in targets:
                    targets.append(t)
        else:
            targets = list(range(source))[:m]
        for t in targets:
            connect(source, t)
            multiset.append(t)
        multiset.extend([source] * m)
    return adj


def deterministic_cascade(adj: dict[int, set[int]], recipients, params: dict,
                          model: str, max_steps: int = 64) -> dict:
    """Exhaustive propagation for parameters where every trial is decided.

    Probabilities must be 0 or 1; thresholds are exact by nature.  Forwarding
    floods every neighbor, i.e. the caller must run the engine with k at
    least the maximum degree.  params maps node -> field dict.
    """
    received: set[int] = set()
    followed: set[int] = set()
    forwarded: set[int] = set()
    senders_of: dict[int, set[int]] = {v: set() for v in adj}

    for v in recipients:
        received.add(v)
        if params[v]["follow_stranger"] == 1:
            followed.add(v)
        if params[v]["forward_stranger"] == 1:
            forwarded.add(v)

    def deliveries_from(sources) -> list[tuple[int, int]]:
        out = []
        for s in sorted(sources):
            if model == "IC" and params[s]["forward_friend"] != 1:
                continue
            for t in sorted(adj[s]):
                out.append((s, t))
        return out

    pending = deliveries_from(forwarded)
    followers_by_step = [len(followed)]
    steps = 0
    while steps < max_steps:
        steps += 1
        changed = False
        exposed: set[int] = set()
        for s, t in pending:
            senders_of[t].add(s)
            exposed.add(t)
            if t not in received:
                received.add(t)
                changed = True
        new_forwarders: set[int] = set()
        for t in exposed:
            if t not in followed:
                if model == "IC":
                    ok = params[t]["follow_friend"] == 1
                else:
                    ok = len(senders_of[t]) >= params[t]["threshold_follow"]
                if ok:
                    followed.add(t)
                    changed = True
            if t not in forwarded:
                if model == "IC":
                    ok = params[t]["forward_friend"] == 1
                else:
                    ok = len(senders_of[t]) >= params[t]["threshold_forward"]
                if ok:
                    forwarded.add(t)
                    new_forwarders.add(t)
                    changed = True
        pending = deliveries_from(new_forwarders)
        followers_by_step.append(len(followed))
        if not changed:
            break
    return {"received": received, "followed": followed, "forwarded": forwarded,
            "followers_by_step": followers_by_step, "steps": steps}


def star_expected_followers(p_deliver: float, p_follow_leaf: float,
                            n_leaves: int = 3) -> float:
    """Exact expected follower count for a seeded star hub that commits to
    forwarding: enumerate every subset of leaves that could receive."""
    total = 0.0
    for bits in itertools.product((0, 1), repeat=n_leaves):
        prob = 1.0
        expected = 1.0  # the hub itself
        for b in bits:
            prob *= p_deliver if b else 1.0 - p_deliver
            expected += b * p_follow_leaf
        total += prob * expected
    return total


def reference_mst_length(xs, ys) -> float:
    """Total Euclidean MST length via scipy's csgraph solver."""
    import math

    import numpy as np
    from scipy.sparse.csgraph import minimum_spanning_tree

    pts = np.column_stack([xs, ys])
    d = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
    mst = minimum_spanning_tree(d)
    return math.fsum(mst.data.tolist())


def brute_force_min_spanning_length(xs, ys) -> float:
    """Exact minimum spanning length by enumerating all edge subsets; only
    sensible for a handful of points."""
    import math

    n = len(xs)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    best = None
    for subset in itertools.combinations(pairs, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b in subset:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if not ok:
            continue
        total = math.fsum(math.hypot(xs[a] - xs[b], ys[a] - ys[b]) for a, b in subset)
        if best is None or total < best:
            best = total
    return best


def brute_force_nearest_substation(buildings, substations) -> dict[int, int]:
    """building id -> substation id by squared distance, ties to lower id."""
    out = {}
    for b in buildings:
        best = None
        for s in sorted(substations, key=lambda s: s.id):
            d2 = (b.x - s.x) ** 2 + (b.y - s.y) ** 2
            if best is None or d2 < best[0]:
                best = (d2, s.id)
        out[b.id] = best[1]
    return out


def subtree_flows(parent, loads) -> list[float]:
    """O(n^2) per-line flow: walk every node's ancestor chain and add its
    load along the way.  Entry v is the flow on the line above node v;
    entry 0 accumulates the total injection."""
    n = len(parent)
    flow = [0.0] * n
    for u in range(n):
        w = u
        while w != -1:
            flow[w] += loads[u]
            w = parent[w]
    return flow


def random_simple_graph(rnd: random.Random, max_nodes: int = 10) -> dict[int, set[int]]:
    """Small Erdos-Renyi style graph as dict-of-sets (possibly disconnected)."""
    n = rnd.randint(2, max_nodes)
    p = rnd.uniform(0.15, 0.7)
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rnd.random() < p:
                adj[u].add(v)
                adj[v].add(u)
    return adj
