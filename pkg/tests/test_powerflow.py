import numpy as np
import pytest

from gridspread.grid import (
    Site,
    build_feeder_tree,
    build_grid,
    calibrate_capacities,
    generate_synthetic_city,
)
from gridspread.loads import (
    DEFAULT_OCCUPANCY_HIST,
    LoadParams,
    Residents,
    assign_residents,
    build_attack_loads,
    build_regular_loads,
)
from gridspread.powerflow import (
    ACTIVE,
    DEENERGIZED,
    STATUS_NAMES,
    TRIPPED,
    FlowState,
    attack_window_states,
    baseline_peak_flows,
    blackout_fraction,
    compute_flows,
    line_status_rows,
    merge_window_status,
    simulate_attack_hour,
    union_disconnected,
)
from oracles import subtree_flows


def chain_tree(n=3):
    sub = Site(100, 0.0, 0.0)
    bs = [Site(i, float(i + 1), 0.0) for i in range(n)]
    return build_feeder_tree(bs, sub)


def random_tree(rng, n):
    pts = rng.uniform(0, 1000, size=(n + 1, 2))
    sub = Site(n, float(pts[0, 0]), float(pts[0, 1]))
    bs = [Site(i, float(pts[i + 1, 0]), float(pts[i + 1, 1])) for i in range(n)]
    cap = int(rng.integers(2, 9))
    return build_feeder_tree(bs, sub, max_children=cap)


def test_chain_flows():
    t = chain_tree()
    flows = compute_flows(t, {0: 1.0, 1: 2.0, 2: 3.0})
    assert flows.tolist() == [6.0, 6.0, 5.0, 3.0]


def test_zero_loads_zero_flows():
    t = chain_tree(5)
    flows = compute_flows(t, np.zeros(5))
    assert np.all(flows == 0)


def test_flow_oracle_and_conservation():
    rng = np.random.default_rng(3)
    for trial in range(20):
        n = int(rng.integers(5, 400))
        t = random_tree(rng, n)
        # whole-kW loads keep every partial sum exact in float64, so the two
        # summation orders must agree bit for bit
        loads = rng.integers(0, 100, size=n).astype(np.float64)
        flows = compute_flows(t, loads)
        local = [0.0] + [float(loads[g]) for g in t.node_ids[1:]]
        expect = subtree_flows(t.parent.tolist(), local)
        assert np.array_equal(flows, np.asarray(expect))
        assert flows[0] == loads.sum()

        fractional = rng.random(n) * 5.0
        f2 = compute_flows(t, fractional)
        assert f2[0] == pytest.approx(fractional.sum(), rel=1e-12)


def test_flow_matrix_matches_hourly_vectors():
    rng = np.random.default_rng(8)
    t = random_tree(rng, 60)
    loads = rng.integers(0, 50, size=(60, 24)).astype(np.float64)
    mat = compute_flows(t, loads)
    assert mat.shape == (t.n_nodes, 24)
    for h in (0, 7, 20, 23):
        assert np.array_equal(mat[:, h], compute_flows(t, loads[:, h]))


def test_missing_load_errors():
    t = chain_tree()
    with pytest.raises(ValueError, match="no load value"):
        compute_flows(t, {0: 1.0, 1: 2.0})
    with pytest.raises(ValueError, match="no load value"):
        compute_flows(t, np.ones(2))


def make_residents(n, ev_rate, follow_rate, seed):
    return assign_residents(np.arange(n), DEFAULT_OCCUPANCY_HIST,
                            ev_rate, follow_rate, seed)


def test_baseline_requires_attack_free():
    t = chain_tree()
    r = make_residents(3, 0.0, 1.0, seed=1)
    loads = build_regular_loads(r, LoadParams(), seed=1)
    with pytest.raises(ValueError, match="attack-free"):
        baseline_peak_flows(t, r, loads)


def test_baseline_evening_peak_without_evs():
    rng = np.random.default_rng(5)
    t = random_tree(rng, 80)
    r = make_residents(80, 0.0, 0.0, seed=2)
    loads = build_regular_loads(r, LoadParams(), seed=2)
    base = baseline_peak_flows(t, r, loads)
    flows = compute_flows(t, loads)
    argmax = flows.argmax(axis=1)
    assert np.all((argmax >= 18) & (argmax <= 22))
    assert np.array_equal(base, flows.max(axis=1))


def test_baseline_ev_raises_only_root_path():
    rng = np.random.default_rng(9)
    t = random_tree(rng, 50)
    r = make_residents(50, 0.0, 0.0, seed=3)
    loads = build_regular_loads(r, LoadParams(), seed=3)
    b0 = baseline_peak_flows(t, r, loads)

    target = int(t.node_ids[17])
    loads2 = loads.copy()
    loads2[target, 2:4] += 7.0
    b1 = baseline_peak_flows(t, r, loads2)

    on_path = np.zeros(t.n_nodes, dtype=bool)
    v = 17
    while v != -1:
        on_path[v] = True
        v = int(t.parent[v])
    assert np.all(b1[on_path] >= b0[on_path])
    assert np.array_equal(b1[~on_path], b0[~on_path])


def test_no_followers_no_trips():
    city = generate_synthetic_city(300, 3, seed=4)
    grid = build_grid(city)
    params = LoadParams()
    r = make_residents(300, 0.3, 0.0, seed=11)
    regular = build_regular_loads(r, params, seed=11)
    attack = build_attack_loads(r, params, seed=11)
    for t in grid.trees:
        base = baseline_peak_flows(t, r, regular)
        cal = calibrate_capacities(t, base, 0.10)
        states = attack_window_states(cal, attack)
        for s in states:
            assert np.all(s.status == ACTIVE)
            assert len(s.disconnected_buildings) == 0
        assert blackout_fraction(union_disconnected(states), t.n_buildings) == 0.0


def test_single_line_feeder_trips_under_follower():
    t = chain_tree(1)
    params = LoadParams()
    regular_res = Residents(np.array([0]), np.array([2]),
                            np.array([True]), np.array([False]))
    attack_res = Residents(np.array([0]), np.array([2]),
                           np.array([True]), np.array([True]))
    regular = build_regular_loads(regular_res, params, seed=5)
    base = baseline_peak_flows(t, regular_res, regular)
    cal = calibrate_capacities(t, base, 0.10)
    attack = build_attack_loads(attack_res, params, seed=5)
    state = simulate_attack_hour(cal, attack[:, 20])
    assert state.status[1] == TRIPPED
    assert state.disconnected_buildings.tolist() == [0]
    assert blackout_fraction(state, 1) == 1.0


def test_mid_tree_trip_counts_subtree():
    t = chain_tree(10)
    caps = np.full(11, np.inf)
    caps[7] = 3.9  # local 7 carries its 4-building subtree
    cal = t.with_capacities(caps)
    state = simulate_attack_hour(cal, np.ones(10))
    assert state.status[7] == TRIPPED
    assert np.all(state.status[8:] == DEENERGIZED)
    assert np.all(state.status[1:7] == ACTIVE)
    assert blackout_fraction(state, 10) == 0.4


def test_iterative_vs_simultaneous_labels():
    t = chain_tree(10)
    caps = np.full(11, np.inf)
    caps[3] = 7.9   # overloaded, topmost
    caps[7] = 3.9   # overloaded, nested below
    cal = t.with_capacities(caps)
    loads = np.ones(10)
    sim = simulate_attack_hour(cal, loads, mode="simultaneous")
    it = simulate_attack_hour(cal, loads, mode="iterative")
    assert sim.status[3] == TRIPPED and sim.status[7] == TRIPPED
    assert it.status[3] == TRIPPED and it.status[7] == DEENERGIZED
    assert np.array_equal(np.sort(sim.disconnected_buildings),
                          np.sort(it.disconnected_buildings))
    with pytest.raises(ValueError, match="mode"):
        simulate_attack_hour(cal, loads, mode="eager")


def test_tripping_monotone_in_load():
    rng = np.random.default_rng(12)
    for trial in range(10):
        t = random_tree(rng, 60)
        base_loads = rng.random(60) * 3.0
        caps = compute_flows(t, base_loads) * (1.0 + rng.random(t.n_nodes))
        caps[0] = np.inf
        cal = t.with_capacities(caps)
        lo = base_loads * 1.2
        hi = lo + rng.random(60) * 2.0
        s_lo = simulate_attack_hour(cal, lo)
        s_hi = simulate_attack_hour(cal, hi)
        tripped_lo = s_lo.status == TRIPPED
        tripped_hi = s_hi.status == TRIPPED
        assert np.all(tripped_hi[tripped_lo])
        dark_lo = s_lo.status != ACTIVE
        dark_hi = s_hi.status != ACTIVE
        assert np.all(dark_hi[dark_lo])


def test_uncalibrated_tree_rejected():
    t = chain_tree()
    with pytest.raises(ValueError, match="capacit"):
        simulate_attack_hour(t, np.ones(3))


def test_merge_window_status():
    t = chain_tree(2)
    a = FlowState(t, np.zeros(3), np.array([0, TRIPPED, ACTIVE], dtype=np.int8))
    b = FlowState(t, np.zeros(3), np.array([0, DEENERGIZED, DEENERGIZED], dtype=np.int8))
    merged = merge_window_status([a, b])
    assert merged.tolist() == [0, TRIPPED, DEENERGIZED]
    assert union_disconnected([a, b]).tolist() == [0, 1]


def test_blackout_fraction_errors():
    t = chain_tree(1)
    state = FlowState(t, np.zeros(2), np.zeros(2, dtype=np.int8))
    with pytest.raises(ValueError):
        blackout_fraction(state, 0)


def test_line_status_rows():
    t = chain_tree(3)
    status = np.array([0, ACTIVE, TRIPPED, DEENERGIZED], dtype=np.int8)
    rows = line_status_rows(t, status)
    assert len(rows) == 3
    assert [r[7] for r in rows] == ["active", "tripped", "deenergized"]
    first = rows[0]
    assert first[0] == "L0" and first[1] == 100 and first[2] == 0
    assert first[3:7] == (0.0, 0.0, 1.0, 0.0)
    assert set(STATUS_NAMES) == {"active", "tripped", "deenergized"}
