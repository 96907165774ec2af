from __future__ import annotations

import random

import pytest

from blossom_scale.cli_io import generate
from blossom_scale.dismantler import Config, decompose, scale_count, solve_matching
from blossom_scale.duals import InheritedFamily, verify_certificate
from blossom_scale.edmonds_engine import classic_solve
from blossom_scale.errors import Infeasible, OverflowGuard
from blossom_scale.graph_core import Multigraph
from blossom_scale.oracle_verify import brute_perfect_matching

from corpus import random_multigraph


def test_scale_count_is_floor_log2():
    assert scale_count(4, 1) == 2
    assert scale_count(4, 7) == 4
    assert scale_count(1002, 10**6) == 29
    assert scale_count(6, 0) == 2


def test_major_paths_follow_the_largest_child():
    # A = {0..4} holds C = {0,1,2} and D = {3}; B = {5,6,7}; vertex 8 is bare.
    inh = InheritedFamily(9, parent=[-1, -1, 0, 0], z0=[2, 2, 2, 2],
                          leaf_of=[2, 2, 2, 3, 0, 1, 1, 1, -1], f=[1] * 9)
    plan = decompose(inh)
    assert plan.major == [2, -1, -1, -1, -1]
    assert plan.paths == [[3], [0, 2], [1], [4]]


def test_major_child_ties_go_to_lowest_id():
    inh = InheritedFamily(4, parent=[2, 2, -1], z0=[2, 2, 2], leaf_of=[1, 1, 0, 0],
                          f=[1] * 4)
    plan = decompose(inh)
    assert plan.major[2] == 0
    assert plan.paths == [[1], [2, 0], [3]]


def test_major_path_sizes_use_degree_caps():
    # with caps the smaller vertex set can be the heavier child
    inh = InheritedFamily(5, parent=[2, 2, -1], z0=[2, 2, 2], leaf_of=[0, 0, 1, 1, 1],
                          f=[5, 5, 1, 1, 1])
    assert decompose(inh).major[2] == 0


def test_k2_and_square():
    assert solve_matching(Multigraph(2, [(0, 1, 7)])).weight == 7
    g = Multigraph(4, [(0, 1, 3), (1, 2, 8), (2, 3, 2), (3, 0, 9), (0, 2, 1)])
    res = solve_matching(g)
    assert res.weight == 17 and res.matched == [1, 3]


def test_infeasible_and_overflow():
    with pytest.raises(Infeasible):
        solve_matching(Multigraph(3, [(0, 1, 1)]))
    with pytest.raises(Infeasible):
        solve_matching(Multigraph(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)]))
    with pytest.raises(OverflowGuard):
        solve_matching(Multigraph(2, [(0, 1, 1 << 59)]))


def test_negative_weights_loops_and_parallels():
    rng = random.Random(21)
    for _ in range(150):
        n = rng.choice([2, 4, 6, 8])
        g = random_multigraph(rng, n, rng.randint(0, 18), -1000, 1000)
        best = brute_perfect_matching(g)
        if best is None:
            with pytest.raises(Infeasible):
                solve_matching(g)
            continue
        res = solve_matching(g, Config(check_scales=True))
        assert res.weight == best[0]
        assert verify_certificate(res.certificate, g).ok
        assert all(not s.certificate_violations for s in res.scales)


def test_offset_only_when_a_weight_is_negative():
    assert solve_matching(Multigraph(2, [(0, 1, 5)])).certificate.offset == 0
    assert solve_matching(Multigraph(2, [(0, 1, -5)])).certificate.offset == 5


def test_forced_phase_one_passes_stay_exact():
    # A threshold of one free vertex makes even tiny graphs run Phase 1
    # passes; the bound checks assume the default threshold so stay off.
    rng = random.Random(22)
    passes = 0
    for _ in range(120):
        n = rng.choice([6, 8, 10])
        g = random_multigraph(rng, n, rng.randint(n, 3 * n), 0, 50)
        best = brute_perfect_matching(g)
        if best is None:
            continue
        res = solve_matching(g, Config(phase1_threshold=1, check_scales=True))
        assert res.weight == best[0]
        assert all(not s.certificate_violations for s in res.scales)
        passes += sum(s.passes for s in res.scales)
    assert passes > 0


def test_medium_instance_agrees_with_classic_and_networkx():
    nx = pytest.importorskip("networkx")
    for seed in range(3):
        g = generate(40, 160, 10**4, 1, seed=seed, planted=True).graph
        res = solve_matching(g, Config(assert_bounds=True))
        assert res.weight == classic_solve(g).weight
        simple = nx.Graph()
        for (u, v, wt) in g.edges:
            if u != v and (not simple.has_edge(u, v) or simple[u][v]["weight"] < wt):
                simple.add_edge(u, v, weight=wt)
        # Shifting every weight by a large constant makes the maximum
        # weight matching a maximum cardinality one.
        big = 10**6
        for u, v in simple.edges:
            simple[u][v]["weight"] += big
        mate = nx.max_weight_matching(simple, maxcardinality=True)
        assert len(mate) == g.n // 2
        assert res.weight == sum(simple[u][v]["weight"] - big for (u, v) in mate)


def test_trace_is_recorded():
    res = solve_matching(Multigraph(4, [(0, 1, 1), (2, 3, 1), (1, 2, 5)]), Config(trace=True))
    assert res.trace


def test_env_switch_turns_on_bound_checks(monkeypatch):
    monkeypatch.setenv("BLOSSOM_SCALE_ASSERTS", "1")
    assert Config.from_env().assert_bounds
    monkeypatch.setenv("BLOSSOM_SCALE_ASSERTS", "0")
    assert not Config.from_env().assert_bounds
