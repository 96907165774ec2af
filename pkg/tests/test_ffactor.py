from __future__ import annotations

import random

import pytest

from blossom_scale.dismantler import Config, solve_matching
from blossom_scale.duals import verify_certificate
from blossom_scale.errors import Infeasible, StructureViolation
from blossom_scale.ffactor import (
    FScaleReport, GraphFamily, _eta_arcs, _find_cycle, _weight_split, capacity,
    dissolve_ill_formed, eta_ineligible, expand_all, hyz_graph, solve_ffactor,
    tighten_eta_edges)
from blossom_scale.graph_core import Multigraph, is_f_factor
from blossom_scale.oracle_verify import brute_ffactor

from corpus import ffactor_corpus, random_multigraph


def test_weight_split_is_even_and_sums_back():
    for x in (0, 2, 4, 6, 10, 38, 1000):
        left = _weight_split(x)
        assert left == 2 * (x // 4)
        assert left % 2 == 0 and (x - left) % 2 == 0
    assert _weight_split(10) == 4


def test_capacity_regimes():
    f = [1, 2, 2, 1, 3]
    assert capacity(f, [0, 1, 2, 3, 4], [0, 1, 2], "e_blossom") == 2
    assert capacity(f, [0, 1, 2], [0, 1, 2], "omega", i_edges_inside=1) == 3
    assert capacity(f, [3, 4], [0, 1, 2], "e_blossom") == 0
    with pytest.raises(ValueError):
        capacity(f, [0], [0], "other")


def two_blossom_cycle(w_back: int) -> tuple[Multigraph, GraphFamily]:
    # B0 = {0,1} with base edge 0 = (1,2); B1 = {2,3} with base edge 1 = (3,0)
    g = Multigraph(4, [(1, 2, 0), (3, 0, w_back), (0, 1, 0), (2, 3, 0)])
    fam = GraphFamily(4)
    b0 = fam.add(-1, 4, 0)
    b1 = fam.add(-1, 6, 1)
    fam.leaf_of = [b0, b0, b1, b1]
    return g, fam


def test_graph_family_queries():
    _g, fam = two_blossom_cycle(8)
    inner = fam.add(0, 2, 2)
    fam.leaf_of[0] = inner
    assert fam.chain(0) == [inner, 0]
    assert fam.top(0) == 0 and fam.top(3) == 1
    assert fam.members(0) == [0, 1]
    assert fam.lca(0, 1) == 0 and fam.lca(0, 2) == -1
    fam.remove(inner)
    assert fam.leaf_of[0] == 0 and fam.live() == [0, 1]


def test_hyz_counts_blossoms_by_i_set():
    g, fam = two_blossom_cycle(8)
    y = [1, 2, 3, 4]
    matched = [False, False, True, True]
    # edge 0 is the base edge of B0 (unmatched, so in I(B0)) and leaves
    # B1 as a non-base unmatched edge (not in I(B1))
    assert hyz_graph(fam, g.eu, g.ev, matched, y, 0) == 2 + 3 + 4
    # edge 2 lies inside B0
    assert hyz_graph(fam, g.eu, g.ev, matched, y, 2) == 1 + 2 + 4


def test_directed_cycle_of_base_edges_is_broken():
    g, fam = two_blossom_cycle(8)
    assert _find_cycle(_eta_arcs(fam, g.eu, g.ev)) == [0, 1]
    y = [0, 0, 0, 0]
    matched = [False] * 4
    translations, unfixable = tighten_eta_edges(g, g.w, fam, matched, y)
    # both blossoms move by min z/2 = 2, which dissolves B0
    assert (translations, unfixable) == (2, 0)
    assert y == [2, 2, 2, 2]
    assert fam.alive == [False, True] and fam.z[1] == 2
    assert hyz_graph(fam, g.eu, g.ev, matched, y, 1) == g.w[1] - 2
    assert eta_ineligible(g, g.w, fam, matched, y) == 0


def test_tail_translation_after_cycle():
    g, fam = two_blossom_cycle(6)
    y = [0, 0, 0, 0]
    translations, _unfixable = tighten_eta_edges(g, g.w, fam, [False] * 4, y)
    # the cycle step leaves edge 1 one unit above its target, and one
    # more translation of B1 dissolves it
    assert translations == 3
    assert y == [2, 2, 3, 3]
    assert fam.live() == []


def test_bidirected_pair_is_not_a_cycle():
    g, fam = two_blossom_cycle(8)
    fam.eta = [0, 0]
    assert _find_cycle(_eta_arcs(fam, g.eu, g.ev)) is None


def test_ill_formed_blossom_is_dissolved():
    fam = GraphFamily(3)
    b = fam.add(-1, 4, -1)
    fam.leaf_of = [b, b, -1]
    y = [0, 5, 1]
    assert dissolve_ill_formed(fam, y) == 1
    assert y == [2, 7, 1]
    assert fam.live() == [] and fam.leaf_of == [-1, -1, -1]


def test_translate_rejects_overshoot():
    _g, fam = two_blossom_cycle(8)
    with pytest.raises(StructureViolation):
        fam.translate(0, 3, [0, 0, 0, 0])


def test_no_blossoms_means_no_expansions():
    g = Multigraph(3, [(0, 1, 2), (1, 2, 4), (0, 0, 6)], [2, 1, 1])
    rep = FScaleReport()
    scale, _inh, y_bar, start = expand_all(g, list(g.w), GraphFamily(3), [False] * 3,
                                           [4, 4, 4], rep)
    assert scale.expansions == [] and scale.n == g.n
    assert scale.eu == g.eu and scale.ev == g.ev
    assert y_bar == [4, 4, 4]
    assert start == [False, False, False]
    assert rep.expansions == 0


def test_multigraph_with_loops_and_parallel_edges():
    # parallel edges 0-1 and a loop at 0, caps (2, 2, 1, 1)
    g = Multigraph(4, [(0, 1, 5), (0, 1, 3), (0, 0, 4), (0, 2, 2), (1, 3, 6), (2, 3, 1),
                       (1, 1, 2)], [2, 2, 1, 1])
    best = brute_ffactor(g)
    res = solve_ffactor(g, Config(assert_bounds=True, check_scales=True))
    assert res.weight == best[0]
    assert is_f_factor(g, res.matched)


def test_odd_total_demand_is_infeasible():
    with pytest.raises(Infeasible):
        solve_ffactor(Multigraph(2, [(0, 1, 1), (0, 0, 1)], [2, 1]))


def test_unit_caps_agree_with_matching_solver():
    rng = random.Random(31)
    checked = 0
    while checked < 100:
        n = rng.choice([2, 4, 6, 8])
        g = random_multigraph(rng, n, rng.randint(1, 14), 0, 200)
        try:
            expected = solve_matching(g).weight
        except Infeasible:
            with pytest.raises(Infeasible):
                solve_ffactor(g)
            continue
        assert solve_ffactor(g).weight == expected
        checked += 1


def test_negative_weights():
    rng = random.Random(32)
    checked = 0
    while checked < 60:
        g = random_multigraph(rng, rng.randint(1, 5), rng.randint(1, 10), -80, 80, 3)
        best = brute_ffactor(g)
        if best is None:
            continue
        res = solve_ffactor(g, Config(check_scales=True))
        assert res.weight == best[0]
        assert verify_certificate(res.certificate, g).ok
        checked += 1


def test_final_expansions_use_the_even_split():
    seen = 0
    for item in ffactor_corpus():
        cert = item.result.certificate
        for (e, left) in cert.expansions:
            total = cert.multiplier * (item.graph.w[e] + cert.offset)
            assert left == _weight_split(total)
            seen += 1
    assert seen > 0


def test_multiplier_is_three_times_demand_plus_two():
    g = Multigraph(2, [(0, 1, 3), (0, 1, 4)], [2, 2])
    res = solve_ffactor(g)
    assert res.certificate.multiplier == 3 * 4 + 2
    assert res.weight == 7
