"""Property-based tests of the structural invariants."""

from __future__ import annotations

import math

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from blossom_scale.blossom_forest import BlossomForest, SetPartition
from blossom_scale.cli_io import Instance, generate, parse_instance, render_instance
from blossom_scale.dismantler import Config, solve_matching
from blossom_scale.duals import Certificate, DualState, InheritedFamily, verify_certificate
from blossom_scale.edmonds_engine import BucketPQ
from blossom_scale.errors import Infeasible
from blossom_scale.ffactor import solve_ffactor
from blossom_scale.graph_core import Multigraph, degrees, delta, gamma
from blossom_scale.oracle_verify import (
    brute_ffactor, brute_perfect_matching, brute_perfect_matching_dp, check_alternating_walk)

SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])


@st.composite
def multigraphs(draw, max_n=6, max_m=10, wlo=-30, whi=60, fmax=1):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_m))
    edges = [(draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)),
              draw(st.integers(wlo, whi))) for _ in range(m)]
    caps = [draw(st.integers(1, fmax)) for _ in range(n)]
    return Multigraph(n, edges, caps)


# ----------------------------------------------------------------------
# Edge sets


@SETTINGS
@given(multigraphs(), st.data())
def test_edge_set_splits_into_inside_cut_and_outside(g, data):
    edges = data.draw(st.sets(st.integers(0, max(0, g.m - 1)))) if g.m else set()
    inside = data.draw(st.sets(st.integers(0, g.n - 1)))
    outside = set(range(g.n)) - inside
    parts = gamma(g, inside, edges) + delta(g, inside, edges) + gamma(g, outside, edges)
    assert sorted(parts) == sorted(edges)
    assert sum(degrees(g, edges)) == 2 * len(edges)


# ----------------------------------------------------------------------
# Blossom trails


@st.composite
def nested_blossoms(draw):
    """An odd ring of children, each a vertex or a triangle blossom.

    Links (1,2), (3,4), ... of the ring are matched; every child blossom
    other than the base child hangs on its matched link by its base.
    """
    k = 2 * draw(st.integers(1, 3)) + 1
    eu: list[int] = []
    ev: list[int] = []
    matched: list[bool] = []

    def edge(u, v, m):
        eu.append(u)
        ev.append(v)
        matched.append(m)
        return len(eu) - 1

    children = []  # (vertices, base, is_triangle, triangle edges)
    nv = 0
    for _ in range(k):
        if draw(st.booleans()):
            a, b, c = nv, nv + 1, nv + 2
            nv += 3
            tri = [edge(a, b, False), edge(b, c, True), edge(c, a, False)]
            children.append(([a, b, c], a, tri))
        else:
            children.append(([nv], nv, None))
            nv += 1
    links = []
    for i in range(k):
        j = (i + 1) % k
        m = i % 2 == 1
        # a matched link attaches at both bases; an unmatched one anywhere
        u = children[i][1] if m else draw(st.sampled_from(children[i][0]))
        v = children[j][1] if m else draw(st.sampled_from(children[j][0]))
        links.append((edge(u, v, m), u, v))
    fr = BlossomForest(nv, eu, ev)
    nodes = []
    for i, (verts, base, tri) in enumerate(children):
        if tri is None:
            nodes.append(base)
            continue
        a, b, c = verts
        if i == 0:
            eta = -1
        elif i % 2 == 1:
            eta = links[i][0]
        else:
            eta = links[i - 1][0]
        nodes.append(fr.new_blossom([a, b, c], [(tri[0], a, b), (tri[1], b, c), (tri[2], c, a)],
                                    base=a, eta=eta))
    outer = fr.new_blossom(nodes, links, base=children[0][1], eta=-1)
    g = Multigraph(nv, list(zip(eu, ev, [0] * len(eu))))
    return g, fr, outer, matched


@SETTINGS
@given(nested_blossoms())
def test_path_to_base_alternates_inside_the_blossom(case):
    g, fr, outer, matched = case
    inside = set(fr.leaves(outer))
    mset = [e for e in range(g.m) if matched[e]]
    for x in sorted(inside):
        walk = fr.path_to_base(outer, x, matched)
        if x == fr.base[outer]:
            assert walk == []
            continue
        assert walk and matched[walk[0]] and not matched[walk[-1]]
        assert check_alternating_walk(walk, mset, g)
        assert all(g.eu[e] in inside and g.ev[e] in inside for e in walk)
        # the walk runs from x to the base
        ends = [g.eu[walk[-1]], g.ev[walk[-1]]]
        assert fr.base[outer] in ends
        assert x in (g.eu[walk[0]], g.ev[walk[0]])


@SETTINGS
@given(nested_blossoms())
def test_blossom_family_is_laminar(case):
    _g, fr, _outer, _matched = case
    sets = [set(fr.leaves(b)) for b in fr.live_blossoms()]
    for a in sets:
        for b in sets:
            assert a <= b or b <= a or not (a & b)


# ----------------------------------------------------------------------
# Duals


@st.composite
def inherited_states(draw):
    n = draw(st.integers(2, 7))
    k = draw(st.integers(0, 4))
    parent = [draw(st.integers(i + 1, k)) if i + 1 <= k else -1 for i in range(k)]
    parent = [p if p < k else -1 for p in parent]
    leaf_of = [draw(st.integers(-1, k - 1)) for _ in range(n)]
    z0 = [2 * draw(st.integers(1, 6)) for _ in range(k)]
    edges = [(draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)), 0)
             for _ in range(draw(st.integers(1, 8)))]
    yp = [draw(st.integers(-20, 20)) for _ in range(n)]
    moves = draw(st.lists(st.integers(0, max(0, k - 1)), max_size=6)) if k else []
    return n, parent, leaf_of, z0, edges, yp, moves


@SETTINGS
@given(inherited_states())
def test_translation_keeps_primed_duals_and_hyz_matches_raw_duals(case):
    n, parent, leaf_of, z0, edges, yp, moves = case
    g = Multigraph(n, edges)
    inh = InheritedFamily(n, parent, z0, leaf_of, [1] * n)
    st_ = DualState(n, g.f, g.eu, g.ev, [0] * g.m, offset=2, fmode=False)
    st_.inherited = inh
    st_.yp = list(yp)
    for b in moves:
        if inh.z[b] > 0:
            before = list(st_.yp)
            inh.unit_translate(b)
            assert st_.yp == before
    for e in range(g.m):
        u, v = g.eu[e], g.ev[e]
        raw_y = [st_.yp[x] - inh.half_z_above(x) for x in range(n)]
        common = set(inh.chain(u)) & set(inh.chain(v))
        raw = raw_y[u] + raw_y[v] + sum(inh.z[b] for b in common)
        assert st_.hyz(e) == raw


# ----------------------------------------------------------------------
# Oracles and solvers


@SETTINGS
@given(multigraphs(max_n=8, max_m=12))
def test_oracles_agree_with_unit_caps(g):
    a = brute_perfect_matching(g)
    assert (None if a is None else a[0]) == brute_perfect_matching_dp(g)
    b = brute_ffactor(g)
    assert (None if a is None else a[0]) == (None if b is None else b[0])


@SETTINGS
@given(multigraphs(max_n=8, max_m=14, wlo=-100, whi=1000))
def test_scaling_matching_is_optimal(g):
    best = brute_perfect_matching(g)
    try:
        res = solve_matching(g, Config(assert_bounds=True, check_scales=True))
    except Infeasible:
        assert best is None
        return
    assert res.weight == best[0]
    assert verify_certificate(res.certificate, g).ok
    assert all(not s.certificate_violations and not s.window_violations for s in res.scales)


@SETTINGS
@given(multigraphs(max_n=5, max_m=9, wlo=-20, whi=300, fmax=3))
def test_scaling_ffactor_is_optimal(g):
    best = brute_ffactor(g)
    try:
        res = solve_ffactor(g, Config(assert_bounds=True, check_scales=True))
    except Infeasible:
        assert best is None
        return
    assert res.weight == best[0]
    assert verify_certificate(res.certificate, g).ok
    for rep in res.layer:
        assert rep.size_ok and not rep.middle_not_tight
        assert not rep.placement_violations and not rep.single_exit_violations
        assert rep.tighten_translations <= 2 * g.n


@SETTINGS
@given(multigraphs(max_n=6, max_m=10, fmax=3))
def test_certificate_text_round_trips(g):
    try:
        res = solve_ffactor(g) if not g.is_matching_instance() else solve_matching(g)
    except Infeasible:
        return
    text = res.certificate.render(g)
    assert Certificate.parse(text).render(g) == text


# ----------------------------------------------------------------------
# Plumbing


@SETTINGS
@given(multigraphs(max_n=7, max_m=12, fmax=3))
def test_instance_text_round_trips(g):
    kind = "match" if g.is_matching_instance() else "ffactor"
    text = render_instance(Instance(kind, g))
    back = parse_instance(text)
    assert back.kind == kind
    assert back.graph.edges == g.edges and back.graph.f == g.f
    assert render_instance(back) == text


@SETTINGS
@given(st.integers(0, 30), st.integers(0, 40), st.integers(1, 4), st.integers(0, 10**6))
def test_generator_is_deterministic_and_even(n, m, fmax, seed):
    a = generate(n, m, 50, fmax, seed)
    b = generate(n, m, 50, fmax, seed)
    assert render_instance(a) == render_instance(b)
    if fmax > 1:
        assert a.graph.f_total() % 2 == 0
        assert all(1 <= x <= fmax for x in a.graph.f)


@SETTINGS
@given(st.lists(st.tuples(st.integers(0, 40), st.integers(0, 3)), max_size=40),
       st.integers(1, 8))
def test_bucket_queue_pops_in_order(events, page):
    pq = BucketPQ(page)
    for i, (t, kind) in enumerate(events):
        pq.push(t, kind, i)
    out = []
    while (item := pq.pop()) is not None:
        out.append(item)
    assert out == sorted(((t, k, i) for i, (t, k) in enumerate(events)))


@SETTINGS
@given(st.integers(2, 40), st.data())
def test_set_partition_relabel_count(n, data):
    p = SetPartition(n)
    for v in range(n):
        p.make_set(v, [v])
    live = list(range(n))
    while len(live) > 1:
        i = data.draw(st.integers(0, len(live) - 1))
        j = data.draw(st.integers(0, len(live) - 2))
        j += j >= i
        a, b = live[i], live[j]
        keep = p.union(a, b)
        live = [x for x in live if x not in (a, b)] + [keep]
    assert p.relabels <= n * math.log2(n)
    assert sorted(p.members[live[0]]) == list(range(n))
