"""
The scaling solver for maximum-weight f-factors.

An f-factor scale works on an expanded graph.  Every edge uv that lies
in the I-set of the smallest blossom around u or v is replaced by a path
u, u', v', v whose two inner vertices have degree cap 1.  The end edges
of the path carry the M-type of uv and split its weight; the middle edge
has weight 0 and the opposite M-type.  Inherited blossoms then need no
I-sets, so the matching dismantler runs on the expanded graph unchanged.

Between scales the expansions are compressed back into their source
edges.  Blossoms left without a base edge are dissolved, and base edges
are then tightened by translating blossoms until every one of them is
eligible or its tail blossom has dissolved.

The state carried from one scale to the next lives on the input graph:
the f-factor, true vertex duals, and a laminar family of blossoms with
their duals and base edges.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .duals import Certificate, DualState, InheritedFamily
from .dismantler import (
    Config, ScaleStats, SolveResult, current_blossoms, dismantle_scale, init_inherited,
    normalize_root, scale_count, state_violations)
from .edmonds_engine import feasibility_check
from .errors import Infeasible, StructureViolation
from .graph_core import Multigraph, check_overflow

__all__ = [
    "Expansion", "GraphFamily", "ExpandedScale", "capacity", "compress",
    "tighten_eta_edges", "expand_all", "solve_ffactor",
]


# ----------------------------------------------------------------------
# Blossom family on the input graph


class GraphFamily:
    """Laminar blossom family on the vertices of the input graph.

    Blossom ids are list positions; a removed blossom stays in the lists
    with alive False.  Top-level blossoms have parent -1, which stands
    for the whole vertex set V.

    Attributes:
        parent, z, eta: Per-blossom parent, dual and base edge (-1: none).
        leaf_of: Innermost live blossom of each vertex, or -1.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.parent: list[int] = []
        self.z: list[int] = []
        self.eta: list[int] = []
        self.alive: list[bool] = []
        self.leaf_of = [-1] * n

    def add(self, parent: int, z: int, eta: int) -> int:
        self.parent.append(parent)
        self.z.append(z)
        self.eta.append(eta)
        self.alive.append(True)
        return len(self.parent) - 1

    def live(self) -> list[int]:
        return [b for b in range(len(self.parent)) if self.alive[b]]

    def chain(self, v: int) -> list[int]:
        """Blossoms containing v, innermost first."""
        out = []
        b = self.leaf_of[v]
        while b != -1:
            out.append(b)
            b = self.parent[b]
        return out

    def contains(self, b: int, v: int) -> bool:
        c = self.leaf_of[v]
        while c != -1:
            if c == b:
                return True
            c = self.parent[c]
        return False

    def top(self, v: int) -> int:
        """Maximal blossom containing v, or -1 when v is a top-level atom."""
        c = self.leaf_of[v]
        while c != -1 and self.parent[c] != -1:
            c = self.parent[c]
        return c

    def members(self, b: int) -> list[int]:
        return [v for v in range(self.n) if self.contains(b, v)]

    def lca(self, u: int, v: int) -> int:
        """Smallest blossom containing both u and v, or -1 for V."""
        cu = set(self.chain(u))
        for b in self.chain(v):
            if b in cu:
                return b
        return -1

    def remove(self, b: int) -> None:
        """Drop blossom b; its children and vertices move to its parent."""
        p = self.parent[b]
        for c in range(len(self.parent)):
            if self.alive[c] and self.parent[c] == b:
                self.parent[c] = p
        for v in range(self.n):
            if self.leaf_of[v] == b:
                self.leaf_of[v] = p
        self.alive[b] = False

    def translate(self, b: int, units: int, y: list[int]) -> bool:
        """Unit-translate b; return True when it dissolves."""
        if units <= 0 or 2 * units > self.z[b]:
            raise StructureViolation(f"cannot translate blossom {b} by {units}")
        self.z[b] -= 2 * units
        for v in self.members(b):
            y[v] += units
        if self.z[b] == 0:
            self.remove(b)
            return True
        return False

    def dissolve(self, b: int, y: list[int]) -> None:
        """Dissolve b at once: y rises by z/2 inside, z drops to 0."""
        half = self.z[b] // 2
        for v in self.members(b):
            y[v] += half
        self.z[b] = 0
        self.remove(b)

    def in_i(self, b: int, e: int, matched: Sequence[bool]) -> bool:
        """I-set membership of an edge that leaves blossom b."""
        return bool(matched[e]) != (e == self.eta[b])

    def compact(self) -> tuple[list[int], list[int], list[int], list[int]]:
        """Live blossoms renumbered densely: (ids, parent, z, leaf_of)."""
        ids = self.live()
        index = {b: i for i, b in enumerate(ids)}
        parent = [index[self.parent[b]] if self.parent[b] != -1 else -1 for b in ids]
        z = [self.z[b] for b in ids]
        leaf = [index[b] if b != -1 else -1 for b in self.leaf_of]
        return ids, parent, z, leaf


def hyz_graph(fam: GraphFamily, eu: Sequence[int], ev: Sequence[int],
              matched: Sequence[bool], y: Sequence[int], e: int) -> int:
    """hyz of an input-graph edge under f-factor blossom rules."""
    u, v = eu[e], ev[e]
    total = y[u] + y[v]
    cu = fam.chain(u)
    cv = fam.chain(v)
    sv = set(cv)
    su = set(cu)
    for b in cu:
        if b in sv:
            total += fam.z[b]
        elif fam.in_i(b, e, matched):
            total += fam.z[b]
    for b in cv:
        if b not in su and fam.in_i(b, e, matched):
            total += fam.z[b]
    return total


def capacity(f: Sequence[int], shell: Sequence[int], blossom: Sequence[int],
             regime: str, i_edges_inside: int = 0) -> int:
    """Capacity of blossom B with respect to shell S.

    For an e-blossom it is floor(f(S & B) / 2).  For a blossom with an
    I-set it is floor((f(S & B) + k) / 2), where k counts the I-edges of
    B with both ends in S.
    """
    common = set(shell) & set(blossom)
    mass = sum(f[v] for v in common)
    if regime == "e_blossom":
        return mass // 2
    if regime == "omega":
        return (mass + i_edges_inside) // 2
    raise ValueError(f"unknown capacity regime {regime!r}")


# ----------------------------------------------------------------------
# Expanded graph of one scale


@dataclass
class Expansion:
    """One expanded edge uv: path u, a, b, v with edge ids left, mid, right."""
    edge: int
    u: int
    v: int
    a: int
    b: int
    left: int
    mid: int
    right: int
    left_weight: int


@dataclass
class ExpandedScale:
    """The expanded graph of a scale together with its expansions."""
    n: int
    f: list[int]
    eu: list[int]
    ev: list[int]
    w: list[int]
    active: list[bool]
    expansions: list[Expansion]
    by_edge: dict[int, int]


@dataclass
class FScaleReport:
    """Checks and counters of the f-factor layer for one scale."""
    ill_formed: int = 0
    tighten_translations: int = 0
    tighten_unfixable: int = 0
    eta_edges: int = 0
    eta_ineligible: int = 0
    eta_out_of_range: int = 0
    compressed_window_violations: int = 0
    expansions: int = 0
    size_ok: bool = True
    middle_not_tight: int = 0
    placement_violations: int = 0
    single_exit_violations: int = 0
    undervalued: int = 0


def _weight_split(x: int) -> int:
    """Left share of an even quantity: 2*floor(x/4), also even."""
    return 2 * (x // 4)


def expand_all(g: Multigraph, w: Sequence[int], fam: GraphFamily, matched: Sequence[bool],
               y: Sequence[int], report: FScaleReport
               ) -> tuple[ExpandedScale, InheritedFamily, list[int], list[bool]]:
    """Expand every I-edge and set up the inherited e-blossoms.

    Returns the expanded graph, its inherited family (z already scaled),
    true y values on the expanded graph, and the starting matching,
    which consists of the undervalued edges only.
    """
    n, m = g.n, g.m
    eu, ev = g.eu, g.ev
    hyz = [hyz_graph(fam, eu, ev, matched, y, e) for e in range(m)]
    delta = [hyz[e] - w[e] for e in range(m)]
    ids, parent, z, leaf = fam.compact()
    index = {b: i for i, b in enumerate(ids)}

    def in_i_smallest(x: int, other: int, e: int) -> bool:
        b = fam.leaf_of[x]
        return b != -1 and not fam.contains(b, other) and fam.in_i(b, e, matched)

    f_bar = list(g.f)
    eu_bar, ev_bar, w_bar = list(eu), list(ev), list(w)
    active = [True] * m
    leaf_bar = list(leaf)
    exps: list[Expansion] = []
    by_edge: dict[int, int] = {}
    side_u: list[bool] = []
    side_v: list[bool] = []
    for e in range(m):
        u, v = eu[e], ev[e]
        if u == v:
            continue
        iu, iv = in_i_smallest(u, v, e), in_i_smallest(v, u, e)
        if not (iu or iv):
            continue
        k = len(exps)
        a, b = n + 2 * k, n + 2 * k + 1
        left = _weight_split(w[e])
        x = Expansion(e, u, v, a, b, m + 3 * k, m + 3 * k + 1, m + 3 * k + 2, left)
        exps.append(x)
        by_edge[e] = k
        side_u.append(iu)
        side_v.append(iv)
        active[e] = False
        f_bar.extend((1, 1))
        eu_bar.extend((u, a, b))
        ev_bar.extend((a, b, v))
        w_bar.extend((left, 0, w[e] - left))
        active.extend((True, True, True))
        meet = fam.lca(u, v)
        place_a = fam.leaf_of[u] if iu else meet
        place_b = fam.leaf_of[v] if iv else meet
        leaf_bar.append(index[place_a] if place_a != -1 else -1)
        leaf_bar.append(index[place_b] if place_b != -1 else -1)
    n_bar = n + 2 * len(exps)
    report.expansions = len(exps)
    fv = g.f_total()
    cap = min(fv, m)
    report.size_ok = (n_bar <= n + 2 * cap and len(eu_bar) - len(exps) <= m + 2 * cap
                      and sum(f_bar) <= 3 * fv)

    inh = InheritedFamily(n_bar, parent, z, leaf_bar, f_bar)

    # Matching: only undervalued edges start matched.
    start = [False] * len(eu_bar)
    d_left: dict[int, int] = {}
    d_right: dict[int, int] = {}
    for k, x in enumerate(exps):
        dl = _weight_split(delta[x.edge])
        d_left[k], d_right[k] = dl, delta[x.edge] - dl
    for e in range(m):
        if delta[e] >= -2:
            continue
        if not matched[e]:
            raise StructureViolation(f"unmatched edge {e} is undervalued after scale-up")
        report.undervalued += 1
        if e not in by_edge:
            u, v = eu[e], ev[e]
            if fam.leaf_of[u] != fam.leaf_of[v]:
                raise StructureViolation(f"undervalued edge {e} joins different blossoms")
            start[e] = True
            continue
        k = by_edge[e]
        if side_u[k]:
            d_left[k], d_right[k] = delta[e], 0
            start[exps[k].left] = True
        else:
            d_left[k], d_right[k] = 0, delta[e]
            start[exps[k].right] = True

    # e-vertex duals: the end edges keep the split slack of their source.
    y_bar = list(y) + [0] * (2 * len(exps))
    for k, x in enumerate(exps):
        for (end, ev_id, edge_id, d) in ((x.u, x.a, x.left, d_left[k]),
                                         (x.v, x.b, x.right, d_right[k])):
            zsum = sum(inh.z[c] for c in inh.chain(ev_id) if c != inh.root)
            y_bar[ev_id] = w_bar[edge_id] + d - (y[end] + zsum)

    scale = ExpandedScale(n_bar, f_bar, eu_bar, ev_bar, w_bar, active, exps, by_edge)
    _check_expansion(scale, inh, fam, matched, y_bar, report)
    return scale, inh, y_bar, start


def _check_expansion(scale: ExpandedScale, inh: InheritedFamily, fam: GraphFamily,
                     matched: Sequence[bool], y_bar: Sequence[int],
                     report: FScaleReport) -> None:
    """Middle edges tight, e-vertex placement, and one matched exit per e-blossom."""
    def split_hyz(e: int) -> int:
        u, v = scale.eu[e], scale.ev[e]
        total = y_bar[u] + y_bar[v]
        a, b = inh.chain(u), set(inh.chain(v))
        return total + sum(inh.z[c] for c in a if c in b)

    for x in scale.expansions:
        if split_hyz(x.mid) != 0:
            report.middle_not_tight += 1
    # Expanded form of the compressed matching.
    mbar = [False] * len(scale.eu)
    for e in range(len(matched)):
        if scale.active[e]:
            mbar[e] = bool(matched[e])
    for x in scale.expansions:
        mbar[x.left] = mbar[x.right] = bool(matched[x.edge])
        mbar[x.mid] = not matched[x.edge]
    ids, _parent, _z, _leaf = fam.compact()
    for i, b in enumerate(ids):
        inside = set(inh.members(i))
        for x in scale.expansions:
            ui, vi = x.u in inside, x.v in inside
            ai, bi = x.a in inside, x.b in inside
            if not ui and not vi:
                ok = not ai and not bi
            elif ui and vi:
                ok = ai and bi
            elif ui:
                ok = not bi and ai == fam.in_i(b, x.edge, matched)
            else:
                ok = not ai and bi == fam.in_i(b, x.edge, matched)
            if not ok:
                report.placement_violations += 1
        exits = [e for e in range(len(scale.eu)) if scale.active[e] and mbar[e]
                 and (scale.eu[e] in inside) != (scale.ev[e] in inside)]
        eta = fam.eta[b]
        allowed = {eta}
        if eta in scale.by_edge:
            x = scale.expansions[scale.by_edge[eta]]
            allowed = {x.left, x.mid, x.right}
        if len(exits) != 1 or exits[0] not in allowed:
            report.single_exit_violations += 1


# ----------------------------------------------------------------------
# Compression


def compress(st: DualState, scale: ExpandedScale, y_bar: Sequence[int], g: Multigraph
             ) -> tuple[list[bool], list[int], GraphFamily]:
    """Replace every expansion by its source edge.

    Returns the f-factor on the input graph, its true y values, and the
    positive blossoms restricted to input vertices with base edges
    mapped back.  A blossom whose base edge maps inside itself gets base
    edge -1 and is left for the ill-formed pass.
    """
    n, m = g.n, g.m
    matched = [bool(st.matched[e]) for e in range(m)]
    for x in scale.expansions:
        lm, mm, rm = st.matched[x.left], st.matched[x.mid], st.matched[x.right]
        if lm != rm or lm == mm:
            raise StructureViolation(f"expansion of edge {x.edge} has mixed M-types")
        matched[x.edge] = bool(lm)
    fr = st.forest
    keep = [b for b in fr.live_blossoms() if fr.z[b] > 0]
    fam = GraphFamily(n)
    index: dict[int, int] = {}
    # parents before children: sort by depth
    depth = {}
    for b in keep:
        d, c = 0, fr.parent[b]
        while c != -1:
            d += 1
            c = fr.parent[c]
        depth[b] = d
    leaves = {b: set(fr.leaves(b)) for b in keep}
    for b in sorted(keep, key=lambda c: depth[c]):
        p = fr.parent[b]
        while p != -1 and p not in index:
            p = fr.parent[p]
        index[b] = fam.add(index[p] if p != -1 else -1, fr.z[b], -1)
        inside = leaves[b]
        for x in scale.expansions:
            for (end, ev_, far, far_e) in ((x.u, x.a, x.v, x.b), (x.v, x.b, x.u, x.a)):
                if ev_ in inside and not (end in inside and far_e in inside and far in inside):
                    raise StructureViolation(
                        f"blossom holds an e-vertex of edge {x.edge} without its path")
        eta = fr.eta[b]
        if eta == -1:
            mapped = -1
        elif eta < m:
            mapped = eta
        else:
            k, pos = divmod(eta - m, 3)
            x = scale.expansions[k]
            if pos == 1:
                raise StructureViolation(f"middle edge of {x.edge} is a base edge")
            far = x.v if pos == 0 else x.u
            mapped = -1 if far in inside else x.edge
        fam.eta[index[b]] = mapped
    for v in range(n):
        c = fr.parent[v]
        while c != -1 and c not in index:
            c = fr.parent[c]
        fam.leaf_of[v] = index[c] if c != -1 else -1
    y = [y_bar[v] for v in range(n)]
    return matched, y, fam


def dissolve_ill_formed(fam: GraphFamily, y: list[int]) -> int:
    """Dissolve every blossom without a base edge; return how many."""
    count = 0
    for b in fam.live():
        if fam.eta[b] == -1:
            fam.dissolve(b, y)
            count += 1
    return count


# ----------------------------------------------------------------------
# Tightening base edges


def _target(e: int, w: Sequence[int], matched: Sequence[bool]) -> int:
    return w[e] if matched[e] else w[e] - 2


def _eta_arcs(fam: GraphFamily, eu: Sequence[int], ev: Sequence[int]
              ) -> dict[int, tuple[int, int, int]]:
    """Arcs of the base-edge pseudoforest on maximal blossoms.

    Maps each maximal blossom to (edge, base vertex, head node), where the
    head is the maximal blossom at the far end or ~v for a top atom v.
    """
    arcs = {}
    for b in fam.live():
        if fam.parent[b] != -1 or fam.eta[b] == -1:
            continue
        e = fam.eta[b]
        u, v = eu[e], ev[e]
        if fam.contains(b, v):
            u, v = v, u
        if not fam.contains(b, u) or fam.contains(b, v):
            raise StructureViolation(f"base edge {e} does not leave blossom {b}")
        h = fam.top(v)
        arcs[b] = (e, u, h if h != -1 else ~v)
    return arcs


def _find_cycle(arcs: dict[int, tuple[int, int, int]]) -> list[int] | None:
    """A directed cycle of maximal blossoms other than a bidirected edge."""
    state: dict[int, int] = {}
    for start in sorted(arcs):
        if start in state:
            continue
        path = []
        x = start
        while x >= 0 and x in arcs and x not in state:
            state[x] = 1
            path.append(x)
            x = arcs[x][2]
        if x >= 0 and x in arcs and state.get(x) == 1:
            cyc = path[path.index(x):]
            bidirected = len(cyc) == 2 and arcs[cyc[0]][0] == arcs[cyc[1]][0]
            if not bidirected:
                for p in path:
                    state[p] = 2
                return cyc
        for p in path:
            state[p] = 2
    return None


def tighten_eta_edges(g: Multigraph, w: Sequence[int], fam: GraphFamily,
                      matched: Sequence[bool], y: list[int]) -> tuple[int, int]:
    """Make base edges of maximal blossoms eligible by translations.

    Step one breaks every directed cycle of base edges by translating all
    of its blossoms by the smallest z/2 on the cycle.  Step two walks the
    remaining forest from its roots down and translates the tail blossom
    of each ineligible base edge towards the edge's target value.

    Returns (translations, unfixable) where unfixable counts base edges
    whose slack lies on the side a translation of the tail cannot reach.
    """
    eu, ev = g.eu, g.ev
    translations = 0
    while True:
        cyc = _find_cycle(_eta_arcs(fam, eu, ev))
        if cyc is None:
            break
        step = min(fam.z[b] for b in cyc) // 2
        for b in cyc:
            fam.translate(b, step, y)
            translations += 1

    def gap(e: int) -> int:
        return hyz_graph(fam, eu, ev, matched, y, e) - _target(e, w, matched)

    unfixable: set[int] = set()
    while True:
        arcs = _eta_arcs(fam, eu, ev)
        # depth of each maximal blossom below its root in the pseudoforest
        depth: dict[int, int] = {}

        def depth_of(b: int) -> int:
            seen = []
            x = b
            while x >= 0 and x in arcs and x not in depth and x not in seen:
                seen.append(x)
                x = arcs[x][2]
            base = depth[x] if (x >= 0 and x in depth) else 0
            for node in reversed(seen):
                base += 1
                depth[node] = base
            return depth[b]

        pick = None
        for b in sorted(arcs, key=lambda c: (depth_of(c), c)):
            e = arcs[b][0]
            if e in unfixable:
                continue
            if gap(e) != 0:
                pick = b
                break
        if pick is None:
            break
        e = arcs[pick][0]
        d = gap(e)
        # A matched base edge is outside I(B), so translating B raises hyz;
        # an unmatched one is inside I(B), so hyz falls.
        if (d < 0) != bool(matched[e]):
            unfixable.add(e)
            continue
        step = min(fam.z[pick] // 2, abs(d))
        fam.translate(pick, step, y)
        translations += 1
    return translations, len(unfixable)


def eta_ineligible(g: Multigraph, w: Sequence[int], fam: GraphFamily,
                   matched: Sequence[bool], y: Sequence[int]) -> int:
    """Number of distinct base edges whose hyz is neither w nor w - 2.

    Two blossoms may share a base edge; it is counted once.
    """
    bad = set()
    for b in fam.live():
        e = fam.eta[b]
        if e == -1 or e in bad:
            continue
        h = hyz_graph(fam, g.eu, g.ev, matched, y, e)
        if h not in (w[e], w[e] - 2):
            bad.add(e)
    return len(bad)


# ----------------------------------------------------------------------
# Driver


@dataclass
class FSolveResult(SolveResult):
    """Scaling f-factor outcome with the per-scale layer reports."""
    layer: list[FScaleReport] = field(default_factory=list)


def solve_ffactor(g: Multigraph, cfg: Config | None = None) -> FSolveResult:
    """Maximum-weight f-factor by the scaling algorithm.

    Raises:
        Infeasible: If the graph has no f-factor.
        OverflowGuard: If the scaled weights could leave 62-bit range.
    """
    cfg = cfg or Config()
    n, m = g.n, g.m
    if g.f_total() % 2:
        raise Infeasible("total degree demand is odd")
    check_overflow(g)
    if not feasibility_check(g):
        raise Infeasible("graph has no f-factor")
    trace: list[str] | None = [] if cfg.trace else None
    shift = g.max_abs_weight() if min(g.w, default=0) < 0 else 0
    shifted = [x + shift for x in g.w]
    mult = 3 * g.f_total() + 2
    wbar = [mult * x for x in shifted]
    s = scale_count(mult, max(shifted, default=0))

    w = [0] * m
    y = [-2] * n
    matched = [False] * m
    fam = GraphFamily(n)
    scales: list[ScaleStats] = []
    layer: list[FScaleReport] = []
    st: DualState | None = None
    scale: ExpandedScale | None = None
    for i in range(1, s + 1):
        stats = ScaleStats(scale=i)
        rep = FScaleReport()
        if st is not None and scale is not None:
            matched, y, fam = compress(st, scale, normalize_root(st), g)
            rep.ill_formed = dissolve_ill_formed(fam, y)
            for e in range(m):
                h = hyz_graph(fam, g.eu, g.ev, matched, y, e)
                if (matched[e] and h > w[e] + 2) or (not matched[e] and h < w[e] - 4):
                    rep.compressed_window_violations += 1
            rep.tighten_translations, rep.tighten_unfixable = tighten_eta_edges(
                g, w, fam, matched, y)
            rep.eta_ineligible = eta_ineligible(g, w, fam, matched, y)
            base_edges = {fam.eta[b] for b in fam.live() if fam.eta[b] != -1}
            rep.eta_edges = len(base_edges)
            for e in base_edges:
                if not -4 <= hyz_graph(fam, g.eu, g.ev, matched, y, e) - w[e] <= 2:
                    rep.eta_out_of_range += 1
        # Scale up.
        bit = s + 1 - i
        w = [2 * (w[e] + ((wbar[e] >> bit) & 1)) for e in range(m)]
        y = [2 * v + 4 for v in y]
        for b in fam.live():
            fam.z[b] *= 2
        eta_edges = {fam.eta[b] for b in fam.live() if fam.eta[b] != -1}
        for e in range(m):
            d0 = hyz_graph(fam, g.eu, g.ev, matched, y, e) - w[e]
            if d0 < -2 and not matched[e]:
                stats.window_violations += 1
            elif matched[e] and d0 > 12:
                stats.window_violations += 1
            elif e in eta_edges and not -2 <= d0 <= 12:
                stats.window_violations += 1
        scale, inh, y_bar, start = expand_all(g, w, fam, matched, y, rep)
        st = DualState(scale.n, scale.f, scale.eu, scale.ev, scale.w, offset=2,
                       fmode=True, active=scale.active)
        for e, on in enumerate(start):
            if on:
                st.set_matched(e, True)
        init_inherited(st, y_bar, inh)
        dismantle_scale(st, inh, cfg, stats, trace)
        if cfg.check_scales:
            stats.certificate_violations = state_violations(st, normalize_root(st))
        scales.append(stats)
        layer.append(rep)
        if trace is not None:
            trace.append(f"end of scale {i}")

    if st is None or scale is None:
        if g.f_total():
            raise StructureViolation("no scales ran on a graph with demand")
        cert = Certificate("ffactor", mult, shift, 2, g.digest(), [], [0] * n)
        return FSolveResult([], 0, cert, scales, trace, layer)
    if w != wbar:
        raise StructureViolation("final scale weights differ from the scaled input")
    y_final = normalize_root(st)
    mset = [e for e in range(st.m) if st.active[e] and st.matched[e]]
    under: dict[int, int] = {}
    blossoms = current_blossoms(st)
    for e in mset:
        gap = st.w[e] - 2 - st.hyz(e)
        if gap > 0:
            under[e] = gap
    cert = Certificate(
        mode="ffactor",
        multiplier=mult,
        offset=shift,
        tolerance=2,
        graph_hash=g.digest(),
        matched=mset,
        y=y_final,
        blossoms=blossoms,
        undervalued=under,
        expansions=[(x.edge, x.left_weight) for x in scale.expansions])
    chosen = [e for e in mset if e < m]
    chosen += [x.edge for x in scale.expansions if st.matched[x.left]]
    chosen.sort()
    return FSolveResult(chosen, sum(g.w[e] for e in chosen), cert, scales, trace, layer)
