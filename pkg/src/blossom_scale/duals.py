"""
Dual variables, the inherited blossom family, and certificate checking.

Vertex duals are stored as y'(v): the true y(v) plus half the z-value of
every inherited blossom that contains v.  A unit translation of an
inherited blossom lowers its z by 2 and raises y by 1 on its vertices,
so it leaves y' untouched and only the blossom's own counters move.

The slack of an edge is measured on a single scale for every phase:

    unmatched edge:  hyz(e) - w(e) + offset
    matched edge:    w(e) - hyz(e)

where offset is 2 while scaling (near-optimum duals) and 0 for the exact
solver.  Feasible edges have non-negative slack, except for undervalued
matched edges in f-factor mode.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .blossom_forest import BlossomForest
from .errors import ParseError, StructureViolation, TranslateDissolved
from .graph_core import Multigraph


class InheritedFamily:
    """Blossoms carried over from the previous scale, plus the root V.

    Blossom ids run from 0 to count-1 and the root V has id count.
    Only vertex sets and duals matter for inherited blossoms; their
    rings are forgotten.

    Attributes:
        parent: Parent blossom id; the root has parent -1.
        kids: Child blossom ids of each blossom.
        direct: Vertices whose innermost inherited blossom is this one.
        leaf_of: Innermost inherited blossom of each vertex (root if none).
        z, z0, tau: Current dual, dual at scale start, translation count.
        size: f-mass of each blossom (vertex count for matching).
    """

    def __init__(
            self,
            n: int,
            parent: Sequence[int],
            z0: Sequence[int],
            leaf_of: Sequence[int],
            f: Sequence[int]
            ) -> None:
        count = len(parent)
        self.n = n
        self.count = count
        self.root = count
        self.parent = [p if p >= 0 else count for p in parent] + [-1]
        self.z = list(z0) + [0]
        self.z0 = list(self.z)
        self.tau = [0] * (count + 1)
        self.kids: list[list[int]] = [[] for _ in range(count + 1)]
        self.direct: list[list[int]] = [[] for _ in range(count + 1)]
        self.leaf_of = [b if b >= 0 else count for b in leaf_of]
        for b in range(count):
            self.kids[self.parent[b]].append(b)
        for v in range(n):
            self.direct[self.leaf_of[v]].append(v)
        # children before parents
        self.order = self._postorder()
        self.size = [0] * (count + 1)
        self.depth = [0] * (count + 1)
        for b in reversed(self.order):
            if self.parent[b] >= 0:
                self.depth[b] = self.depth[self.parent[b]] + 1
        for b in self.order:
            self.size[b] = sum(f[v] for v in self.direct[b]) + sum(
                self.size[c] for c in self.kids[b])

    def _postorder(self) -> list[int]:
        out: list[int] = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            b, done = stack.pop()
            if done:
                out.append(b)
                continue
            stack.append((b, True))
            for c in reversed(self.kids[b]):
                stack.append((c, False))
        return out

    def members(self, b: int) -> list[int]:
        out: list[int] = []
        stack = [b]
        while stack:
            x = stack.pop()
            out.extend(self.direct[x])
            stack.extend(self.kids[x])
        return out

    def chain(self, v: int) -> list[int]:
        """Inherited blossoms containing v, innermost first, ending with V."""
        out = []
        b = self.leaf_of[v]
        while b >= 0:
            out.append(b)
            b = self.parent[b]
        return out

    def half_z_above(self, v: int) -> int:
        """Sum of z/2 over all inherited blossoms that contain v."""
        return sum(self.z[b] for b in self.chain(v)) // 2

    def split_sum(self, u: int, v: int) -> int:
        """Sum of z/2 over inherited blossoms containing exactly one of u, v."""
        a, b = self.leaf_of[u], self.leaf_of[v]
        total = 0
        while a != b:
            if self.depth[a] >= self.depth[b]:
                total += self.z[a]
                a = self.parent[a]
            else:
                total += self.z[b]
                b = self.parent[b]
        return total // 2

    def unit_translate(self, b: int, units: int = 1) -> None:
        """Translate blossom b by the given number of units.

        z(b) drops by 2 per unit and tau(b) grows by one per unit.  The
        root V may go negative.  Vertex y' values are unaffected.
        """
        if b != self.root and self.z[b] <= 0:
            raise TranslateDissolved(f"inherited blossom {b} already dissolved")
        self.z[b] -= 2 * units
        self.tau[b] += units
        if b != self.root and self.z[b] < 0:
            raise TranslateDissolved(f"inherited blossom {b} translated past zero")


class DualState:
    """Working state of one scale: graph view, matching, duals, blossoms.

    Attributes:
        n, m: Vertex and edge counts of the working graph.
        f: Degree caps.
        eu, ev, w: Edge endpoints and scale weights.
        active: False for edges that are replaced by an expansion.
        adj: Incident active edges per vertex.
        matched, deg: The current matching or partial f-factor.
        yp: y' values (see module docstring).
        forest: Current blossoms.
        inherited: Inherited family, or None for the exact solver.
        offset: 2 when scaling, 0 for exact duals.
        fmode: True when blossom duals also count on I-edges.
        d: Number of dual adjustments each vertex saw while deficient.
    """

    def __init__(
            self,
            n: int,
            f: Sequence[int],
            eu: Sequence[int],
            ev: Sequence[int],
            w: Sequence[int],
            offset: int,
            fmode: bool,
            active: Sequence[bool] | None = None
            ) -> None:
        self.n = n
        self.m = len(eu)
        self.f = list(f)
        self.eu = list(eu)
        self.ev = list(ev)
        self.w = list(w)
        self.active = [True] * self.m if active is None else list(active)
        self.adj: list[list[int]] = [[] for _ in range(n)]
        for e in range(self.m):
            if self.active[e]:
                self.adj[self.eu[e]].append(e)
                if self.ev[e] != self.eu[e]:
                    self.adj[self.ev[e]].append(e)
        self.matched = [False] * self.m
        self.deg = [0] * n
        self.yp = [0] * n
        self.forest = BlossomForest(n, self.eu, self.ev)
        self.inherited: InheritedFamily | None = None
        self.offset = offset
        self.fmode = fmode
        self.d = [0] * n
        self.undervalued_ok = fmode

    # ------------------------------------------------------------------

    def other(self, e: int, v: int) -> int:
        u = self.eu[e]
        return self.ev[e] if u == v else u

    def deficiency(self, v: int) -> int:
        return self.f[v] - self.deg[v]

    def set_matched(self, e: int, value: bool) -> None:
        if self.matched[e] == value:
            return
        self.matched[e] = value
        step = 1 if value else -1
        self.deg[self.eu[e]] += step
        self.deg[self.ev[e]] += step

    def in_i_set(self, e: int, b: int) -> bool:
        """Membership of a boundary edge e of blossom b in I(b)."""
        return self.matched[e] != (e == self.forest.eta[b])

    def true_y(self, v: int) -> int:
        if self.inherited is None:
            return self.yp[v]
        return self.yp[v] - self.inherited.half_z_above(v)

    def hyz(self, e: int) -> int:
        """hyz(e) evaluated from scratch, valid for any edge."""
        u, v = self.eu[e], self.ev[e]
        total = self.yp[u] + self.yp[v]
        if self.inherited is not None:
            total -= self.inherited.split_sum(u, v)
        fr = self.forest
        cu = fr.ancestors(u)
        cv = set(fr.ancestors(v))
        for b in cu:
            if b in cv:
                total += fr.z[b]
            elif self.fmode and self.in_i_set(e, b):
                total += fr.z[b]
        if self.fmode:
            cu_set = set(cu)
            for b in cv:
                if b not in cu_set and self.in_i_set(e, b):
                    total += fr.z[b]
        return total

    def slack(self, e: int) -> int:
        h = self.hyz(e)
        if self.matched[e]:
            return self.w[e] - h
        return h - self.w[e] + self.offset


def eligible(slack: int, phase: int, in_blossom: bool = False) -> bool:
    """Eligibility of an edge from its slack.

    Phase 1 wants slack exactly 0, except that blossom-subgraph edges
    may also sit at the other end of the window.  Phases 2 and 3 accept
    slack 0 or 2 for every edge.
    """
    if phase == 1 and not in_blossom:
        return slack == 0
    return slack in (0, 2)


# ----------------------------------------------------------------------
# Certificates


@dataclass
class CertBlossom:
    """One blossom of a certificate: dual value, vertex set, base edge, ring."""
    label: int
    z: int
    vertices: list[int]
    eta: int = -1
    ring: list[int] = field(default_factory=list)


@dataclass
class Certificate:
    """Self-contained optimality evidence for a matching or f-factor.

    The duals live on the working graph: the input graph itself for
    matching, or the input graph with some edges expanded into paths of
    length three for f-factors.  Working weights are
    multiplier * (w + offset) on original edges; an expanded edge gives
    left weight to its first end edge and the rest to its last.

    Vertex and edge ids are 0-based in memory and 1-based on disk.
    """
    mode: str
    multiplier: int
    offset: int
    tolerance: int
    graph_hash: str
    matched: list[int]
    y: list[int]
    blossoms: list[CertBlossom] = field(default_factory=list)
    undervalued: dict[int, int] = field(default_factory=dict)
    expansions: list[tuple[int, int]] = field(default_factory=list)

    # -- serialization -------------------------------------------------

    def render(self, g: Multigraph) -> str:
        ops = WorkingGraph.build(g, self)
        lines = [
            f"c certificate for {self.mode}",
            f"h mode {self.mode}",
            f"h multiplier {self.multiplier}",
            f"h offset {self.offset}",
            f"h tolerance {self.tolerance}",
            f"h graph {self.graph_hash}",
        ]
        for (e, left) in self.expansions:
            lines.append(f"x {e + 1} {left}")
        for v, yv in enumerate(self.y):
            lines.append(f"y {v + 1} {yv}")
        for b in self.blossoms:
            verts = " ".join(str(v + 1) for v in sorted(b.vertices))
            lines.append(f"z {b.label} {b.z} : {verts}")
            if b.eta >= 0:
                lines.append(f"eta {b.label} {b.eta + 1}")
            if b.ring:
                lines.append(f"r {b.label} : " + " ".join(str(e + 1) for e in b.ring))
            if self.mode == "ffactor":
                iset = ops.i_set(b, set(self.matched))
                lines.append(f"I {b.label} : " + " ".join(str(e + 1) for e in iset))
        for e in sorted(self.undervalued):
            lines.append(f"u {e + 1} {self.undervalued[e]}")
        for e in sorted(self.matched):
            lines.append(f"m {ops.eu[e] + 1} {ops.ev[e] + 1} {e + 1}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> Certificate:
        header: dict[str, str] = {}
        expansions: list[tuple[int, int]] = []
        ys: dict[int, int] = {}
        blossoms: dict[int, CertBlossom] = {}
        order: list[int] = []
        under: dict[int, int] = {}
        matched: list[int] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            tok = raw.split()
            if not tok or tok[0] == "c":
                continue
            try:
                kind = tok[0]
                if kind == "h":
                    header[tok[1]] = tok[2]
                elif kind == "x":
                    expansions.append((int(tok[1]) - 1, int(tok[2])))
                elif kind == "y":
                    ys[int(tok[1]) - 1] = int(tok[2])
                elif kind == "z":
                    label = int(tok[1])
                    if tok[3] != ":":
                        raise ValueError("missing ':'")
                    blossoms[label] = CertBlossom(
                        label, int(tok[2]), [int(t) - 1 for t in tok[4:]])
                    order.append(label)
                elif kind == "eta":
                    blossoms[int(tok[1])].eta = int(tok[2]) - 1
                elif kind == "r":
                    blossoms[int(tok[1])].ring = [int(t) - 1 for t in tok[3:]]
                elif kind == "I":
                    pass  # recomputed by the verifier
                elif kind == "u":
                    under[int(tok[1]) - 1] = int(tok[2])
                elif kind == "m":
                    matched.append(int(tok[3]) - 1)
                else:
                    raise ValueError(f"unknown line kind {kind!r}")
            except (IndexError, ValueError, KeyError) as exc:
                raise ParseError(str(exc), lineno) from exc
        for key in ("mode", "multiplier", "offset", "tolerance", "graph"):
            if key not in header:
                raise ParseError(f"missing header field {key}")
        y = [0] * (max(ys) + 1 if ys else 0)
        for v, val in ys.items():
            y[v] = val
        return Certificate(
            mode=header["mode"],
            multiplier=int(header["multiplier"]),
            offset=int(header["offset"]),
            tolerance=int(header["tolerance"]),
            graph_hash=header["graph"],
            matched=sorted(matched),
            y=y,
            blossoms=[blossoms[b] for b in order],
            undervalued=under,
            expansions=expansions)


class WorkingGraph:
    """The graph on which certificate duals live, rebuilt from scratch.

    Expansion k of edge uv adds vertices n+2k (next to u) and n+2k+1
    (next to v) and edges m+3k, m+3k+1, m+3k+2 forming the path
    u, n+2k, n+2k+1, v.  The expanded original edge becomes inactive.
    """

    def __init__(self, n: int, f: list[int], eu: list[int], ev: list[int],
                 w: list[int], active: list[bool]) -> None:
        self.n = n
        self.f = f
        self.eu = eu
        self.ev = ev
        self.w = w
        self.active = active

    @staticmethod
    def build(g: Multigraph, cert: Certificate) -> WorkingGraph:
        return WorkingGraph.expand(
            g, [cert.multiplier * (x + cert.offset) for x in g.w], cert.expansions)

    @staticmethod
    def expand(g: Multigraph, weights: Sequence[int],
               expansions: Iterable[tuple[int, int]]) -> WorkingGraph:
        n, m = g.n, g.m
        eu, ev, w = list(g.eu), list(g.ev), list(weights)
        f = list(g.f)
        active = [True] * m
        for k, (e, left) in enumerate(expansions):
            if not (0 <= e < m) or not active[e] or g.eu[e] == g.ev[e]:
                raise StructureViolation(f"bad expansion of edge {e}")
            active[e] = False
            a, b = n + 2 * k, n + 2 * k + 1
            f.extend((1, 1))
            eu.extend((g.eu[e], a, b))
            ev.extend((a, b, g.ev[e]))
            w.extend((left, 0, weights[e] - left))
            active.extend((True, True, True))
        return WorkingGraph(len(f), f, eu, ev, w, active)

    def i_set(self, b: CertBlossom, matched: set[int]) -> list[int]:
        inside = set(b.vertices)
        out = []
        for e in range(len(self.eu)):
            if not self.active[e]:
                continue
            if (self.eu[e] in inside) != (self.ev[e] in inside):
                if (e in matched) != (e == b.eta):
                    out.append(e)
        return out


@dataclass
class VerifyReport:
    ok: bool
    violations: list[str]
    weight: int | None = None

    @property
    def first_violation(self) -> str | None:
        return self.violations[0] if self.violations else None


def check_duals(
        n: int,
        f: Sequence[int],
        eu: Sequence[int],
        ev: Sequence[int],
        w: Sequence[int],
        active: Sequence[bool],
        matched_ids: Iterable[int],
        y: Sequence[int],
        blossoms: Sequence[CertBlossom],
        undervalued: dict[int, int],
        tolerance: int,
        fmode: bool,
        limit: int = 20
        ) -> list[str]:
    """Check a matching and its duals; return violation messages.

    The checks are: the edge set is a perfect matching or f-factor;
    blossom vertex sets are laminar with z >= 0; every unmatched edge has
    hyz >= w - tolerance; every matched edge has hyz <= w and, unless it
    is declared undervalued (f-factor mode only), hyz >= w - tolerance;
    ring edges satisfy both bounds; every positive blossom is saturated.
    """
    bad: list[str] = []

    def report(msg: str) -> None:
        if len(bad) < limit:
            bad.append(msg)

    m = len(eu)
    mset = set(matched_ids)
    deg = [0] * n
    for e in mset:
        if not (0 <= e < m) or not active[e]:
            report(f"matched edge {e} is not an edge of the working graph")
            continue
        deg[eu[e]] += 1
        deg[ev[e]] += 1
    for v in range(n):
        if deg[v] != f[v]:
            report(f"vertex {v} has degree {deg[v]}, expected {f[v]}")
    if len(y) != n:
        report(f"expected {n} y values, got {len(y)}")
        return bad

    # Laminar tree of blossoms: sort by size, parent = smallest strict superset.
    sets = [frozenset(b.vertices) for b in blossoms]
    order = sorted(range(len(blossoms)), key=lambda i: len(sets[i]))
    parent = [-1] * len(blossoms)
    inner_of = [-1] * n
    for idx in order:
        b = blossoms[idx]
        if b.z < 0:
            report(f"blossom {b.label} has negative z {b.z}")
        if any(not (0 <= v < n) for v in b.vertices) or len(sets[idx]) != len(b.vertices):
            report(f"blossom {b.label} has a bad vertex list")
            return bad
        children = set()
        for v in b.vertices:
            c = inner_of[v]
            while c != -1 and parent[c] != -1:
                c = parent[c]
            if c != -1:
                children.add(c)
        for c in children:
            if not sets[c] <= sets[idx]:
                report(f"blossoms {blossoms[c].label} and {b.label} cross")
                return bad
            parent[c] = idx
        for v in b.vertices:
            if inner_of[v] == -1:
                inner_of[v] = idx
    depth = [0] * len(blossoms)
    zsum = [0] * len(blossoms)
    for idx in reversed(order):
        p = parent[idx]
        depth[idx] = depth[p] + 1 if p >= 0 else 0
        zsum[idx] = blossoms[idx].z + (zsum[p] if p >= 0 else 0)

    def in_i(e: int, idx: int) -> bool:
        return (e in mset) != (e == blossoms[idx].eta)

    def hyz(e: int) -> int:
        u, v = eu[e], ev[e]
        total = y[u] + y[v]
        a, b = inner_of[u], inner_of[v]
        while a != b:
            if b == -1 or (a != -1 and depth[a] >= depth[b]):
                if fmode and in_i(e, a):
                    total += blossoms[a].z
                a = parent[a]
            else:
                if fmode and in_i(e, b):
                    total += blossoms[b].z
                b = parent[b]
        if a != -1:
            total += zsum[a]
        return total

    ring_edges: set[int] = set()
    for b in blossoms:
        ring_edges.update(b.ring)
    for e in range(m):
        if not active[e]:
            continue
        h = hyz(e)
        if e in mset:
            if h > w[e]:
                report(f"matched edge {e} has hyz {h} > w {w[e]}")
            if h < w[e] - tolerance:
                if not fmode or e not in undervalued:
                    report(f"matched edge {e} has hyz {h} < w - {tolerance} = {w[e] - tolerance}")
                elif undervalued[e] != w[e] - tolerance - h:
                    report(f"undervalued edge {e} records u={undervalued[e]}, "
                           f"expected {w[e] - tolerance - h}")
            elif e in undervalued:
                report(f"edge {e} is listed as undervalued but is not")
        else:
            if h < w[e] - tolerance:
                report(f"unmatched edge {e} has hyz {h} < w - {tolerance} = {w[e] - tolerance}")
            if e in undervalued:
                report(f"undervalued edge {e} is not matched")
            if e in ring_edges and h > w[e]:
                report(f"blossom edge {e} has hyz {h} > w {w[e]}")

    for idx, b in enumerate(blossoms):
        if b.z <= 0:
            continue
        inside = sets[idx]
        inner = 0
        i_size = 0
        i_matched = 0
        fb = sum(f[v] for v in inside)
        for e in range(m):
            if not active[e]:
                continue
            a_in, b_in = eu[e] in inside, ev[e] in inside
            if a_in and b_in:
                inner += e in mset
            elif a_in != b_in and fmode and in_i(e, idx):
                i_size += 1
                i_matched += e in mset
        if inner + i_matched != (fb + i_size) // 2:
            report(f"blossom {b.label} is not saturated: "
                   f"{inner}+{i_matched} != ({fb}+{i_size})//2")
    return bad


def verify_certificate(cert: Certificate, g: Multigraph, mode: str | None = None) -> VerifyReport:
    """Verify a certificate against the instance it claims to solve."""
    mode = mode or cert.mode
    problems: list[str] = []
    if cert.graph_hash != g.digest():
        problems.append("certificate was issued for a different graph")
    if mode != cert.mode:
        problems.append(f"certificate mode {cert.mode} does not match {mode}")
    try:
        wg = WorkingGraph.build(g, cert)
    except StructureViolation as exc:
        return VerifyReport(False, problems + [str(exc)])
    problems += check_duals(
        wg.n, wg.f, wg.eu, wg.ev, wg.w, wg.active, cert.matched, cert.y,
        cert.blossoms, cert.undervalued, cert.tolerance, cert.mode == "ffactor")
    weight = None
    if not problems:
        weight = sum(g.w[e] for e in pull_back(g, cert))
    return VerifyReport(not problems, problems, weight)


def pull_back(g: Multigraph, cert: Certificate) -> list[int]:
    """Edge ids of the input graph selected by the certificate's matching.

    An expanded edge is selected when its end edges are matched.
    """
    mset = set(cert.matched)
    out = [e for e in cert.matched if e < g.m]
    for k, (e, _left) in enumerate(cert.expansions):
        if g.m + 3 * k in mset:
            out.append(e)
    return sorted(out)
