"""
The scaling solver for maximum-weight perfect matching.

Each scale starts from the previous scale's blossoms, now called
inherited, with doubled weights and duals.  The inherited blossoms are
taken apart along major paths: a major path starts at a blossom (its
root) and repeatedly descends to the child of largest size.  Roots are
processed bottom-up so that everything hanging off a path is already
dissolved when the path is handled.

Dismantling one path Q = C_0 > C_1 > ... > C_k works with shells: the
vertices between two consecutive undissolved blossoms of the path.
Searches never leave a shell.  Phase 1 alternates maximal batches of
disjoint augmenting trails with unit dual adjustments in every shell
that still has a free vertex, until few free vertices are left.
Phase 2 finishes them one shell at a time with event-driven searches.
Phase 3 keeps searching the innermost shell until the whole path has
dissolved.  Every unit of dual adjustment in a shell comes with a unit
translation of its boundaries, which slowly dissolves them.
"""

from __future__ import annotations

import math
import os
from collections.abc import Sequence
from dataclasses import dataclass, field

from .blossom_forest import SetPartition
from .duals import CertBlossom, Certificate, DualState, InheritedFamily, check_duals
from .edmonds_engine import (
    AUGMENTED, DISSOLVED, STUCK, BucketPQ, Search, feasibility_check)
from .errors import Infeasible, PassBoundExceeded, SlotBoundExceeded, StructureViolation
from .graph_core import Multigraph, check_overflow

__all__ = [
    "BucketPQ", "Config", "MajorPathPlan", "ScaleStats", "SolveResult",
    "decompose", "dismantle_scale", "solve_matching", "scale_count",
]


@dataclass
class Config:
    """Solver options.

    Attributes:
        assert_bounds: Check the instrumented pass, slot and dual bounds
            and raise when one fails.
        trace: Keep a step-by-step log of every search.
        seed: Reserved for randomized callers; the solver is deterministic.
        check_scales: Verify the near-optimality certificate at the end of
            every scale and the slack windows after every scale-up.
        c_matching, c_ffactor: Constants of the instrumented bounds.
        phase1_threshold: Overrides the free-vertex count at which Phase 1
            hands over to Phase 2.  Small graphs never enter a Phase 1
            pass under the default, so tests lower it to exercise passes.
    """
    assert_bounds: bool = False
    trace: bool = False
    seed: int = 0
    check_scales: bool = False
    c_matching: int = 4
    c_ffactor: int = 8
    phase1_threshold: float | None = None

    @staticmethod
    def from_env(**kwargs: object) -> Config:
        cfg = Config(**kwargs)  # type: ignore[arg-type]
        if os.environ.get("BLOSSOM_SCALE_ASSERTS") == "1":
            cfg.assert_bounds = True
        return cfg


@dataclass
class PathStats:
    """Counters of one dismantled major path."""
    size: int
    length: int
    passes: int = 0
    pass_bound: float = 0.0
    translations: int = 0
    translation_bound: float = 0.0
    phase2_episodes: int = 0
    phase3_episodes: int = 0
    free_after_phase1: int = 0
    free_sum: int = 0
    free_sum_bound: float = 0.0
    product_ok: bool = True
    relabels: int = 0
    max_pages: int = 1


@dataclass
class ScaleStats:
    """Counters of one scale."""
    scale: int
    passes: int = 0
    translations: int = 0
    augments: int = 0
    paths: list[PathStats] = field(default_factory=list)
    window_violations: int = 0
    certificate_violations: list[str] = field(default_factory=list)
    extra: dict[str, int] = field(default_factory=dict)


@dataclass
class SolveResult:
    """Outcome of a scaling solve."""
    matched: list[int]
    weight: int
    certificate: Certificate
    scales: list[ScaleStats]
    trace: list[str] | None = None


def _log2(x: int) -> float:
    return math.log2(max(2, x))


def scale_count(multiplier: int, max_weight: int) -> int:
    """Number of scales: the floor of log2(multiplier * max_weight)."""
    return (multiplier * max(1, max_weight)).bit_length() - 1


# ----------------------------------------------------------------------
# Major paths


@dataclass
class MajorPathPlan:
    """Major paths of the inherited blossom tree in processing order.

    Attributes:
        paths: Each path lists inherited blossom ids from its root down.
        major: Major child of every blossom (-1 if none).
    """
    paths: list[list[int]]
    major: list[int]


def decompose(inh: InheritedFamily) -> MajorPathPlan:
    """Split the inherited tree into major paths, deepest roots first.

    The major child of a blossom is its child of largest size, ties going
    to the lowest id.  The root V always forms a path of its own.
    """
    major = [-1] * (inh.count + 1)
    for b in range(inh.count):
        best = -1
        for c in inh.kids[b]:
            if best == -1 or inh.size[c] > inh.size[best] or (
                    inh.size[c] == inh.size[best] and c < best):
                best = c
        major[b] = best
    paths: list[list[int]] = []

    def visit(root: int) -> None:
        path = [root]
        while path[-1] != inh.root and major[path[-1]] != -1:
            path.append(major[path[-1]])
        for b in path:
            for c in inh.kids[b]:
                if c != major[b] or b == inh.root:
                    visit(c)
        paths.append(path)

    visit(inh.root)
    return MajorPathPlan(paths, major)


# ----------------------------------------------------------------------
# Dismantling one path


class PathDismantler:
    """Dismantles the inherited blossoms along one major path."""

    def __init__(self, st: DualState, inh: InheritedFamily, path: list[int],
                 cfg: Config, stats: ScaleStats, part: SetPartition,
                 trace: list[str] | None) -> None:
        self.st = st
        self.inh = inh
        self.path = path
        self.cfg = cfg
        self.stats = stats
        self.part = part
        self.trace = trace
        self.is_root = path[0] == inh.root
        k = len(path)
        # Doubly linked list over undissolved path positions.
        self.prev = list(range(-1, k - 1))
        self.next = list(range(1, k + 1))
        self.next[-1] = -1
        self.undissolved = [True] * k
        self.first = 0
        self.last = k - 1
        # Shell labels are path positions of S+; labels move on merges.
        self.label_of_pos: dict[int, int] = {}
        self.pos_of_label: dict[int, int] = {}
        self.members = inh.members(path[0])
        self.size = sum(st.f[v] for v in self.members)
        self.c = cfg.c_ffactor if st.fmode else cfg.c_matching
        self.ps = PathStats(size=self.size, length=k)
        self.free_vertex_bound: float = 0.0
        for i, b in enumerate(path):
            band = list(inh.direct[b])
            for c in inh.kids[b]:
                if i + 1 < k and c == path[i + 1]:
                    continue
                band.extend(inh.members(c))
            part.make_set(i, band)
            self.label_of_pos[i] = i
            self.pos_of_label[i] = i
        for v in self.members:
            st.d[v] = 0

    # -- shells ---------------------------------------------------------

    def shells(self) -> list[int]:
        return list(self.part.members.keys())

    def boundaries(self, label: int) -> tuple[int, int]:
        """Path positions of S+ and S- (-1 when S- is empty)."""
        pos = self.pos_of_label[label]
        return pos, self.next[pos]

    def free_count(self, label: int | None = None) -> int:
        st = self.st
        if label is None:
            verts = [v for lab in self.part.members for v in self.part.members[lab]]
        else:
            verts = self.part.members[label]
        return sum(st.f[v] - st.deg[v] for v in verts)

    def shell_mass(self, label: int) -> int:
        return sum(self.st.f[v] for v in self.part.members[label])

    def translate(self, label: int, units: int) -> list[int]:
        """Translate both boundaries of a shell; return dissolved positions."""
        if units == 0:
            return []
        inh = self.inh
        pos, nxt = self.boundaries(label)
        done = []
        for p in (pos, nxt):
            if p == -1:
                continue
            b = self.path[p]
            inh.unit_translate(b, units)
            self.stats.translations += units
            if self.counting_translations:
                self.ps.translations += units
            if b != inh.root and inh.z[b] == 0:
                done.append(p)
        return done

    def dissolve(self, pos: int) -> None:
        """Handle the dissolution of path blossom number pos."""
        if not self.undissolved[pos]:
            raise StructureViolation(f"path blossom {pos} dissolved twice")
        self.undissolved[pos] = False
        before, after = self.prev[pos], self.next[pos]
        if before != -1:
            self.next[before] = after
        if after != -1:
            self.prev[after] = before
        label = self.label_of_pos.pop(pos)
        del self.pos_of_label[label]
        if before == -1:
            # The outermost undissolved blossom is gone: its shell retires.
            self.part.remove_set(label)
            self.first = after
        else:
            outer = self.label_of_pos[before]
            merged = self.part.union(outer, label)
            del self.pos_of_label[outer]
            self.label_of_pos[before] = merged
            self.pos_of_label[merged] = before
        if pos == self.last:
            self.last = before
        if self.trace is not None:
            self.trace.append(f"dissolve path blossom {self.path[pos]}")

    def dissolve_all(self, positions: list[int]) -> None:
        for p in sorted(positions, reverse=True):
            self.dissolve(p)

    def intact(self, label: int, bounds: tuple[int, int]) -> bool:
        return label in self.pos_of_label and self.boundaries(label) == bounds

    # -- searches -------------------------------------------------------

    def _search(self, label: int, mode: str, boundaries: Sequence[int] = (),
                paged: bool = False) -> Search:
        max_pages = None
        if self.cfg.assert_bounds and paged:
            max_pages = max(1, math.ceil(self.c * _log2(self.size)))
        s = Search(self.st, self.part.members[label], self.part.label, label, mode,
                   boundaries=boundaries, page_size=self.st.n, max_pages=max_pages,
                   trace=self.trace)
        s.start()
        return s

    def rematch(self, label: int) -> None:
        """Augment along maximal batches of disjoint trails until none remain."""
        while True:
            s = self._search(label, "phase1")
            s.run(kill_trees=True)
            s.finalize()
            self.stats.augments += s.stats.augments
            if s.stats.augments == 0:
                return

    def shell_search(self, label: int) -> None:
        s = self._search(label, "phase1")
        res = s.run()
        if res == AUGMENTED:
            raise StructureViolation("shell search found an augmenting trail after rematch")
        s.check_adjust(1)
        s.advance(1)
        s.finalize()
        self.dissolve_all(self.translate(label, 1))

    def episode(self, label: int, paged: bool) -> str:
        """One event-driven search; ends at an augment, a dissolve or a stall.

        Phase 2 searches run under the page limit of the bucket queue.
        Phase 3 searches may jump far ahead in time and are not limited.
        """
        pos, nxt = self.boundaries(label)
        bnds = [self.path[p] for p in (pos, nxt) if p != -1 and self.path[p] != self.inh.root]
        s = self._search(label, "window", bnds, paged)
        res = s.run()
        t = s.finalize()
        self.ps.max_pages = max(self.ps.max_pages, s.pq.pages_used)
        self.stats.augments += s.stats.augments
        gone = self.translate(label, t)
        if res == STUCK:
            if self.is_root:
                raise Infeasible("search stalled with deficient vertices left")
            raise StructureViolation("search on an inherited shell stalled")
        if res == DISSOLVED and not gone:
            raise StructureViolation("dissolve event without a dissolved boundary")
        self.dissolve_all(gone)
        return res

    # -- phases ---------------------------------------------------------

    def free_sum(self) -> int:
        """Sum of deficiency times adjustment count over free active vertices.

        One unit of deficiency of the free vertex in the innermost
        shell is left out when the path is not the root.
        """
        st = self.st
        total = 0
        skip = not self.is_root
        for label in sorted(self.shells(), key=lambda lab: -self.pos_of_label[lab]):
            for v in sorted(self.part.members[label]):
                dv = st.f[v] - st.deg[v]
                if dv <= 0:
                    continue
                if skip:
                    dv -= 1
                    skip = False
                total += dv * st.d[v]
        return total

    def _record_free_sum(self) -> None:
        if self.cfg.assert_bounds and self.shells():
            self.ps.free_sum = max(self.ps.free_sum, self.free_sum())

    def run(self) -> PathStats:
        cfg = self.cfg
        size = self.size
        logx = _log2(size)
        pi = self.c * math.sqrt(size * logx) + 1
        if cfg.phase1_threshold is not None:
            pi = cfg.phase1_threshold
        self.ps.pass_bound = 2 * math.sqrt(size * logx) + 1
        # The bare slot bound holds for matchings; with capacities each
        # vertex may pay for several units, so the mode constant applies.
        self.ps.translation_bound = (self.c if self.st.fmode else 1) * size * logx
        self.ps.free_sum_bound = self.c * size * logx
        self.counting_translations = True

        # Phase 1
        passes = 0
        while True:
            for label in self.shells():
                if self.free_count(label) >= 2:
                    self.rematch(label)
            free = self.free_count()
            self._record_free_sum()
            if free <= pi or not self.shells():
                break
            passes += 1
            if passes > 1:
                active = free if self.is_root else free - 1
                lhs = active * (passes - 1 - logx)
                if lhs > self.c * size * logx:
                    self.ps.product_ok = False
            if cfg.assert_bounds and passes > self.ps.pass_bound:
                raise PassBoundExceeded(
                    f"pass {passes} exceeds {self.ps.pass_bound:.1f} for size {size}")
            todo = []
            for label in self.shells():
                if self.free_count(label) > 0:
                    todo.append((-self.shell_mass(label), -self.pos_of_label[label], label,
                                 self.boundaries(label)))
            todo.sort()
            for (_m, _p, label, bounds) in todo:
                if self.intact(label, bounds):
                    self.shell_search(label)
            if not self.shells():
                break
        self.ps.passes = passes
        self.stats.passes += passes
        self.ps.free_after_phase1 = self.free_count() if self.shells() else 0
        if cfg.assert_bounds and not self.ps.product_ok:
            raise PassBoundExceeded("product inequality failed for some pass")

        # Phase 2
        target = 0 if self.is_root else 1
        while self.shells() and self.free_count() > target:
            best = None
            for label in self.shells():
                if self.free_count(label) > 0:
                    pos = self.pos_of_label[label]
                    if best is None or pos < best[0]:
                        best = (pos, label)
            assert best is not None
            self._record_free_sum()
            self.episode(best[1], paged=True)
            self.ps.phase2_episodes += 1
        self.counting_translations = False
        self._record_free_sum()
        if cfg.assert_bounds:
            if self.ps.free_sum > self.ps.free_sum_bound:
                raise PassBoundExceeded(
                    f"adjustment sum {self.ps.free_sum} exceeds {self.ps.free_sum_bound:.1f}")
            if self.ps.translations > self.ps.translation_bound:
                raise SlotBoundExceeded(
                    f"{self.ps.translations} unit translations exceed "
                    f"{self.ps.translation_bound:.1f}")

        # Phase 3
        if not self.is_root:
            while self.shells():
                label = self.label_of_pos[self.last]
                self.episode(label, paged=False)
                self.ps.phase3_episodes += 1
        else:
            if self.free_count() != 0:
                raise StructureViolation("root path ended with deficient vertices")
        # Leave the partition empty for the next path.
        for label in self.shells():
            self.part.remove_set(label)
        self.ps.relabels = self.part.relabels
        return self.ps


def dismantle_scale(st: DualState, inh: InheritedFamily, cfg: Config, stats: ScaleStats,
                    trace: list[str] | None = None) -> None:
    """Dismantle every major path, deepest paths first."""
    plan = decompose(inh)
    for path in plan.paths:
        part = SetPartition(st.n)
        pd = PathDismantler(st, inh, path, cfg, stats, part, trace)
        stats.paths.append(pd.run())


# ----------------------------------------------------------------------
# Helpers shared with the f-factor driver


def family_from_forest(st: DualState) -> tuple[list[int], list[int], list[int]]:
    """Positive current blossoms as (parent, z, innermost-of-vertex) arrays.

    Blossoms with z = 0 are skipped; their children attach to the nearest
    kept ancestor.  Ids are renumbered densely.
    """
    fr = st.forest
    keep = [b for b in fr.live_blossoms() if fr.z[b] > 0]
    index = {b: i for i, b in enumerate(keep)}

    def kept_ancestor(node: int) -> int:
        c = fr.parent[node]
        while c != -1 and c not in index:
            c = fr.parent[c]
        return index[c] if c != -1 else -1

    parent = [kept_ancestor(b) for b in keep]
    z = [fr.z[b] for b in keep]
    leaf = [kept_ancestor(v) for v in range(st.n)]
    return parent, z, leaf


def init_inherited(st: DualState, y: Sequence[int], inh: InheritedFamily) -> None:
    """Attach an inherited family and derive y' from true y values."""
    st.inherited = inh
    acc = [0] * (inh.count + 1)
    for b in reversed(inh.order):
        p = inh.parent[b]
        acc[b] = inh.z[b] + (acc[p] if p >= 0 else 0)
    for v in range(st.n):
        st.yp[v] = y[v] + acc[inh.leaf_of[v]] // 2


def normalize_root(st: DualState) -> list[int]:
    """True y values after the scale, folding z(V) into the vertices.

    Every inherited blossom except V has dissolved, so y' already equals
    y + z(V)/2 and setting z(V) to 0 leaves exactly y'.
    """
    inh = st.inherited
    if inh is not None:
        for b in range(inh.count):
            if inh.z[b] != 0:
                raise StructureViolation(f"inherited blossom {b} survived the scale")
    return list(st.yp)


def current_blossoms(st: DualState, label_base: int = 1) -> list[CertBlossom]:
    fr = st.forest
    out = []
    for i, b in enumerate(b for b in fr.live_blossoms() if fr.z[b] > 0):
        out.append(CertBlossom(
            label=label_base + i,
            z=fr.z[b],
            vertices=sorted(fr.leaves(b)),
            eta=fr.eta[b],
            ring=[link[0] for link in fr.ring[b]]))  # type: ignore[union-attr]
    return out


def state_violations(st: DualState, y: Sequence[int]) -> list[str]:
    """Near-optimality check of a finished scale."""
    blossoms = current_blossoms(st)
    under = {}
    if st.fmode:
        for e in range(st.m):
            if st.active[e] and st.matched[e]:
                h = _hyz_plain(st, e, y)
                if h < st.w[e] - 2:
                    under[e] = st.w[e] - 2 - h
    return check_duals(st.n, st.f, st.eu, st.ev, st.w, st.active,
                       [e for e in range(st.m) if st.matched[e] and st.active[e]],
                       y, blossoms, under, 2, st.fmode)


def _hyz_plain(st: DualState, e: int, y: Sequence[int]) -> int:
    """hyz from true y values and current blossoms only."""
    saved = st.inherited
    saved_yp = st.yp
    st.inherited = None
    st.yp = list(y)
    try:
        return st.hyz(e)
    finally:
        st.inherited = saved
        st.yp = saved_yp


# ----------------------------------------------------------------------
# Matching driver


def solve_matching(g: Multigraph, cfg: Config | None = None) -> SolveResult:
    """Maximum-weight perfect matching by the scaling algorithm.

    Raises:
        Infeasible: If the graph has no perfect matching.
        OverflowGuard: If the scaled weights could leave 62-bit range.
    """
    cfg = cfg or Config()
    if not g.is_matching_instance():
        raise ValueError("solve_matching needs f = 1 everywhere")
    n = g.n
    if n % 2:
        raise Infeasible("odd number of vertices")
    check_overflow(g)
    if not feasibility_check(g):
        raise Infeasible("graph has no perfect matching")
    trace: list[str] | None = [] if cfg.trace else None
    shift = g.max_abs_weight() if min(g.w, default=0) < 0 else 0
    shifted = [x + shift for x in g.w]
    mult = n + 2
    top = max(1, max(shifted, default=0))
    wbar = [mult * x for x in shifted]
    s = scale_count(mult, top)

    w = [0] * g.m
    y = [-1] * n
    fam_parent: list[int] = []
    fam_z: list[int] = []
    fam_leaf = [-1] * n
    scales: list[ScaleStats] = []
    st: DualState | None = None
    for i in range(1, s + 1):
        stats = ScaleStats(scale=i)
        shift_bits = s + 1 - i
        w = [2 * (w[e] + ((wbar[e] >> shift_bits) & 1)) for e in range(g.m)]
        y = [2 * v + 2 for v in y]
        fam_z = [2 * z for z in fam_z]
        st = DualState(n, g.f, g.eu, g.ev, w, offset=2, fmode=False)
        inh = InheritedFamily(n, fam_parent, fam_z, fam_leaf, g.f)
        init_inherited(st, y, inh)
        for e in range(g.m):
            if st.hyz(e) < w[e] - 2:
                stats.window_violations += 1
        dismantle_scale(st, inh, cfg, stats, trace)
        y = normalize_root(st)
        if cfg.check_scales:
            stats.certificate_violations = state_violations(st, y)
        fam_parent, fam_z, fam_leaf = family_from_forest(st)
        scales.append(stats)
        if trace is not None:
            trace.append(f"end of scale {i}")

    if st is None:
        # No scales are needed only when there is nothing to match.
        if n:
            raise StructureViolation("no scales ran on a non-empty graph")
        cert = Certificate("matching", mult, shift, 2, g.digest(), [], [])
        return SolveResult([], 0, cert, scales, trace)
    if w != wbar:
        raise StructureViolation("final scale weights differ from the scaled input")
    matched = [e for e in range(g.m) if st.matched[e]]
    cert = Certificate(
        mode="matching",
        multiplier=mult,
        offset=shift,
        tolerance=2,
        graph_hash=g.digest(),
        matched=matched,
        y=y,
        blossoms=current_blossoms(st))
    return SolveResult(matched, sum(g.w[e] for e in matched), cert, scales, trace)
