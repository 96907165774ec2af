"""
Edmonds-style search over one shell, shared by every phase and by the
exact solver.

The search grows alternating trees from the deficient vertices and
deficient blossoms of a shell.  Nodes of the trees are top-level current
blossoms or single vertices, labelled outer or inner.  One set of rules
covers ordinary matching and f-factors (ordinary matching is the case
f = 1):

* An outer vertex leaves along unmatched edges, an inner vertex along
  matched edges.  An outer blossom leaves along every edge except its
  base edge, an inner blossom only along its base edge.
* Entering a vertex along a matched edge makes it outer, otherwise
  inner.  Entering a blossom along its base edge makes it outer,
  otherwise inner.
* An edge that can be left from both of its ends closes either an
  augmenting trail (different trees, or a cycle through a root vertex
  with deficiency at least two) or a new outer blossom.

Dual adjustments are lazy.  The search keeps a clock t; an outer vertex
has y'(v) = base - t, an inner one base + t, and the z of an outer
(inner) top blossom moves by +2t (-2t).  The slack of an edge therefore
changes at rate -(number of ends that can leave along it) + (number of
labelled ends that cannot), and the next event on every edge is a known
time.  Three modes share this machinery:

* "phase1": only slack 0 edges are eligible and the clock never moves.
  Used to build maximal structures and maximal sets of disjoint
  augmenting trails.
* "window": slack 0 or 2 is eligible; the clock jumps from event to
  event through a bucket queue.
* "exact": slack 0 is eligible; the clock jumps as in window mode.  This
  is the classic primal-dual algorithm.
"""

from __future__ import annotations

import heapq
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field

from .duals import CertBlossom, Certificate, DualState
from .errors import (
    ExpandOnPositiveZ, Infeasible, InfeasibleAdjust, SlotBoundExceeded, StructureViolation)
from .graph_core import Multigraph

OUTER = 1
INNER = 2

# Event kinds, in tie-breaking order.
GROW = 0
LINK = 1
EXPAND = 2
DISSOLVE = 3

# Results of a search.
AUGMENTED = "augmented"
DISSOLVED = "dissolved"
STUCK = "stuck"
MAXIMAL = "maximal"

# Trails recurse once per nesting level of blossoms.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class BucketPQ:
    """Monotone integer priority queue made of pages of buckets.

    A page holds page_size consecutive time values.  Events beyond the
    current page wait on an overflow heap and move into buckets when the
    page advances.  Within one time value events come out by kind
    (grow, link, expand, dissolve) and then in insertion order.

    When max_pages is set, moving past that many pages raises
    SlotBoundExceeded.
    """

    def __init__(self, page_size: int, max_pages: int | None = None) -> None:
        self.page_size = max(1, page_size)
        self.max_pages = max_pages
        self.page_start = 0
        self.cursor = 0
        self.buckets: list[list[tuple[int, int, object]]] = [[] for _ in range(self.page_size)]
        self.overflow: list[tuple[int, int, int, object]] = []
        self.count = 0
        self.seq = 0
        self.pages_used = 1

    def __len__(self) -> int:
        return self.count

    def now(self) -> int:
        return self.page_start + self.cursor

    def push(self, time: int, kind: int, payload: object) -> None:
        start = self.page_start
        if time < start + self.cursor:
            raise StructureViolation(f"event scheduled in the past: {time} < {self.now()}")
        self.seq = seq = self.seq + 1
        self.count += 1
        if time < start + self.page_size:
            heapq.heappush(self.buckets[time - start], (kind, seq, payload))
        else:
            heapq.heappush(self.overflow, (time, kind, seq, payload))

    def pop(self) -> tuple[int, int, object] | None:
        while self.count:
            while self.cursor < self.page_size:
                bucket = self.buckets[self.cursor]
                if bucket:
                    self.count -= 1
                    kind, _seq, payload = heapq.heappop(bucket)
                    return (self.page_start + self.cursor, kind, payload)
                self.cursor += 1
            # Current page is empty: jump to the page of the earliest overflow event.
            first = self.overflow[0][0]
            new_start = first - (first - self.page_start) % self.page_size
            self.pages_used += (new_start - self.page_start) // self.page_size
            if self.max_pages is not None and self.pages_used > self.max_pages:
                raise SlotBoundExceeded(
                    f"bucket queue needed {self.pages_used} pages, limit {self.max_pages}")
            self.page_start = new_start
            self.cursor = 0
            limit = new_start + self.page_size
            while self.overflow and self.overflow[0][0] < limit:
                time, kind, seq, payload = heapq.heappop(self.overflow)
                heapq.heappush(self.buckets[time - new_start], (kind, seq, payload))
        return None


@dataclass
class SearchStats:
    grows: int = 0
    blossoms: int = 0
    expands: int = 0
    augments: int = 0
    events: int = 0
    trace: list[str] | None = None


class Search:
    """One search structure over one shell.

    Args:
        st: Working state; duals are materialized back into it by finalize().
        members: Vertices of the shell.
        shell_of, sid: A vertex v belongs to the shell iff shell_of[v] == sid.
        mode: "phase1", "window" or "exact".
        boundaries: Inherited blossoms whose dissolution ends the search
            (window mode), each translated by one unit per clock tick.
        page_size, max_pages: Bucket queue shape.
        trace: Optional list that receives one line per step.
    """

    def __init__(
            self,
            st: DualState,
            members: Sequence[int],
            shell_of: Sequence[int],
            sid: int,
            mode: str,
            boundaries: Sequence[int] = (),
            page_size: int | None = None,
            max_pages: int | None = None,
            trace: list[str] | None = None
            ) -> None:
        if mode not in ("phase1", "window", "exact"):
            raise ValueError(f"unknown search mode {mode!r}")
        self.st = st
        self.fr = st.forest
        self.members = list(members)
        self.shell_of = shell_of
        self.sid = sid
        self.mode = mode
        self.boundaries = list(boundaries)
        self.t = 0
        self.label: dict[int, int] = {}
        self.tree: dict[int, int] = {}
        self.pedge: dict[int, int] = {}
        self.yb: dict[int, int] = {}
        self.ysgn: dict[int, int] = {}
        self.zb: dict[int, int] = {}
        self.zsgn: dict[int, int] = {}
        self.dead: set[int] = set()
        self.pq = BucketPQ(page_size or max(1, len(self.members)), max_pages)
        self.stats = SearchStats(trace=trace)
        self.free_at_start: list[int] = []
        self.result_payload: object = None
        self.finalized = False

    # ------------------------------------------------------------------
    # Lazy duals

    def y(self, v: int) -> int:
        s = self.ysgn.get(v)
        if s is None:
            return self.st.yp[v]
        return self.yb[v] + s * self.t

    def zcur(self, b: int) -> int:
        s = self.zsgn.get(b)
        if s is None:
            return self.fr.z[b]
        return self.zb[b] + 2 * s * self.t

    def _attach_duals(self, node: int, lab: int) -> None:
        """Switch a freshly labelled node to lazy duals."""
        sign = -1 if lab == OUTER else 1
        t = self.t
        for v in self.fr.leaves(node):
            cur = self.y(v)
            self.ysgn[v] = sign
            self.yb[v] = cur - sign * t
        if node >= self.st.n:
            cur = self.zcur(node)
            zs = 1 if lab == OUTER else -1
            self.zsgn[node] = zs
            self.zb[node] = cur - 2 * zs * t

    def _detach_blossom_dual(self, b: int) -> None:
        if b in self.zsgn:
            self.fr.z[b] = self.zcur(b)
            del self.zsgn[b]
            del self.zb[b]

    def _detach_vertex(self, v: int) -> None:
        if v in self.ysgn:
            self.st.yp[v] = self.y(v)
            del self.ysgn[v]
            del self.yb[v]

    # ------------------------------------------------------------------
    # Edge status

    def _in_shell(self, v: int) -> bool:
        return self.shell_of[v] == self.sid

    def _zchain(self, v: int, top: int) -> int:
        """Sum of z over the blossoms that contain v, up to the top node."""
        fr = self.fr
        total = 0
        b = fr.parent[v]
        while b != top:
            total += fr.z[b]
            b = fr.parent[b]
        return total + self.zcur(top)

    def slack(self, e: int) -> int:
        """Slack of an edge whose ends lie in different top nodes (or a loop)."""
        st = self.st
        u, v = st.eu[e], st.ev[e]
        h = self.y(u) + self.y(v)
        if st.fmode:
            top = self.fr.top
            a, b = top[u], top[v]
            if a >= st.n and st.in_i_set(e, a):
                h += self._zchain(u, a)
            if b >= st.n and st.in_i_set(e, b):
                h += self._zchain(v, b)
        if st.matched[e]:
            return st.w[e] - h
        return h - st.w[e] + st.offset

    def _exitable(self, node: int, e: int) -> bool:
        lab = self.label.get(node)
        if lab is None:
            return False
        if node < self.st.n:
            return (lab == OUTER) != self.st.matched[e]
        return (lab == OUTER) != (e == self.fr.eta[node])

    def _rate(self, e: int) -> tuple[int, int, int]:
        """Return (rate, node at eu end, node at ev end)."""
        st = self.st
        top = self.fr.top
        a, b = top[st.eu[e]], top[st.ev[e]]
        r = 0
        for node in (a, b):
            if node in self.label:
                r += -1 if self._exitable(node, e) else 1
        return r, a, b

    def _eligible(self, s: int) -> bool:
        if self.mode == "window":
            return s == 0 or s == 2
        return s == 0

    def _wait(self, s: int, r: int) -> int:
        """Clock ticks until slack s falling at rate r becomes eligible."""
        if s < 0:
            raise InfeasibleAdjust(f"negative slack {s} inside a search")
        if self.mode == "window":
            if s >= 2 and (s - 2) % r == 0:
                return (s - 2) // r
            if s % r == 0:
                return s // r
        elif s % r == 0:
            return s // r
        raise InfeasibleAdjust(f"slack {s} cannot reach an eligible value at rate {r}")

    def _consider(self, e: int) -> None:
        r, a, b = self._rate(e)
        if r >= 0:
            return
        if self.dead:
            for node in (a, b):
                if node in self.tree and self.tree[node] in self.dead:
                    return
        kind = GROW if r == -1 else LINK
        s = self.slack(e)
        if self._eligible(s):
            self.pq.push(self.t, kind, e)
        elif self.mode != "phase1":
            self.pq.push(self.t + self._wait(s, -r), kind, e)

    def _scan_vertex(self, v: int) -> None:
        """Queue every useful edge at v.

        This is the innermost loop of every search, so the work of
        _consider is written out here for speed.  It must stay in step
        with _rate, _exitable and slack.
        """
        st = self.st
        fr = self.fr
        top = fr.top
        eta = fr.eta
        eu, ev, w, matched = st.eu, st.ev, st.w, st.matched
        n = st.n
        shell_of, sid = self.shell_of, self.sid
        label, tree, dead = self.label, self.tree, self.dead
        ysgn, yb, yp = self.ysgn, self.yb, st.yp
        t = self.t
        fmode = st.fmode
        offset = st.offset
        window = self.mode == "window"
        phase1 = self.mode == "phase1"
        push = self.pq.push
        tv = top[v]
        for e in st.adj[v]:
            x = eu[e]
            y_ = ev[e]
            o = y_ if x == v else x
            if shell_of[o] != sid:
                continue
            to = top[o]
            if to == tv and (o != v or tv >= n):
                continue
            a, b = top[x], top[y_]
            me = matched[e]
            r = 0
            lab = label.get(a)
            if lab is not None:
                r += -1 if (lab == OUTER) != (me if a < n else e == eta[a]) else 1
            lab = label.get(b)
            if lab is not None:
                r += -1 if (lab == OUTER) != (me if b < n else e == eta[b]) else 1
            if r >= 0:
                continue
            if dead and ((a in tree and tree[a] in dead) or (b in tree and tree[b] in dead)):
                continue
            kind = GROW if r == -1 else LINK
            if fmode:
                sl = self.slack(e)
            else:
                sg = ysgn.get(x)
                h = yp[x] if sg is None else yb[x] + sg * t
                sg = ysgn.get(y_)
                h += yp[y_] if sg is None else yb[y_] + sg * t
                sl = w[e] - h if me else h - w[e] + offset
            if sl == 0 or (window and sl == 2):
                push(t, kind, e)
            elif not phase1:
                push(t + self._wait(sl, -r), kind, e)

    def _scan_node(self, node: int) -> None:
        for v in self.fr.leaves(node):
            self._scan_vertex(v)

    def _log(self, msg: str) -> None:
        if self.stats.trace is not None:
            self.stats.trace.append(msg)

    # ------------------------------------------------------------------
    # Setup

    def _expand_zero_blossoms(self) -> None:
        fr = self.fr
        stack = []
        seen = set()
        for v in self.members:
            b = fr.top[v]
            if b >= self.st.n and b not in seen:
                seen.add(b)
                stack.append(b)
        while stack:
            b = stack.pop()
            if fr.z[b] == 0:
                for c in fr.dissolve_top(b):
                    if c >= self.st.n:
                        stack.append(c)

    def start(self) -> None:
        """Expand zero blossoms, label the roots and queue their edges."""
        st = self.st
        self._expand_zero_blossoms()
        roots = []
        for v in sorted(self.members):
            if st.deg[v] > st.f[v]:
                raise StructureViolation(f"vertex {v} exceeds its degree cap")
            if st.deg[v] < st.f[v]:
                self.free_at_start.append(v)
                node = self.fr.top[v]
                if node in self.label:
                    continue
                if node >= st.n and (self.fr.eta[node] != -1 or self.fr.base[node] != v
                                     or st.f[v] - st.deg[v] != 1):
                    raise StructureViolation(
                        f"deficient vertex {v} is not the free base of blossom {node}")
                self.label[node] = OUTER
                self.tree[node] = node
                self.pedge[node] = -1
                self._attach_duals(node, OUTER)
                roots.append(node)
        if self.mode == "window":
            for bnd in self.boundaries:
                z = self.st.inherited.z[bnd]  # type: ignore[union-attr]
                self.pq.push(z // 2, DISSOLVE, bnd)
        for node in roots:
            self._scan_node(node)

    # ------------------------------------------------------------------
    # Main loop

    def run(self, kill_trees: bool = False) -> str:
        """Run until an augmentation, a dissolve event, or exhaustion.

        With kill_trees, an augmentation retires the trees it touched and
        the search continues; the result is then the number of
        augmentations performed, reported through self.stats.
        """
        while True:
            item = self.pq.pop()
            if item is None:
                return MAXIMAL if self.mode == "phase1" else STUCK
            time, kind, payload = item
            if time > self.t:
                self.t = time
            self.stats.events += 1
            if kind == DISSOLVE:
                self.result_payload = payload
                return DISSOLVED
            if kind == EXPAND:
                b = payload
                if (self.fr.alive[b] and self.fr.parent[b] == -1
                        and self.label.get(b) == INNER and self.zcur(b) == 0):
                    self._expand(b)
                continue
            e = payload
            r, a, b = self._rate(e)
            if r >= 0 or (a == b and (a >= self.st.n or self.st.eu[e] != self.st.ev[e])):
                continue
            if self.dead and any(n in self.tree and self.tree[n] in self.dead for n in (a, b)):
                continue
            s = self.slack(e)
            if not self._eligible(s):
                if self.mode != "phase1":
                    self.pq.push(self.t + self._wait(s, -r), GROW if r == -1 else LINK, e)
                continue
            if r == -1:
                self._grow(e, a, b)
                continue
            if self._link(e, a, b):
                if not kill_trees:
                    return AUGMENTED

    # ------------------------------------------------------------------
    # Steps

    def _grow(self, e: int, a: int, b: int) -> None:
        st = self.st
        src, dst = (a, b) if a in self.label else (b, a)
        if dst in self.label:
            raise StructureViolation("grow into a labelled node")
        if dst < st.n:
            lab = OUTER if st.matched[e] else INNER
        else:
            lab = OUTER if e == self.fr.eta[dst] else INNER
        self._label_node(dst, lab, self.tree[src], e)
        self.stats.grows += 1
        self._log(f"grow {src}->{dst} via {e} {'outer' if lab == OUTER else 'inner'}")
        self._scan_node(dst)

    def _label_node(self, node: int, lab: int, tree: int, pe: int) -> None:
        self.label[node] = lab
        self.tree[node] = tree
        self.pedge[node] = pe
        self._attach_duals(node, lab)
        if node >= self.st.n and lab == INNER:
            z = self.zcur(node)
            if z % 2:
                raise StructureViolation(f"odd blossom dual {z}")
            if self.mode != "phase1" or z == 0:
                self.pq.push(self.t + z // 2, EXPAND, node)

    def _parent_node(self, node: int) -> int | None:
        pe = self.pedge[node]
        if pe == -1:
            return None
        top = self.fr.top
        a, b = top[self.st.eu[pe]], top[self.st.ev[pe]]
        return b if a == node else a

    def _link(self, e: int, a: int, b: int) -> bool:
        """Handle an edge leaving two labelled nodes; True if augmented."""
        st = self.st
        if self.tree[a] != self.tree[b]:
            self._augment(e)
            return True
        seen = set()
        x, y = a, b
        lca = None
        while lca is None:
            if x is not None:
                if x in seen:
                    lca = x
                    break
                seen.add(x)
                x = self._parent_node(x)
            if y is not None:
                if y in seen:
                    lca = y
                    break
                seen.add(y)
                y = self._parent_node(y)
        if lca < st.n and self.pedge[lca] == -1 and st.f[lca] - st.deg[lca] >= 2:
            self._augment(e)
            return True
        self._make_blossom(e, a, b, lca)
        return False

    def _link_tuple(self, g: int, left: int, right: int) -> tuple[int, int, int]:
        top = self.fr.top
        u, v = self.st.eu[g], self.st.ev[g]
        if top[u] == left and top[v] == right:
            return (g, u, v)
        return (g, v, u)

    def _make_blossom(self, e: int, a: int, b: int, lca: int) -> None:
        st = self.st
        fr = self.fr
        if lca >= st.n and self.label[lca] == INNER:
            raise StructureViolation("blossom closes at an inner blossom")
        xs = []
        node = a
        while node != lca:
            xs.append(node)
            node = self._parent_node(node)
        ys = []
        node = b
        while node != lca:
            ys.append(node)
            node = self._parent_node(node)
        xs.reverse()
        kids = [lca] + xs + ys
        ring = []
        for i, left in enumerate(kids):
            right = kids[(i + 1) % len(kids)]
            if i < len(xs):
                g = self.pedge[right]
            elif i == len(xs):
                g = e
            else:
                g = self.pedge[left]
            ring.append(self._link_tuple(g, left, right))
        heavy = lca < st.n and self.label[lca] == INNER
        tree = self.tree[lca]
        pe = self.pedge[lca]
        was_inner = []
        for c in kids:
            for v in fr.leaves(c):
                if self.ysgn.get(v) == 1:
                    was_inner.append(v)
            if c >= st.n:
                self._detach_blossom_dual(c)
            del self.label[c]
            del self.tree[c]
            del self.pedge[c]
        base = fr.base[lca]
        nb = fr.new_blossom(kids, ring, base, pe, 0, heavy)
        self.label[nb] = OUTER
        self.tree[nb] = tree
        self.pedge[nb] = pe
        self.zsgn[nb] = 1
        self.zb[nb] = -2 * self.t
        t = self.t
        for v in was_inner:
            cur = self.yb[v] + t
            self.ysgn[v] = -1
            self.yb[v] = cur + t
        self.stats.blossoms += 1
        self._log(f"blossom B{nb} from {kids} base {base}")
        if st.fmode:
            self._scan_node(nb)
        else:
            for v in was_inner:
                self._scan_vertex(v)

    def _expand(self, b: int) -> None:
        st = self.st
        fr = self.fr
        if self.zcur(b) != 0:
            raise ExpandOnPositiveZ(f"blossom {b} has z = {self.zcur(b)}")
        tau = self.pedge[b]
        tree = self.tree[b]
        top = fr.top
        p = st.eu[tau] if top[st.eu[tau]] == b else st.ev[tau]
        self._detach_blossom_dual(b)
        kids = list(fr.kids[b])  # type: ignore[arg-type]
        ring = list(fr.ring[b])  # type: ignore[arg-type]
        k = len(kids)
        c = fr.child_of(b, p)
        i = kids.index(c)
        eta_matched = True if fr.eta[b] < 0 else st.matched[fr.eta[b]]
        self.stats.expands += 1
        if i == 0 and c < st.n and st.matched[tau] == eta_matched:
            # Entered at a vertex base with the base edge's own type: the
            # blossom is now reached through tau, so it becomes outer.
            fr.eta[b] = tau
            fr.heavy[b] = not st.matched[tau]
            for v in fr.leaves(b):
                self._detach_vertex(v)
            self.label[b] = OUTER
            self._attach_duals(b, OUTER)
            self._log(f"expand B{b} turns outer with base edge {tau}")
            self._scan_node(b)
            return
        for v in fr.leaves(b):
            self._detach_vertex(v)
        del self.label[b]
        del self.tree[b]
        del self.pedge[b]
        fr.dissolve_top(b)
        seq = [(c, tau)]
        if i != 0:
            if c >= st.n:
                if ring[i][0] == fr.eta[c]:
                    step = 1
                elif ring[i - 1][0] == fr.eta[c]:
                    step = -1
                else:
                    raise StructureViolation(f"child {c} of {b} lost its base edge")
            else:
                want = not st.matched[tau]
                if st.matched[ring[i][0]] == want:
                    step = 1
                elif st.matched[ring[i - 1][0]] == want:
                    step = -1
                else:
                    raise StructureViolation(f"ring of {b} does not alternate at {c}")
            j = i
            while j != 0:
                g = ring[j][0] if step == 1 else ring[j - 1][0]
                j = (j + step) % k
                seq.append((kids[j], g))
        for node, g in seq:
            if node < st.n:
                lab = OUTER if st.matched[g] else INNER
            else:
                lab = OUTER if g == fr.eta[node] else INNER
            self._label_node(node, lab, tree, g)
        self._log(f"expand B{b} into path {[s[0] for s in seq]}")
        for node in kids:
            self._scan_node(node)

    def _path_up(self, node: int, vert: int, ext: int,
                 rotations: list[tuple[int, int, int]]) -> list[int]:
        st = self.st
        fr = self.fr
        top = fr.top
        edges: list[int] = []
        while True:
            if node >= st.n:
                if self.label[node] == OUTER:
                    edges.extend(fr.trail(node, vert, not st.matched[ext], st.matched,
                                          rotations, ext))
                else:
                    pe = self.pedge[node]
                    p = st.eu[pe] if top[st.eu[pe]] == node else st.ev[pe]
                    sub = fr.trail(node, p, not st.matched[pe], st.matched, rotations, pe)
                    sub.reverse()
                    edges.extend(sub)
            pe = self.pedge[node]
            if pe == -1:
                return edges
            edges.append(pe)
            other = st.ev[pe] if top[st.eu[pe]] == node else st.eu[pe]
            node, vert, ext = top[other], other, pe

    def _augment(self, e: int) -> None:
        st = self.st
        fr = self.fr
        u, v = st.eu[e], st.ev[e]
        rotations: list[tuple[int, int, int]] = []
        left = self._path_up(fr.top[u], u, e, rotations)
        right = self._path_up(fr.top[v], v, e, rotations)
        walk = left[::-1] + [e] + right
        if len(set(walk)) != len(walk):
            raise StructureViolation("augmenting trail repeats an edge")
        for g in walk:
            st.set_matched(g, not st.matched[g])
        for (b, ext, x) in rotations:
            fr.rotate(b, x, ext)
        for x in (u, v):
            if st.deg[x] > st.f[x]:
                raise StructureViolation(f"augment overfilled vertex {x}")
        trees = {self.tree[fr.top[u]], self.tree[fr.top[v]]}
        self.dead.update(trees)
        self.stats.augments += 1
        self._log(f"augment {len(walk)} edges via {e}")

    # ------------------------------------------------------------------
    # Dual adjustment for a finished phase-1 structure

    def check_adjust(self, delta: int) -> None:
        """Raise InfeasibleAdjust unless every dual stays valid after delta."""
        st = self.st
        seen = set()
        for node, lab in self.label.items():
            if node >= st.n and lab == INNER and self.zcur(node) < 2 * delta:
                raise InfeasibleAdjust(f"inner blossom {node} has z {self.zcur(node)}")
            for v in self.fr.leaves(node):
                for e in st.adj[v]:
                    if e in seen:
                        continue
                    seen.add(e)
                    o = st.other(e, v)
                    if not self._in_shell(o):
                        continue
                    top = self.fr.top
                    if top[o] == top[v] and (o != v or top[v] >= st.n):
                        continue
                    r, _a, _b = self._rate(e)
                    if r < 0 and self.slack(e) + r * delta < 0:
                        raise InfeasibleAdjust(
                            f"edge {e} slack {self.slack(e)} cannot absorb {delta} at rate {r}")

    def advance(self, delta: int) -> None:
        self.t += delta

    def finalize(self) -> int:
        """Write lazy duals back into the state; return the clock value."""
        if self.finalized:
            return self.t
        st = self.st
        for v in list(self.ysgn):
            self._detach_vertex(v)
        for b in list(self.zsgn):
            z = self.zcur(b)
            if z < 0:
                raise InfeasibleAdjust(f"blossom {b} ended with z = {z}")
            self._detach_blossom_dual(b)
        for v in self.free_at_start:
            st.d[v] += self.t
        self.finalized = True
        return self.t


# ----------------------------------------------------------------------
# Exact solver


@dataclass
class ClassicResult:
    matched: list[int]
    weight: int
    certificate: Certificate
    stats: dict[str, int] = field(default_factory=dict)


def _certificate_blossoms(st: DualState) -> list[CertBlossom]:
    fr = st.forest
    out = []
    for b in fr.live_blossoms():
        out.append(CertBlossom(
            label=b - st.n + 1,
            z=fr.z[b],
            vertices=sorted(fr.leaves(b)),
            eta=fr.eta[b],
            ring=[link[0] for link in fr.ring[b]]))  # type: ignore[union-attr]
    return out


def classic_solve(g: Multigraph, trace: list[str] | None = None) -> ClassicResult:
    """Maximum-weight perfect matching or f-factor with exact duals.

    Weights are doubled internally so that every dual stays an integer.
    The certificate uses multiplier 2 and slack tolerance 0.

    Raises:
        Infeasible: If no perfect matching or f-factor exists.
    """
    fmode = not g.is_matching_instance()
    if g.f_total() % 2:
        raise Infeasible("total degree demand is odd")
    w2 = [2 * x for x in g.w]
    st = DualState(g.n, g.f, g.eu, g.ev, w2, offset=0, fmode=fmode)
    top_w = max(w2, default=0)
    st.yp = [top_w // 2] * g.n
    members = list(range(g.n))
    shell = [0] * g.n
    stats = {"searches": 0, "augments": 0, "events": 0}
    while any(st.deg[v] < st.f[v] for v in range(g.n)):
        search = Search(st, members, shell, 0, "exact", trace=trace)
        search.start()
        res = search.run()
        search.finalize()
        stats["searches"] += 1
        stats["events"] += search.stats.events
        if res == STUCK:
            raise Infeasible("no perfect matching or f-factor exists")
        stats["augments"] += search.stats.augments
    matched = [e for e in range(g.m) if st.matched[e]]
    # Matched f-factor edges may sit strictly below their weight; the gap
    # is the dual of the edge's capacity constraint.
    under = {}
    if fmode:
        for e in matched:
            gap = w2[e] - st.hyz(e)
            if gap > 0:
                under[e] = gap
    cert = Certificate(
        mode="ffactor" if fmode else "matching",
        multiplier=2,
        offset=0,
        tolerance=0,
        graph_hash=g.digest(),
        matched=matched,
        y=list(st.yp),
        blossoms=_certificate_blossoms(st),
        undervalued=under)
    return ClassicResult(matched, sum(g.w[e] for e in matched), cert, stats)


def feasibility_check(g: Multigraph) -> bool:
    """True iff the graph has a perfect matching (or an f-factor)."""
    if g.f_total() % 2:
        return False
    try:
        classic_solve(g.with_weights([0] * g.m))
    except Infeasible:
        return False
    return True
