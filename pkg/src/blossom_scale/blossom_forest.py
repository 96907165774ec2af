"""
Blossom bookkeeping: the laminar family of current blossoms, the
alternating trails through them, and a relabel-the-smaller-half set
partition.

A blossom is stored as an ordered ring of children.  Link i of the ring
joins child i to child i+1 (cyclically) and remembers the edge together
with the endpoint that lies inside each of the two children.  Child 0 is
the base child; it contains the base vertex.  Every blossom also carries
its base edge ("eta"), the unique edge through which an alternating trail
may leave the blossom at its base, or -1 when the base is deficient.

Trails are produced by walking the ring and recursing into child
blossoms.  The walk never visits an edge twice, so the output is a
proper alternating trail whose length is linear in its number of edges.
"""

from __future__ import annotations

from collections.abc import Sequence

from .errors import StructureViolation

# One ring link: (edge id, endpoint inside child i, endpoint inside child i+1).
Link = tuple[int, int, int]

# A record left behind by trail extraction: (blossom, new base edge, new base).
Rotation = tuple[int, int, int]


class BlossomForest:
    """Laminar family of blossoms over vertices 0..n-1.

    Node ids below n are vertices, ids from n upwards are blossoms.  Ids
    are never reused; a dissolved blossom simply becomes not alive.

    Attributes:
        parent: Enclosing blossom of each node, or -1 at the top level.
        top: For every vertex, the outermost live blossom containing it,
            or the vertex itself.
        kids, ring: Child list and ring links of each blossom.
        base: Base vertex of each node (a vertex is its own base).
        eta: Base edge of each blossom, -1 when absent.
        z: Dual value of each blossom.
        heavy: True for blossoms formed around an inner base vertex.
    """

    def __init__(self, n: int, eu: Sequence[int], ev: Sequence[int]) -> None:
        self.n = n
        self.eu = eu
        self.ev = ev
        self.parent: list[int] = [-1] * n
        self.top: list[int] = list(range(n))
        self.kids: list[list[int] | None] = [None] * n
        self.ring: list[list[Link] | None] = [None] * n
        self.base: list[int] = list(range(n))
        self.eta: list[int] = [-1] * n
        self.z: list[int] = [0] * n
        self.heavy: list[bool] = [False] * n
        self.alive: list[bool] = [True] * n

    # ------------------------------------------------------------------
    # Structure queries

    def is_blossom(self, node: int) -> bool:
        return node >= self.n

    def node_count(self) -> int:
        return len(self.parent)

    def live_blossoms(self) -> list[int]:
        return [b for b in range(self.n, len(self.parent)) if self.alive[b]]

    def leaves(self, node: int) -> list[int]:
        """All vertices inside a node, in ring order."""
        if node < self.n:
            return [node]
        out: list[int] = []
        stack = [node]
        while stack:
            b = stack.pop()
            if b < self.n:
                out.append(b)
            else:
                stack.extend(reversed(self.kids[b]))  # type: ignore[arg-type]
        return out

    def child_of(self, b: int, v: int) -> int:
        """The child of blossom b that contains vertex v."""
        c = v
        while self.parent[c] != b:
            c = self.parent[c]
            if c == -1:
                raise StructureViolation(f"vertex {v} is not inside blossom {b}")
        return c

    def contains(self, b: int, v: int) -> bool:
        c = v
        while c != -1:
            if c == b:
                return True
            c = self.parent[c]
        return False

    def ancestors(self, v: int) -> list[int]:
        """Blossoms containing v, innermost first."""
        out = []
        c = self.parent[v]
        while c != -1:
            out.append(c)
            c = self.parent[c]
        return out

    # ------------------------------------------------------------------
    # Mutation

    def new_blossom(
            self,
            kids: list[int],
            ring: list[Link],
            base: int,
            eta: int,
            z: int = 0,
            heavy: bool = False
            ) -> int:
        """Create a top-level blossom from top-level children."""
        if len(kids) != len(ring) or not kids:
            raise StructureViolation("ring must have one link per child")
        b = len(self.parent)
        self.parent.append(-1)
        self.kids.append(list(kids))
        self.ring.append(list(ring))
        self.base.append(base)
        self.eta.append(eta)
        self.z.append(z)
        self.heavy.append(heavy)
        self.alive.append(True)
        for c in kids:
            if self.parent[c] != -1:
                raise StructureViolation(f"child {c} is not top-level")
            self.parent[c] = b
        for v in self.leaves(b):
            self.top[v] = b
        return b

    def dissolve_top(self, b: int) -> list[int]:
        """Remove a top-level blossom; its children become top-level."""
        if self.parent[b] != -1 or not self.alive[b]:
            raise StructureViolation(f"blossom {b} is not a live top-level blossom")
        kids = self.kids[b]
        assert kids is not None
        for c in kids:
            self.parent[c] = -1
            for v in self.leaves(c):
                self.top[v] = c
        self.alive[b] = False
        return list(kids)

    def rotate(self, b: int, new_base: int, new_eta: int) -> None:
        """Make new_base the base of b by rotating the ring."""
        c = self.child_of(b, new_base)
        kids = self.kids[b]
        ring = self.ring[b]
        assert kids is not None and ring is not None
        i = kids.index(c)
        if i:
            self.kids[b] = kids[i:] + kids[:i]
            self.ring[b] = ring[i:] + ring[:i]
        self.base[b] = new_base
        self.eta[b] = new_eta

    # ------------------------------------------------------------------
    # Trails

    def trail(
            self,
            b: int,
            x: int,
            first_matched: bool,
            matched: Sequence[bool],
            rotations: list[Rotation] | None = None,
            ext: int = -1
            ) -> list[int]:
        """Alternating trail inside blossom b from vertex x to its base.

        The first edge at x is matched when first_matched is true.  The
        trail ends at the base with an edge whose type is opposite to the
        base edge (an absent base edge counts as matched), or is empty
        when x is the base and no edge is needed.

        When rotations is given, every blossom traversed records
        (blossom, ext, entry vertex) so that an augmentation can rebase
        it afterwards.  ext is the edge by which the trail arrives at x
        from outside b.
        """
        if rotations is not None:
            rotations.append((b, ext, x))
        kids = self.kids[b]
        ring = self.ring[b]
        assert kids is not None and ring is not None
        k = len(kids)
        c = self.child_of(b, x)
        i = kids.index(c)
        eta_matched = True if self.eta[b] < 0 else bool(matched[self.eta[b]])
        out: list[int] = []
        n = self.n

        if i == 0:
            if c >= n:
                return self.trail(c, x, first_matched, matched, rotations, ext)
            if first_matched == eta_matched:
                return out
            g = ring[0][0]
            if bool(matched[g]) != first_matched:
                raise StructureViolation(f"ring of blossom {b} does not alternate at its base")
            step = 1
        else:
            if c >= n:
                out = self.trail(c, x, first_matched, matched, rotations, ext)
                g = self.eta[c]
                if ring[i][0] == g:
                    step = 1
                elif ring[i - 1][0] == g:
                    step = -1
                else:
                    raise StructureViolation(f"child {c} of {b} has no ring base edge")
            else:
                if bool(matched[ring[i][0]]) == first_matched:
                    g, step = ring[i][0], 1
                elif bool(matched[ring[i - 1][0]]) == first_matched:
                    g, step = ring[i - 1][0], -1
                else:
                    raise StructureViolation(f"no ring edge of the right type at {x}")
        out.append(g)
        j = i + step

        while True:
            j %= k
            a = kids[j]
            if step == 1:
                enter_v = ring[j - 1][2]
            else:
                enter_v = ring[j][1]
            if j == 0:
                if a >= n:
                    out.extend(self.trail(a, enter_v, not matched[g], matched, rotations, g))
                return out
            if step == 1:
                nxt, exit_v = ring[j][0], ring[j][1]
            else:
                nxt, exit_v = ring[j - 1][0], ring[j - 1][2]
            if a >= n:
                if g == self.eta[a]:
                    sub = self.trail(a, exit_v, not matched[nxt], matched, rotations, nxt)
                    sub.reverse()
                    out.extend(sub)
                elif nxt == self.eta[a]:
                    out.extend(self.trail(a, enter_v, not matched[g], matched, rotations, g))
                else:
                    raise StructureViolation(f"child {a} of {b} is not attached by its base edge")
            out.append(nxt)
            g = nxt
            j += step

    def path_to_base(self, b: int, x: int, matched: Sequence[bool]) -> list[int]:
        """Even alternating path from x to the base, starting matched at x."""
        return self.trail(b, x, True, matched)

    # ------------------------------------------------------------------
    # Debugging

    def dump(self, z0: dict[int, int] | None = None, tau: dict[int, int] | None = None) -> str:
        """One line per live blossom: id, kind, base, duals and children."""
        lines = []
        for b in self.live_blossoms():
            kind = "heavy" if self.heavy[b] else "current"
            kids = ",".join(
                (f"B{c}" if c >= self.n else str(c)) for c in self.kids[b])  # type: ignore[union-attr]
            lines.append(
                f"B{b} {kind} {self.base[b]} {self.z[b]} "
                f"{(z0 or {}).get(b, 0)} {(tau or {}).get(b, 0)} children=[{kids}]")
        return "\n".join(lines)


class SetPartition:
    """Disjoint sets over 0..n-1 merged by relabelling the smaller set.

    Elements not in any set carry label -1.  The counter relabels records
    the total number of elements that changed label, which is at most
    n log2 n over any sequence of unions.
    """

    def __init__(self, n: int) -> None:
        self.label = [-1] * n
        self.members: dict[int, list[int]] = {}
        self.relabels = 0

    def make_set(self, set_id: int, items: list[int]) -> None:
        if set_id in self.members:
            raise ValueError(f"set {set_id} already exists")
        self.members[set_id] = list(items)
        for x in items:
            self.label[x] = set_id

    def find(self, x: int) -> int:
        return self.label[x]

    def union(self, a: int, b: int) -> int:
        """Merge sets a and b; return the label that survives.

        The smaller set is relabelled.  With equal sizes the lower set
        id keeps its label.
        """
        if a == b:
            return a
        ma, mb = self.members[a], self.members[b]
        if len(ma) < len(mb) or (len(ma) == len(mb) and b < a):
            a, b = b, a
            ma, mb = mb, ma
        for x in mb:
            self.label[x] = a
        ma.extend(mb)
        self.relabels += len(mb)
        del self.members[b]
        return a

    def remove_set(self, set_id: int) -> list[int]:
        items = self.members.pop(set_id)
        for x in items:
            self.label[x] = -1
        return items
