"""
Multigraph storage and the edge-set primitives used by every other module.

Vertices are dense integers 0..n-1 and edges are numbered in insertion
order.  Parallel edges and loops are allowed.  A loop at v counts twice
towards the degree of v, lies inside every vertex set containing v and
never crosses a cut.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Sequence

from .errors import DegreeViolation, OverflowGuard

# Largest magnitude allowed for any intermediate dual or weight value.
INT_LIMIT = 1 << 62


class Multigraph:
    """An undirected multigraph with integer weights and degree caps.

    Attributes:
        n: Number of vertices.
        eu, ev: Endpoint arrays; edge e joins eu[e] and ev[e].
        w: Integer edge weights.
        f: Degree cap per vertex (all ones for ordinary matching).
        adj: For each vertex the list of incident edge ids.  A loop is
            listed once at its vertex.
    """

    __slots__ = ("n", "eu", "ev", "w", "f", "adj")

    def __init__(
            self,
            n: int,
            edges: Iterable[tuple[int, int, int]],
            f: Sequence[int] | None = None
            ) -> None:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self.eu: list[int] = []
        self.ev: list[int] = []
        self.w: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]
        for (u, v, wt) in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge endpoint out of range: {(u, v)}")
            if not isinstance(wt, int) or isinstance(wt, bool):
                raise TypeError("edge weights must be integers")
            e = len(self.eu)
            self.eu.append(u)
            self.ev.append(v)
            self.w.append(wt)
            self.adj[u].append(e)
            if v != u:
                self.adj[v].append(e)
        if f is None:
            self.f = [1] * n
        else:
            if len(f) != n:
                raise ValueError("degree cap list must have one entry per vertex")
            if any((not isinstance(x, int)) or x < 1 for x in f):
                raise ValueError("degree caps must be positive integers")
            self.f = list(f)

    @property
    def m(self) -> int:
        return len(self.eu)

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.eu, self.ev, self.w))

    def other(self, e: int, v: int) -> int:
        """Return the endpoint of edge e opposite to v."""
        u = self.eu[e]
        return self.ev[e] if u == v else u

    def is_matching_instance(self) -> bool:
        return all(x == 1 for x in self.f)

    def f_total(self) -> int:
        return sum(self.f)

    def max_abs_weight(self) -> int:
        return max((abs(x) for x in self.w), default=0)

    def with_weights(self, weights: Sequence[int]) -> Multigraph:
        """Return a copy of the graph that carries different edge weights."""
        return Multigraph(self.n, zip(self.eu, self.ev, weights), self.f)

    def digest(self) -> str:
        """Stable SHA-256 digest of the instance, used to bind certificates."""
        h = hashlib.sha256()
        h.update(f"{self.n} {self.m}\n".encode())
        h.update(" ".join(map(str, self.f)).encode())
        h.update(b"\n")
        for (u, v, wt) in zip(self.eu, self.ev, self.w):
            h.update(f"{u} {v} {wt}\n".encode())
        return h.hexdigest()

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, m={self.m})"


def gamma(g: Multigraph, vertices: Iterable[int], edge_ids: Iterable[int]) -> list[int]:
    """Edges of the given set with both ends inside the vertex set.

    Loops at a member vertex are included.  The result is sorted.
    """
    inside = set(vertices)
    return sorted(e for e in set(edge_ids) if g.eu[e] in inside and g.ev[e] in inside)


def delta(g: Multigraph, vertices: Iterable[int], edge_ids: Iterable[int]) -> list[int]:
    """Edges of the given set with exactly one end inside the vertex set."""
    inside = set(vertices)
    return sorted(e for e in set(edge_ids)
                  if (g.eu[e] in inside) != (g.ev[e] in inside))


def degrees(g: Multigraph, edge_ids: Iterable[int]) -> list[int]:
    """Degree of every vertex under the edge set; loops count twice."""
    deg = [0] * g.n
    for e in edge_ids:
        deg[g.eu[e]] += 1
        deg[g.ev[e]] += 1
    return deg


def deficiency(g: Multigraph, v: int, edge_ids: Iterable[int]) -> int:
    """Return f(v) minus the degree of v under the edge set.

    Raises:
        DegreeViolation: If the degree of v exceeds f(v).
    """
    d = 0
    for e in set(edge_ids):
        d += (g.eu[e] == v) + (g.ev[e] == v)
    if d > g.f[v]:
        raise DegreeViolation(f"vertex {v} has degree {d} > f = {g.f[v]}")
    return g.f[v] - d


def is_f_factor(g: Multigraph, edge_ids: Iterable[int]) -> bool:
    """True when every vertex has degree exactly f(v)."""
    return degrees(g, edge_ids) == g.f


def check_overflow(g: Multigraph) -> None:
    """Reject instances whose scaled weights could leave 62-bit range.

    The size measure is f(V), which equals n for ordinary matching.
    """
    size = g.f_total()
    bound = size * (size + 1) * max(1, g.max_abs_weight()) * 4
    if bound >= INT_LIMIT:
        raise OverflowGuard(
            f"size {size} with max weight {g.max_abs_weight()} exceeds 2^62")
