"""
Exhaustive reference solvers for tiny instances.

These functions share no code with the solver.  Two independent
perfect-matching enumerators (a recursion on the lowest unmatched vertex
and a bitmask dynamic program) check each other before either serves as
ground truth.  The f-factor enumerator walks the include/exclude tree of
all edge subsets with degree pruning.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import lru_cache

from .errors import SizeLimit
from .graph_core import Multigraph

MAX_MATCHING_VERTICES = 12
MAX_FFACTOR_EDGES = 22


def brute_perfect_matching(
        g: Multigraph,
        weights: Sequence[int] | None = None
        ) -> tuple[int, list[int]] | None:
    """Maximum-weight perfect matching by recursion on the lowest free vertex.

    Returns (weight, sorted edge ids), or None when no perfect matching
    exists.  Loops never appear in a perfect matching.

    Raises:
        SizeLimit: If the graph has more than 12 vertices.
    """
    if g.n > MAX_MATCHING_VERTICES:
        raise SizeLimit(f"brute matching supports n <= {MAX_MATCHING_VERTICES}")
    w = g.w if weights is None else list(weights)
    if g.n % 2:
        return None
    taken = [False] * g.n
    best: list[tuple[int, list[int]] | None] = [None]
    chosen: list[int] = []

    def recurse(total: int) -> None:
        u = 0
        while u < g.n and taken[u]:
            u += 1
        if u == g.n:
            if best[0] is None or total > best[0][0]:
                best[0] = (total, sorted(chosen))
            return
        taken[u] = True
        for e in g.adj[u]:
            v = g.other(e, u)
            if v == u or taken[v]:
                continue
            taken[v] = True
            chosen.append(e)
            recurse(total + w[e])
            chosen.pop()
            taken[v] = False
        taken[u] = False

    recurse(0)
    return best[0]


def brute_perfect_matching_dp(
        g: Multigraph,
        weights: Sequence[int] | None = None
        ) -> int | None:
    """Maximum perfect-matching weight by dynamic programming on vertex masks.

    Only the optimum value is returned.  Parallel edges collapse to the
    heaviest one per vertex pair.
    """
    if g.n > MAX_MATCHING_VERTICES:
        raise SizeLimit(f"brute matching supports n <= {MAX_MATCHING_VERTICES}")
    w = g.w if weights is None else list(weights)
    n = g.n
    pair: dict[tuple[int, int], int] = {}
    for e in range(g.m):
        a, b = sorted((g.eu[e], g.ev[e]))
        if a != b and ((a, b) not in pair or w[e] > pair[(a, b)]):
            pair[(a, b)] = w[e]
    full = (1 << n) - 1

    @lru_cache(maxsize=None)
    def best(mask: int) -> int | None:
        if mask == full:
            return 0
        low = 0
        while mask >> low & 1:
            low += 1
        result = None
        for high in range(low + 1, n):
            if mask >> high & 1 or (low, high) not in pair:
                continue
            rest = best(mask | (1 << low) | (1 << high))
            if rest is not None:
                cand = rest + pair[(low, high)]
                if result is None or cand > result:
                    result = cand
        return result

    return best(0)


def brute_ffactor(
        g: Multigraph,
        weights: Sequence[int] | None = None
        ) -> tuple[int, list[int]] | None:
    """Maximum-weight f-factor by enumerating edge subsets.

    Each edge is either taken or skipped in id order.  A branch is cut
    when some degree exceeds its cap or when a vertex can no longer reach
    its cap with the edges that remain.  Returns (weight, sorted edge ids)
    or None when no f-factor exists.

    Raises:
        SizeLimit: If the graph has more than 22 edges.
    """
    if g.m > MAX_FFACTOR_EDGES:
        raise SizeLimit(f"brute f-factor supports m <= {MAX_FFACTOR_EDGES}")
    w = g.w if weights is None else list(weights)
    need = list(g.f)
    # remaining[v]: degree still obtainable at v from edges not yet decided
    remaining = [0] * g.n
    for e in range(g.m):
        remaining[g.eu[e]] += 1
        remaining[g.ev[e]] += 1
    best: list[tuple[int, list[int]] | None] = [None]
    chosen: list[int] = []

    def recurse(e: int, total: int) -> None:
        if e == g.m:
            if all(x == 0 for x in need):
                if best[0] is None or total > best[0][0]:
                    best[0] = (total, sorted(chosen))
            return
        u, v = g.eu[e], g.ev[e]
        remaining[u] -= 1
        remaining[v] -= 1
        # take the edge
        need[u] -= 1
        need[v] -= 1
        if need[u] >= 0 and need[v] >= 0:
            chosen.append(e)
            recurse(e + 1, total + w[e])
            chosen.pop()
        need[u] += 1
        need[v] += 1
        # skip the edge
        if need[u] <= remaining[u] and need[v] <= remaining[v]:
            recurse(e + 1, total)
        remaining[u] += 1
        remaining[v] += 1

    if sum(g.f) % 2 == 0:
        recurse(0, 0)
    return best[0]


def check_alternating_walk(
        walk: Sequence[int],
        matched: Iterable[int],
        g: Multigraph | None = None
        ) -> bool:
    """True iff the walk uses no edge twice and alternates matched/unmatched.

    When a graph is given, consecutive edges must also share an endpoint
    so that the sequence really is a walk.
    """
    in_m = set(matched)
    if len(set(walk)) != len(walk):
        return False
    for i in range(1, len(walk)):
        if (walk[i] in in_m) == (walk[i - 1] in in_m):
            return False
    if g is not None and len(walk) >= 2:
        # Follow the walk from whichever end of the first edge continues it.
        first, second = walk[0], walk[1]
        ends = {g.eu[second], g.ev[second]}
        if g.ev[first] in ends:
            cur = g.ev[first]
        elif g.eu[first] in ends:
            cur = g.eu[first]
        else:
            return False
        for e in walk[1:]:
            if g.eu[e] == cur:
                cur = g.ev[e]
            elif g.ev[e] == cur:
                cur = g.eu[e]
            else:
                return False
    return True
