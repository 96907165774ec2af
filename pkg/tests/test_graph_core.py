from __future__ import annotations

import pytest

from blossom_scale.errors import DegreeViolation, OverflowGuard
from blossom_scale.graph_core import (
    Multigraph, check_overflow, deficiency, degrees, delta, gamma, is_f_factor)


def square_with_loop() -> Multigraph:
    # 0-1-2-3-0 plus a loop at 2 and a parallel copy of 0-1
    return Multigraph(4, [(0, 1, 5), (1, 2, 3), (2, 3, 4), (3, 0, 1), (2, 2, 9), (0, 1, 2)],
                      [2, 2, 3, 1])


def test_adjacency_lists_loop_once():
    g = square_with_loop()
    assert g.adj[2] == [1, 2, 4]
    assert g.adj[0] == [0, 3, 5]
    assert g.m == 6


def test_loop_counts_twice_in_degree():
    g = square_with_loop()
    assert degrees(g, [4]) == [0, 0, 2, 0]


def test_gamma_includes_loops_and_parallels():
    g = square_with_loop()
    assert gamma(g, [0, 1], range(g.m)) == [0, 5]
    assert gamma(g, [2], range(g.m)) == [4]


def test_delta_never_contains_a_loop():
    g = square_with_loop()
    assert delta(g, [2], range(g.m)) == [1, 2]
    assert delta(g, [0, 1, 2, 3], range(g.m)) == []


def test_deficiency_and_violation():
    g = square_with_loop()
    assert deficiency(g, 2, [1]) == 2
    assert deficiency(g, 2, [1, 4]) == 0
    with pytest.raises(DegreeViolation):
        deficiency(g, 3, [2, 3])


def test_is_f_factor():
    g = square_with_loop()
    # degrees: 0 <- {0,5} = 2, 1 <- {0,5} = 2, 2 <- loop 2 + edge 2 = 3, 3 <- edge 2 = 1
    assert is_f_factor(g, [0, 5, 4, 2])
    assert not is_f_factor(g, [0, 5, 4])


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        Multigraph(2, [(0, 2, 1)])
    with pytest.raises(TypeError):
        Multigraph(2, [(0, 1, 1.5)])  # type: ignore[list-item]
    with pytest.raises(ValueError):
        Multigraph(2, [], [1, 0])
    with pytest.raises(ValueError):
        Multigraph(2, [], [1])


def test_digest_depends_on_every_field():
    base = Multigraph(2, [(0, 1, 3)])
    assert base.digest() == Multigraph(2, [(0, 1, 3)]).digest()
    assert base.digest() != Multigraph(2, [(0, 1, 4)]).digest()
    assert base.digest() != Multigraph(2, [(0, 1, 3)], [2, 2]).digest()


def test_overflow_guard():
    check_overflow(Multigraph(2, [(0, 1, 10**6)]))
    with pytest.raises(OverflowGuard):
        check_overflow(Multigraph(2, [(0, 1, 1 << 60)]))


def test_with_weights_keeps_structure():
    g = square_with_loop()
    h = g.with_weights([0] * g.m)
    assert h.edges == [(u, v, 0) for (u, v, _w) in g.edges]
    assert h.f == g.f
