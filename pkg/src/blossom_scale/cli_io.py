"""
Instance files, the random instance generator and the command line.

Instance format (vertices are 1-based on disk):

    c any comment
    p match N M          or      p ffactor N M
    d V F                        (ffactor only: one line per vertex,
                                  before the first edge line)
    e U V W                      (M lines; loops and parallel edges allowed)

Exit codes of the command line:

    0  success, or certificate verified
    1  other error (missing file, instance too big for the oracle)
    2  no perfect matching or f-factor exists
    3  certificate verification failed, or solvers disagree in bench
    4  instance or certificate file is malformed
    5  weights too large for 62-bit arithmetic
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from .dismantler import Config, solve_matching
from .duals import Certificate, verify_certificate
from .edmonds_engine import classic_solve
from .errors import (
    BadHeader,
    BlossomScaleError,
    DuplicateDegreeLine,
    Infeasible,
    OverflowGuard,
    ParseError,
    SizeLimit,
)
from .ffactor import solve_ffactor
from .graph_core import Multigraph
from .oracle_verify import brute_ffactor, brute_perfect_matching

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3
EXIT_PARSE = 4
EXIT_OVERFLOW = 5


@dataclass
class Instance:
    """A parsed problem: its kind ("match" or "ffactor") and the graph."""
    kind: str
    graph: Multigraph


@dataclass
class Solution:
    """Chosen edges of a solve, with the solver that produced them."""
    solver: str
    weight: int
    edges: list[int]
    certificate: Certificate
    scales: int = 0
    trace: list[str] | None = None


# ----------------------------------------------------------------------
# Reading and writing instances


def _ints(tok: list[str], count: int, lineno: int) -> list[int]:
    if len(tok) != count + 1:
        raise ParseError(f"expected {count} numbers after {tok[0]!r}", lineno)
    try:
        return [int(t) for t in tok[1:]]
    except ValueError as exc:
        raise ParseError(f"not an integer: {exc}", lineno) from exc


def parse_instance(text: str) -> Instance:
    """Read an instance from text.

    Raises:
        BadHeader: If the problem line is missing, repeated or malformed.
        DuplicateDegreeLine: If a vertex has two degree lines.
        ParseError: For any other malformed line, with its line number.
    """
    kind: str | None = None
    n = m = 0
    caps: list[int | None] = []
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            if kind is not None:
                raise BadHeader("second problem line", lineno)
            if len(tok) != 4 or tok[1] not in ("match", "ffactor"):
                raise BadHeader("expected 'p match N M' or 'p ffactor N M'", lineno)
            try:
                n, m = int(tok[2]), int(tok[3])
            except ValueError as exc:
                raise BadHeader("vertex and edge counts must be integers", lineno) from exc
            if n < 0 or m < 0:
                raise BadHeader("vertex and edge counts must be non-negative", lineno)
            kind = tok[1]
            caps = [None] * n
            continue
        if kind is None:
            raise BadHeader("problem line must come first", lineno)
        if tok[0] == "d":
            if kind != "ffactor":
                raise ParseError("degree lines are only allowed in ffactor files", lineno)
            if edges:
                raise ParseError("degree lines must come before edge lines", lineno)
            v, fv = _ints(tok, 2, lineno)
            if not 1 <= v <= n:
                raise ParseError(f"vertex {v} out of range 1..{n}", lineno)
            if fv < 1:
                raise ParseError(f"degree cap {fv} must be positive", lineno)
            if caps[v - 1] is not None:
                raise DuplicateDegreeLine(f"vertex {v} has two degree lines", lineno)
            caps[v - 1] = fv
        elif tok[0] == "e":
            if kind == "ffactor" and not edges:
                missing = [i + 1 for i, c in enumerate(caps) if c is None]
                if missing:
                    raise ParseError(f"no degree line for vertex {missing[0]}", lineno)
            u, v, wt = _ints(tok, 3, lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"edge endpoint out of range 1..{n}", lineno)
            if len(edges) == m:
                raise ParseError(f"more than {m} edge lines", lineno)
            edges.append((u - 1, v - 1, wt))
        else:
            raise ParseError(f"unknown line kind {tok[0]!r}", lineno)
    if kind is None:
        raise BadHeader("missing problem line")
    if len(edges) != m:
        raise ParseError(f"expected {m} edge lines, found {len(edges)}")
    if kind == "ffactor":
        missing = [i + 1 for i, c in enumerate(caps) if c is None]
        if missing:
            raise ParseError(f"no degree line for vertex {missing[0]}")
        return Instance(kind, Multigraph(n, edges, [int(c) for c in caps]))  # type: ignore[arg-type]
    return Instance(kind, Multigraph(n, edges))


def render_instance(inst: Instance) -> str:
    """Write an instance in the format read by parse_instance."""
    g = inst.graph
    lines = [f"p {inst.kind} {g.n} {g.m}"]
    if inst.kind == "ffactor":
        lines += [f"d {v + 1} {g.f[v]}" for v in range(g.n)]
    lines += [f"e {u + 1} {v + 1} {wt}" for (u, v, wt) in g.edges]
    return "\n".join(lines) + "\n"


def generate(
        n: int,
        m: int,
        maxw: int,
        fmax: int = 1,
        seed: int = 0,
        planted: bool = False
        ) -> Instance:
    """Random multigraph instance from a seeded generator.

    Endpoints are uniform, so loops and parallel edges occur.  Weights
    are uniform in [0, maxw].  With fmax > 1 every cap is uniform in
    [1, fmax], then one cap is nudged so that the caps sum to an even
    number.  With fmax == 1 the result is a matching instance.

    With planted, the first n/2 edges form a perfect matching on a random
    pairing of the vertices (matching instances with even n only), so the
    instance is always feasible.  The total edge count stays m when m is
    at least n/2.
    """
    rng = random.Random(seed)
    edges: list[tuple[int, int, int]] = []
    if planted and fmax <= 1 and n % 2 == 0:
        perm = list(range(n))
        rng.shuffle(perm)
        for i in range(0, n, 2):
            edges.append((perm[i], perm[i + 1], rng.randint(0, maxw)))
    while len(edges) < m and n > 0:
        edges.append((rng.randrange(n), rng.randrange(n), rng.randint(0, maxw)))
    if fmax <= 1:
        return Instance("match", Multigraph(n, edges))
    caps = [rng.randint(1, fmax) for _ in range(n)]
    if sum(caps) % 2 and n:
        v = rng.randrange(n)
        caps[v] += 1 if caps[v] < fmax else -1
    return Instance("ffactor", Multigraph(n, edges, caps))


# ----------------------------------------------------------------------
# Solving


def solve(inst: Instance, mode: str = "auto", cfg: Config | None = None) -> Solution:
    """Solve an instance with the scaling solver or the classic one.

    The mode "auto" selects the scaling solver.
    """
    g = inst.graph
    if mode == "classic":
        res = classic_solve(g)
        return Solution("classic", res.weight, list(res.matched), res.certificate)
    if mode not in ("auto", "scaling"):
        raise ValueError(f"unknown solver mode {mode!r}")
    cfg = cfg or Config.from_env()
    if inst.kind == "match" and g.is_matching_instance():
        sres = solve_matching(g, cfg)
    else:
        sres = solve_ffactor(g, cfg)
    return Solution("scaling", sres.weight, sorted(sres.matched), sres.certificate,
                    scales=len(sres.scales), trace=sres.trace)


def render_solution(sol: Solution, g: Multigraph) -> str:
    """Deterministic text: weight line, then one line per chosen edge."""
    lines = [f"s {sol.solver}", f"weight {sol.weight}"]
    if sol.solver == "scaling":
        lines.append(f"scales {sol.scales}")
    for e in sorted(sol.edges):
        lines.append(f"m {e + 1} {g.eu[e] + 1} {g.ev[e] + 1} {g.w[e]}")
    return "\n".join(lines) + "\n"


def solution_json(sol: Solution, g: Multigraph) -> dict[str, object]:
    return {
        "solver": sol.solver,
        "weight": sol.weight,
        "scales": sol.scales,
        "edges": [[e + 1, g.eu[e] + 1, g.ev[e] + 1, g.w[e]] for e in sorted(sol.edges)],
    }


def _oracle(inst: Instance) -> tuple[int, list[int]] | None:
    g = inst.graph
    if g.is_matching_instance():
        return brute_perfect_matching(g)
    return brute_ffactor(g)


# ----------------------------------------------------------------------
# Command line


def _read(path: str) -> str:
    return Path(path).read_text()


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.file))
    cfg = Config.from_env(trace=args.trace)
    if args.assert_bounds:
        cfg.assert_bounds = True
    sol = solve(inst, args.mode, cfg)
    if args.json:
        print(json.dumps(solution_json(sol, inst.graph), sort_keys=True))
    else:
        sys.stdout.write(render_solution(sol, inst.graph))
    if args.cert:
        Path(args.cert).write_text(sol.certificate.render(inst.graph))
    if args.trace and sol.trace:
        sys.stderr.write("\n".join(sol.trace) + "\n")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.file))
    cert = Certificate.parse(_read(args.cert))
    try:
        report = verify_certificate(cert, inst.graph)
    except (BlossomScaleError, IndexError, KeyError, ValueError) as exc:
        print(f"rejected: {exc}")
        return EXIT_VERIFY_FAILED
    if not report.ok:
        print("rejected")
        for msg in report.violations:
            print(f"violation {msg}")
        return EXIT_VERIFY_FAILED
    print(f"verified weight {report.weight}")
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.file))
    best = _oracle(inst)
    if best is None:
        raise Infeasible("no perfect matching or f-factor exists")
    g = inst.graph
    print(f"weight {best[0]}")
    for e in best[1]:
        print(f"m {e + 1} {g.eu[e] + 1} {g.ev[e] + 1} {g.w[e]}")
    return EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    inst = generate(args.n, args.m, args.maxw, args.fmax, args.seed, args.planted)
    text = render_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def bench(paths: Sequence[Path], cfg: Config | None = None) -> list[dict[str, object]]:
    """Solve every file with both solvers and record times and agreement."""
    rows: list[dict[str, object]] = []
    for path in paths:
        row: dict[str, object] = {"file": path.name}
        try:
            inst = parse_instance(path.read_text())
        except ParseError as exc:
            row["status"] = f"parse error: {exc}"
            rows.append(row)
            continue
        g = inst.graph
        row.update(n=g.n, m=g.m)
        outcome: dict[str, int | None] = {}
        for mode in ("scaling", "classic"):
            t0 = time.perf_counter()
            try:
                outcome[mode] = solve(inst, mode, cfg).weight
            except Infeasible:
                outcome[mode] = None
            row[f"{mode}_seconds"] = round(time.perf_counter() - t0, 4)
        row["weight"] = outcome["scaling"]
        row["status"] = "ok" if outcome["scaling"] == outcome["classic"] else "mismatch"
        rows.append(row)
    return rows


def _cmd_bench(args: argparse.Namespace) -> int:
    paths = sorted(p for p in Path(args.dir).iterdir() if p.is_file())
    cfg = Config.from_env()
    if args.assert_bounds:
        cfg.assert_bounds = True
    rows = bench(paths, cfg)
    if args.json:
        print(json.dumps(rows, sort_keys=True, indent=1))
    else:
        for row in rows:
            if "n" not in row:
                print(f"{row['file']} {row['status']}")
                continue
            weight = "infeasible" if row["weight"] is None else row["weight"]
            print(f"{row['file']} n={row['n']} m={row['m']} weight={weight} "
                  f"scaling={row['scaling_seconds']}s classic={row['classic_seconds']}s "
                  f"{row['status']}")
    bad = any(row["status"] != "ok" for row in rows)
    return EXIT_VERIFY_FAILED if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blossom-scale",
        description="Maximum-weight perfect matching and f-factors by weight scaling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("file")
    p.add_argument("--mode", choices=("auto", "scaling", "classic"), default="auto")
    p.add_argument("--cert", help="write the optimality certificate to this file")
    p.add_argument("--trace", action="store_true", help="print the search log to stderr")
    p.add_argument("--assert-bounds", action="store_true",
                   help="check the instrumented running-time bounds")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_solve)

    p = sub.add_parser("verify", help="check a certificate against an instance")
    p.add_argument("file")
    p.add_argument("cert")
    p.set_defaults(run=_cmd_verify)

    p = sub.add_parser("oracle", help="brute-force optimum of a tiny instance")
    p.add_argument("file")
    p.set_defaults(run=_cmd_oracle)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--maxw", type=int, default=100)
    p.add_argument("--fmax", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted", action="store_true",
                   help="start with a random perfect matching (matching instances)")
    p.add_argument("--out")
    p.set_defaults(run=_cmd_gen)

    p = sub.add_parser("bench", help="time both solvers on every file in a directory")
    p.add_argument("dir")
    p.add_argument("--json", action="store_true")
    p.add_argument("--assert-bounds", action="store_true")
    p.set_defaults(run=_cmd_bench)
    return parser


def cli(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        return int(args.run(args))
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OverflowGuard as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except (SizeLimit, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(cli())
