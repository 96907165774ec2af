from __future__ import annotations

import json
import subprocess
import sys

import pytest

from blossom_scale.cli_io import (
    EXIT_INFEASIBLE, EXIT_OK, EXIT_OVERFLOW, EXIT_PARSE, EXIT_VERIFY_FAILED, Instance, cli,
    generate, parse_instance, render_instance, solve)
from blossom_scale.edmonds_engine import feasibility_check
from blossom_scale.errors import BadHeader, DuplicateDegreeLine, ParseError

K2 = "c two vertices\np match 2 1\ne 1 2 7\n"
FFACTOR = "p ffactor 3 4\nd 1 2\nd 2 2\nd 3 2\ne 1 2 4\ne 2 3 5\ne 1 3 6\ne 3 3 9\n"


def test_parse_k2():
    inst = parse_instance(K2)
    assert inst.kind == "match"
    assert inst.graph.edges == [(0, 1, 7)]


def test_parse_keeps_loops_and_parallels():
    inst = parse_instance("p match 3 3\ne 3 3 5\ne 1 2 1\ne 2 1 4\n")
    assert inst.graph.edges == [(2, 2, 5), (0, 1, 1), (1, 0, 4)]


def test_parse_ffactor_caps():
    inst = parse_instance(FFACTOR)
    assert inst.kind == "ffactor" and inst.graph.f == [2, 2, 2]


@pytest.mark.parametrize("text, error, line", [
    ("e 1 2 3\n", BadHeader, 1),
    ("p match x 1\n", BadHeader, 1),
    ("p flow 2 1\n", BadHeader, 1),
    ("p match 2 1\np match 2 1\n", BadHeader, 2),
    ("p ffactor 2 1\nd 1 1\ne 1 2 3\n", ParseError, 3),
    ("p ffactor 2 0\nd 1 1\nd 1 1\n", DuplicateDegreeLine, 3),
    ("p ffactor 2 0\nd 1 1\n", ParseError, None),
    ("p match 2 1\ne 1 3 3\n", ParseError, 2),
    ("p match 2 1\ne 1 2\n", ParseError, 2),
    ("p match 2 1\ne 1 2 3.5\n", ParseError, 2),
    ("p match 2 2\ne 1 2 3\n", ParseError, None),
    ("p match 2 1\nd 1 1\ne 1 2 3\n", ParseError, 2),
    ("p ffactor 2 1\nd 1 1\nd 2 1\ne 1 2 3\nd 1 1\n", ParseError, 5),
    ("p match 2 1\nx\n", ParseError, 2),
])
def test_parse_errors(text, error, line):
    with pytest.raises(error) as info:
        parse_instance(text)
    assert info.value.line == line


def test_render_round_trip():
    for text in (K2, FFACTOR):
        rendered = render_instance(parse_instance(text))
        again = parse_instance(rendered)
        assert again.graph.edges == parse_instance(text).graph.edges
        assert again.graph.f == parse_instance(text).graph.f
        assert render_instance(again) == rendered


def test_solve_modes_agree():
    inst = parse_instance(FFACTOR)
    # caps 2,2,2: the triangle (15) beats any use of the loop (9 + one edge)
    assert solve(inst, "scaling").weight == solve(inst, "classic").weight == 15
    assert solve(inst, "auto").solver == "scaling"
    with pytest.raises(ValueError):
        solve(inst, "fast")


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_solve_prints_weight_and_edges(tmp_path, capsys):
    path = write(tmp_path, "k2.txt", K2)
    assert cli(["solve", path]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert "weight 7" in out
    assert "m 1 1 2 7" in out


def test_cli_solve_json(tmp_path, capsys):
    path = write(tmp_path, "k2.txt", K2)
    assert cli(["solve", path, "--mode", "classic", "--json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["weight"] == 7 and data["edges"] == [[1, 1, 2, 7]]


def test_cli_verify_and_tamper(tmp_path, capsys):
    path = write(tmp_path, "f.txt", FFACTOR)
    cert = str(tmp_path / "f.cert")
    assert cli(["solve", path, "--cert", cert, "--assert-bounds"]) == EXIT_OK
    assert cli(["verify", path, cert]) == EXIT_OK
    assert "verified weight 15" in capsys.readouterr().out
    lines = (tmp_path / "f.cert").read_text().splitlines()
    lines = [("y 1 100000" if line.startswith("y 1 ") else line) for line in lines]
    (tmp_path / "f.cert").write_text("\n".join(lines) + "\n")
    assert cli(["verify", path, cert]) == EXIT_VERIFY_FAILED


def test_cli_exit_codes(tmp_path):
    assert cli(["solve", write(tmp_path, "odd.txt", "p match 3 1\ne 1 2 1\n")]) == EXIT_INFEASIBLE
    assert cli(["solve", write(tmp_path, "bad.txt", "p match 2\n")]) == EXIT_PARSE
    big = write(tmp_path, "big.txt", f"p match 2 1\ne 1 2 {1 << 60}\n")
    assert cli(["solve", big]) == EXIT_OVERFLOW
    assert cli(["oracle", write(tmp_path, "k2.txt", K2)]) == EXIT_OK
    assert cli(["oracle", write(tmp_path, "odd2.txt", "p match 3 0\n")]) == EXIT_INFEASIBLE
    assert cli(["solve", str(tmp_path / "missing.txt")]) == 1


def test_cli_gen_is_deterministic(tmp_path, capsys):
    cli(["gen", "--n", "8", "--m", "20", "--seed", "1"])
    first = capsys.readouterr().out
    cli(["gen", "--n", "8", "--m", "20", "--seed", "1"])
    assert capsys.readouterr().out == first
    cli(["gen", "--n", "8", "--m", "20", "--seed", "2"])
    assert capsys.readouterr().out != first
    out = tmp_path / "g.txt"
    cli(["gen", "--n", "6", "--m", "9", "--fmax", "3", "--seed", "4", "--out", str(out)])
    assert parse_instance(out.read_text()).kind == "ffactor"


def test_planted_instances_are_feasible():
    for seed in range(10):
        inst = generate(8, 20, 100, 1, seed, planted=True)
        assert inst.graph.m == 20
        assert feasibility_check(inst.graph)


def test_unit_fmax_gives_matching_instance():
    assert generate(6, 10, 5, 1, 3).kind == "match"


def test_bench_reports_every_file(tmp_path, capsys):
    write(tmp_path, "a.txt", K2)
    write(tmp_path, "b.txt", FFACTOR)
    write(tmp_path, "c.txt", "p match 3 0\n")
    assert cli(["bench", str(tmp_path), "--json"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert [r["file"] for r in rows] == ["a.txt", "b.txt", "c.txt"]
    assert [r["weight"] for r in rows] == [7, 15, None]
    assert all(r["status"] == "ok" for r in rows)


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "k2.txt", K2)
    done = subprocess.run([sys.executable, "-m", "blossom_scale", "solve", path],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert "weight 7" in done.stdout


def test_env_variable_turns_on_bounds(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("BLOSSOM_SCALE_ASSERTS", "1")
    assert cli(["solve", write(tmp_path, "k2.txt", K2)]) == EXIT_OK
    assert "weight 7" in capsys.readouterr().out


def test_instance_type():
    inst = Instance("match", parse_instance(K2).graph)
    assert render_instance(inst) == "p match 2 1\ne 1 2 7\n"
