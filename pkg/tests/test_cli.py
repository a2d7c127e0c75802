import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_formula
from sumprod_dpll.cli import COUNT_ALGOS, main, solve_cnf
from sumprod_dpll.formula import Formula, brute_force_count
from sumprod_dpll.generators import gen_blocks, gen_pearls
from sumprod_dpll.io import parse_decomp, parse_dimacs, serialize_dimacs

H5_CNF = "p cnf 5 5\n1 2 3 0\n1 4 0\n2 5 0\n3 5 0\n4 5 0\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_count_blocks(tmp_path, capsys):
    cnf = write(tmp_path, "blocks3.cnf", serialize_dimacs(gen_blocks(3)))
    assert run(capsys, "count", cnf, "--algo", "comp-cache")[:2] == (0, "s COUNT 343\n")


def test_count_pearls_ve(tmp_path, capsys):
    cnf = write(tmp_path, "pearls33.cnf", serialize_dimacs(gen_pearls(3, 3)))
    assert run(capsys, "count", cnf, "--algo", "ve")[:2] == (0, "s COUNT 0\n")


def test_count_weighted_value(tmp_path, capsys):
    cnf = write(tmp_path, "w.cnf", "c w 1 1/3\np cnf 1 1\n1 0\n")
    for algo in COUNT_ALGOS:
        assert run(capsys, "count", cnf, "--algo", algo)[1] == "s VALUE 1/3\n"


def test_nine_algorithms_agree(tmp_path, capsys):
    rng = random.Random(77)
    formulas = [random_formula(rng, rng.randint(1, 9), rng.randint(1, 14), rng.choice((2, 3)))
                for _ in range(12)] + [gen_blocks(2), gen_pearls(2, 2), Formula(3, ())]
    for i, f in enumerate(formulas):
        cnf = write(tmp_path, f"f{i}.cnf", serialize_dimacs(f))
        outs = {run(capsys, "count", cnf, "--algo", algo)[1] for algo in COUNT_ALGOS}
        assert outs == {f"s COUNT {brute_force_count(f)}\n"}


def test_count_orders_and_no_up(tmp_path, capsys):
    f = random_formula(random.Random(3), 8, 20, 3)
    cnf = write(tmp_path, "f.cnf", serialize_dimacs(f))
    order = write(tmp_path, "order.txt", "8 7 6 5 4 3 2 1\n")
    expect = f"s COUNT {brute_force_count(f)}\n"
    for extra in (["--order", "random:5"], ["--order", f"static-file:{order}"], ["--no-up"]):
        for algo in ("dpll", "simple-cache", "comp-cache", "comp-space"):
            assert run(capsys, "count", cnf, "--algo", algo, *extra)[1] == expect


def test_decompose_then_count_with_decomp(tmp_path, capsys):
    f = random_formula(random.Random(4), 9, 16, 3)
    cnf = write(tmp_path, "f.cnf", serialize_dimacs(f))
    expect = f"s COUNT {brute_force_count(f)}\n"
    uses = {"order": ["ve", "dpll", "comp-cache"], "branchdec": ["rc-space", "rc-cache", "comp-space"],
            "pseudotree": ["ao-space", "ao-cache"], "treedec": []}
    for emit, algos in uses.items():
        out = tmp_path / f"{emit}.json"
        assert run(capsys, "decompose", cnf, "--method", "min-fill", "--emit", emit, "-o", out)[0] == 0
        parse_decomp(out.read_text())
        for algo in algos:
            assert run(capsys, "count", cnf, "--algo", algo, "--decomp", out)[1] == expect


def test_wrong_decomp_kind_for_algorithm(tmp_path, capsys):
    cnf = write(tmp_path, "f.cnf", H5_CNF)
    out = tmp_path / "pt.json"
    run(capsys, "decompose", cnf, "--method", "min-degree", "--emit", "pseudotree", "-o", out)
    code, _, err = run(capsys, "count", cnf, "--algo", "rc-cache", "--decomp", out)
    assert code == 1 and "branch decomposition" in err


def test_width_commands(tmp_path, capsys):
    cnf = write(tmp_path, "h5.cnf", H5_CNF)
    pi = write(tmp_path, "pi.txt", "1 2 3 4 5\n")
    assert run(capsys, "width", "--kind", "order", "--decomp", pi, "--cnf", cnf)[:2] == (0, "3\n")
    tree = tmp_path / "t.json"
    run(capsys, "decompose", cnf, "--method", "min-fill", "--emit", "treedec", "-o", tree)
    code, out, _ = run(capsys, "width", "--kind", "tree", "--decomp", tree, "--cnf", cnf)
    assert code == 0 and int(out) <= 3
    pt = tmp_path / "pt.json"
    run(capsys, "decompose", cnf, "--method", "min-fill", "--emit", "pseudotree", "-o", pt)
    code, _, err = run(capsys, "width", "--kind", "tree", "--decomp", pt, "--cnf", cnf)
    assert code == 2 and "expected a tree document" in err


def test_generate(tmp_path, capsys):
    out = tmp_path / "p.cnf"
    assert run(capsys, "generate", "pearls", "--n", 2, "--m", 2, "-o", out)[0] == 0
    assert len(parse_dimacs(out.read_text()).clauses) == 14
    assert run(capsys, "generate", "blocks", "--k", 3, "-o", out)[0] == 0
    assert parse_dimacs(out.read_text()) == gen_blocks(3)
    assert run(capsys, "generate", "random", "--n", 6, "--m", 10, "--k", 3, "--seed", 42,
               "-o", out)[0] == 0
    first = out.read_text()
    run(capsys, "generate", "random", "--n", 6, "--m", 10, "--k", 3, "--seed", 42, "-o", out)
    assert out.read_text() == first
    assert run(capsys, "generate", "blocks", "--k", 0, "-o", out)[0] == 1


def test_sumprod(tmp_path, capsys):
    clause = write(tmp_path, "c.fac", "sumprod 2\n2 2\n1\n2 1 2\n0 1 1 1\n")
    for algo in ("ve", "rc-cache", "ao-cache", "dpll-cache", "brute"):
        assert run(capsys, "sumprod", clause, "--algo", algo)[1] == "s COUNT 3\n"
    assert run(capsys, "sumprod", clause, "--semiring", "bool")[1] == "s COUNT 1\n"
    ms = write(tmp_path, "m.fac", "sumprod 2\n2 2\n2\n1 1\n1 4\n2 1 2\n0 2 3 1\n")
    for algo in ("ve", "rc-cache", "ao-cache", "dpll-cache", "brute"):
        assert run(capsys, "sumprod", ms, "--semiring", "max-sum", "--algo", algo)[1] == "s COUNT 7\n"
    mpe = write(tmp_path, "p.fac", "sumprod 1\n2\n1\n1 1\n1/5 4/5\n")
    assert run(capsys, "sumprod", mpe, "--semiring", "max-product")[1] == "s VALUE 4/5\n"


def test_stats_report(tmp_path, capsys):
    cnf = write(tmp_path, "b2.cnf", serialize_dimacs(gen_blocks(2)))
    path = tmp_path / "s.json"
    run(capsys, "count", cnf, "--algo", "comp-cache", "--stats", path)
    doc = json.loads(path.read_text())
    assert doc["value"] == "49" and doc["components_created"] >= 2
    assert doc["algo"] == "comp-cache" and doc["policy"] == "dynamic"
    again = tmp_path / "s2.json"
    run(capsys, "count", cnf, "--algo", "comp-cache", "--stats", again)
    doc2 = json.loads(again.read_text())
    doc.pop("wall_ms"), doc2.pop("wall_ms")
    doc.pop("instance"), doc2.pop("instance")
    assert doc == doc2

    empty = write(tmp_path, "e.cnf", "p cnf 0 0\n")
    run(capsys, "count", empty, "--algo", "brute", "--stats", path)
    doc = json.loads(path.read_text())
    assert doc["value"] == "1" and doc["decisions"] == 0


@pytest.mark.parametrize("argv, code", [
    (["count", "missing.cnf"], 2),
    (["count"], 2),
    (["frobnicate"], 2),
    (["count", "{cnf}", "--algo", "nope"], 2),
    (["count", "{cnf}", "--order", "sideways"], 2),
    (["count", "{cnf}", "--order", "random:x"], 2),
    (["count", "{taut}"], 2),
    (["count", "{bad}"], 2),
    (["sumprod", "{cnf}"], 2),
])
def test_exit_codes(tmp_path, capsys, argv, code):
    files = {"cnf": write(tmp_path, "ok.cnf", "p cnf 2 1\n1 2 0\n"),
             "taut": write(tmp_path, "t.cnf", "p cnf 2 1\n1 -1 0\n"),
             "bad": write(tmp_path, "b.cnf", "p cnf 2 3\n1 2 0\n")}
    argv = [a.format(**files) for a in argv]
    assert run(capsys, *argv)[0] == code


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet="pcnf 0123456789-\n", max_size=30), st.text(alphabet="0123 -\n", max_size=20))
def test_fuzzed_headers_never_exit_zero_unless_valid(tmp_path_factory, header, body):
    text = header + "\n" + body
    try:
        parse_dimacs(text)
        valid = True
    except Exception:
        valid = False
    path = tmp_path_factory.mktemp("fuzz") / "f.cnf"
    path.write_text(text)
    code = main(["count", str(path), "--algo", "comp-cache"])
    assert (code == 0) == valid
    if not valid:
        assert code in (1, 2)


def test_solve_cnf_weighted_encoded():
    from fractions import Fraction
    f = Formula(3, ((1, 2), (-2, 3)), {2: Fraction(1, 5)})
    values = {solve_cnf(f, algo)[0] for algo in COUNT_ALGOS}
    assert len(values) == 1
