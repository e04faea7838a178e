"""Textual grammars, report format, and the command-line driver."""

import json
import random

import jsonschema
import pytest

from rgcalc import cmdlang as cl
from rgcalc.cli import (
    build_rem_from_set,
    parse_command_text,
    parse_expression,
    parse_relation,
    parse_space_file,
    parse_state_set,
    print_command,
    report_schema,
    run,
)
from rgcalc.errors import ParseError, UnknownVariableError
from rgcalc.exprs import eval_expr
from rgcalc.relspace import Rel, StateSet, StateSpace


@pytest.fixture(scope="module")
def xy_space():
    return StateSpace([("x", (0, 1)), ("y", (0, 1))])


# ---------------------------------------------------------------- predicates


def test_parse_state_set(two_state):
    assert parse_state_set("x = 0", two_state) == StateSet(two_state, [0])
    assert parse_state_set("true", two_state) == two_state.full_set
    assert parse_state_set("false", two_state) == two_state.empty_set
    assert parse_state_set("x = 0 || x = 1", two_state) == two_state.full_set


def test_parse_relation(two_state):
    assert parse_relation("x' = x", two_state) == two_state.identity_rel
    lt = parse_relation("x < x'", two_state)
    assert lt == Rel(two_state, [(0, 1)])


def test_primed_rejected_in_sets(two_state):
    with pytest.raises(ParseError):
        parse_state_set("x' = 0", two_state)


def test_parse_error_position(two_state):
    with pytest.raises(ParseError) as err:
        parse_state_set("x = $", two_state)
    assert err.value.position == 4


def test_unknown_variable(two_state):
    with pytest.raises(UnknownVariableError):
        parse_state_set("z = 0", two_state)


def test_mask_predicates():
    sp = StateSpace([("w", range(4)), ("i", range(2))])
    member = parse_state_set("i in w", sp)
    assert member == sp.set_where(lambda s: s["w"] >> s["i"] & 1 == 1)
    sub = parse_relation("w' subset w", sp)
    assert sub == sp.rel_where(
        lambda a, b: b["w"] & ~a["w"] == 0 and b["w"] != a["w"]
    )
    singleton = parse_state_set("w = {i}", sp)
    assert singleton == sp.set_where(lambda s: s["w"] == 1 << s["i"])


def test_arithmetic_and_bitwise(two_state):
    got = parse_state_set("(x + 1) mod 2 = 0", two_state)
    assert got == StateSet(two_state, [1])
    sp = StateSpace([("w", range(4))])
    assert parse_state_set("(w & ~1) = 2", sp) == sp.set_where(
        lambda s: s["w"] & ~1 == 2
    )


# ---------------------------------------------------------------- expressions


def test_parse_expression_evaluates(two_state):
    e = parse_expression("1 - x", two_state)
    assert eval_expr(e, two_state.states[0]) == 1
    assert eval_expr(e, two_state.states[1]) == 0


def test_parse_expression_boolean(two_state):
    e = parse_expression("x = 0", two_state)
    assert eval_expr(e, two_state.states[0]) == 1
    assert eval_expr(e, two_state.states[1]) == 0


# ---------------------------------------------------------------- commands


def test_parse_conj_tree(xy_space):
    c = parse_command_text(
        "guar(x' = x) /\\ rely(y' = y) /\\ spec(x' = x && y' = y)", xy_space
    )
    assert isinstance(c, cl.Conj)
    assert isinstance(c.left, cl.Conj)
    g = c.left.left
    assert isinstance(g, cl.Derived) and g.tag == "guar"
    assert g.args[0] == parse_relation("x' = x", xy_space)
    assert c.right.tag == "spec"


def test_parse_assignment():
    sp = StateSpace([("w", range(4)), ("pw", range(4))])
    c = parse_command_text("pw := w", sp)
    assert isinstance(c, cl.Derived) and c.tag == "assign"
    name, e, _sp = c.args
    assert name == "pw"
    assert eval_expr(e, sp.state_of({"w": 2, "pw": 0})) == 2


def test_parse_while_mask_guard():
    sp = StateSpace([("w", range(4)), ("i", range(2))])
    c = parse_command_text("while (i in w) do (w := w & ~{i})", sp)
    assert isinstance(c, cl.Derived) and c.tag == "while"
    guard, body, _sp = c.args
    assert eval_expr(guard, sp.state_of({"w": 2, "i": 1})) == 1
    assert eval_expr(guard, sp.state_of({"w": 2, "i": 0})) == 0


def test_parse_precedence(two_state):
    c = parse_command_text("test(true) ; test(x = 0) \\/ abort", two_state)
    assert isinstance(c, cl.Nondet)


def test_parse_atomic_forms(two_state):
    one = parse_command_text("atomic(x' = x)", two_state)
    assert one.args[0] == two_state.full_set
    two = parse_command_text("atomic(x = 0, x' = x)", two_state)
    assert two.args[0] == StateSet(two_state, [0])


def test_roundtrip_generator_grammar(two_state):
    rels = list(two_state.all_relations())
    sets = list(two_state.all_state_sets())
    leaves = (
        [cl.pgm(r) for r in rels[:6]]
        + [cl.env(r) for r in rels[5:9]]
        + [cl.test(p) for p in sets]
        + [cl.nil(two_state)]
    )
    rng = random.Random(0xC0FFEE)

    def grow(depth):
        if depth == 0:
            return rng.choice(leaves)
        op = rng.choice(("seq", "nondet", "leaf"))
        if op == "seq":
            return cl.seq(grow(depth - 1), grow(depth - 1))
        if op == "nondet":
            return cl.nondet(grow(depth - 1), grow(depth - 1))
        return rng.choice(leaves)

    for _ in range(60):
        c = grow(2)
        assert parse_command_text(print_command(c), two_state) is c


def test_roundtrip_derived(two_state):
    sources = [
        "assert(x = 0)",
        "guar(x' = x)",
        "rely(x' = x)",
        "frame{x}: (spec(x' = x))",
        "pspec(true)",
        "opt(x' = 1)",
        "atomic((x = 0) || (x = 1), x' = x)",
        "idle",
        "(pgm(x = 0 && x' = 1) ; env(true))",
        "if x = 1 then (x := 0) else nil",
        "while x = 1 do (x := x - 1)",
        "(fin(pgm(x' = x)) ; om(env(true)))",
        "inf(env(true))",
    ]
    for src in sources:
        c = parse_command_text(src, two_state)
        assert parse_command_text(print_command(c), two_state) is c


# ---------------------------------------------------------------- space files


def test_parse_space_file():
    sp = parse_space_file("# demo\nvar w : {0..3}\nvar i : {0,1}\n")
    assert sp.variables == ("w", "i")
    assert sp.domain("w") == (0, 1, 2, 3)


def test_parse_space_file_errors():
    with pytest.raises(ParseError):
        parse_space_file("nonsense\n")
    with pytest.raises(ParseError):
        parse_space_file("var w : {a}\n")
    with pytest.raises(ParseError):
        parse_space_file("")


# ---------------------------------------------------------------- the driver


def test_refine_abort_is_top(tmp_path):
    lhs = tmp_path / "a.cmd"
    rhs = tmp_path / "b.cmd"
    lhs.write_text("abort\n")
    rhs.write_text("(pgm(true) ; env(true))\n")
    code, report = run(["refine", str(lhs), str(rhs)])
    assert code == 0
    assert report["items"][0]["status"] == "PASS"


def test_refine_failure_exit_code(tmp_path):
    lhs = tmp_path / "a.cmd"
    rhs = tmp_path / "b.cmd"
    lhs.write_text("magic\n")
    rhs.write_text("nil\n")
    code, report = run(["refine", str(lhs), str(rhs)])
    assert code == 1
    item = report["items"][0]
    assert item["status"] == "FAIL"
    assert item["failures"][0]["trace"] == "x=0 [TERM]"


def test_usage_errors_exit_two(tmp_path):
    assert run(["no-such-subcommand"])[0] == 2
    assert run(["law", "no-such-law"])[0] == 2
    assert run([])[0] == 2
    missing = tmp_path / "missing.cmd"
    assert run(["refine", str(missing), str(missing)])[0] == 2


def test_law_subcommand_json(tmp_path):
    out = tmp_path / "report.json"
    code, report = run(["law", "guar-merge", "--json", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, report_schema())
    assert data["items"][0]["instances"] == 256
    assert data["pass"] is True


def test_reports_byte_identical_modulo_wall_time(tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    run(["law", "rely-guar-assign", "--json", str(out1)])
    run(["law", "rely-guar-assign", "--json", str(out2)])
    scrub = lambda text: "\n".join(
        line for line in text.splitlines() if '"wall_time"' not in line
    )
    assert scrub(out1.read_text()) == scrub(out2.read_text())


def test_axioms_subcommand(tmp_path):
    out = tmp_path / "axioms.json"
    code, report = run(["axioms", "--json", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, report_schema())
    assert all(item["status"] == "PASS" for item in data["items"])


def test_space_flag(tmp_path):
    space_file = tmp_path / "space.txt"
    space_file.write_text("var w : {0..3}\nvar i : {0,1}\n")
    lhs = tmp_path / "a.cmd"
    rhs = tmp_path / "b.cmd"
    lhs.write_text("rely(w' subseteq w && i' = i) /\\ spec(w' subseteq w)\n")
    rhs.write_text("w := w & ~{i}\n")
    code, report = run(["--space", str(space_file), "refine", str(lhs), str(rhs)])
    assert code == 0


def test_max_states_flag(tmp_path):
    space_file = tmp_path / "space.txt"
    space_file.write_text("var w : {0..30}\n")
    lhs = tmp_path / "a.cmd"
    lhs.write_text("nil\n")
    code, _ = run([
        "--space", str(space_file), "--max-states", "8", "refine",
        str(lhs), str(lhs),
    ])
    assert code == 2


def test_example_subcommand_n1(tmp_path):
    out = tmp_path / "example.json"
    code, report = run(["example", "rem-from-set", "--n", "1", "--json", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, report_schema())
    names = {item["name"] for item in data["items"]}
    assert "final-refinement" in names
    assert "trading-closure-mutated-guarantee" in names
    assert data["pass"] is True


def test_build_rem_from_set_shapes():
    parts = build_rem_from_set(1)
    assert parts["space"].state_count == 8
    assert parts["g"].is_reflexive()


def test_law_exhaustive_flag(tmp_path):
    out = tmp_path / "r.json"
    code, report = run(["law", "guar-merge", "--exhaustive", "--json", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    item = data["items"][0]
    assert item["status"] == "PASS"
    assert item["instances"] == 256
    assert item["strategy"]["kind"] == "exhaustive"


def test_suite_subcommand(tmp_path):
    out = tmp_path / "suite.json"
    code, report = run(["suite", "--json", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, report_schema())
    statuses = {item["name"]: item["status"] for item in data["items"]}
    assert statuses["guar-merge"] == "PASS"
    mutants = [s for n, s in statuses.items() if "[drop" in n]
    assert mutants and all(s == "EXPECTED_FAIL" for s in mutants)
    assert data["pass"] is True
