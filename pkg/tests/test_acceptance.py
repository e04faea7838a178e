"""Acceptance suite: one test per acceptance criterion, at pinned tolerances.

Each criterion prints a single PASS/FAIL line (visible with pytest -s).
"""

import time

import pytest

from rgcalc import cmdlang as cl
from rgcalc import laws
from rgcalc import semantics as sem
from rgcalc.cli import example_rem_from_set
from rgcalc.exprs import Constant, Variable, binary
from rgcalc.relspace import Rel, StateSet, StateSpace
from rgcalc.semantics import ENV, TERM, Behavior, Step


def _announce(num, title, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"acceptance {num} ({title}): {status} {detail}".rstrip())
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_1_axiom_fidelity():
    """All appendix identities hold exhaustively on the 2-state space at K=3."""
    ctx = laws.CheckContext()
    assert ctx.space.state_count == 2 and ctx.bound == 3
    assert len(ctx.rels) == 16
    assert len(ctx.rels) ** 2 == 256
    start = time.monotonic()
    failures = []
    for law in laws.axiom_specs():
        report = laws.check_law(law, ctx)
        if report.status != laws.PASS:
            failures.append((law.name, report.status, report.failures[:1]))
    elapsed = time.monotonic() - start
    _announce(
        1, "axiom fidelity", not failures and elapsed < 60.0,
        f"[{len(laws.axiom_specs())} axioms, {elapsed:.1f}s]"
        + (f" failures={failures}" if failures else ""),
    )


def test_criterion_2_law_suite():
    """Every registry law passes with non-vacuous proviso coverage."""
    ctx = laws.CheckContext()
    registry = laws.registry()
    assert len(registry) >= 55
    start = time.monotonic()
    failures = []
    for law in registry:
        strategy = laws.default_strategy(law, ctx)
        if strategy["kind"] == "random":
            assert strategy["seed"] == 0xC0FFEE
            assert strategy["samples"] >= 500
        report = laws.check_law(law, ctx, strategy)
        if report.failures or report.vacuous:
            failures.append((law.name, report.status, report.failures[:1]))
    elapsed = time.monotonic() - start
    _announce(
        2, "law suite", not failures and elapsed < 600.0,
        f"[{len(registry)} laws, {elapsed:.1f}s]"
        + (f" failures={failures}" if failures else ""),
    )


def test_criterion_3_negative_controls():
    """Every proviso-dropped mutant fails with a rendered counterexample."""
    ctx = laws.CheckContext()
    controls = laws.negative_controls(ctx)
    required = {
        "guar-opt[drop reflexivity]",
        "rely-idle-stable[drop stability]",
        "rely-conditional[drop b_t stability]",
        "spec-seq-introduce[drop containment]",
        "rely-loop-early[drop well-foundedness]",
    }
    names = {law.name for law in controls}
    problems = []
    if len(controls) < 8:
        problems.append(f"only {len(controls)} controls")
    if not required <= names:
        problems.append(f"missing controls: {required - names}")
    for law in controls:
        report = laws.check_law(law, ctx)
        if not report.failures:
            problems.append(f"{law.name} did not fail")
            continue
        if all(cex is None for _, cex in report.failures):
            problems.append(f"{law.name} has no rendered trace")
        else:
            _, cex = next(f for f in report.failures if f[1] is not None)
            assert cex.render()
    _announce(
        3, "negative controls", not problems,
        f"[{len(controls)} mutants]" + (f" problems={problems}" if problems else ""),
    )


def test_criterion_4_running_example():
    """The removal scenario at N=2, K=4: all obligations and the final
    refinement pass; the mutated guarantee fails its obligation."""
    start = time.monotonic()
    problems = []
    for n in (1, 2):
        items = example_rem_from_set(n, 4)
        for item in items:
            if item["status"] != "PASS":
                problems.append((n, item["name"], item["failures"]))
        names = {item["name"] for item in items}
        assert "final-refinement" in names
        assert "trading-closure-mutated-guarantee" in names
    elapsed = time.monotonic() - start
    _announce(
        4, "running example", not problems and elapsed < 300.0,
        f"[N=1 and N=2 at K=4, {elapsed:.1f}s]"
        + (f" problems={problems}" if problems else ""),
    )


def test_criterion_5_interference_anomalies():
    """Doubling refines self-addition for every value; the odd-sum witness
    exists under an environment that flips the variable."""
    sp = StateSpace([("x", (0, 1))])
    x = Variable("x")
    xpx = binary("+", lambda a, b: a + b, (0, 1), (0, 1), x, x)
    two_x = binary("*", lambda a, b: a * b, (2,), (0, 1), Constant(2), x)
    ok = True
    for k in (0, 1, 2):
        if not sem.refines(
            cl.eval_to(xpx, k, sp), cl.eval_to(two_x, k, sp), sp, 3
        ):
            ok = False
    witness = sem.find_counterexample(
        cl.eval_to(two_x, 1, sp), cl.eval_to(xpx, 1, sp), sp, 3
    )
    ok = ok and witness is not None
    flip = Behavior(sp.states[0], (Step(ENV, sp.states[1]),), TERM)
    d_sum = sem.denote(cl.eval_to(xpx, 1, sp), sp, 3)
    d_dbl = sem.denote(cl.eval_to(two_x, 1, sp), sp, 3)
    ok = ok and d_sum.contains(flip) and not d_dbl.contains(flip)
    detail = f"[witness: {witness.render() if witness else None};" \
             f" flip witness: {flip.render()}]"
    _announce(5, "interference anomalies", ok, detail)


def test_criterion_6_semantic_sanity():
    """Degenerate loop equals abort; synchronisation identities hold over the
    generator grammar; denotations are monotone in the bound."""
    sp = StateSpace([("x", (0, 1))])
    ok = sem.equivalent(
        cl.while_loop(Constant(1), cl.nil(sp), sp), cl.abort(), sp, 3
    )
    r1 = Rel(sp, [(0, 1), (1, 1)])
    r2 = Rel(sp, [(0, 0), (1, 0)])
    p = StateSet(sp, [0])
    pool = [
        cl.nil(sp),
        cl.test(p),
        cl.pgm(r1),
        cl.env(r2),
        cl.seq(cl.pgm(r1), cl.env(r2)),
        cl.nondet(cl.test(p), cl.pgm(r2)),
        cl.seq(cl.test(p.complement()), cl.abort()),
        cl.idle(sp),
        cl.spec(r1),
    ]
    for c in pool:
        ok = ok and sem.equivalent(cl.par(c, cl.skip(sp)), c, sp, 3)
        ok = ok and sem.equivalent(cl.conj(c, cl.chaos(sp)), c, sp, 3)
    for c in pool:
        for k in (1, 2, 3):
            wider = sem.denote(c, sp, k + 1)
            ok = ok and wider.truncated(k) == sem.denote(c, sp, k)
    _announce(6, "semantic sanity", ok, f"[{len(pool)} sampled commands, K in 1..4]")
