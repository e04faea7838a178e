"""Registry of refinement laws as checkable schemas, plus the harness.

Each law is a schema: typed parameters, a decidable proviso, and one or
more conclusions (refinement or equality between command builders).  The
harness instantiates schemas over a finite space, discharges provisos by
enumeration, decides conclusions with the bounded trace semantics, and
aggregates outcomes into reports.  All laws here are theorems of the
calculus, so a bounded check acts as a falsification test: any failure
localises an implementation bug or a violated proviso.

`axiom_specs` covers the primitive-level identities (distribution, test
algebra, atomic-step algebra, iteration, synchronisation); `registry` the
named laws; `negative_controls` proviso-dropped mutants that must fail.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from . import cmdlang as cl
from . import semantics as sem
from .exprs import (
    Constant,
    Variable,
    binary,
    bools_of,
    compare_sets,
    decreases_rel,
    eq_val,
    is_invariant_under,
    is_single_reference,
    type_of,
    unary,
    values_of,
)
from .relspace import (
    Rel,
    StateSet,
    StateSpace,
    ValueOrder,
    compose,
    identity_on,
    image,
    is_stable,
    is_well_founded,
    restrict,
    rtc,
    tolerates,
)

PASS = "PASS"
FAIL = "FAIL"
PROVISO_UNMET = "PROVISO_UNMET"

DEFAULT_SEED = 0xC0FFEE
DEFAULT_SAMPLES = 500
EXHAUSTIVE_LIMIT = 1 << 16
# Forcing exhaustiveness still has to terminate in reasonable time; lattices
# beyond this cap stay sampled even under --exhaustive.
EXHAUSTIVE_HARD_CAP = 1 << 17


class Meet(tuple):
    """Denotational lattice meet of two commands (no meet operator in the AST)."""

    def __new__(cls, a, b):
        return tuple.__new__(cls, (a, b))


def default_space() -> StateSpace:
    """The canonical one-variable two-state space used for law checking."""
    return StateSpace([("x", (0, 1))])


class CheckContext:
    """A finite space, a bound, and deterministic parameter pools."""

    def __init__(self, space: StateSpace | None = None, bound: int = 3):
        self.space = space if space is not None else default_space()
        self.bound = bound
        self._rels = None
        self._sets = None
        self._build_pools()

    @property
    def rels(self):
        if self._rels is None:
            if self.space.state_count > 3:
                raise ValueError("exhaustive relation pools need at most 3 states")
            self._rels = list(self.space.all_relations())
        return self._rels

    @property
    def sets(self):
        if self._sets is None:
            if self.space.state_count > 8:
                raise ValueError("exhaustive state-set pools need at most 8 states")
            self._sets = list(self.space.all_state_sets())
        return self._sets

    def _build_pools(self):
        sp = self.space
        n = sp.state_count
        p0 = StateSet(sp, [0])
        p1 = StateSet(sp, [n - 1])
        ra = Rel(sp, [(0, n - 1), (n - 1, n - 1)])
        rb = Rel(sp, [(0, 0), (n - 1, 0)])
        rid = sp.identity_rel
        runiv = sp.universal_rel
        self.atoms = [
            cl.pgm(ra),
            cl.env(rb),
            cl.pgm(rid),
            cl.env(runiv),
            cl.nondet(cl.pgm(ra), cl.env(rb)),
        ]
        self.cmds = [
            cl.nil(sp),
            cl.test(p0),
            cl.pgm(ra),
            cl.env(rb),
            cl.pgm(rid),
            cl.seq(cl.pgm(ra), cl.env(rb)),
            cl.nondet(cl.test(p0), cl.pgm(rb)),
            cl.seq(cl.test(p1), cl.pgm(ra)),
        ]
        self.cmds_abort = self.cmds + [cl.abort(), cl.seq(cl.test(p0), cl.abort())]
        # expressions over the first variable
        name = sp.variables[0]
        dom = sp.domain(name)
        x = Variable(name)
        self.var_names = [name]
        self.exprs = [x, Constant(dom[0]), Constant(dom[-1])]
        self.bexprs = []
        if dom == (0, 1):
            notx = unary("not", lambda v: 1 - v, dom, x)
            self.exprs += [
                notx,
                binary("-", lambda a, b: a - b, dom, dom, x, x),
                binary("+", lambda a, b: a + b, dom, dom, x, x),
            ]
            self.bexprs = [x, notx, Constant(1), Constant(0)]
        self.values = sorted(
            set(dom)
            | {v for e in self.exprs for v in values_of(e, sp)}
        )
        self.varsets = [(), (name,)]
        self.orders = [ValueOrder((b, a) for a in dom for b in dom if b > a)]
        self.syncs = ["par", "conj"]

    def enumerator(self, kind: str):
        if kind == "rel":
            return self.rels
        if kind == "set":
            return self.sets
        if kind == "cmd":
            return self.cmds
        if kind == "cmdA":
            return self.cmds_abort
        if kind == "atom":
            return self.atoms
        if kind == "expr":
            return self.exprs
        if kind == "bexpr":
            return self.bexprs
        if kind == "var":
            return self.var_names
        if kind == "varset":
            return self.varsets
        if kind == "val":
            return self.values
        if kind == "order":
            return self.orders
        if kind == "sync":
            return self.syncs
        if kind == "recfun":
            return ["loop", "guarded"]
        raise ValueError(f"unknown parameter kind {kind!r}")

    # -- convenient derived commands -----------------------------------

    def sync_cmd(self, which: str, a, b):
        return cl.par(a, b) if which == "par" else cl.conj(a, b)


@dataclass
class LawSpec:
    """A checkable law: parameters, proviso, and conclusion builders."""

    name: str
    params: tuple  # ((name, kind), ...)
    conclude: callable  # (ctx, p) -> [(mode, lhs, rhs)]; mode in {refines, equals}
    proviso: callable | None = None  # (ctx, p) -> bool
    mode: str = "refines"  # headline mode, informational
    pinned: list | None = None  # explicit instances instead of pool product
    expect_fail: bool = False
    note: str = ""


@dataclass
class LawReport:
    name: str
    strategy: dict
    instances: int = 0
    proviso_met: int = 0
    failures: list = field(default_factory=list)  # [(digest, Behavior|None)]
    wall_time: float = 0.0

    @property
    def vacuous(self) -> bool:
        return self.proviso_met == 0

    @property
    def passed(self) -> bool:
        return not self.failures and not self.vacuous

    @property
    def status(self) -> str:
        if self.failures:
            return FAIL
        if self.vacuous:
            return "VACUOUS"
        return PASS

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "strategy": self.strategy,
            "instances": self.instances,
            "proviso_met": self.proviso_met,
            "failures": [
                {"params": digest, "trace": b.render() if b is not None else None}
                for digest, b in self.failures
            ],
            "wall_time": self.wall_time,
        }


# -- harness -----------------------------------------------------------------


def _digest_value(v) -> str:
    if isinstance(v, Rel):
        n = v.space.state_count
        mask = sum(1 << (i * n + j) for i, j in v.ipairs)
        return f"rel:{mask:#x}"
    if isinstance(v, StateSet):
        mask = sum(1 << i for i in v.indices)
        return f"set:{mask:#x}"
    if isinstance(v, cl.Command):
        return cl.render_term(v)
    if isinstance(v, ValueOrder):
        return f"order:{sorted(v.gt)}"
    return repr(v)


def instance_digest(params: dict) -> str:
    return ", ".join(f"{k}={_digest_value(v)}" for k, v in sorted(params.items()))


def _evaluate(term, ctx: CheckContext) -> sem.BehaviorSet:
    if isinstance(term, Meet):
        a = _evaluate(term[0], ctx)
        b = _evaluate(term[1], ctx)
        return a.meet(b)
    return sem.denote(term, ctx.space, ctx.bound)


def check_instance(law: LawSpec, params: dict, ctx: CheckContext):
    """Outcome of one instance: PASS, FAIL (with counterexample), or PROVISO_UNMET."""
    if law.proviso is not None and not law.proviso(ctx, params):
        return PROVISO_UNMET, None
    for mode, lhs, rhs in law.conclude(ctx, params):
        left = _evaluate(lhs, ctx)
        right = _evaluate(rhs, ctx)
        if mode == "refines":
            if not left.includes(right):
                return FAIL, sem.set_counterexample(left, right)
        elif mode == "equals":
            if left != right:
                cex = sem.set_counterexample(left, right)
                if cex is None:
                    cex = sem.set_counterexample(right, left)
                return FAIL, cex
        elif mode == "differs":
            if left == right:
                return FAIL, None
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return PASS, None


def _instances(law: LawSpec, ctx: CheckContext, strategy: dict):
    if law.pinned is not None:
        yield from law.pinned
        return
    pools = [(name, ctx.enumerator(kind)) for name, kind in law.params]
    if strategy["kind"] == "exhaustive":
        names = [n for n, _ in pools]
        for combo in itertools.product(*(vals for _, vals in pools)):
            yield dict(zip(names, combo))
    else:
        rng = random.Random(strategy["seed"])
        for _ in range(strategy["samples"]):
            yield {name: rng.choice(vals) for name, vals in pools}


def lattice_size(law: LawSpec, ctx: CheckContext) -> int:
    size = 1
    for _, kind in law.params:
        size *= len(ctx.enumerator(kind))
    return size


def default_strategy(law: LawSpec, ctx: CheckContext, force_exhaustive: bool = False) -> dict:
    if law.pinned is not None:
        return {"kind": "exhaustive"}
    size = lattice_size(law, ctx)
    limit = EXHAUSTIVE_HARD_CAP if force_exhaustive else EXHAUSTIVE_LIMIT
    if size <= limit:
        return {"kind": "exhaustive"}
    return {"kind": "random", "seed": DEFAULT_SEED, "samples": DEFAULT_SAMPLES}


def check_law(law: LawSpec, ctx: CheckContext, strategy: dict | None = None) -> LawReport:
    strategy = strategy or default_strategy(law, ctx)
    report = LawReport(name=law.name, strategy=strategy)
    start = time.monotonic()
    for params in _instances(law, ctx, strategy):
        report.instances += 1
        outcome, cex = check_instance(law, params, ctx)
        if outcome == PROVISO_UNMET:
            continue
        report.proviso_met += 1
        if outcome == FAIL:
            report.failures.append((instance_digest(params), cex))
    report.wall_time = time.monotonic() - start
    return report


def lookup(name: str, ctx: CheckContext | None = None) -> LawSpec | None:
    for law in registry() + axiom_specs():
        if law.name == name:
            return law
    for law in negative_controls(ctx):
        if law.name == name:
            return law
    return None


# -- helpers shared by many laws ---------------------------------------------


def _gt_set(ctx, order, k, e):
    return compare_sets(Constant(k), e, order, True, ctx.space)


def _ge_set(ctx, order, k, e):
    return compare_sets(Constant(k), e, order, False, ctx.space)


def _order_of(ctx):
    return ctx.orders[0]


def _id_without(ctx, name):
    others = [v for v in ctx.space.variables if v != name]
    return identity_on(ctx.space, others)


def _spec_framed(ctx, names, q):
    # a frame over the empty set still guarantees that nothing changes
    return cl.frame(names, cl.spec(q))


def _pspec_framed(ctx, names, q):
    return cl.frame(names, cl.pspec(q))


def _assign_values(ctx, e, name):
    vals = set(values_of(e, ctx.space)) | set(ctx.space.domain(name))
    return sorted(vals)


def _tolerates(ctx, q, r, p):
    return tolerates(q, r, p)


def _big_test_choice(ctx, q, c, with_c=True):
    """The relation-shaped choice  V_s test({s}); c; test(q(|{s}|))."""
    sp = ctx.space
    branches = []
    for s in sp.states:
        start = StateSet(sp, (s.index,))
        target = StateSet(sp, (j for i, j in q.ipairs if i == s.index))
        mid = (c,) if with_c else ()
        branches.append(cl.seq(cl.test(start), *mid, cl.test(target)))
    return cl.nondet(*branches)


def _is_partially_correct(ctx, c, q) -> bool:
    return sem.equivalent(c, _big_test_choice(ctx, q, c), ctx.space, ctx.bound)


# -- the law registry ----------------------------------------------------------


def registry() -> list[LawSpec]:
    laws: list[LawSpec] = []
    add = laws.append

    # --- guarantees and frames (laws guar-*) ---
    add(LawSpec(
        name="guar-strengthen",
        params=(("g0", "rel"), ("g1", "rel")),
        proviso=lambda ctx, p: p["g1"] <= p["g0"],
        conclude=lambda ctx, p: [("refines", cl.guar(p["g0"]), cl.guar(p["g1"]))],
    ))
    add(LawSpec(
        name="guar-introduce",
        params=(("g", "rel"), ("c", "cmdA")),
        conclude=lambda ctx, p: [("refines", p["c"], cl.conj(cl.guar(p["g"]), p["c"]))],
    ))
    add(LawSpec(
        name="guar-merge",
        params=(("g1", "rel"), ("g2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.guar(p["g1"]), cl.guar(p["g2"])),
            cl.guar(p["g1"].inter(p["g2"])),
        )],
    ))
    add(LawSpec(
        name="guar-seq-distrib",
        params=(("g", "rel"), ("c", "cmd"), ("d", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.guar(p["g"]), cl.seq(p["c"], p["d"])),
            cl.seq(cl.conj(cl.guar(p["g"]), p["c"]), cl.conj(cl.guar(p["g"]), p["d"])),
        )],
    ))
    add(LawSpec(
        name="guar-par-distrib",
        params=(("g", "rel"), ("c", "cmd"), ("d", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.guar(p["g"]), cl.par(p["c"], p["d"])),
            cl.par(cl.conj(cl.guar(p["g"]), p["c"]), cl.conj(cl.guar(p["g"]), p["d"])),
        )],
    ))
    add(LawSpec(
        name="guar-assert",
        params=(("g", "rel"), ("p", "set")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.conj(cl.guar(p["g"]), cl.assert_(p["p"])), cl.assert_(p["p"]),
        )],
    ))
    add(LawSpec(
        name="distribute-frame",
        params=(("X", "varset"), ("c", "cmd"), ("d", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.frame(p["X"], cl.seq(p["c"], p["d"])),
            cl.seq(cl.frame(p["X"], p["c"]), cl.frame(p["X"], p["d"])),
        )],
    ))
    add(LawSpec(
        name="frame-reduce",
        params=(("X", "varset"), ("Y", "varset"), ("c", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.frame(tuple(sorted(set(p["X"]) | set(p["Y"]))), p["c"]),
            cl.frame(p["Y"], p["c"]),
        )],
    ))

    # --- relies (laws rely-*) ---
    add(LawSpec(
        name="rely-weaken",
        params=(("r0", "rel"), ("r1", "rel")),
        proviso=lambda ctx, p: p["r0"] <= p["r1"],
        conclude=lambda ctx, p: [("refines", cl.rely(p["r0"]), cl.rely(p["r1"]))],
    ))
    add(LawSpec(
        name="rely-remove",
        params=(("r", "rel"), ("c", "cmdA")),
        conclude=lambda ctx, p: [("refines", cl.conj(cl.rely(p["r"]), p["c"]), p["c"])],
    ))
    add(LawSpec(
        name="rely-merge",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.rely(p["r1"]), cl.rely(p["r2"])),
            cl.rely(p["r1"].inter(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="rely-refine-within",
        params=(("r", "rel"), ("c0", "cmd"), ("c1", "cmd"), ("c2", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            cl.conj(cl.rely(p["r"]), p["c1"]),
            cl.conj(cl.rely(p["r"]), p["d"]),
            ctx.space, ctx.bound,
        ),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.seq(p["c0"], p["c1"], p["c2"])),
            cl.conj(cl.rely(p["r"]), cl.seq(p["c0"], p["d"], p["c2"])),
        )],
    ))
    add(LawSpec(
        name="rely-par-distrib",
        params=(("r", "rel"), ("c", "cmd"), ("d", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.par(p["c"], p["d"])),
            cl.par(
                cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["r"]), p["c"])),
                cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["r"]), p["d"])),
            ),
        )],
    ))
    add(LawSpec(
        name="rely-guar",
        params=(("r", "rel"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.par(cl.rely(p["r"]), cl.guar(p["r"])), cl.rely(p["r"]),
        )],
    ))
    add(LawSpec(
        name="rely-seq-distrib",
        params=(("r", "rel"), ("c", "cmd"), ("d", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.seq(p["c"], p["d"])),
            cl.seq(cl.conj(cl.rely(p["r"]), p["c"]), cl.conj(cl.rely(p["r"]), p["d"])),
        )],
    ))
    add(LawSpec(
        name="conj-rely-guar",
        params=(("r", "rel"), ("g", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.rely(p["r"]), cl.guar(p["g"])),
            cl.seq(
                cl.om(cl.nondet(cl.pgm(p["g"]), cl.env(p["r"]))),
                cl.nondet(cl.nil(ctx.space), cl.seq(cl.env(p["r"].complement()), cl.abort())),
            ),
        )],
    ))
    add(LawSpec(
        name="par-guar-guar",
        params=(("g", "rel"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.par(cl.guar(p["g"]), cl.guar(p["g"])), cl.guar(p["g"]),
        )],
    ))

    # --- termination ---
    add(LawSpec(
        name="seq-term-term",
        params=(),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.seq(cl.term(ctx.space), cl.term(ctx.space)), cl.term(ctx.space),
        )],
    ))
    add(LawSpec(
        name="par-term-term",
        params=(),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.par(cl.term(ctx.space), cl.term(ctx.space)), cl.term(ctx.space),
        )],
    ))

    # --- partial and total specifications ---
    add(LawSpec(
        name="sync-distribute-relation",
        params=(("q", "rel"), ("c", "cmd"), ("d", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], _big_test_choice(ctx, p["q"], p["d"])),
            _big_test_choice(ctx, p["q"], ctx.sync_cmd(p["o"], p["c"], p["d"])),
        )],
    ))
    add(LawSpec(
        name="partially-correct",
        params=(("q", "rel"), ("c", "cmd")),
        mode="equals",
        proviso=lambda ctx, p: _is_partially_correct(ctx, p["c"], p["q"]),
        conclude=lambda ctx, p: [(
            "equals", cl.conj(p["c"], cl.pspec(p["q"])), p["c"],
        )],
        note="definitional direction of Lemma partially-correct",
    ))
    add(LawSpec(
        name="partially-correct-conv",
        params=(("q", "rel"), ("c", "cmd")),
        mode="equals",
        proviso=lambda ctx, p: sem.equivalent(
            cl.conj(p["c"], cl.pspec(p["q"])), p["c"], ctx.space, ctx.bound
        ),
        conclude=lambda ctx, p: [(
            "equals", _big_test_choice(ctx, p["q"], p["c"]), p["c"],
        )],
        note="converse direction of Lemma partially-correct",
    ))
    add(LawSpec(
        name="spec-refines",
        params=(("q", "rel"), ("c", "cmd")),
        proviso=lambda ctx, p: _is_partially_correct(ctx, p["c"], p["q"])
        and sem.refines(cl.term(ctx.space), p["c"], ctx.space, ctx.bound),
        conclude=lambda ctx, p: [("refines", cl.spec(p["q"]), p["c"])],
    ))
    add(LawSpec(
        name="spec-distribute-sync",
        params=(("q", "rel"), ("c", "cmd"), ("d", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], cl.conj(p["d"], cl.pspec(p["q"]))),
            cl.conj(ctx.sync_cmd(p["o"], p["c"], p["d"]), cl.pspec(p["q"])),
        )],
    ))
    add(LawSpec(
        name="spec-strengthen",
        params=(("q1", "rel"), ("q2", "rel")),
        proviso=lambda ctx, p: p["q2"] <= p["q1"],
        conclude=lambda ctx, p: [
            ("refines", cl.pspec(p["q1"]), cl.pspec(p["q2"])),
            ("refines", cl.spec(p["q1"]), cl.spec(p["q2"])),
        ],
    ))
    add(LawSpec(
        name="spec-univ",
        params=(),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals", cl.pspec(ctx.space.universal_rel), cl.chaos(ctx.space)),
            ("equals", cl.spec(ctx.space.universal_rel), cl.term(ctx.space)),
        ],
    ))
    add(LawSpec(
        name="spec-introduce",
        params=(("q", "rel"),),
        conclude=lambda ctx, p: [
            ("refines", cl.chaos(ctx.space), cl.pspec(p["q"])),
            ("refines", cl.term(ctx.space), cl.spec(p["q"])),
        ],
    ))
    add(LawSpec(
        name="test-restricts-spec",
        params=(("p", "set"), ("q", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.seq(cl.test(p["p"]), cl.pspec(restrict(p["p"], p["q"], None))),
             cl.seq(cl.test(p["p"]), cl.pspec(p["q"]))),
            ("equals",
             cl.seq(cl.test(p["p"]), cl.spec(restrict(p["p"], p["q"], None))),
             cl.seq(cl.test(p["p"]), cl.spec(p["q"]))),
        ],
    ))
    add(LawSpec(
        name="assert-restricts-spec",
        params=(("p", "set"), ("q", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.seq(cl.assert_(p["p"]), cl.pspec(restrict(p["p"], p["q"], None))),
             cl.seq(cl.assert_(p["p"]), cl.pspec(p["q"]))),
            ("equals",
             cl.seq(cl.assert_(p["p"]), cl.spec(restrict(p["p"], p["q"], None))),
             cl.seq(cl.assert_(p["p"]), cl.spec(p["q"]))),
        ],
    ))
    add(LawSpec(
        name="spec-strengthen-under-pre",
        params=(("p", "set"), ("q1", "rel"), ("q2", "rel"), ("X", "varset")),
        proviso=lambda ctx, p: restrict(p["p"], p["q2"], None) <= p["q1"],
        conclude=lambda ctx, p: [
            ("refines",
             cl.seq(cl.assert_(p["p"]), _pspec_framed(ctx, p["X"], p["q1"])),
             cl.seq(cl.assert_(p["p"]), _pspec_framed(ctx, p["X"], p["q2"]))),
            ("refines",
             cl.seq(cl.assert_(p["p"]), _spec_framed(ctx, p["X"], p["q1"])),
             cl.seq(cl.assert_(p["p"]), _spec_framed(ctx, p["X"], p["q2"]))),
        ],
    ))
    add(LawSpec(
        name="spec-test-restricts",
        params=(("p", "set"), ("q", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.seq(cl.pspec(p["q"]), cl.test(p["p"])),
             cl.pspec(restrict(None, p["q"], p["p"]))),
            ("equals",
             cl.seq(cl.spec(p["q"]), cl.test(p["p"])),
             cl.spec(restrict(None, p["q"], p["p"]))),
        ],
    ))
    add(LawSpec(
        name="spec-assert-restricts",
        params=(("p", "set"), ("q", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.seq(cl.pspec(restrict(None, p["q"], p["p"])), cl.assert_(p["p"])),
             cl.pspec(restrict(None, p["q"], p["p"]))),
            ("equals",
             cl.seq(cl.spec(restrict(None, p["q"], p["p"])), cl.assert_(p["p"])),
             cl.spec(restrict(None, p["q"], p["p"]))),
        ],
    ))
    add(LawSpec(
        name="spec-test-commute",
        params=(("p", "set"), ("q", "rel")),
        conclude=lambda ctx, p: [
            ("refines",
             cl.seq(cl.pspec(p["q"]), cl.test(image(p["q"], p["p"]))),
             cl.seq(cl.test(p["p"]), cl.pspec(p["q"]))),
            ("refines",
             cl.seq(cl.spec(p["q"]), cl.test(image(p["q"], p["p"]))),
             cl.seq(cl.test(p["p"]), cl.spec(p["q"]))),
        ],
    ))
    add(LawSpec(
        name="spec-to-sequential",
        params=(("q1", "rel"), ("q2", "rel")),
        conclude=lambda ctx, p: [
            ("refines",
             cl.pspec(compose(p["q1"], p["q2"])),
             cl.seq(cl.pspec(p["q1"]), cl.pspec(p["q2"]))),
            ("refines",
             cl.spec(compose(p["q1"], p["q2"])),
             cl.seq(cl.spec(p["q1"]), cl.spec(p["q2"]))),
        ],
    ))
    add(LawSpec(
        name="spec-seq-introduce",
        params=(("p1", "set"), ("p2", "set"), ("q", "rel"), ("q1", "rel"), ("q2", "rel"), ("X", "varset")),
        proviso=lambda ctx, p: restrict(
            p["p1"], compose(restrict(None, p["q1"], p["p2"]), p["q2"]), None
        ) <= p["q"],
        conclude=lambda ctx, p: [
            ("refines",
             cl.seq(cl.assert_(p["p1"]), _pspec_framed(ctx, p["X"], p["q"])),
             cl.seq(
                 cl.assert_(p["p1"]),
                 _pspec_framed(ctx, p["X"], restrict(None, p["q1"], p["p2"])),
                 cl.assert_(p["p2"]),
                 _pspec_framed(ctx, p["X"], p["q2"]),
             )),
            ("refines",
             cl.seq(cl.assert_(p["p1"]), _spec_framed(ctx, p["X"], p["q"])),
             cl.seq(
                 cl.assert_(p["p1"]),
                 _spec_framed(ctx, p["X"], restrict(None, p["q1"], p["p2"])),
                 cl.assert_(p["p2"]),
                 _spec_framed(ctx, p["X"], p["q2"]),
             )),
        ],
    ))
    add(LawSpec(
        name="sync-spec-spec",
        params=(("q0", "rel"), ("q1", "rel"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             ctx.sync_cmd(p["o"], cl.pspec(p["q0"]), cl.pspec(p["q1"])),
             cl.pspec(p["q0"].inter(p["q1"]))),
            ("equals",
             ctx.sync_cmd(p["o"], cl.spec(p["q0"]), cl.spec(p["q1"])),
             cl.spec(p["q0"].inter(p["q1"]))),
        ],
    ))

    # --- stability and trading ---
    add(LawSpec(
        name="stable-transitive",
        params=(("p", "set"), ("r", "rel")),
        mode="equals",
        proviso=lambda ctx, p: is_stable(p["p"], p["r"]),
        conclude=lambda ctx, p: [(
            "equals",
            cl.test(image(rtc(p["r"]), p["p"])),
            cl.test(p["p"]),
        )],
        note="image through the reflexive transitive closure collapses to p",
    ))
    add(LawSpec(
        name="guar-test-commute-under-rely",
        params=(("p", "set"), ("r", "rel"), ("g", "rel")),
        proviso=lambda ctx, p: is_stable(p["p"], p["r"]) and is_stable(p["p"], p["g"]),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.seq(cl.guar(p["g"]), cl.test(p["p"]))),
            cl.conj(cl.rely(p["r"]), cl.seq(cl.test(p["p"]), cl.guar(p["g"]))),
        )],
    ))
    add(LawSpec(
        name="spec-trade-rely-guar",
        params=(("r", "rel"), ("g", "rel")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.pspec(rtc(p["r"].union(p["g"])))),
            cl.conj(cl.rely(p["r"]), cl.guar(p["g"])),
        )],
    ))
    add(LawSpec(
        name="spec-trading",
        params=(("r", "rel"), ("g", "rel"), ("q", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.spec(rtc(p["r"].union(p["g"])).inter(p["q"])))),
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]), cl.spec(p["q"]))),
        )],
    ))
    add(LawSpec(
        name="spec-strengthen-with-trading",
        params=(("p", "set"), ("r", "rel"), ("g", "rel"), ("q1", "rel"), ("q2", "rel"), ("X", "varset")),
        proviso=lambda ctx, p: restrict(
            p["p"],
            rtc(p["r"].union(p["g"].inter(identity_on(ctx.space, [
                v for v in ctx.space.variables if v not in p["X"]
            ])))).inter(p["q2"]),
            None,
        ) <= p["q1"],
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]), _spec_framed(ctx, p["X"], p["q1"])))),
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]), _spec_framed(ctx, p["X"], p["q2"])))),
        )],
    ))
    add(LawSpec(
        name="frame-restrict",
        params=(("r", "rel"), ("q", "rel"), ("X", "varset"), ("Y", "varset"), ("Z", "varset")),
        proviso=lambda ctx, p: set(p["Z"]) <= set(p["X"])
        and set(p["Y"]) <= set(ctx.space.variables) - set(p["Z"])
        and p["r"] <= identity_on(ctx.space, p["Y"]),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]),
                    _spec_framed(ctx, p["X"], identity_on(ctx.space, p["Y"]).inter(p["q"]))),
            cl.conj(cl.rely(p["r"]), _spec_framed(ctx, p["Z"], p["q"])),
        )],
    ))
    add(LawSpec(
        name="tolerates-transitive",
        params=(("p", "set"), ("q", "rel"), ("r", "rel")),
        proviso=lambda ctx, p: _tolerates(ctx, p["q"], p["r"], p["p"]),
        conclude=lambda ctx, p: [(
            "refines",
            cl.pgm(p["q"]),
            cl.pgm(restrict(p["p"], compose(compose(rtc(p["r"]), p["q"]), rtc(p["r"])), None)),
        )],
        note="relational tolerance closure encoded through the program-step injection",
    ))
    add(LawSpec(
        name="interference-before",
        params=(("p", "set"), ("q", "rel"), ("r", "rel")),
        proviso=lambda ctx, p: is_stable(p["p"], p["r"])
        and restrict(p["p"], compose(p["r"], p["q"]), None) <= p["q"],
        conclude=lambda ctx, p: [(
            "refines",
            cl.pgm(p["q"]),
            cl.pgm(restrict(p["p"], compose(rtc(p["r"]), p["q"]), None)),
        )],
    ))
    add(LawSpec(
        name="interference-after",
        params=(("p", "set"), ("q", "rel"), ("r", "rel")),
        proviso=lambda ctx, p: restrict(p["p"], compose(p["q"], p["r"]), None) <= p["q"],
        conclude=lambda ctx, p: [(
            "refines",
            cl.pgm(p["q"]),
            cl.pgm(restrict(p["p"], compose(p["q"], rtc(p["r"])), None)),
        )],
    ))

    # --- parallel introduction ---
    add(LawSpec(
        name="spec-introduce-par",
        params=(("r", "rel"), ("r0", "rel"), ("r1", "rel"), ("q0", "rel"), ("q1", "rel")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.spec(p["q0"].inter(p["q1"]))),
            cl.par(
                cl.conj(cl.rely(p["r"].union(p["r0"])),
                        cl.conj(cl.guar(p["r1"]), cl.spec(p["q0"]))),
                cl.conj(cl.rely(p["r"].union(p["r1"])),
                        cl.conj(cl.guar(p["r0"]), cl.spec(p["q1"]))),
            ),
        )],
    ))

    # --- optional atomic step ---
    add(LawSpec(
        name="opt-strengthen-under-pre",
        params=(("p", "set"), ("q1", "rel"), ("q2", "rel")),
        proviso=lambda ctx, p: restrict(p["p"], p["q2"], None) <= p["q1"],
        conclude=lambda ctx, p: [(
            "refines",
            cl.seq(cl.assert_(p["p"]), cl.opt(p["q1"])),
            cl.opt(p["q2"]),
        )],
    ))
    add(LawSpec(
        name="spec-to-pgm",
        params=(("q", "rel"),),
        conclude=lambda ctx, p: [("refines", cl.spec(p["q"]), cl.pgm(p["q"]))],
    ))
    add(LawSpec(
        name="spec-to-test",
        params=(("q", "rel"),),
        conclude=lambda ctx, p: [(
            "refines", cl.spec(p["q"]), cl.test(p["q"].domain_where_identical()),
        )],
    ))
    add(LawSpec(
        name="spec-to-opt",
        params=(("q", "rel"),),
        conclude=lambda ctx, p: [("refines", cl.spec(p["q"]), cl.opt(p["q"]))],
    ))
    add(LawSpec(
        name="guar-opt",
        params=(("g", "rel"), ("q", "rel")),
        mode="equals",
        proviso=lambda ctx, p: p["g"].is_reflexive(),
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.guar(p["g"]), cl.opt(p["q"])),
            cl.opt(p["g"].inter(p["q"])),
        )],
    ))

    # --- idle and stuttering ---
    add(LawSpec(
        name="guar-idle",
        params=(("g", "rel"),),
        mode="equals",
        proviso=lambda ctx, p: p["g"].is_reflexive(),
        conclude=lambda ctx, p: [(
            "equals", cl.conj(cl.guar(p["g"]), cl.idle(ctx.space)), cl.idle(ctx.space),
        )],
    ))
    add(LawSpec(
        name="rely-idle-stable",
        params=(("p", "set"), ("r", "rel")),
        proviso=lambda ctx, p: is_stable(p["p"], p["r"]),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.seq(cl.idle(ctx.space), cl.test(p["p"]))),
            cl.conj(cl.rely(p["r"]), cl.seq(cl.test(p["p"]), cl.idle(ctx.space))),
        )],
    ))
    add(LawSpec(
        name="rely-idle",
        params=(("p", "set"), ("r", "rel")),
        proviso=lambda ctx, p: is_stable(p["p"], p["r"]),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]),
                    cl.seq(cl.assert_(p["p"]), cl.spec(restrict(None, rtc(p["r"]), p["p"])))),
            cl.conj(cl.rely(p["r"]), cl.idle(ctx.space)),
        )],
    ))
    add(LawSpec(
        name="tolerate-interference",
        params=(("p", "set"), ("q", "rel"), ("r", "rel")),
        mode="equals",
        proviso=lambda ctx, p: _tolerates(ctx, p["q"], p["r"], p["p"]),
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.rely(p["r"]), cl.seq(cl.assert_(p["p"]), cl.spec(p["q"]))),
            cl.conj(cl.rely(p["r"]),
                    cl.seq(cl.idle(ctx.space), cl.assert_(p["p"]), cl.spec(p["q"]),
                           cl.idle(ctx.space))),
        )],
    ))
    add(LawSpec(
        name="par-idle-idle",
        params=(),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.par(cl.idle(ctx.space), cl.idle(ctx.space)), cl.idle(ctx.space),
        )],
    ))
    add(LawSpec(
        name="test-par-idle",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.idle(ctx.space), cl.test(p["p"]), cl.idle(ctx.space)),
            cl.par(
                cl.seq(cl.skip(ctx.space), cl.test(p["p"]), cl.skip(ctx.space)),
                cl.idle(ctx.space),
            ),
        )],
    ))
    add(LawSpec(
        name="idle-test-idle",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.par(cl.seq(cl.idle(ctx.space), cl.test(p["p"]), cl.idle(ctx.space)),
                   cl.idle(ctx.space)),
            cl.seq(cl.idle(ctx.space), cl.test(p["p"]), cl.idle(ctx.space)),
        )],
    ))
    add(LawSpec(
        name="idle-expanded",
        params=(),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.idle(ctx.space),
            cl.seq(cl.fin(cl.nondet(cl.pgm(ctx.space.identity_rel),
                                    cl.env(ctx.space.universal_rel))),
                   cl.om(cl.env(ctx.space.universal_rel))),
        )],
    ))

    # --- atomic specification ---
    add(LawSpec(
        name="atomic-spec-weaken-pre",
        params=(("p0", "set"), ("p1", "set"), ("q", "rel")),
        proviso=lambda ctx, p: p["p0"] <= p["p1"],
        conclude=lambda ctx, p: [(
            "refines", cl.atomic(p["p0"], p["q"]), cl.atomic(p["p1"], p["q"]),
        )],
    ))
    add(LawSpec(
        name="atomic-spec-strengthen-post",
        params=(("p", "set"), ("q1", "rel"), ("q2", "rel")),
        proviso=lambda ctx, p: restrict(p["p"], p["q2"], None) <= p["q1"],
        conclude=lambda ctx, p: [(
            "refines", cl.atomic(p["p"], p["q1"]), cl.atomic(p["p"], p["q2"]),
        )],
    ))
    add(LawSpec(
        name="atomic-guar",
        params=(("g", "rel"), ("p", "set"), ("q", "rel")),
        proviso=lambda ctx, p: p["g"].is_reflexive(),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.guar(p["g"]), cl.atomic(p["p"], p["q"])),
            cl.atomic(p["p"], p["g"].inter(p["q"])),
        )],
    ))
    add(LawSpec(
        name="atomic-spec-introduce",
        params=(("g", "rel"), ("r", "rel"), ("p", "set"), ("q", "rel")),
        proviso=lambda ctx, p: p["g"].is_reflexive()
        and _tolerates(ctx, p["q"], p["r"], p["p"]),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]), cl.spec(p["q"])))),
            cl.conj(cl.rely(p["r"]), cl.atomic(p["p"], p["g"].inter(p["q"]))),
        )],
    ))

    # --- expressions under interference ---
    add(LawSpec(
        name="idle-eval",
        params=(("e", "expr"),),
        conclude=lambda ctx, p: [
            ("refines", cl.idle(ctx.space), cl.eval_to(p["e"], k, ctx.space))
            for k in sorted(values_of(p["e"], ctx.space))
        ],
    ))
    add(LawSpec(
        name="guar-eval",
        params=(("g", "rel"), ("e", "expr")),
        mode="equals",
        proviso=lambda ctx, p: p["g"].is_reflexive(),
        conclude=lambda ctx, p: [
            ("equals",
             cl.conj(cl.guar(p["g"]), cl.eval_to(p["e"], k, ctx.space)),
             cl.eval_to(p["e"], k, ctx.space))
            for k in sorted(values_of(p["e"], ctx.space))
        ],
    ))
    add(LawSpec(
        name="invariant-expr-stable",
        params=(("e", "expr"), ("r", "rel")),
        mode="equals",
        proviso=lambda ctx, p: is_invariant_under(p["e"], p["r"]),
        conclude=lambda ctx, p: [
            ("refines",
             cl.test(eq_val(Constant(k), p["e"], ctx.space)),
             cl.test(image(p["r"], eq_val(Constant(k), p["e"], ctx.space))))
            for k in sorted(values_of(p["e"], ctx.space))
        ],
        note="stability of eq(k,e) under r, via the test injection",
    ))
    add(LawSpec(
        name="eval-single-reference",
        params=(("e", "expr"), ("r", "rel")),
        proviso=lambda ctx, p: is_single_reference(p["e"], p["r"]),
        conclude=lambda ctx, p: [
            ("refines",
             cl.conj(cl.rely(p["r"]),
                     cl.seq(cl.idle(ctx.space),
                            cl.test(eq_val(Constant(k), p["e"], ctx.space)),
                            cl.idle(ctx.space))),
             cl.eval_to(p["e"], k, ctx.space))
            for k in sorted(values_of(p["e"], ctx.space))
        ],
    ))
    add(LawSpec(
        name="rely-eval",
        params=(("e", "expr"), ("r", "rel"), ("p", "set"), ("q", "rel"), ("k", "val")),
        proviso=lambda ctx, p: is_single_reference(p["e"], p["r"])
        and _tolerates(ctx, p["q"], p["r"], p["p"])
        and restrict(
            p["p"].inter(eq_val(Constant(p["k"]), p["e"], ctx.space)),
            ctx.space.identity_rel, None,
        ) <= p["q"],
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.seq(cl.assert_(p["p"]), cl.spec(p["q"]))),
            cl.eval_to(p["e"], p["k"], ctx.space),
        )],
    ))
    add(LawSpec(
        name="rely-eval-expr",
        params=(("e", "expr"), ("r", "rel"), ("p", "set"), ("p0", "set"), ("k", "val")),
        proviso=lambda ctx, p: is_single_reference(p["e"], p["r"])
        and is_stable(p["p"], p["r"])
        and p["p"].inter(eq_val(Constant(p["k"]), p["e"], ctx.space)) <= p["p0"]
        and is_stable(p["p0"], restrict(p["p"], p["r"], None)),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]),
                    cl.seq(cl.assert_(p["p"]),
                           cl.spec(restrict(None, rtc(p["r"]), p["p"].inter(p["p0"]))))),
            cl.eval_to(p["e"], p["k"], ctx.space),
        )],
    ))

    # --- assignments ---
    def _assign_provisos_a_b(ctx, p):
        sp = ctx.space
        x, e, r, q, g = p["x"], p["e"], p["r"], p["q"], p["g"]
        idbar = _id_without(ctx, x)
        for k in _assign_values(ctx, e, x):
            eqke = eq_val(Constant(k), e, sp)
            eqkx = eq_val(Constant(k), Variable(x), sp)
            a = restrict(
                p["p"].inter(eqke),
                compose(rtc(r), restrict(None, idbar, eqkx)),
                None,
            )
            if not a <= q:
                return False
            b = restrict(
                p["p"].inter(image(rtc(r), eqke)),
                restrict(None, idbar, eqkx),
                None,
            )
            if not b <= g:
                return False
        return True

    add(LawSpec(
        name="rely-guar-assign",
        params=(("x", "var"), ("e", "expr"), ("p", "set"), ("g", "rel"), ("r", "rel"), ("q", "rel")),
        proviso=lambda ctx, p: p["g"].is_reflexive()
        and is_single_reference(p["e"], p["r"])
        and _tolerates(ctx, p["q"], p["r"], p["p"])
        and _assign_provisos_a_b(ctx, p),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]), cl.frame((p["x"],), cl.spec(p["q"]))))),
            cl.assign(p["x"], p["e"], ctx.space),
        )],
    ))

    def _assign_stable_pre_proviso(ctx, p):
        sp = ctx.space
        x, e, r, q, g, p1 = p["x"], p["e"], p["r"], p["q"], p["g"], p["p1"]
        if not (g.is_reflexive() and is_single_reference(e, r)
                and _tolerates(ctx, q, r, p["p"]) and is_stable(p1, r)):
            return False
        idbar = _id_without(ctx, x)
        for k in _assign_values(ctx, e, x):
            eqke = eq_val(Constant(k), e, sp)
            if not eqke <= p1:
                return False
            eqkx = eq_val(Constant(k), Variable(x), sp)
            c = restrict(p["p"].inter(p1), restrict(None, idbar, eqkx), None)
            if not c <= g.inter(q):
                return False
        return True

    add(LawSpec(
        name="rely-guar-assign-stable-pre",
        params=(("x", "var"), ("e", "expr"), ("p", "set"), ("p1", "set"), ("g", "rel"), ("r", "rel"), ("q", "rel")),
        proviso=_assign_stable_pre_proviso,
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]), cl.frame((p["x"],), cl.spec(p["q"]))))),
            cl.assign(p["x"], p["e"], ctx.space),
        )],
    ))

    def _local_assign_proviso(ctx, p):
        sp = ctx.space
        x, e, r, q, g = p["x"], p["e"], p["r"], p["q"], p["g"]
        if not (g.is_reflexive()
                and is_single_reference(e, r)
                and is_invariant_under(e, r)
                and _tolerates(ctx, q, r, p["p"])):
            return False
        idbar = _id_without(ctx, x)
        for k in _assign_values(ctx, e, x):
            eqke = eq_val(Constant(k), e, sp)
            eqkx = eq_val(Constant(k), Variable(x), sp)
            c = restrict(p["p"].inter(eqke), restrict(None, idbar, eqkx), None)
            if not c <= g.inter(q):
                return False
        return True

    add(LawSpec(
        name="local-expr-assign",
        params=(("x", "var"), ("e", "expr"), ("p", "set"), ("g", "rel"), ("r", "rel"), ("q", "rel")),
        proviso=_local_assign_proviso,
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]), cl.frame((p["x"],), cl.spec(p["q"]))))),
            cl.assign(p["x"], p["e"], ctx.space),
        )],
    ))

    def _monotonic_proviso(ctx, p):
        sp = ctx.space
        x, e, r, g, order = p["x"], p["e"], p["r"], p["g"], p["order"]
        if not (g.is_reflexive() and is_stable(p["p"], r)
                and is_invariant_under(Variable(x), r)
                and is_single_reference(e, r)):
            return False
        # the order must be reflexive-transitive in its non-strict form
        vals = values_of(e, sp) | set(sp.domain(x))
        for a in vals:
            for b in vals:
                for c in vals:
                    if order.holds_eq(a, b) and order.holds_eq(b, c) and not order.holds_eq(a, c):
                        return False
        idbar = _id_without(ctx, x)
        decr = sp.rel_where(
            lambda s1, s2: order.holds_eq(
                _safe_eval(e, s1), _safe_eval(e, s2))
        )
        if not restrict(p["p"], idbar, None).union(r) <= decr:
            return False
        for k in _assign_values(ctx, e, x):
            geke = _ge_set(ctx, order, k, e)
            eqkx = eq_val(Constant(k), Variable(x), sp)
            gcheck = restrict(p["p"].inter(geke), restrict(None, idbar, eqkx), None)
            if not gcheck <= g:
                return False
        return True

    def _monotonic_post(ctx, p):
        sp = ctx.space
        order, e, x = p["order"], p["e"], p["x"]
        return sp.rel_where(
            lambda s1, s2: order.holds_eq(_safe_eval(e, s1), s2[x])
            and order.holds_eq(s2[x], _safe_eval(e, s2))
        )

    add(LawSpec(
        name="rely-assign-monotonic",
        params=(("x", "var"), ("e", "expr"), ("p", "set"), ("g", "rel"), ("r", "rel"), ("order", "order")),
        proviso=_monotonic_proviso,
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.conj(cl.guar(p["g"]),
                    cl.seq(cl.assert_(p["p"]),
                           cl.frame((p["x"],), cl.spec(_monotonic_post(ctx, p)))))),
            cl.assign(p["x"], p["e"], ctx.space),
        )],
    ))

    # --- conditionals ---
    add(LawSpec(
        name="guar-conditional-distrib",
        params=(("g", "rel"), ("b", "bexpr"), ("c", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: p["g"].is_reflexive(),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.guar(p["g"]), cl.cond(p["b"], p["c"], p["d"], ctx.space)),
            cl.cond(p["b"], cl.conj(cl.guar(p["g"]), p["c"]),
                    cl.conj(cl.guar(p["g"]), p["d"]), ctx.space),
        )],
    ))

    def _cond_proviso(ctx, p):
        sp = ctx.space
        enc = bools_of(sp)
        b, r, q = p["b"], p["r"], p["q"]
        btrue = eq_val(Constant(enc.true), b, sp)
        if not is_single_reference(b, r):
            return False
        if not _tolerates(ctx, q, r, p["p"]):
            return False
        if not p["p"].inter(btrue) <= p["bt"]:
            return False
        if not p["p"].inter(btrue.complement()) <= p["bf"]:
            return False
        if not p["p"] <= type_of(b, enc.values, sp):
            return False
        pr = restrict(p["p"], r, None)
        return is_stable(p["bt"], pr) and is_stable(p["bf"], pr)

    add(LawSpec(
        name="rely-conditional",
        params=(("b", "bexpr"), ("p", "set"), ("bt", "set"), ("bf", "set"), ("q", "rel"), ("r", "rel")),
        proviso=_cond_proviso,
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.rely(p["r"]), cl.seq(cl.assert_(p["p"]), cl.spec(p["q"]))),
            cl.cond(
                p["b"],
                cl.conj(cl.rely(p["r"]),
                        cl.seq(cl.assert_(p["bt"].inter(p["p"])), cl.spec(p["q"]))),
                cl.conj(cl.rely(p["r"]),
                        cl.seq(cl.assert_(p["bf"].inter(p["p"])), cl.spec(p["q"]))),
                ctx.space,
            ),
        )],
    ))

    # --- recursion (checked on fixed functional instances) ---
    def _wf_variant_proviso(ctx, p):
        order = _order_of(ctx)
        if not is_well_founded(order):
            return False
        sp = ctx.space
        w = Variable(sp.variables[0])
        for k in sorted(values_of(w, sp)):
            gtk = _gt_set(ctx, order, k, w)
            eqk = eq_val(Constant(k), w, sp)
            hyp = sem.refines(
                cl.seq(cl.assert_(gtk), p["s"]), p["c"], sp, ctx.bound
            )
            if hyp:
                cons = sem.refines(
                    cl.seq(cl.assert_(eqk), p["s"]), p["c"], sp, ctx.bound
                )
                if not cons:
                    return False
        return True

    add(LawSpec(
        name="well-founded-variant",
        params=(("s", "cmdA"), ("c", "cmd")),
        proviso=_wf_variant_proviso,
        conclude=lambda ctx, p: [("refines", p["s"], p["c"])],
        note="variant over the first variable under the descending value order",
    ))

    def _recursion_functional(ctx, which, hole):
        sp = ctx.space
        p0 = StateSet(sp, [0])
        if which == "loop":
            b = ctx.bexprs[0] if ctx.bexprs else Constant(bools_of(sp).true)
            body = ctx.cmds[2]
            return cl.cond(b, cl.seq(body, hole), cl.nil(sp), sp)
        return cl.nondet(
            cl.seq(cl.test(p0), ctx.cmds[2], hole),
            cl.test(p0.complement()),
        )

    def _wf_recursion_proviso(ctx, p):
        if not is_well_founded(_order_of(ctx)):
            return False
        sp = ctx.space
        w = Variable(sp.variables[0])
        var = f"rec_{p['f']}"
        nu_f = cl.nu(var, _recursion_functional(ctx, p["f"], cl.fixvar(var)))
        if not sem.refines(cl.seq(cl.assert_(p["p"]), p["s"]), nu_f, sp, ctx.bound):
            return False
        order = _order_of(ctx)
        for k in sorted(values_of(w, sp)):
            eqk = eq_val(Constant(k), w, sp)
            gtk = _gt_set(ctx, order, k, w)
            inner = cl.seq(cl.assert_(gtk.union(p["p"])), p["s"])
            rhs = _recursion_functional(ctx, p["f"], inner)
            if not sem.refines(cl.seq(cl.assert_(eqk), p["s"]), rhs, sp, ctx.bound):
                return False
        return True

    add(LawSpec(
        name="well-founded-recursion",
        params=(("f", "recfun"), ("s", "cmdA"), ("p", "set")),
        proviso=_wf_recursion_proviso,
        conclude=lambda ctx, p: [(
            "refines",
            p["s"],
            cl.nu(f"rec_{p['f']}",
                  _recursion_functional(ctx, p["f"], cl.fixvar(f"rec_{p['f']}"))),
        )],
        note="instance-checked on the while-loop and test-guarded functionals",
    ))

    # --- while loops ---
    def _loop_proviso(ctx, p, early=True):
        sp = ctx.space
        enc = bools_of(sp)
        order = p["order"]
        if not is_well_founded(order):
            return False
        b, r, g, q = p["b"], p["r"], p["g"], p["q"]
        w = Variable(sp.variables[0])
        if not g.is_reflexive():
            return False
        if not is_single_reference(b, r):
            return False
        if not p["p"] <= type_of(b, enc.values, sp):
            return False
        if not _tolerates(ctx, restrict(None, rtc(q), p["p"]), r, p["p"]):
            return False
        pr = restrict(p["p"], r, None)
        stable_sets = [p["bt"], p["bf"]] + ([p["bx"]] if early else [])
        if not all(is_stable(s, pr) for s in stable_sets):
            return False
        deceq = decreases_rel(w, order, False, sp)
        if not restrict(p["p"], r, None) <= deceq:
            return False
        btrue = eq_val(Constant(enc.true), b, sp)
        if not p["p"].inter(btrue) <= p["bt"]:
            return False
        if not p["p"].inter(btrue.complement()) <= p["bf"]:
            return False
        if early and not p["p"].inter(p["bx"]) <= btrue.complement():
            return False
        # the per-k body obligation
        for k in sorted(values_of(w, sp) | order.carrier()):
            gek = _ge_set(ctx, order, k, w)
            gtk = _gt_set(ctx, order, k, w)
            tail = gtk.union(p["bx"]) if early else gtk
            lhs = cl.conj(cl.guar(g), cl.conj(cl.rely(r), cl.seq(
                cl.assert_(p["bt"].inter(p["p"]).inter(gek)),
                cl.spec(restrict(None, rtc(q), p["p"].inter(tail))),
            )))
            if not sem.refines(lhs, p["c"], sp, ctx.bound):
                return False
        return True

    add(LawSpec(
        name="rely-loop-early",
        params=(("b", "bexpr"), ("c", "cmd"), ("p", "set"), ("bt", "set"), ("bf", "set"),
                ("bx", "set"), ("q", "rel"), ("r", "rel"), ("g", "rel"), ("order", "order")),
        proviso=lambda ctx, p: _loop_proviso(ctx, p, early=True),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.guar(p["g"]), cl.conj(cl.rely(p["r"]), cl.seq(
                cl.assert_(p["p"]),
                cl.spec(restrict(None, rtc(p["q"]), p["p"].inter(p["bf"])))))),
            cl.while_loop(p["b"], p["c"], ctx.space),
        )],
    ))
    add(LawSpec(
        name="rely-loop",
        params=(("b", "bexpr"), ("c", "cmd"), ("p", "set"), ("bt", "set"), ("bf", "set"),
                ("q", "rel"), ("r", "rel"), ("g", "rel"), ("order", "order")),
        proviso=lambda ctx, p: _loop_proviso(ctx, dict(p, bx=ctx.space.empty_set), early=True),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.guar(p["g"]), cl.conj(cl.rely(p["r"]), cl.seq(
                cl.assert_(p["p"]),
                cl.spec(restrict(
                    None,
                    decreases_rel(Variable(ctx.space.variables[0]), p["order"], False, ctx.space)
                    .inter(rtc(p["q"])),
                    p["p"].inter(p["bf"])))))),
            cl.while_loop(p["b"], p["c"], ctx.space),
        )],
    ))

    # --- appendix support lemmas (F-K) ---
    add(LawSpec(
        name="atomic-test-commute",
        params=(("r", "rel"), ("p0", "set"), ("p1", "set")),
        proviso=lambda ctx, p: image(p["r"], p["p0"]) <= p["p1"],
        conclude=lambda ctx, p: [
            ("refines",
             cl.seq(cl.pgm(p["r"]), cl.test(p["p1"])),
             cl.seq(cl.test(p["p0"]), cl.pgm(p["r"]))),
            ("refines",
             cl.seq(cl.env(p["r"]), cl.test(p["p1"])),
             cl.seq(cl.test(p["p0"]), cl.env(p["r"]))),
        ],
    ))
    add(LawSpec(
        name="nondet-test-commute",
        params=(("c", "cmd"), ("d", "cmd"), ("p0", "set"), ("p1", "set")),
        proviso=lambda ctx, p: sem.refines(
            cl.seq(p["c"], cl.test(p["p1"])), cl.seq(cl.test(p["p0"]), p["c"]),
            ctx.space, ctx.bound)
        and sem.refines(
            cl.seq(p["d"], cl.test(p["p1"])), cl.seq(cl.test(p["p0"]), p["d"]),
            ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines",
            cl.seq(cl.nondet(p["c"], p["d"]), cl.test(p["p1"])),
            cl.seq(cl.test(p["p0"]), cl.nondet(p["c"], p["d"])),
        )],
    ))
    add(LawSpec(
        name="iteration-test-commute",
        params=(("c", "cmd"), ("p", "set")),
        proviso=lambda ctx, p: sem.refines(
            cl.seq(p["c"], cl.test(p["p"])), cl.seq(cl.test(p["p"]), p["c"]),
            ctx.space, ctx.bound),
        conclude=lambda ctx, p: [
            ("refines",
             cl.seq(cl.om(p["c"]), cl.test(p["p"])),
             cl.seq(cl.test(p["p"]), cl.om(p["c"]))),
            ("refines",
             cl.seq(cl.fin(p["c"]), cl.test(p["p"])),
             cl.seq(cl.test(p["p"]), cl.fin(p["c"]))),
        ],
    ))
    add(LawSpec(
        name="sync-test-assert",
        params=(("p", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.nil(ctx.space), cl.assert_(p["p"])),
            cl.assert_(p["p"]),
        )],
    ))
    add(LawSpec(
        name="test-suffix-assert",
        params=(("c", "cmd"), ("d", "cmd"), ("p", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], cl.seq(p["d"], cl.test(p["p"]))),
            cl.seq(ctx.sync_cmd(p["o"], p["c"], cl.seq(p["d"], cl.test(p["p"]))),
                   cl.assert_(p["p"])),
        )],
    ))
    add(LawSpec(
        name="test-suffix-test",
        params=(("c", "cmd"), ("d", "cmd"), ("p", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], cl.seq(p["d"], cl.test(p["p"]))),
            cl.seq(ctx.sync_cmd(p["o"], p["c"], cl.seq(p["d"], cl.test(p["p"]))),
                   cl.test(p["p"])),
        )],
    ))
    add(LawSpec(
        name="test-suffix-interchange",
        params=(("c", "cmd"), ("d", "cmd"), ("p", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], cl.seq(p["d"], cl.test(p["p"]))),
            cl.seq(ctx.sync_cmd(p["o"], p["c"], p["d"]), cl.test(p["p"])),
        )],
    ))
    add(LawSpec(
        name="assert-distrib",
        params=(("c", "cmd"), ("d", "cmd"), ("p", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.assert_(p["p"]), ctx.sync_cmd(p["o"], p["c"], p["d"])),
            ctx.sync_cmd(p["o"], p["c"], cl.seq(cl.assert_(p["p"]), p["d"])),
        )],
    ))
    add(LawSpec(
        name="Nondet-test-set",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.nondet(*(cl.test(StateSet(ctx.space, (i,))) for i in p["p"]))
            if len(p["p"]) else cl.magic(ctx.space),
            cl.test(p["p"]),
        )],
    ))
    add(LawSpec(
        name="test-restricts-Nondet",
        params=(("p", "set"), ("c", "cmd")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.test(p["p"]),
                   cl.nondet(*(cl.seq(cl.test(StateSet(ctx.space, (i,))), p["c"])
                               for i in range(ctx.space.state_count)))),
            cl.nondet(*(cl.seq(cl.test(StateSet(ctx.space, (i,))), p["c"])
                        for i in p["p"]))
            if len(p["p"]) else cl.magic(ctx.space),
        )],
    ))

    return laws


def _safe_eval(e, s):
    from .exprs import eval_expr

    return eval_expr(e, s)


# -- the appendix axiom suite ---------------------------------------------------


def axiom_specs() -> list[LawSpec]:
    """Primitive-level identities: distribution, test algebra, atomic-step
    algebra, iteration unfolding/induction, and synchronisation axioms."""
    axs: list[LawSpec] = []
    add = axs.append

    # distribution for sequential composition
    add(LawSpec(
        name="Nondet-seq-distrib-right",
        params=(("c0", "cmdA"), ("c1", "cmdA"), ("d", "cmd")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.nondet(p["c0"], p["c1"]), p["d"]),
            cl.nondet(cl.seq(p["c0"], p["d"]), cl.seq(p["c1"], p["d"])),
        )],
    ))
    add(LawSpec(
        name="magic-seq-right",
        params=(("d", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.seq(cl.magic(ctx.space), p["d"]), cl.magic(ctx.space),
        )],
        note="the empty choice distributes: magic ; d = magic",
    ))
    add(LawSpec(
        name="Nondet-seq-distrib-left",
        params=(("c", "cmdA"), ("d0", "cmdA"), ("d1", "cmdA")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(p["c"], cl.nondet(p["d0"], p["d1"])),
            cl.nondet(cl.seq(p["c"], p["d0"]), cl.seq(p["c"], p["d1"])),
        )],
    ))
    add(LawSpec(
        name="refine-to-choice",
        params=(("c0", "cmd"), ("c1", "cmd"), ("d0", "cmd"), ("d1", "cmd")),
        proviso=lambda ctx, p: all(
            any(sem.refines(c, d, ctx.space, ctx.bound) for c in (p["c0"], p["c1"]))
            for d in (p["d0"], p["d1"])
        ),
        conclude=lambda ctx, p: [(
            "refines", cl.nondet(p["c0"], p["c1"]), cl.nondet(p["d0"], p["d1"]),
        )],
    ))
    add(LawSpec(
        name="abort-seq-annihilate",
        params=(("c", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.seq(cl.abort(), p["c"]), cl.abort(),
        )],
        note="abort is a left annihilator of sequential composition",
    ))

    # test algebra
    add(LawSpec(
        name="Nondet-test",
        params=(("p1", "set"), ("p2", "set")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.nondet(cl.test(p["p1"]), cl.test(p["p2"])),
             cl.test(p["p1"].union(p["p2"]))),
            ("equals", cl.magic(ctx.space), cl.test(ctx.space.empty_set)),
        ],
    ))
    add(LawSpec(
        name="conjoin-test-test",
        params=(("p1", "set"), ("p2", "set")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            Meet(cl.test(p["p1"]), cl.test(p["p2"])),
            cl.test(p["p1"].inter(p["p2"])),
        )],
    ))
    add(LawSpec(
        name="negate-test",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.nondet(cl.test(p["p"]), cl.test(p["p"].complement())),
             cl.nil(ctx.space)),
            ("equals",
             Meet(cl.test(p["p"]), cl.test(p["p"].complement())),
             cl.magic(ctx.space)),
        ],
        note="the complement within the boolean algebra of tests",
    ))
    add(LawSpec(
        name="seq-test-test",
        params=(("p1", "set"), ("p2", "set")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.test(p["p1"]), cl.test(p["p2"])),
            cl.test(p["p1"].inter(p["p2"])),
        )],
    ))
    add(LawSpec(
        name="test-strengthen",
        params=(("p1", "set"), ("p2", "set")),
        proviso=lambda ctx, p: p["p2"] <= p["p1"],
        conclude=lambda ctx, p: [("refines", cl.test(p["p1"]), cl.test(p["p2"]))],
    ))
    add(LawSpec(
        name="test-intro",
        params=(("p", "set"),),
        conclude=lambda ctx, p: [("refines", cl.nil(ctx.space), cl.test(p["p"]))],
    ))
    add(LawSpec(
        name="assert-definition",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.assert_(p["p"]),
            cl.nondet(cl.test(p["p"]),
                      cl.seq(cl.test(p["p"].complement()), cl.abort())),
        )],
        note="the two assertion forms coincide",
    ))
    add(LawSpec(
        name="assert-weaken",
        params=(("p1", "set"), ("p2", "set")),
        proviso=lambda ctx, p: p["p1"] <= p["p2"],
        conclude=lambda ctx, p: [("refines", cl.assert_(p["p1"]), cl.assert_(p["p2"]))],
    ))
    add(LawSpec(
        name="assert-sconj",
        params=(("p1", "set"), ("p2", "set")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            Meet(cl.assert_(p["p1"]), cl.assert_(p["p2"])),
            cl.assert_(p["p1"].union(p["p2"])),
        )],
    ))
    add(LawSpec(
        name="assert-remove",
        params=(("p", "set"),),
        conclude=lambda ctx, p: [("refines", cl.assert_(p["p"]), cl.nil(ctx.space))],
    ))
    add(LawSpec(
        name="Galois-assert-test-lr",
        params=(("p", "set"), ("c", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            cl.seq(cl.assert_(p["p"]), p["c"]), p["d"], ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines", p["c"], cl.seq(cl.test(p["p"]), p["d"]),
        )],
    ))
    add(LawSpec(
        name="Galois-assert-test-rl",
        params=(("p", "set"), ("c", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            p["c"], cl.seq(cl.test(p["p"]), p["d"]), ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines", cl.seq(cl.assert_(p["p"]), p["c"]), p["d"],
        )],
    ))
    add(LawSpec(
        name="seq-assert-assert",
        params=(("p1", "set"), ("p2", "set")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.assert_(p["p1"]), cl.assert_(p["p2"])),
            cl.assert_(p["p1"].inter(p["p2"])),
        )],
    ))
    add(LawSpec(
        name="seq-test-assert",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.seq(cl.test(p["p"]), cl.assert_(p["p"])), cl.test(p["p"]),
        )],
    ))
    add(LawSpec(
        name="seq-assert-test",
        params=(("p", "set"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.seq(cl.assert_(p["p"]), cl.test(p["p"])), cl.assert_(p["p"]),
        )],
    ))

    # atomic step commands
    add(LawSpec(
        name="nondet-pgm-pgm",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.nondet(cl.pgm(p["r1"]), cl.pgm(p["r2"])),
            cl.pgm(p["r1"].union(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="nondet-env-env",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.nondet(cl.env(p["r1"]), cl.env(p["r2"])),
            cl.env(p["r1"].union(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="seq-test-pgm",
        params=(("p", "set"), ("r", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.test(p["p"]), cl.pgm(p["r"])),
            cl.pgm(restrict(p["p"], p["r"], None)),
        )],
    ))
    add(LawSpec(
        name="seq-test-env",
        params=(("p", "set"), ("r", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.test(p["p"]), cl.env(p["r"])),
            cl.env(restrict(p["p"], p["r"], None)),
        )],
    ))
    add(LawSpec(
        name="seq-pgm-test",
        params=(("p", "set"), ("r", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.pgm(restrict(None, p["r"], p["p"])), cl.test(p["p"])),
            cl.pgm(restrict(None, p["r"], p["p"])),
        )],
    ))
    add(LawSpec(
        name="seq-env-test",
        params=(("p", "set"), ("r", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.env(restrict(None, p["r"], p["p"])), cl.test(p["p"])),
            cl.env(restrict(None, p["r"], p["p"])),
        )],
    ))
    add(LawSpec(
        name="negate-atomic",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [
            ("equals",
             cl.nondet(cl.pgm(p["r1"]), cl.env(p["r2"]),
                       cl.pgm(p["r1"].complement()), cl.env(p["r2"].complement())),
             cl.nondet(cl.pgm(ctx.space.universal_rel), cl.env(ctx.space.universal_rel))),
            ("equals",
             Meet(cl.nondet(cl.pgm(p["r1"]), cl.env(p["r2"])),
                  cl.nondet(cl.pgm(p["r1"].complement()), cl.env(p["r2"].complement()))),
             cl.magic(ctx.space)),
        ],
        note="complement within the boolean algebra of atomic step commands",
    ))
    add(LawSpec(
        name="pgm-refine",
        params=(("r1", "rel"), ("r2", "rel")),
        proviso=lambda ctx, p: p["r2"] <= p["r1"],
        conclude=lambda ctx, p: [("refines", cl.pgm(p["r1"]), cl.pgm(p["r2"]))],
    ))
    add(LawSpec(
        name="env-refine",
        params=(("r1", "rel"), ("r2", "rel")),
        proviso=lambda ctx, p: p["r2"] <= p["r1"],
        conclude=lambda ctx, p: [("refines", cl.env(p["r1"]), cl.env(p["r2"]))],
    ))
    add(LawSpec(
        name="pgm-injective",
        params=(("r1", "rel"), ("r2", "rel")),
        proviso=lambda ctx, p: p["r1"] != p["r2"],
        conclude=lambda ctx, p: [("differs", cl.pgm(p["r1"]), cl.pgm(p["r2"]))],
        note="distinct relations map to distinct atomic step commands",
    ))
    add(LawSpec(
        name="env-injective",
        params=(("r1", "rel"), ("r2", "rel")),
        proviso=lambda ctx, p: p["r1"] != p["r2"],
        conclude=lambda ctx, p: [("differs", cl.env(p["r1"]), cl.env(p["r2"]))],
    ))

    # iterations
    add(LawSpec(
        name="fiter-unfold-left",
        params=(("c", "cmd"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.fin(p["c"]),
            cl.nondet(cl.nil(ctx.space), cl.seq(p["c"], cl.fin(p["c"]))),
        )],
    ))
    add(LawSpec(
        name="fiter-unfold-right",
        params=(("c", "cmd"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.fin(p["c"]),
            cl.nondet(cl.nil(ctx.space), cl.seq(cl.fin(p["c"]), p["c"])),
        )],
    ))
    add(LawSpec(
        name="iter-unfold",
        params=(("c", "cmd"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.om(p["c"]),
            cl.nondet(cl.nil(ctx.space), cl.seq(p["c"], cl.om(p["c"]))),
        )],
    ))
    add(LawSpec(
        name="isolation",
        params=(("c", "cmd"), ("d", "cmd")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.om(p["c"]), p["d"]),
            cl.nondet(cl.seq(cl.fin(p["c"]), p["d"]), cl.inf(p["c"])),
        )],
    ))
    add(LawSpec(
        name="fiter-induction-left",
        params=(("x", "cmdA"), ("c", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            p["x"], cl.nondet(p["d"], cl.seq(p["c"], p["x"])), ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines", p["x"], cl.seq(cl.fin(p["c"]), p["d"]),
        )],
    ))
    add(LawSpec(
        name="fiter-induction-right",
        params=(("x", "cmdA"), ("c", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            p["x"], cl.nondet(p["d"], cl.seq(p["x"], p["c"])), ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines", p["x"], cl.seq(p["d"], cl.fin(p["c"])),
        )],
    ))
    add(LawSpec(
        name="iter-induction",
        params=(("x", "cmdA"), ("c", "cmd"), ("d", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            cl.nondet(p["d"], cl.seq(p["c"], p["x"])), p["x"], ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines", cl.seq(cl.om(p["c"]), p["d"]), p["x"],
        )],
    ))
    add(LawSpec(
        name="fiter-split-d",
        params=(("c", "cmd"), ("d", "cmd")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.fin(cl.nondet(p["c"], p["d"])),
            cl.seq(cl.fin(cl.nondet(p["c"], p["d"])), cl.fin(p["d"])),
        )],
    ))

    # synchronisation operators (par and weak conjunction)
    add(LawSpec(
        name="par-pgm-env",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.par(cl.pgm(p["r1"]), cl.env(p["r2"])),
            cl.pgm(p["r1"].inter(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="par-env-env",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.par(cl.env(p["r1"]), cl.env(p["r2"])),
            cl.env(p["r1"].inter(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="par-pgm-pgm",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.par(cl.pgm(p["r1"]), cl.pgm(p["r2"])),
            cl.magic(ctx.space),
        )],
    ))
    add(LawSpec(
        name="par-abort",
        params=(("c", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.par(p["c"], cl.abort()), cl.abort(),
        )],
    ))
    add(LawSpec(
        name="conj-pgm-pgm",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.pgm(p["r1"]), cl.pgm(p["r2"])),
            cl.pgm(p["r1"].inter(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="conj-env-env",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.env(p["r1"]), cl.env(p["r2"])),
            cl.env(p["r1"].inter(p["r2"])),
        )],
    ))
    add(LawSpec(
        name="conj-pgm-env",
        params=(("r1", "rel"), ("r2", "rel")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.conj(cl.pgm(p["r1"]), cl.env(p["r2"])),
            cl.magic(ctx.space),
        )],
    ))
    add(LawSpec(
        name="conj-abort",
        params=(("c", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.conj(p["c"], cl.abort()), cl.abort(),
        )],
    ))
    add(LawSpec(
        name="par-skip",
        params=(("c", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.par(p["c"], cl.skip(ctx.space)), p["c"],
        )],
    ))
    add(LawSpec(
        name="conjoin-chaos",
        params=(("c", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.conj(p["c"], cl.chaos(ctx.space)), p["c"],
        )],
    ))
    add(LawSpec(
        name="seq-associative",
        params=(("c", "cmdA"), ("d", "cmdA"), ("e", "cmdA")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            cl.seq(cl.seq(p["c"], p["d"]), p["e"]),
            cl.seq(p["c"], cl.seq(p["d"], p["e"])),
        )],
    ))
    add(LawSpec(
        name="sync-commutative",
        params=(("c", "cmdA"), ("d", "cmdA"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], p["d"]),
            ctx.sync_cmd(p["o"], p["d"], p["c"]),
        )],
    ))
    add(LawSpec(
        name="sync-associative",
        params=(("c", "cmd"), ("d", "cmd"), ("e", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], ctx.sync_cmd(p["o"], p["c"], p["d"]), p["e"]),
            ctx.sync_cmd(p["o"], p["c"], ctx.sync_cmd(p["o"], p["d"], p["e"])),
        )],
    ))
    add(LawSpec(
        name="conj-idempotent",
        params=(("c", "cmdA"),),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals", cl.conj(p["c"], p["c"]), p["c"],
        )],
    ))
    add(LawSpec(
        name="sync-atomic-atomic",
        params=(("a1", "atom"), ("a2", "atom"), ("c1", "cmd"), ("c2", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.seq(p["a1"], p["c1"]), cl.seq(p["a2"], p["c2"])),
            cl.seq(ctx.sync_cmd(p["o"], p["a1"], p["a2"]),
                   ctx.sync_cmd(p["o"], p["c1"], p["c2"])),
        )],
    ))
    add(LawSpec(
        name="sync-atomic-nil",
        params=(("a", "atom"), ("c", "cmdA"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.seq(p["a"], p["c"]), cl.nil(ctx.space)),
            cl.magic(ctx.space),
        )],
    ))
    add(LawSpec(
        name="sync-test-test",
        params=(("p1", "set"), ("p2", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.test(p["p1"]), cl.test(p["p2"])),
            Meet(cl.test(p["p1"]), cl.test(p["p2"])),
        )],
    ))
    add(LawSpec(
        name="sync-test-distrib",
        params=(("p", "set"), ("c1", "cmd"), ("c2", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.seq(cl.test(p["p"]), p["c1"]),
                         cl.seq(cl.test(p["p"]), p["c2"])),
            cl.seq(cl.test(p["p"]), ctx.sync_cmd(p["o"], p["c1"], p["c2"])),
        )],
    ))
    add(LawSpec(
        name="Nondet-sync-distrib",
        params=(("c0", "cmdA"), ("c1", "cmdA"), ("d", "cmdA"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.nondet(p["c0"], p["c1"]), p["d"]),
            cl.nondet(ctx.sync_cmd(p["o"], p["c0"], p["d"]),
                      ctx.sync_cmd(p["o"], p["c1"], p["d"])),
        )],
    ))
    add(LawSpec(
        name="sync-iter-iter",
        params=(("a1", "atom"), ("a2", "atom"), ("c1", "cmd"), ("c2", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.seq(cl.om(p["a1"]), p["c1"]),
                         cl.seq(cl.om(p["a2"]), p["c2"])),
            cl.seq(
                cl.om(ctx.sync_cmd(p["o"], p["a1"], p["a2"])),
                cl.nondet(
                    ctx.sync_cmd(p["o"], cl.seq(cl.om(p["a1"]), p["c1"]), p["c2"]),
                    ctx.sync_cmd(p["o"], p["c1"], cl.seq(cl.om(p["a2"]), p["c2"])),
                ),
            ),
        )],
    ))
    add(LawSpec(
        name="sync-iter-fiter",
        params=(("a1", "atom"), ("a2", "atom"), ("c1", "cmd"), ("c2", "cmd"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.seq(cl.om(p["a1"]), p["c1"]),
                         cl.seq(cl.fin(p["a2"]), p["c2"])),
            cl.seq(
                cl.fin(ctx.sync_cmd(p["o"], p["a1"], p["a2"])),
                cl.nondet(
                    ctx.sync_cmd(p["o"], cl.seq(cl.om(p["a1"]), p["c1"]), p["c2"]),
                    ctx.sync_cmd(p["o"], p["c1"], cl.seq(cl.fin(p["a2"]), p["c2"])),
                ),
            ),
        )],
    ))
    add(LawSpec(
        name="test-omega",
        params=(("a", "atom"), ("c", "cmd"), ("p", "set"), ("o", "sync")),
        mode="equals",
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], cl.seq(cl.om(p["a"]), p["c"]), cl.test(p["p"])),
            ctx.sync_cmd(p["o"], p["c"], cl.test(p["p"])),
        )],
    ))
    add(LawSpec(
        name="test-command-sync-command",
        params=(("c", "cmdA"), ("d", "cmdA"), ("p", "set"), ("o", "sync")),
        mode="equals",
        proviso=lambda ctx, p: sem.refines(
            cl.nondet(
                cl.nil(ctx.space),
                cl.seq(cl.nondet(cl.pgm(ctx.space.universal_rel),
                                 cl.env(ctx.space.universal_rel)), cl.abort()),
            ),
            p["c"], ctx.space, ctx.bound,
        ),
        conclude=lambda ctx, p: [(
            "equals",
            ctx.sync_cmd(p["o"], p["c"], cl.seq(cl.test(p["p"]), p["d"])),
            cl.seq(cl.test(p["p"]), ctx.sync_cmd(p["o"], p["c"], p["d"])),
        )],
    ))
    add(LawSpec(
        name="sync-seq-interchange",
        params=(("c0", "cmd"), ("d0", "cmd"), ("c1", "cmd"), ("d1", "cmd"), ("o", "sync")),
        conclude=lambda ctx, p: [(
            "refines",
            ctx.sync_cmd(p["o"], cl.seq(p["c0"], p["d0"]), cl.seq(p["c1"], p["d1"])),
            cl.seq(ctx.sync_cmd(p["o"], p["c0"], p["c1"]),
                   ctx.sync_cmd(p["o"], p["d0"], p["d1"])),
        )],
    ))
    add(LawSpec(
        name="conj-par-interchange",
        params=(("c0", "cmd"), ("d0", "cmd"), ("c1", "cmd"), ("d1", "cmd")),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(cl.par(p["c0"], p["d0"]), cl.par(p["c1"], p["d1"])),
            cl.par(cl.conj(p["c0"], p["c1"]), cl.conj(p["d0"], p["d1"])),
        )],
    ))
    add(LawSpec(
        name="conj-seq-distrib",
        params=(("c", "cmdA"), ("d0", "cmd"), ("d1", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            p["c"], cl.seq(p["c"], p["c"]), ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(p["c"], cl.seq(p["d0"], p["d1"])),
            cl.seq(cl.conj(p["c"], p["d0"]), cl.conj(p["c"], p["d1"])),
        )],
    ))
    add(LawSpec(
        name="conj-par-distrib",
        params=(("c", "cmdA"), ("d0", "cmd"), ("d1", "cmd")),
        proviso=lambda ctx, p: sem.refines(
            p["c"], cl.par(p["c"], p["c"]), ctx.space, ctx.bound),
        conclude=lambda ctx, p: [(
            "refines",
            cl.conj(p["c"], cl.par(p["d0"], p["d1"])),
            cl.par(cl.conj(p["c"], p["d0"]), cl.conj(p["c"], p["d1"])),
        )],
    ))
    return axs


# -- negative controls ----------------------------------------------------------


def negative_controls(ctx: CheckContext | None = None) -> list[LawSpec]:
    """Proviso-dropped mutants of registry laws; each must fail on at least one
    pinned instance, validating that the harness can actually find violations."""
    ctx = ctx or CheckContext()
    sp = ctx.space
    base = registry()
    by_name = {law.name: law for law in base}
    controls: list[LawSpec] = []
    n = sp.state_count
    full = sp.full_set
    empty = sp.empty_set
    rid = sp.identity_rel
    runiv = sp.universal_rel
    rempty = sp.empty_rel
    flip = Rel(sp, [(0, n - 1), (n - 1, 0)])
    p_lo = StateSet(sp, [0])
    p_hi = StateSet(sp, [n - 1])
    name0 = sp.variables[0]
    x = Variable(name0)

    def mutant(base_name, dropped, pinned, proviso=None):
        law = by_name[base_name]
        controls.append(LawSpec(
            name=f"{base_name}[drop {dropped}]",
            params=law.params,
            conclude=law.conclude,
            proviso=proviso,
            mode=law.mode,
            pinned=pinned,
            expect_fail=True,
            note=f"negative control: {dropped} proviso removed",
        ))

    mutant(
        "guar-strengthen", "containment",
        [{"g0": rid, "g1": runiv}],
    )
    mutant(
        "spec-strengthen", "containment",
        [{"q1": rempty, "q2": runiv}],
    )
    mutant(
        "guar-opt", "reflexivity",
        [{"g": rempty, "q": rid}],
    )
    mutant(
        "rely-idle-stable", "stability",
        [{"p": p_lo, "r": Rel(sp, [(0, n - 1)])}],
    )
    mutant(
        "rely-conditional", "b_t stability",
        [{
            "b": x, "p": full,
            "bt": p_hi, "bf": full,
            "q": rempty, "r": flip,
        }],
    )
    mutant(
        "spec-seq-introduce", "containment",
        [{"p1": full, "p2": full, "q": rid, "q1": runiv, "q2": runiv, "X": ()}],
    )
    cyclic = ValueOrder([(v, v) for v in sp.domain(name0)])
    mutant(
        "rely-loop-early", "well-foundedness",
        [{
            "b": Constant(bools_of(sp).true), "c": cl.nil(sp),
            "p": full, "bt": full, "bf": full, "bx": empty,
            "q": runiv, "r": rid, "g": runiv, "order": cyclic,
        }],
        proviso=lambda c, p: _loop_proviso_no_wf(c, p),
    )
    xminusx = binary("-", lambda a, b: a - b, sp.domain(name0), sp.domain(name0), x, x)
    mutant(
        "rely-eval", "single-reference",
        [{"e": xminusx, "r": flip, "p": full, "q": rempty, "k": 1}],
        proviso=lambda c, p: _tolerates(c, p["q"], p["r"], p["p"])
        and restrict(
            p["p"].inter(eq_val(Constant(p["k"]), p["e"], c.space)),
            c.space.identity_rel, None,
        ) <= p["q"],
    )
    mutant(
        "tolerate-interference", "tolerance",
        [{"p": full, "q": rid, "r": runiv}],
    )
    mutant(
        "atomic-spec-strengthen-post", "containment",
        [{"p": full, "q1": rempty, "q2": runiv}],
    )
    return controls


def _loop_proviso_no_wf(ctx, p):
    """The rely-loop-early proviso with the well-foundedness requirement elided."""
    sp = ctx.space
    enc = bools_of(sp)
    order = p["order"]
    b, r, g, q = p["b"], p["r"], p["g"], p["q"]
    w = Variable(sp.variables[0])
    if not g.is_reflexive():
        return False
    if not is_single_reference(b, r):
        return False
    if not p["p"] <= type_of(b, enc.values, sp):
        return False
    if not _tolerates(ctx, restrict(None, rtc(q), p["p"]), r, p["p"]):
        return False
    pr = restrict(p["p"], r, None)
    if not all(is_stable(s, pr) for s in (p["bt"], p["bf"], p["bx"])):
        return False
    deceq = decreases_rel(w, order, False, sp)
    if not restrict(p["p"], r, None) <= deceq:
        return False
    btrue = eq_val(Constant(enc.true), b, sp)
    if not p["p"].inter(btrue) <= p["bt"]:
        return False
    if not p["p"].inter(btrue.complement()) <= p["bf"]:
        return False
    if not p["p"].inter(p["bx"]) <= btrue.complement():
        return False
    for k in sorted(values_of(w, sp) | order.carrier()):
        gek = _ge_set(ctx, order, k, w)
        gtk = _gt_set(ctx, order, k, w)
        tail = gtk.union(p["bx"])
        lhs = cl.conj(cl.guar(g), cl.conj(cl.rely(r), cl.seq(
            cl.assert_(p["bt"].inter(p["p"]).inter(gek)),
            cl.spec(restrict(None, rtc(q), p["p"].inter(tail))),
        )))
        if not sem.refines(lhs, p["c"], sp, ctx.bound):
            return False
    return True
