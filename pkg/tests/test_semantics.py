"""Bounded trace semantics: saturation, denotation, refinement, witnesses."""


import pytest

from rgcalc import cmdlang as cl
from rgcalc import semantics as sem
from rgcalc.errors import RgError, UnboundFixpointError
from rgcalc.exprs import Constant, Variable, binary
from rgcalc.relspace import Rel, StateSet, StateSpace
from rgcalc.semantics import ABORT, ENV, INC, PGM, TERM, Behavior, Step

K = 3


def beh(space, i0, steps, status):
    st = space.states
    return Behavior(
        st[i0],
        tuple(Step(lab, st[post]) for lab, post in steps),
        status,
    )


# ---------------------------------------------------------------- saturation


def test_saturate_empty_gives_inc_seeds(two_state):
    bs = sem.saturate([], two_state, K)
    got = sorted(b.render() for b in bs.behaviors())
    assert got == ["x=0 [INC]", "x=1 [INC]"]


def test_saturate_abort_closes_to_universe(two_state):
    bs = sem.saturate([beh(two_state, 0, [], ABORT)], two_state, 1)
    # every one-step behaviour from x=0, with every label and status
    for lab in (PGM, ENV):
        for post in (0, 1):
            for status in (TERM, ABORT, INC):
                assert bs.contains(beh(two_state, 0, [(lab, post)], status))
    assert bs.contains(beh(two_state, 0, [], TERM))
    assert bs.contains(beh(two_state, 0, [], INC))
    assert not bs.contains(beh(two_state, 1, [], TERM))


def test_saturate_prefix_closure(two_state):
    b2 = beh(two_state, 0, [(PGM, 1), (ENV, 0)], TERM)
    bs = sem.saturate([b2], two_state, K)
    assert bs.contains(beh(two_state, 0, [(PGM, 1)], INC))
    assert bs.contains(beh(two_state, 0, [(PGM, 1), (ENV, 0)], INC))
    assert not bs.contains(beh(two_state, 0, [(PGM, 1)], TERM))


def test_saturate_rejects_overlong(two_state):
    long = beh(two_state, 0, [(PGM, 0)] * 4, TERM)
    with pytest.raises(RgError):
        sem.saturate([long], two_state, K)


def test_saturate_is_closure_operator(two_state):
    raw = [
        beh(two_state, 0, [(PGM, 1)], TERM),
        beh(two_state, 1, [], ABORT),
    ]
    once = sem.saturate(raw, two_state, 2)
    again = sem.saturate(list(once.behaviors()), two_state, 2)
    assert once == again  # idempotent
    for b in raw:
        assert once.contains(b)  # extensive
    bigger = raw + [beh(two_state, 0, [(ENV, 0)], TERM)]
    assert sem.saturate(bigger, two_state, 2).includes(once)  # monotone


# ---------------------------------------------------------------- primitives


def test_denote_primitives(two_state):
    r = Rel(two_state, [(0, 1)])
    d = sem.denote(cl.pgm(r), two_state, K)
    assert d.contains(beh(two_state, 0, [(PGM, 1)], TERM))
    assert not d.contains(beh(two_state, 0, [(ENV, 1)], TERM))
    assert not d.contains(beh(two_state, 1, [], TERM))
    t = sem.denote(cl.test(StateSet(two_state, [1])), two_state, K)
    assert t.contains(beh(two_state, 1, [], TERM))
    assert not t.contains(beh(two_state, 0, [], TERM))


def test_denote_unbound_fixvar(two_state):
    with pytest.raises(UnboundFixpointError):
        sem.denote(cl.fixvar("x"), two_state, K)


def test_program_parallel_environment_example():
    # a step that does not increase i, against an environment that does not
    # decrease it, synchronises to a step that leaves i unchanged
    sp = StateSpace([("i", (0, 1, 2))])
    ge = sp.rel_where(lambda a, b: a["i"] >= b["i"])
    le = sp.rel_where(lambda a, b: a["i"] <= b["i"])
    lhs = cl.par(cl.pgm(ge), cl.env(le))
    assert sem.equivalent(lhs, cl.pgm(sp.identity_rel), sp, K)


def test_while_true_nil_is_abort(two_state):
    loop = cl.while_loop(Constant(1), cl.nil(two_state), two_state)
    assert sem.equivalent(loop, cl.abort(), two_state, K)


def test_sync_with_nil_is_magic(two_state):
    r = Rel(two_state, [(0, 1), (1, 0)])
    c = cl.seq(cl.pgm(r), cl.env(two_state.universal_rel))
    for combine in (cl.par, cl.conj):
        lhs = combine(cl.seq(cl.pgm(r), c), cl.nil(two_state))
        assert sem.equivalent(lhs, cl.magic(two_state), two_state, K)


# ---------------------------------------------------------------- refinement


def test_abort_refines_everything(two_state, rels):
    pool = [cl.nil(two_state), cl.chaos(two_state), cl.pgm(rels[5]), cl.abort()]
    for c in pool:
        assert sem.refines(cl.abort(), c, two_state, K)
        assert sem.refines(c, cl.magic(two_state), two_state, K)


def test_pgm_monotone(two_state, rels):
    runiv = two_state.universal_rel
    for r in rels:
        assert sem.refines(cl.pgm(runiv), cl.pgm(r), two_state, K)


def test_equivalent_test_seq():
    sp = StateSpace([("x", (-1, 0, 1))])
    le0 = sp.set_where(lambda s: s["x"] <= 0)
    ge0 = sp.set_where(lambda s: s["x"] >= 0)
    eq0 = sp.set_where(lambda s: s["x"] == 0)
    assert sem.equivalent(
        cl.seq(cl.test(le0), cl.test(ge0)), cl.test(eq0), sp, K
    )


def test_equivalent_guar_assert(two_state, rels, sets):
    for g in rels[:4]:
        for p in sets:
            assert sem.equivalent(
                cl.conj(cl.guar(g), cl.assert_(p)), cl.assert_(p), two_state, K
            )


def test_equivalent_reflexive(two_state):
    c = cl.seq(cl.pgm(two_state.identity_rel), cl.nil(two_state))
    assert sem.equivalent(c, c, two_state, K)


def test_equivalence_agrees_with_double_inclusion(two_state, rels):
    pool = [cl.pgm(rels[3]), cl.guar(rels[3]), cl.idle(two_state), cl.nil(two_state)]
    for c in pool:
        for d in pool:
            both = sem.refines(c, d, two_state, K) and sem.refines(d, c, two_state, K)
            assert both == sem.equivalent(c, d, two_state, K)


# ---------------------------------------------------------------- counterexamples


def test_counterexample_forced_shape(two_state):
    cex = sem.find_counterexample(
        cl.pgm(two_state.identity_rel), cl.pgm(two_state.universal_rel), two_state, K
    )
    assert cex is not None
    assert len(cex.steps) == 1
    assert cex.steps[0].label == PGM
    assert cex.steps[0].post.index != cex.initial.index


def test_counterexample_none_for_self(two_state):
    c = cl.guar(Rel(two_state, [(0, 0), (1, 1)]))
    assert sem.find_counterexample(c, c, two_state, K) is None


def test_counterexample_minimal_and_rendered(two_state):
    cex = sem.find_counterexample(
        cl.magic(two_state), cl.nil(two_state), two_state, K
    )
    assert cex.render() == "x=0 [TERM]"


def test_expression_anomaly_witness(two_state):
    # evaluating x+x to 1 is possible under an environment that flips x,
    # while 2*x can never evaluate to 1
    x = Variable("x")
    xpx = binary("+", lambda a, b: a + b, (0, 1), (0, 1), x, x)
    two_x = binary("*", lambda a, b: a * b, (2,), (0, 1), Constant(2), x)
    for k in (0, 1, 2):
        assert sem.refines(
            cl.eval_to(xpx, k, two_state), cl.eval_to(two_x, k, two_state),
            two_state, K,
        )
    cex = sem.find_counterexample(
        cl.eval_to(two_x, 1, two_state), cl.eval_to(xpx, 1, two_state), two_state, K
    )
    assert cex is not None
    flip_witness = beh(two_state, 0, [(ENV, 1)], TERM)
    d_xpx = sem.denote(cl.eval_to(xpx, 1, two_state), two_state, K)
    d_2x = sem.denote(cl.eval_to(two_x, 1, two_state), two_state, K)
    assert d_xpx.contains(flip_witness)
    assert not d_2x.contains(flip_witness)


# ---------------------------------------------------------------- identities


def _command_pool(space):
    r1 = Rel(space, [(0, 1), (1, 1)])
    r2 = Rel(space, [(0, 0), (1, 0)])
    p = StateSet(space, [0])
    return [
        cl.nil(space),
        cl.test(p),
        cl.pgm(r1),
        cl.env(r2),
        cl.seq(cl.pgm(r1), cl.env(r2)),
        cl.nondet(cl.test(p), cl.pgm(r2)),
        cl.abort(),
        cl.seq(cl.test(p.complement()), cl.abort()),
    ]


def test_par_skip_identity(two_state):
    for c in _command_pool(two_state):
        assert sem.equivalent(cl.par(c, cl.skip(two_state)), c, two_state, K)


def test_conj_chaos_identity(two_state):
    for c in _command_pool(two_state):
        assert sem.equivalent(cl.conj(c, cl.chaos(two_state)), c, two_state, K)


def test_abort_annihilates(two_state):
    for c in _command_pool(two_state):
        assert sem.equivalent(cl.par(c, cl.abort()), cl.abort(), two_state, K)
        assert sem.equivalent(cl.conj(c, cl.abort()), cl.abort(), two_state, K)


# ---------------------------------------------------------------- boundedness


def test_monotone_in_bound(two_state):
    pool = _command_pool(two_state) + [
        cl.idle(two_state),
        cl.spec(Rel(two_state, [(0, 0), (0, 1)])),
        cl.while_loop(Variable("x"), cl.nil(two_state), two_state),
    ]
    for c in pool:
        for k in (1, 2, 3):
            wider = sem.denote(c, two_state, k + 1)
            assert wider.truncated(k) == sem.denote(c, two_state, k)


def test_fixpoint_functional_monotone_probe(two_state):
    # random monotonicity probe: if X <= Y then F(X) <= F(Y) for the
    # loop-style functional F(Z) = nil or c;Z
    import random

    rng = random.Random(0xC0FFEE)
    rels = list(two_state.all_relations())
    body = cl.seq(cl.pgm(rels[rng.randrange(16)]), cl.fixvar("Z"))
    functional = cl.nondet(cl.nil(two_state), body)
    pool = _command_pool(two_state)
    for _ in range(20):
        a, b = rng.choice(pool), rng.choice(pool)
        da = sem.denote(a, two_state, K)
        db = sem.denote(b, two_state, K)
        small, big = (da, db) if db.includes(da) else (db, da)
        if not big.includes(small):
            continue  # incomparable sample
        fa = sem.denote(functional, two_state, K, env=sem.denotation_env({"Z": small}))
        fb = sem.denote(functional, two_state, K, env=sem.denotation_env({"Z": big}))
        assert fb.includes(fa)


def test_behavior_rendering(two_state):
    b = beh(two_state, 0, [(PGM, 1), (ENV, 0)], ABORT)
    assert sem.render_behavior(b) == "x=0 --π--> x=1 --ε--> x=0 [ABORT]"
