"""Command construction and desugaring into the core language."""

import pytest

from rgcalc import cmdlang as cl
from rgcalc.errors import UnknownVariableError
from rgcalc.exprs import Constant, Variable, binary, unary
from rgcalc.relspace import Rel, StateSet, StateSpace


def test_interning_gives_identity(two_state):
    p = StateSet(two_state, [0])
    assert cl.test(p) is cl.test(StateSet(two_state, [0]))
    a = cl.seq(cl.test(p), cl.abort())
    b = cl.seq(cl.test(p), cl.abort())
    assert a is b


def test_desugar_assert(two_state):
    p = StateSet(two_state, [0])
    expected = cl.nondet(
        cl.test(two_state.full_set),
        cl.seq(cl.test(p.complement()), cl.abort()),
    )
    assert cl.desugar(cl.assert_(p)) is expected


def test_desugar_guar(two_state):
    g = Rel(two_state, [(0, 0)])
    expected = cl.om(cl.nondet(cl.pgm(g), cl.env(two_state.universal_rel)))
    assert cl.desugar(cl.guar(g)) is expected


def test_desugar_idle_is_guar_id_conj_term(two_state):
    expected = cl.conj(
        cl.desugar(cl.guar(two_state.identity_rel)),
        cl.desugar(cl.term(two_state)),
    )
    assert cl.desugar(cl.idle(two_state)) is expected


def test_desugar_magic_nil(two_state):
    assert cl.desugar(cl.magic(two_state)) is cl.test(two_state.empty_set)
    assert cl.desugar(cl.nil(two_state)) is cl.test(two_state.full_set)


def test_desugar_idempotent(two_state):
    g = Rel(two_state, [(0, 1)])
    for c in (
        cl.assert_(StateSet(two_state, [1])),
        cl.guar(g),
        cl.rely(g),
        cl.idle(two_state),
        cl.spec(g),
        cl.atomic(None, g),
        cl.while_loop(Variable("x"), cl.nil(two_state), two_state),
    ):
        core = cl.desugar(c)
        assert cl.desugar(core) is core


def test_atomic_default_precondition(two_state):
    q = Rel(two_state, [(0, 1)])
    a = cl.atomic(None, q)
    assert a.args[0] == two_state.full_set


def test_free_fixvars():
    x = cl.fixvar("x")
    assert cl.free_fixvars(x) == frozenset({"x"})
    sp = StateSpace([("x", (0, 1))])
    closed = cl.nu("x", cl.seq(cl.test(sp.full_set), cl.fixvar("x")))
    assert cl.free_fixvars(closed) == frozenset()
    w = cl.while_loop(Variable("x"), cl.nil(sp), sp)
    assert cl.free_fixvars(w) == frozenset()
    assert cl.free_fixvars(cl.desugar(w)) == frozenset()


def test_cond_includes_nonboolean_abort_branch():
    sp = StateSpace([("x", (0, 1, 2))])
    guard = Variable("x")  # may evaluate to 2, outside the booleans
    core = cl.desugar(cl.cond(guard, cl.nil(sp), cl.nil(sp), sp))
    # outermost: (branches) ; idle, where branches include an abort branch
    assert isinstance(core, cl.Seq)
    branches = core.first
    assert isinstance(branches, cl.Nondet)
    assert len(branches.branches) == 3
    has_abort = [
        b for b in branches.branches
        if isinstance(b, cl.Seq) and _ends_in_abort(b)
    ]
    assert has_abort


def _ends_in_abort(c):
    while isinstance(c, cl.Seq):
        c = c.second
    return isinstance(c, cl.Abort)


def test_while_desugars_to_nu_of_conditional(two_state):
    w = cl.while_loop(Constant(1), cl.nil(two_state), two_state)
    core = cl.desugar(w)
    assert isinstance(core, cl.Nu)
    expected_body = cl.desugar(cl.cond(
        Constant(1),
        cl.seq(cl.desugar(cl.nil(two_state)), cl.fixvar(core.var)),
        cl.nil(two_state),
        two_state,
    ))
    assert core.body is expected_body


def test_eval_constant_shape(two_state):
    core = cl.desugar(cl.eval_to(Constant(0), 0, two_state))
    idle = cl.desugar(cl.idle(two_state))
    assert core is cl.seq(idle, cl.test(two_state.full_set), idle)


def test_eval_infeasible_value_is_magic():
    sp = StateSpace([("x", (-1, 0, 1))])
    e = unary("abs", abs, sp.domain("x"), Variable("x"))
    core = cl.desugar(cl.eval_to(e, -1, sp))
    assert core is cl.test(sp.empty_set)


def test_eval_binary_single_decomposition():
    sp = StateSpace([("x", (0, 1)), ("y", (0, 1))])
    e = binary("+", lambda a, b: a + b, (0, 1), (0, 1), Variable("x"), Variable("y"))
    core = cl.desugar(cl.eval_to(e, 2, sp))
    expected = cl.par(
        cl.desugar(cl.eval_to(Variable("x"), 1, sp)),
        cl.desugar(cl.eval_to(Variable("y"), 1, sp)),
    )
    assert core is expected


def test_assign_unknown_variable(two_state):
    with pytest.raises(UnknownVariableError):
        cl.assign("nope", Constant(0), two_state)


def test_frame_unknown_variable(two_state):
    with pytest.raises(UnknownVariableError):
        cl.desugar(cl.frame(("nope",), cl.nil(two_state)))


def test_derived_tags_expand_without_new_fixvars(two_state):
    g = Rel(two_state, [(0, 1), (1, 1)])
    p = StateSet(two_state, [0])
    samples = [
        cl.assert_(p), cl.magic(two_state), cl.nil(two_state), cl.skip(two_state),
        cl.chaos(two_state), cl.term(two_state), cl.idle(two_state),
        cl.guar(g), cl.rely(g), cl.frame(("x",), cl.nil(two_state)),
        cl.pspec(g), cl.spec(g), cl.opt(g), cl.atomic(p, g),
        cl.assign("x", Constant(1), two_state),
        cl.cond(Variable("x"), cl.nil(two_state), cl.abort(), two_state),
        cl.while_loop(Variable("x"), cl.nil(two_state), two_state),
        cl.eval_to(Variable("x"), 1, two_state),
    ]
    for c in samples:
        assert cl.free_fixvars(cl.desugar(c)) == frozenset()
