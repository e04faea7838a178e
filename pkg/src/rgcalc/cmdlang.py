"""The wide-spectrum command language.

Core commands are four primitives (program step, environment step,
instantaneous test, abort), the operators (nondeterministic choice,
sequential, parallel, weak conjunction), native iterations (finite,
possibly-infinite, infinite) and general least/greatest fixpoints.
Every programming and specification construct is a `Derived` node that
`desugar` expands into core commands following its defining equation.

Commands are hash-consed: building the same term twice yields the same
object, so equality is identity and semantic memoisation can key on `uid`.
"""

from __future__ import annotations

import itertools

from .errors import UnboundFixpointError, UnknownVariableError
from .exprs import (
    Binary,
    Constant,
    Expression,
    Unary,
    Variable,
    bools_of,
    eq_val,
    values_of,
)
from .relspace import Rel, StateSet, StateSpace, identity_on, restrict

_table: dict = {}
_uid = itertools.count()


class Command:
    __slots__ = ("uid", "key")

    def _seal(self, key):
        self.uid = next(_uid)
        self.key = key
        return self

    def __repr__(self):
        return render_term(self)


class Pgm(Command):
    __slots__ = ("rel",)


class Env(Command):
    __slots__ = ("rel",)


class Test(Command):
    __slots__ = ("pset",)


class Abort(Command):
    __slots__ = ()


class Nondet(Command):
    __slots__ = ("branches",)


class Seq(Command):
    __slots__ = ("first", "second")


class Par(Command):
    __slots__ = ("left", "right")


class Conj(Command):
    __slots__ = ("left", "right")


class Fin(Command):
    __slots__ = ("body",)


class Om(Command):
    __slots__ = ("body",)


class Inf(Command):
    __slots__ = ("body",)


class Mu(Command):
    __slots__ = ("var", "body")


class Nu(Command):
    __slots__ = ("var", "body")


class FixVar(Command):
    __slots__ = ("name",)


class Derived(Command):
    __slots__ = ("tag", "args")


def _mk(cls, key, fill):
    inst = _table.get(key)
    if inst is None:
        inst = cls.__new__(cls)
        fill(inst)
        inst._seal(key)
        _table[key] = inst
    return inst


# -- core constructors ---------------------------------------------------


def pgm(rel: Rel) -> Pgm:
    key = ("pgm", id(rel.space), rel.ipairs)
    return _mk(Pgm, key, lambda i: setattr(i, "rel", rel))


def env(rel: Rel) -> Env:
    key = ("env", id(rel.space), rel.ipairs)
    return _mk(Env, key, lambda i: setattr(i, "rel", rel))


def test(pset: StateSet) -> Test:
    key = ("test", id(pset.space), pset.indices)
    return _mk(Test, key, lambda i: setattr(i, "pset", pset))


def abort() -> Abort:
    return _mk(Abort, ("abort",), lambda i: None)


def nondet(*branches: Command) -> Command:
    flat = []
    for b in branches:
        if isinstance(b, (tuple, list, frozenset, set)):
            flat.extend(b)
        else:
            flat.append(b)
    uniq = sorted({b.uid: b for b in flat}.values(), key=lambda b: b.uid)
    if len(uniq) == 1:
        return uniq[0]
    key = ("nondet", tuple(b.uid for b in uniq))
    return _mk(Nondet, key, lambda i: setattr(i, "branches", tuple(uniq)))


def seq(*parts: Command) -> Command:
    if not parts:
        raise ValueError("seq needs at least one command")
    if len(parts) == 1:
        return parts[0]
    head, rest = parts[0], seq(*parts[1:])
    key = ("seq", head.uid, rest.uid)

    def fill(i):
        i.first = head
        i.second = rest

    return _mk(Seq, key, fill)


def par(a: Command, b: Command) -> Par:
    key = ("par", a.uid, b.uid)

    def fill(i):
        i.left = a
        i.right = b

    return _mk(Par, key, fill)


def conj(a: Command, b: Command) -> Conj:
    key = ("conj", a.uid, b.uid)

    def fill(i):
        i.left = a
        i.right = b

    return _mk(Conj, key, fill)


def fin(body: Command) -> Fin:
    return _mk(Fin, ("fin", body.uid), lambda i: setattr(i, "body", body))


def om(body: Command) -> Om:
    return _mk(Om, ("om", body.uid), lambda i: setattr(i, "body", body))


def inf(body: Command) -> Inf:
    return _mk(Inf, ("inf", body.uid), lambda i: setattr(i, "body", body))


def mu(var: str, body: Command) -> Mu:
    key = ("mu", var, body.uid)

    def fill(i):
        i.var = var
        i.body = body

    return _mk(Mu, key, fill)


def nu(var: str, body: Command) -> Nu:
    key = ("nu", var, body.uid)

    def fill(i):
        i.var = var
        i.body = body

    return _mk(Nu, key, fill)


def fixvar(name: str) -> FixVar:
    return _mk(FixVar, ("fixvar", name), lambda i: setattr(i, "name", name))


def _derived(tag: str, *args) -> Derived:
    key = ("derived", tag) + tuple(
        a.uid if isinstance(a, (Command,)) else _arg_key(a) for a in args
    )

    def fill(i):
        i.tag = tag
        i.args = tuple(args)

    return _mk(Derived, key, fill)


def _arg_key(a):
    if isinstance(a, Rel):
        return ("rel", id(a.space), a.ipairs)
    if isinstance(a, StateSet):
        return ("set", id(a.space), a.indices)
    if isinstance(a, StateSpace):
        return ("space", id(a))
    if isinstance(a, Expression):
        return ("expr", a)
    if isinstance(a, tuple):
        return ("tuple",) + tuple(_arg_key(x) for x in a)
    return a


# -- derived-command builders ---------------------------------------------


def assert_(p: StateSet) -> Derived:
    return _derived("assert", p)


def magic(space: StateSpace) -> Derived:
    return _derived("magic", space)


def nil(space: StateSpace) -> Derived:
    return _derived("nil", space)


def skip(space: StateSpace) -> Derived:
    return _derived("skip", space)


def chaos(space: StateSpace) -> Derived:
    return _derived("chaos", space)


def term(space: StateSpace) -> Derived:
    return _derived("term", space)


def idle(space: StateSpace) -> Derived:
    return _derived("idle", space)


def guar(g: Rel) -> Derived:
    return _derived("guar", g)


def rely(r: Rel) -> Derived:
    return _derived("rely", r)


def frame(names, c: Command) -> Derived:
    return _derived("frame", tuple(sorted(names)), c)


def pspec(q: Rel) -> Derived:
    return _derived("pspec", q)


def spec(q: Rel) -> Derived:
    return _derived("spec", q)


def opt(q: Rel) -> Derived:
    return _derived("opt", q)


def atomic(p: StateSet | None, q: Rel) -> Derived:
    if p is None:
        p = q.space.full_set  # the default precondition is the set of all states
    return _derived("atomic", p, q)


def assign(name: str, e: Expression, space: StateSpace) -> Derived:
    if name not in space.variables:
        raise UnknownVariableError(f"unknown variable {name!r}")
    return _derived("assign", name, e, space)


def cond(b: Expression, then_c: Command, else_c: Command, space: StateSpace) -> Derived:
    return _derived("cond", b, then_c, else_c, space)


def while_loop(b: Expression, body: Command, space: StateSpace) -> Derived:
    return _derived("while", b, body, space)


def eval_to(e: Expression, k: int, space: StateSpace) -> Derived:
    return _derived("eval", e, k, space)


# -- desugaring ------------------------------------------------------------

_fresh = itertools.count()
_desugar_memo: dict = {}


def desugar(c: Command) -> Command:
    """Expand every derived node into core commands, following the defining
    equations; core nodes are rebuilt with desugared children."""
    out = _desugar_memo.get(c.uid)
    if out is None:
        out = _desugar(c)
        _desugar_memo[c.uid] = out
        _desugar_memo[out.uid] = out
    return out


def _desugar(c: Command) -> Command:
    if isinstance(c, (Pgm, Env, Test, Abort, FixVar)):
        return c
    if isinstance(c, Nondet):
        return nondet(*(desugar(b) for b in c.branches))
    if isinstance(c, Seq):
        return seq(desugar(c.first), desugar(c.second))
    if isinstance(c, Par):
        return par(desugar(c.left), desugar(c.right))
    if isinstance(c, Conj):
        return conj(desugar(c.left), desugar(c.right))
    if isinstance(c, Fin):
        return fin(desugar(c.body))
    if isinstance(c, Om):
        return om(desugar(c.body))
    if isinstance(c, Inf):
        return inf(desugar(c.body))
    if isinstance(c, Mu):
        return mu(c.var, desugar(c.body))
    if isinstance(c, Nu):
        return nu(c.var, desugar(c.body))
    if isinstance(c, Derived):
        return _expand(c)
    raise TypeError(f"not a command: {c!r}")


def _expand(c: Derived) -> Command:
    tag, args = c.tag, c.args
    if tag == "assert":
        (p,) = args
        return nondet(
            test(p.space.full_set), seq(test(p.complement()), abort())
        )
    if tag == "magic":
        (space,) = args
        return test(space.empty_set)
    if tag == "nil":
        (space,) = args
        return test(space.full_set)
    if tag == "skip":
        (space,) = args
        return om(env(space.universal_rel))
    if tag == "chaos":
        (space,) = args
        return om(nondet(pgm(space.universal_rel), env(space.universal_rel)))
    if tag == "term":
        (space,) = args
        any_step = nondet(pgm(space.universal_rel), env(space.universal_rel))
        return seq(fin(any_step), om(env(space.universal_rel)))
    if tag == "idle":
        (space,) = args
        return conj(desugar(guar(space.identity_rel)), desugar(term(space)))
    if tag == "guar":
        (g,) = args
        return om(nondet(pgm(g), env(g.space.universal_rel)))
    if tag == "rely":
        (r,) = args
        space = r.space
        return om(
            nondet(
                pgm(space.universal_rel),
                env(space.universal_rel),
                seq(env(r.complement()), abort()),
            )
        )
    if tag == "frame":
        names, body = args
        g = identity_on(_space_of_frame(body, names), _frame_complement(body, names))
        return conj(desugar(body), om(nondet(pgm(g), env(g.space.universal_rel))))
    if tag == "pspec":
        (q,) = args
        space = q.space
        ch = desugar(chaos(space))
        branches = []
        for s in space.states:
            start = StateSet(space, (s.index,))
            target = StateSet(space, (j for i, j in q.ipairs if i == s.index))
            branches.append(seq(test(start), ch, test(target)))
        return nondet(*branches)
    if tag == "spec":
        (q,) = args
        return conj(desugar(pspec(q)), desugar(term(q.space)))
    if tag == "opt":
        (q,) = args
        return nondet(pgm(q), test(q.domain_where_identical()))
    if tag == "atomic":
        p, q = args
        space = q.space
        return seq(
            desugar(idle(space)),
            desugar(assert_(p)),
            desugar(opt(q)),
            desugar(idle(space)),
        )
    if tag == "assign":
        name, e, space = args
        others = [v for v in space.variables if v != name]
        frame_id = identity_on(space, others)
        branches = []
        for k in space.domain(name):
            target = eq_val(Constant(k), Variable(name), space)
            branches.append(
                seq(
                    desugar(eval_to(e, k, space)),
                    desugar(opt(restrict(None, frame_id, target))),
                    desugar(idle(space)),
                )
            )
        return nondet(*branches)
    if tag == "cond":
        b, then_c, else_c, space = args
        enc = bools_of(space)
        branches = [
            seq(desugar(eval_to(b, enc.true, space)), desugar(then_c)),
            seq(desugar(eval_to(b, enc.false, space)), desugar(else_c)),
        ]
        for k in sorted(values_of(b, space) - enc.values):
            branches.append(seq(desugar(eval_to(b, k, space)), abort()))
        return seq(nondet(*branches), desugar(idle(space)))
    if tag == "while":
        b, body, space = args
        var = f"loop{next(_fresh)}"
        unfolded = cond(b, seq(desugar(body), fixvar(var)), nil(space), space)
        return nu(var, desugar(unfolded))
    if tag == "eval":
        e, k, space = args
        return _expand_eval(e, k, space)
    raise ValueError(f"unknown derived tag {tag!r}")


def _space_of_frame(body: Command, names) -> StateSpace:
    space = find_space(body)
    if space is None:
        raise UnknownVariableError("frame body mentions no state space")
    for n in names:
        if n not in space.variables:
            raise UnknownVariableError(f"unknown variable {n!r} in frame")
    return space


def _frame_complement(body: Command, names):
    space = _space_of_frame(body, names)
    return [v for v in space.variables if v not in names]


def _expand_eval(e: Expression, k: int, space: StateSpace) -> Command:
    idle_c = desugar(idle(space))
    if isinstance(e, (Constant, Variable)):
        target = eq_val(Constant(k), e, space)
        return seq(idle_c, test(target), idle_c)
    if isinstance(e, Unary):
        table = dict(e.table)
        branches = [
            _expand_eval(e.sub, k1, space)
            for k1 in sorted(values_of(e.sub, space))
            if table.get(k1) == k
        ]
        return nondet(*branches) if branches else test(space.empty_set)
    if isinstance(e, Binary):
        table = dict(e.table)
        lv = sorted(values_of(e.left, space))
        rv = sorted(values_of(e.right, space))
        branches = [
            par(_expand_eval(e.left, k1, space), _expand_eval(e.right, k2, space))
            for k1 in lv
            for k2 in rv
            if table.get((k1, k2)) == k
        ]
        return nondet(*branches) if branches else test(space.empty_set)
    raise TypeError(f"not an expression: {e!r}")


# -- structural queries -----------------------------------------------------


def free_fixvars(c: Command) -> frozenset:
    if isinstance(c, FixVar):
        return frozenset((c.name,))
    if isinstance(c, (Pgm, Env, Test, Abort)):
        return frozenset()
    if isinstance(c, Nondet):
        out = frozenset()
        for b in c.branches:
            out |= free_fixvars(b)
        return out
    if isinstance(c, Seq):
        return free_fixvars(c.first) | free_fixvars(c.second)
    if isinstance(c, (Par, Conj)):
        return free_fixvars(c.left) | free_fixvars(c.right)
    if isinstance(c, (Fin, Om, Inf)):
        return free_fixvars(c.body)
    if isinstance(c, (Mu, Nu)):
        return free_fixvars(c.body) - {c.var}
    if isinstance(c, Derived):
        out = frozenset()
        for a in c.args:
            if isinstance(a, Command):
                out |= free_fixvars(a)
        if c.tag == "while":
            out -= frozenset()  # while binds its own fresh variable on expansion
        return out
    raise TypeError(f"not a command: {c!r}")


def find_space(c: Command) -> StateSpace | None:
    """The state space some leaf of c is built over, if any."""
    if isinstance(c, (Pgm, Env)):
        return c.rel.space
    if isinstance(c, Test):
        return c.pset.space
    if isinstance(c, (Abort, FixVar)):
        return None
    if isinstance(c, Nondet):
        for b in c.branches:
            s = find_space(b)
            if s is not None:
                return s
        return None
    if isinstance(c, Seq):
        return find_space(c.first) or find_space(c.second)
    if isinstance(c, (Par, Conj)):
        return find_space(c.left) or find_space(c.right)
    if isinstance(c, (Fin, Om, Inf)):
        return find_space(c.body)
    if isinstance(c, (Mu, Nu)):
        return find_space(c.body)
    if isinstance(c, Derived):
        for a in c.args:
            if isinstance(a, StateSpace):
                return a
            if isinstance(a, (Rel, StateSet)):
                return a.space
            if isinstance(a, Command):
                s = find_space(a)
                if s is not None:
                    return s
        return None
    raise TypeError(f"not a command: {c!r}")


def render_term(c: Command) -> str:
    """Debugging rendition of the AST shape (the CLI has the parseable syntax)."""
    if isinstance(c, Pgm):
        return f"pgm#{len(c.rel)}"
    if isinstance(c, Env):
        return f"env#{len(c.rel)}"
    if isinstance(c, Test):
        return f"test#{len(c.pset)}"
    if isinstance(c, Abort):
        return "abort"
    if isinstance(c, Nondet):
        return "(" + " \\/ ".join(render_term(b) for b in c.branches) + ")"
    if isinstance(c, Seq):
        return f"({render_term(c.first)} ; {render_term(c.second)})"
    if isinstance(c, Par):
        return f"({render_term(c.left)} || {render_term(c.right)})"
    if isinstance(c, Conj):
        return f"({render_term(c.left)} /\\ {render_term(c.right)})"
    if isinstance(c, Fin):
        return f"fin({render_term(c.body)})"
    if isinstance(c, Om):
        return f"om({render_term(c.body)})"
    if isinstance(c, Inf):
        return f"inf({render_term(c.body)})"
    if isinstance(c, Mu):
        return f"(mu {c.var} . {render_term(c.body)})"
    if isinstance(c, Nu):
        return f"(nu {c.var} . {render_term(c.body)})"
    if isinstance(c, FixVar):
        return c.name
    if isinstance(c, Derived):
        return f"{c.tag}(...)"
    return object.__repr__(c)
