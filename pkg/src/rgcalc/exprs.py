"""Expression ASTs, single-state evaluation, and interference analyses.

Expressions are deep-embedded: constants, variables, and unary/binary
operators whose semantics are explicit finite tables from operand values to
result values.  Evaluation in a single state is structural; the interesting
analyses concern evaluation under interference, where different references
to the same variable may read different states.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EvaluationError
from .relspace import Rel, StateSet, StateSpace, State, ValueOrder


@dataclass(frozen=True)
class BoolEncoding:
    """Distinguished values standing for true and false."""

    true: int = 1
    false: int = 0

    def __post_init__(self):
        if self.true == self.false:
            raise ValueError("true and false encodings must differ")

    @property
    def values(self) -> frozenset:
        return frozenset((self.true, self.false))


def bools_of(space: StateSpace) -> BoolEncoding:
    """The boolean encoding configured on a space (default true=1, false=0)."""
    enc = space.bool_encoding
    if isinstance(enc, BoolEncoding):
        return enc
    return BoolEncoding(*enc)


class Expression:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Constant(Expression):
    value: int

    def __repr__(self):
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Variable(Expression):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Unary(Expression):
    op: str
    table: tuple  # sorted ((operand, result), ...)
    sub: Expression

    def __repr__(self):
        return f"{self.op}({self.sub!r})"


@dataclass(frozen=True, slots=True)
class Binary(Expression):
    op: str
    table: tuple  # sorted (((left, right), result), ...)
    left: Expression
    right: Expression

    def __repr__(self):
        return f"({self.left!r} {self.op} {self.right!r})"


def unary(op_name: str, fn, operand_values, sub: Expression) -> Unary:
    """Build a unary node with an explicit table of fn over the given operand values."""
    table = tuple(sorted((v, fn(v)) for v in set(operand_values)))
    return Unary(op_name, table, sub)


def binary(op_name: str, fn, left_values, right_values, left: Expression, right: Expression) -> Binary:
    table = tuple(
        sorted(((a, b), fn(a, b)) for a in set(left_values) for b in set(right_values))
    )
    return Binary(op_name, table, left, right)


def values_of(e: Expression, space: StateSpace) -> frozenset:
    """The exact set of values e can take over the space (single-state evaluation)."""
    if isinstance(e, Constant):
        return frozenset((e.value,))
    if isinstance(e, Variable):
        return frozenset(space.domain(e.name))
    if isinstance(e, Unary):
        table = dict(e.table)
        subs = values_of(e.sub, space)
        missing = subs - table.keys()
        if missing:
            raise EvaluationError(f"operator {e.op!r} undefined on {sorted(missing)}")
        return frozenset(table[v] for v in subs)
    if isinstance(e, Binary):
        table = dict(e.table)
        lv = values_of(e.left, space)
        rv = values_of(e.right, space)
        out = set()
        for a in lv:
            for b in rv:
                if (a, b) not in table:
                    raise EvaluationError(f"operator {e.op!r} undefined on ({a}, {b})")
                out.add(table[(a, b)])
        return frozenset(out)
    raise TypeError(f"not an expression: {e!r}")


def variables_of(e: Expression) -> frozenset:
    if isinstance(e, Constant):
        return frozenset()
    if isinstance(e, Variable):
        return frozenset((e.name,))
    if isinstance(e, Unary):
        return variables_of(e.sub)
    if isinstance(e, Binary):
        return variables_of(e.left) | variables_of(e.right)
    raise TypeError(f"not an expression: {e!r}")


def eval_expr(e: Expression, sigma: State):
    """The value of e in the single state sigma."""
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Variable):
        return sigma[e.name]
    if isinstance(e, Unary):
        v = eval_expr(e.sub, sigma)
        for operand, result in e.table:
            if operand == v:
                return result
        raise EvaluationError(f"operator {e.op!r} undefined on {v}")
    if isinstance(e, Binary):
        a = eval_expr(e.left, sigma)
        b = eval_expr(e.right, sigma)
        for operands, result in e.table:
            if operands == (a, b):
                return result
        raise EvaluationError(f"operator {e.op!r} undefined on ({a}, {b})")
    raise TypeError(f"not an expression: {e!r}")


def eq_val(e1: Expression, e2: Expression, space: StateSpace) -> StateSet:
    """States in which e1 and e2 evaluate to the same value."""
    return space.set_where(lambda s: eval_expr(e1, s) == eval_expr(e2, s))


def type_of(e: Expression, values, space: StateSpace) -> StateSet:
    """States in which e evaluates to a member of `values`."""
    vals = frozenset(values)
    return space.set_where(lambda s: eval_expr(e, s) in vals)


def is_invariant_under(e: Expression, r: Rel) -> bool:
    """e evaluates to the same value in any two states related by r."""
    space = r.space
    st = space.states
    return all(
        eval_expr(e, st[i]) == eval_expr(e, st[j]) for i, j in r.ipairs
    )


def is_single_reference(e: Expression, r: Rel) -> bool:
    """Concurrent evaluation of e under interference r equals evaluation in a
    single intermediate state.  Constants and (atomically accessed) variables
    qualify outright; a binary node needs one operand invariant under r."""
    if isinstance(e, (Constant, Variable)):
        return True
    if isinstance(e, Unary):
        return is_single_reference(e.sub, r)
    if isinstance(e, Binary):
        if not (is_single_reference(e.left, r) and is_single_reference(e.right, r)):
            return False
        return is_invariant_under(e.left, r) or is_invariant_under(e.right, r)
    raise TypeError(f"not an expression: {e!r}")


def compare_sets(
    e1: Expression,
    e2: Expression,
    order: ValueOrder,
    strict: bool,
    space: StateSpace,
) -> StateSet:
    """gt(e1,e2) / ge(e1,e2): states where e1's value strictly dominates e2's
    (or dominates-or-equals, for the reflexive closure)."""
    test = order.holds if strict else order.holds_eq
    return space.set_where(lambda s: test(eval_expr(e1, s), eval_expr(e2, s)))


def decreases_rel(w: Expression, order: ValueOrder, strict: bool, space: StateSpace) -> Rel:
    """State pairs across which the value of w decreases (strictly or reflexively)."""
    test = order.holds if strict else order.holds_eq
    return space.rel_where(lambda a, b: test(eval_expr(w, a), eval_expr(w, b)))


def eval_cmd(e: Expression, k: int, space: StateSpace):
    """The command that evaluates e to the value k (see cmdlang for the encoding)."""
    from . import cmdlang

    return cmdlang.eval_to(e, k, space)
