"""Command-line surface: textual grammars, check suites, and JSON reports.

Subcommands:
  axioms                  run the primitive-identity suite (appendix algebra)
  suite                   run the full law registry plus negative controls
  law <name>              run a single law by its registry name
  refine <lhs> <rhs>      check that the command in file lhs is refined by rhs
  example rem-from-set    run the non-blocking remove-element scenario

Predicates are written in a small textual grammar (variables, primed
variables in relation position, integer literals, arithmetic and bitmask
operators, comparisons, boolean connectives) and are compiled to extensional
relations/sets by enumerating the space.  Commands mirror the calculus:
pgm(R), env(R), test(P), abort, ';', '||', '/\\' for weak conjunction,
'\\/' for choice, fin/om/inf, assert(P), guar(R), rely(R), frame{X}: C,
pspec(Q), spec(Q), opt(Q), atomic(P,Q), x := E, if B then C else D,
while B do C.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import __version__
from . import cmdlang as cl
from . import laws as lawmod
from . import semantics as sem
from .errors import ParseError, RgError, UnknownVariableError
from .exprs import (
    Binary,
    Constant,
    Expression,
    Unary,
    Variable,
    compare_sets,
    decreases_rel,
    eq_val,
    is_invariant_under,
    is_single_reference,
    type_of,
    values_of,
)
from .relspace import (
    Rel,
    StateSet,
    StateSpace,
    compose,
    identity_on,
    is_stable,
    is_well_founded,
    restrict,
    rtc,
    superset_order,
    tolerates,
)

# ---------------------------------------------------------------------------
# tokenizer shared by the predicate, expression and command grammars

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*'?)
  | (?P<op>:=|&&|\|\||!=|<=|>=|/\\|\\/|≠|≤|⊆|⊂|[][(){},;:.!~&|+\-*=<>])
    """,
    re.VERBOSE,
)

_WORD_OPS = {"mod", "in", "subseteq", "subset", "true", "false"}
_UNI = {"≠": "!=", "≤": "<=", "⊆": "subseteq", "⊂": "subset"}


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos

    def __repr__(self):
        return f"{self.text!r}@{self.pos}"


def _tokenize(src: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup == "ws":
            pos = m.end()
            continue
        text = m.group()
        kind = m.lastgroup
        if kind == "op":
            text = _UNI.get(text, text)
        out.append(_Tok(kind, text, pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(src)))
    return out


class _Cursor:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.peek().text == text:
            self.i += 1
            return True
        return False

    def expect(self, text) -> _Tok:
        t = self.peek()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.pos)
        return self.next()


# ---------------------------------------------------------------------------
# predicate grammar: an untyped integer term language evaluated per state pair

class _P:
    """Predicate AST node: op plus children, or a leaf."""

    __slots__ = ("op", "args")

    def __init__(self, op, *args):
        self.op = op
        self.args = args


def _parse_pred(cur: _Cursor) -> _P:
    return _parse_or(cur)


def _parse_or(cur):
    parts = [_parse_and(cur)]
    while cur.accept("||"):
        parts.append(_parse_and(cur))
    return parts[0] if len(parts) == 1 else _P("or", *parts)


def _parse_and(cur):
    parts = [_parse_not(cur)]
    while cur.accept("&&"):
        parts.append(_parse_not(cur))
    return parts[0] if len(parts) == 1 else _P("and", *parts)


def _parse_not(cur):
    if cur.accept("!"):
        return _P("not", _parse_not(cur))
    return _parse_cmp(cur)


_CMP_OPS = ("=", "!=", "<", "<=", ">=", ">", "subseteq", "subset", "in")


def _parse_cmp(cur):
    node = _parse_bitor(cur)
    t = cur.peek()
    if t.text in _CMP_OPS:
        cur.next()
        return _P(t.text, node, _parse_bitor(cur))
    return node


def _parse_bitor(cur):
    node = _parse_bitand(cur)
    while cur.peek().text == "|" and cur.toks[cur.i + 1].text != "|":
        cur.next()
        node = _P("bor", node, _parse_bitand(cur))
    return node


def _parse_bitand(cur):
    node = _parse_addsub(cur)
    while cur.peek().text == "&" and cur.toks[cur.i + 1].text != "&":
        cur.next()
        node = _P("band", node, _parse_addsub(cur))
    return node


def _parse_addsub(cur):
    node = _parse_mul(cur)
    while cur.peek().text in ("+", "-"):
        op = cur.next().text
        node = _P("add" if op == "+" else "sub", node, _parse_mul(cur))
    return node


def _parse_mul(cur):
    node = _parse_unary(cur)
    while cur.peek().text in ("*", "mod"):
        op = cur.next().text
        node = _P("mul" if op == "*" else "mod", node, _parse_unary(cur))
    return node


def _parse_unary(cur):
    if cur.accept("~"):
        return _P("bnot", _parse_unary(cur))
    if cur.accept("-"):
        return _P("neg", _parse_unary(cur))
    return _parse_atom(cur)


def _parse_atom(cur):
    t = cur.peek()
    if t.text == "(":
        cur.next()
        node = _parse_pred(cur)
        cur.expect(")")
        return node
    if t.text == "{":
        cur.next()
        node = _parse_pred(cur)
        cur.expect("}")
        return _P("bit", node)
    if t.kind == "num":
        cur.next()
        return _P("const", int(t.text))
    if t.text == "true":
        cur.next()
        return _P("const_bool", True)
    if t.text == "false":
        cur.next()
        return _P("const_bool", False)
    if t.kind == "name" and t.text not in _WORD_OPS:
        cur.next()
        if t.text.endswith("'"):
            return _P("primed", t.text[:-1])
        return _P("var", t.text)
    raise ParseError(f"unexpected token {t.text!r} in predicate", t.pos)


def _eval_pred(node: _P, space: StateSpace, sigma, sigma2):
    op = node.op
    if op == "const":
        return node.args[0]
    if op == "const_bool":
        return node.args[0]
    if op == "var":
        name = node.args[0]
        space.var_index(name)
        return sigma[name]
    if op == "primed":
        name = node.args[0]
        space.var_index(name)
        if sigma2 is None:
            raise ParseError(f"primed variable {name}' not allowed here")
        return sigma2[name]
    if op == "or":
        return any(bool(_eval_pred(t, space, sigma, sigma2)) for t in node.args)
    if op == "and":
        return all(bool(_eval_pred(t, space, sigma, sigma2)) for t in node.args)
    a = _eval_pred(node.args[0], space, sigma, sigma2)
    if op == "not":
        return not a
    if op == "bnot":
        return ~a
    if op == "neg":
        return -a
    if op == "bit":
        return 1 << a
    b = _eval_pred(node.args[1], space, sigma, sigma2)
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "subseteq":
        return a & ~b == 0
    if op == "subset":
        return a & ~b == 0 and a != b
    if op == "in":
        return b >> a & 1 == 1
    if op == "bor":
        return a | b
    if op == "band":
        return a & b
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "mod":
        if b == 0:
            raise ParseError("mod by zero in predicate")
        return a % b
    raise AssertionError(op)


def _assignment_of(term: _P, space: StateSpace, primed: bool):
    """Recognise a conjunction of `v = literal` equalities pinning every
    variable (both unprimed and primed when `primed`); None otherwise."""
    eqs = term.args if term.op == "and" else (term,)
    plain: dict = {}
    dashed: dict = {}
    for eq in eqs:
        if eq.op != "=":
            return None
        lhs, rhs = eq.args
        if rhs.op not in ("const",) or lhs.op not in ("var", "primed"):
            return None
        target = plain if lhs.op == "var" else dashed
        name = lhs.args[0]
        if name in target:
            return None
        target[name] = rhs.args[0]
    want = set(space.variables)
    if set(plain) != want or set(dashed) != (want if primed else set()):
        return None
    try:
        if primed:
            return space.state_of(plain).index, space.state_of(dashed).index
        return space.state_of(plain).index
    except Exception:
        return None


def _compile_extensional(node: _P, space: StateSpace, primed: bool):
    """Fast path for the printer's canonical disjunction-of-assignments form."""
    if node.op == "const_bool" and node.args[0] is False:
        return []
    terms = node.args if node.op == "or" else (node,)
    out = []
    for term in terms:
        got = _assignment_of(term, space, primed)
        if got is None:
            return None
        out.append(got)
    return out


def parse_state_set(src: str, space: StateSpace) -> StateSet:
    """Compile unprimed predicate text to a state set by enumeration."""
    cur = _Cursor(_tokenize(src))
    node = _parse_pred(cur)
    if cur.peek().kind != "eof":
        raise ParseError(f"trailing input {cur.peek().text!r}", cur.peek().pos)
    fast = _compile_extensional(node, space, primed=False)
    if fast is not None:
        return StateSet(space, fast)
    return space.set_where(lambda s: bool(_eval_pred(node, space, s, None)))


def parse_relation(src: str, space: StateSpace) -> Rel:
    """Compile predicate text with primed variables to a relation by enumeration."""
    cur = _Cursor(_tokenize(src))
    node = _parse_pred(cur)
    if cur.peek().kind != "eof":
        raise ParseError(f"trailing input {cur.peek().text!r}", cur.peek().pos)
    fast = _compile_extensional(node, space, primed=True)
    if fast is not None:
        return Rel(space, fast)
    return space.rel_where(lambda a, b: bool(_eval_pred(node, space, a, b)))


# ---------------------------------------------------------------------------
# expressions: the same term grammar, built into the deep expression AST

_BOOL_BINOPS = {
    "=": lambda a, b: 1 if a == b else 0,
    "!=": lambda a, b: 1 if a != b else 0,
    "<": lambda a, b: 1 if a < b else 0,
    "<=": lambda a, b: 1 if a <= b else 0,
    ">": lambda a, b: 1 if a > b else 0,
    ">=": lambda a, b: 1 if a >= b else 0,
    "subseteq": lambda a, b: 1 if a & ~b == 0 else 0,
    "subset": lambda a, b: 1 if a & ~b == 0 and a != b else 0,
    "in": lambda a, b: 1 if b >> a & 1 else 0,
    "&&": lambda a, b: 1 if a and b else 0,
    "||": lambda a, b: 1 if a or b else 0,
}

_INT_BINOPS = {
    "bor": lambda a, b: a | b,
    "band": lambda a, b: a & b,
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}

_P_TO_TEXT = {
    "or": "||", "and": "&&",
    "bor": "|", "band": "&", "add": "+", "sub": "-", "mul": "*", "mod": "mod",
}


def _expr_from_pred(node: _P, space: StateSpace) -> Expression:
    from .exprs import binary as mk_binary, unary as mk_unary

    op = node.op
    if op == "const":
        return Constant(node.args[0])
    if op == "const_bool":
        return Constant(1 if node.args[0] else 0)
    if op == "var":
        space.var_index(node.args[0])
        return Variable(node.args[0])
    if op == "primed":
        raise ParseError("primed variables are not allowed in expressions")
    if op in ("not", "bnot", "neg", "bit"):
        sub = _expr_from_pred(node.args[0], space)
        vals = values_of(sub, space)
        fn = {
            "not": lambda v: 0 if v else 1,
            "bnot": lambda v: ~v,
            "neg": lambda v: -v,
            "bit": lambda v: 1 << v,
        }[op]
        name = {"not": "!", "bnot": "~", "neg": "-", "bit": "bit"}[op]
        return mk_unary(name, fn, vals, sub)
    if op in ("or", "and"):
        sym = _P_TO_TEXT[op]
        out = _expr_from_pred(node.args[0], space)
        for term in node.args[1:]:
            rhs = _expr_from_pred(term, space)
            out = mk_binary(
                sym, _BOOL_BINOPS[sym],
                values_of(out, space), values_of(rhs, space), out, rhs,
            )
        return out
    left = _expr_from_pred(node.args[0], space)
    right = _expr_from_pred(node.args[1], space)
    lv = values_of(left, space)
    rv = values_of(right, space)
    if op in _CMP_OPS:
        return mk_binary(op, _BOOL_BINOPS[op], lv, rv, left, right)
    if op in _INT_BINOPS:
        return mk_binary(_P_TO_TEXT[op], _INT_BINOPS[op], lv, rv, left, right)
    if op == "mod":
        def fmod(a, b):
            if b == 0:
                raise ParseError("mod by zero")
            return a % b

        return mk_binary("mod", fmod, lv, rv, left, right)
    raise AssertionError(op)


def parse_expression(src: str, space: StateSpace) -> Expression:
    cur = _Cursor(_tokenize(src))
    node = _parse_pred(cur)
    if cur.peek().kind != "eof":
        raise ParseError(f"trailing input {cur.peek().text!r}", cur.peek().pos)
    return _expr_from_pred(node, space)


# ---------------------------------------------------------------------------
# command grammar

_CMD_KEYWORDS = {
    "pgm", "env", "test", "abort", "nil", "skip", "chaos", "term", "idle",
    "magic", "assert", "guar", "rely", "frame", "pspec", "spec", "opt",
    "atomic", "fin", "om", "inf", "if", "then", "else", "while", "do",
}


def parse_command_text(src: str, space: StateSpace) -> cl.Command:
    cur = _Cursor(_tokenize(src))
    c = _parse_cmd(cur, space)
    if cur.peek().kind != "eof":
        raise ParseError(f"trailing input {cur.peek().text!r}", cur.peek().pos)
    return c


def _parse_cmd(cur, space):
    return _parse_nondet(cur, space)


def _parse_nondet(cur, space):
    parts = [_parse_conj(cur, space)]
    while cur.accept("\\/"):
        parts.append(_parse_conj(cur, space))
    return parts[0] if len(parts) == 1 else cl.nondet(*parts)


def _parse_conj(cur, space):
    node = _parse_par(cur, space)
    while cur.accept("/\\"):
        node = cl.conj(node, _parse_par(cur, space))
    return node


def _parse_par(cur, space):
    node = _parse_seq(cur, space)
    while cur.accept("||"):
        node = cl.par(node, _parse_seq(cur, space))
    return node


def _parse_seq(cur, space):
    node = _parse_prefix(cur, space)
    while cur.accept(";"):
        node = cl.seq(node, _parse_prefix(cur, space))
    return node


def _pred_until_close(cur, space, relation):
    """Parse a predicate argument inside parentheses already opened."""
    node = _parse_pred(cur)
    fast = _compile_extensional(node, space, primed=relation)
    if fast is not None:
        return Rel(space, fast) if relation else StateSet(space, fast)
    if relation:
        return space.rel_where(lambda a, b: bool(_eval_pred(node, space, a, b)))
    return space.set_where(lambda s: bool(_eval_pred(node, space, s, None)))


def _parse_prefix(cur, space):
    t = cur.peek()
    text = t.text
    if text == "(":
        cur.next()
        node = _parse_cmd(cur, space)
        cur.expect(")")
        return node
    if t.kind != "name":
        raise ParseError(f"unexpected token {text!r} in command", t.pos)
    if text == "frame":
        cur.next()
        cur.expect("{")
        names = []
        if cur.peek().text != "}":
            names.append(cur.next().text)
            while cur.accept(","):
                names.append(cur.next().text)
        cur.expect("}")
        cur.expect(":")
        body = _parse_prefix(cur, space)
        for n in names:
            if n not in space.variables:
                raise UnknownVariableError(f"unknown variable {n!r} in frame")
        return cl.frame(tuple(names), body)
    if text in ("pgm", "env", "guar", "rely", "pspec", "spec", "opt"):
        cur.next()
        cur.expect("(")
        rel = _pred_until_close(cur, space, relation=True)
        cur.expect(")")
        return {
            "pgm": cl.pgm, "env": cl.env, "guar": cl.guar, "rely": cl.rely,
            "pspec": cl.pspec, "spec": cl.spec, "opt": cl.opt,
        }[text](rel)
    if text in ("test", "assert"):
        cur.next()
        cur.expect("(")
        pset = _pred_until_close(cur, space, relation=False)
        cur.expect(")")
        return cl.test(pset) if text == "test" else cl.assert_(pset)
    if text == "atomic":
        cur.next()
        cur.expect("(")
        mark = cur.i
        try:
            pre = _pred_until_close(cur, space, relation=False)
            two_args = cur.peek().text == ","
        except ParseError:
            cur.i = mark
            two_args = False
        if two_args:
            cur.expect(",")
            q = _pred_until_close(cur, space, relation=True)
            cur.expect(")")
            return cl.atomic(pre, q)
        cur.i = mark
        q = _pred_until_close(cur, space, relation=True)
        cur.expect(")")
        return cl.atomic(None, q)
    if text in ("fin", "om", "inf"):
        cur.next()
        cur.expect("(")
        body = _parse_cmd(cur, space)
        cur.expect(")")
        return {"fin": cl.fin, "om": cl.om, "inf": cl.inf}[text](body)
    if text == "abort":
        cur.next()
        return cl.abort()
    if text in ("nil", "skip", "chaos", "term", "idle", "magic"):
        cur.next()
        return getattr(cl, text)(space)
    if text == "if":
        cur.next()
        b = _parse_guard(cur, space, "then")
        then_c = _parse_prefix(cur, space)
        cur.expect("else")
        else_c = _parse_prefix(cur, space)
        return cl.cond(b, then_c, else_c, space)
    if text == "while":
        cur.next()
        b = _parse_guard(cur, space, "do")
        body = _parse_prefix(cur, space)
        return cl.while_loop(b, body, space)
    # assignment:  name := expr
    if cur.toks[cur.i + 1].text == ":=":
        name = cur.next().text
        cur.next()
        e = _parse_assign_rhs(cur, space)
        return cl.assign(name, e, space)
    raise ParseError(f"unexpected token {text!r} in command", t.pos)


def _parse_guard(cur, space, stop):
    start = cur.i
    depth = 0
    while True:
        t = cur.peek()
        if t.kind == "eof":
            raise ParseError(f"missing {stop!r} after guard", t.pos)
        if depth == 0 and t.text == stop:
            break
        if t.text in "({":
            depth += 1
        elif t.text in ")}":
            depth -= 1
        cur.next()
    toks = cur.toks[start:cur.i] + [_Tok("eof", "", cur.peek().pos)]
    cur.expect(stop)
    sub = _Cursor(toks)
    node = _parse_pred(sub)
    if sub.peek().kind != "eof":
        raise ParseError(f"trailing input in guard {sub.peek().text!r}", sub.peek().pos)
    return _expr_from_pred(node, space)


def _parse_assign_rhs(cur, space):
    start = cur.i
    depth = 0
    while True:
        t = cur.peek()
        if t.kind == "eof":
            break
        if depth == 0 and t.text in (";", ")", "\\/", "/\\", "||", "else", "do", "then"):
            break
        if t.text in "({":
            depth += 1
        elif t.text in ")}":
            depth -= 1
        cur.next()
    toks = cur.toks[start:cur.i] + [_Tok("eof", "", cur.peek().pos)]
    sub = _Cursor(toks)
    node = _parse_pred(sub)
    if sub.peek().kind != "eof":
        raise ParseError(
            f"trailing input in assignment {sub.peek().text!r}", sub.peek().pos
        )
    return _expr_from_pred(node, space)


# ---------------------------------------------------------------------------
# printing (inverse of the command grammar)

def set_to_text(p: StateSet) -> str:
    if not len(p):
        return "false"
    if p == p.space.full_set:
        return "true"
    sp = p.space
    terms = []
    for i in sorted(p.indices):
        s = sp.states[i]
        terms.append("(" + " && ".join(f"{v} = {s[v]}" for v in sp.variables) + ")")
    return " || ".join(terms)


def rel_to_text(r: Rel) -> str:
    if not len(r):
        return "false"
    if r == r.space.universal_rel:
        return "true"
    sp = r.space
    terms = []
    for i, j in sorted(r.ipairs):
        a, b = sp.states[i], sp.states[j]
        eqs = [f"{v} = {a[v]}" for v in sp.variables]
        eqs += [f"{v}' = {b[v]}" for v in sp.variables]
        terms.append("(" + " && ".join(eqs) + ")")
    return " || ".join(terms)


def expr_to_text(e: Expression) -> str:
    if isinstance(e, Constant):
        return str(e.value)
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, Unary):
        if e.op == "bit":
            return "{" + expr_to_text(e.sub) + "}"
        if e.op in ("!", "~", "-"):
            return f"{e.op}({expr_to_text(e.sub)})"
        raise ParseError(f"unary operator {e.op!r} has no concrete syntax")
    if isinstance(e, Binary):
        known = set(_BOOL_BINOPS) | set(_P_TO_TEXT.values()) | {"mod"}
        if e.op not in known:
            raise ParseError(f"binary operator {e.op!r} has no concrete syntax")
        return f"({expr_to_text(e.left)} {e.op} {expr_to_text(e.right)})"
    raise TypeError(f"not an expression: {e!r}")


def print_command(c: cl.Command) -> str:
    if isinstance(c, cl.Pgm):
        return f"pgm({rel_to_text(c.rel)})"
    if isinstance(c, cl.Env):
        return f"env({rel_to_text(c.rel)})"
    if isinstance(c, cl.Test):
        return f"test({set_to_text(c.pset)})"
    if isinstance(c, cl.Abort):
        return "abort"
    if isinstance(c, cl.Nondet):
        if not c.branches:
            raise ParseError("the empty choice has no concrete syntax; it is magic")
        return "(" + " \\/ ".join(print_command(b) for b in c.branches) + ")"
    if isinstance(c, cl.Seq):
        return f"({print_command(c.first)} ; {print_command(c.second)})"
    if isinstance(c, cl.Par):
        return f"({print_command(c.left)} || {print_command(c.right)})"
    if isinstance(c, cl.Conj):
        return f"({print_command(c.left)} /\\ {print_command(c.right)})"
    if isinstance(c, cl.Fin):
        return f"fin({print_command(c.body)})"
    if isinstance(c, cl.Om):
        return f"om({print_command(c.body)})"
    if isinstance(c, cl.Inf):
        return f"inf({print_command(c.body)})"
    if isinstance(c, cl.Derived):
        return _print_derived(c)
    raise ParseError(f"command {type(c).__name__} has no concrete syntax")


def _print_derived(c: cl.Derived) -> str:
    tag, args = c.tag, c.args
    if tag in ("magic", "nil", "skip", "chaos", "term", "idle"):
        return tag
    if tag == "assert":
        return f"assert({set_to_text(args[0])})"
    if tag in ("guar", "rely", "pspec", "spec", "opt"):
        return f"{tag}({rel_to_text(args[0])})"
    if tag == "frame":
        names, body = args
        return "frame{" + ",".join(names) + "}: (" + print_command(body) + ")"
    if tag == "atomic":
        p, q = args
        return f"atomic({set_to_text(p)}, {rel_to_text(q)})"
    if tag == "assign":
        name, e, _space = args
        return f"{name} := {expr_to_text(e)}"
    if tag == "cond":
        b, then_c, else_c, _space = args
        return (
            f"if {expr_to_text(b)} then ({print_command(then_c)}) "
            f"else ({print_command(else_c)})"
        )
    if tag == "while":
        b, body, _space = args
        return f"while {expr_to_text(b)} do ({print_command(body)})"
    if tag == "eval":
        raise ParseError("expression-evaluation commands have no concrete syntax")
    raise ParseError(f"derived tag {tag!r} has no concrete syntax")


# ---------------------------------------------------------------------------
# space files

def parse_space_file(text: str, max_states: int = 256) -> StateSpace:
    """One `var name : {values}` line per variable; `#` starts a comment;
    values are integers or `lo..hi` ranges."""
    variables = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"var\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*\{([^}]*)\}", line)
        if m is None:
            raise ParseError(f"bad space line {lineno}: {raw!r}")
        name, body = m.group(1), m.group(2)
        values: list[int] = []
        for part in body.split(","):
            part = part.strip()
            if not part:
                continue
            rng = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", part)
            if rng:
                lo, hi = int(rng.group(1)), int(rng.group(2))
                values.extend(range(lo, hi + 1))
            else:
                if not re.fullmatch(r"-?\d+", part):
                    raise ParseError(f"bad value {part!r} on line {lineno}")
                values.append(int(part))
        variables.append((name, values))
    if not variables:
        raise ParseError("space file declares no variables")
    return StateSpace(variables, max_states=max_states)


DEFAULT_SPACE_TEXT = "var x : {0,1}\n"


# ---------------------------------------------------------------------------
# the running example: non-blocking removal of an element from a set

def build_rem_from_set(n_bits: int, max_states: int = 256):
    """The remove-element scenario: space, context relations, program,
    and the specification with its rely/guarantee context."""
    mask = (1 << n_bits) - 1
    space = StateSpace(
        [
            ("w", range(mask + 1)),
            ("pw", range(mask + 1)),
            ("nw", range(mask + 1)),
            ("i", range(n_bits)),
        ],
        max_states=max_states,
    )
    R = lambda src: parse_relation(src, space)
    S = lambda src: parse_state_set(src, space)
    parts = {
        "space": space,
        # guarantee: each step only removes, and only ever the element i
        "g": R("w' subseteq w && (w & ~w') subseteq {i}"),
        # rely: the environment only removes elements and leaves i alone;
        # once the locals pw and nw are introduced it leaves them alone too
        "r_base": R("w' subseteq w && i' = i"),
        "r": R("w' subseteq w && i' = i && nw' = nw && pw' = pw"),
        "pre": S("true"),  # w and i lie in range by construction of the space
        "post": R("!(i' in w')"),
        # the three sequential pieces of the loop body
        "q_read": R("pw' subseteq w && w' subseteq pw'"),
        "q_calc": R("nw' = (pw & ~{i}) && pw' = pw && w' subseteq pw' && i' = i"),
        "q_cas": R("w' subset pw || !(i' in w')"),
        "q_body": R("w' subset w || !(i' in w')"),
        "pre_calc": S("w subseteq pw"),
        "pre_cas": S("w subseteq pw && nw = (pw & ~{i})"),
        "cas_rely": R("nw' = nw && pw' = pw"),
        "cas_q": R("(!(w = pw) || w' = nw) && (w = pw || w' = w)"),
        # the guarantee weakened to allow adding elements (negative control)
        "g_mutant": R("(w & ~w') subseteq {i}"),
    }
    guard = parse_expression("i in w", space)
    e_nw = parse_expression("pw & ~{i}", space)
    cas = cl.conj(
        cl.rely(parts["cas_rely"]),
        cl.frame(("w",), cl.atomic(None, parts["cas_q"])),
    )
    body = cl.seq(
        cl.assign("pw", Variable("w"), space),
        cl.assign("nw", e_nw, space),
        cas,
    )
    parts["program"] = cl.while_loop(guard, body, space)
    parts["lhs"] = cl.conj(
        cl.guar(parts["g"]),
        cl.conj(
            cl.rely(parts["r"]),
            cl.seq(
                cl.assert_(parts["pre"]),
                cl.frame(("w", "pw", "nw"), cl.spec(parts["post"])),
            ),
        ),
    )
    parts["guard"] = guard
    parts["e_nw"] = e_nw
    return parts


def example_rem_from_set(n_bits: int, bound: int, max_states: int = 256) -> list[dict]:
    """Check every proof obligation of the refinement chain, the final bounded
    refinement, and that the mutated guarantee breaks its closure obligation."""
    parts = build_rem_from_set(n_bits, max_states=max_states)
    space = parts["space"]
    R = lambda src: parse_relation(src, space)
    S = lambda src: parse_state_set(src, space)
    items: list[dict] = []

    def obligation(name, ok, expect=True, trace=None):
        items.append({
            "name": name,
            "status": "PASS" if ok == expect else "FAIL",
            "instances": 1,
            "proviso_met": 1,
            "failures": [] if ok == expect else [
                {"params": f"N={n_bits}", "trace": trace}
            ],
        })

    g, r, r_base = parts["g"], parts["r"], parts["r_base"]
    order = superset_order(n_bits)
    w_e = Variable("w")

    # the two containments discharging the sequential splits of the body
    obligation(
        "seq-intro-containment-1",
        compose(parts["q_read"], parts["q_cas"]) <= parts["q_body"],
    )
    obligation(
        "seq-intro-containment-2",
        compose(parts["q_calc"], parts["q_cas"]) <= parts["q_cas"],
    )
    # stability of {w subseteq pw} under interference that only shrinks w
    obligation(
        "stable-pred",
        is_stable(S("w subseteq pw"), R("w' subseteq w && pw' = pw")),
    )
    # the CAS piece's postcondition tolerates the rely from its precondition
    obligation("tolerates", tolerates(parts["q_cas"], r, parts["pre_cas"]))
    # closing rely with the frame-restricted guarantee stays within the rely shape
    id_w_frame = identity_on(space, ("pw", "nw", "i"))
    closure = rtc(r_base.union(g.inter(id_w_frame)))
    obligation("trading-closure", closure <= r_base)
    # per-variant-value strengthening containment for the loop body
    trading_ok = True
    for k in range(1 << n_bits):
        lhs_rel = restrict(
            S(f"w subseteq {k}"),
            r_base.inter(parts["q_body"]),
            None,
        )
        target = R(f"w' subset {k} || !(i' in w')")
        if not lhs_rel <= target:
            trading_ok = False
    obligation("trading-containment", trading_ok)
    # frame-restrict side conditions for the three applications
    for tag, X, Y, Z in (
        ("read", ("nw", "pw", "w"), (), ("pw",)),
        ("calc", ("nw", "pw", "w"), ("pw", "i"), ("nw",)),
        ("cas", ("nw", "pw", "w"), (), ("w",)),
    ):
        ok = (
            set(Z) <= set(X)
            and set(Y) <= set(space.variables) - set(Z)
            and r <= identity_on(space, Y)
        )
        obligation(f"frame-restrict-sides-{tag}", ok)
    # the CAS atomic-specification strengthening containment
    cas_target = R(
        "w' subseteq w && (w & ~w') subseteq {i} && (w' subset pw || !(i in w'))"
    )
    obligation(
        "atomic-post-containment",
        restrict(parts["pre_cas"], parts["cas_q"], None) <= cas_target,
    )
    obligation("atomic-pre-weaken", parts["pre_cas"] <= space.full_set)
    obligation("cas-rely-weaken", r <= parts["cas_rely"])
    # provisos of the local-expression assignment nw := pw - {i}
    e_nw = parts["e_nw"]
    q_calc_frame = R("nw' = (pw & ~{i}) && w' subseteq pw'")
    obligation("assign-nw-single-reference", is_single_reference(e_nw, r))
    obligation("assign-nw-invariant", is_invariant_under(e_nw, r))
    ok_nw = g.is_reflexive() and tolerates(q_calc_frame, r, S("w subseteq pw"))
    idbar_nw = identity_on(space, ("w", "pw", "i"))
    for k in sorted(values_of(e_nw, space)):
        lhs_rel = restrict(
            S("w subseteq pw").inter(eq_val(Constant(k), e_nw, space)),
            restrict(None, idbar_nw, eq_val(Constant(k), Variable("nw"), space)),
            None,
        )
        if not lhs_rel <= g.inter(q_calc_frame):
            ok_nw = False
    obligation("assign-nw-provisos", ok_nw)
    # provisos of the monotonic-sampling assignment pw := w
    r_pw = R("w' subseteq w && pw' = pw")
    ok_pw = (
        g.is_reflexive()
        and is_stable(space.full_set, r_pw)
        and is_invariant_under(Variable("pw"), r_pw)
        and is_single_reference(w_e, r_pw)
    )
    idbar_pw = identity_on(space, ("w", "nw", "i"))
    dec_w = decreases_rel(w_e, order, False, space)
    if not restrict(space.full_set, idbar_pw, None).union(r_pw) <= dec_w:
        ok_pw = False
    for k in range(1 << n_bits):
        ge_k = compare_sets(Constant(k), w_e, order, False, space)
        lhs_rel = restrict(
            ge_k,
            restrict(None, idbar_pw, eq_val(Constant(k), Variable("pw"), space)),
            None,
        )
        if not lhs_rel <= g:
            ok_pw = False
    obligation("assign-pw-provisos", ok_pw)
    # while-loop introduction provisos
    guard = parts["guard"]
    b_true = eq_val(Constant(1), guard, space)
    b_f = S("!(i in w)")
    loop_ok = (
        space.full_set <= type_of(guard, frozenset((0, 1)), space)
        and is_single_reference(guard, r_base)
        and is_stable(b_f, r_base)
        and is_well_founded(order)
        and r_base <= decreases_rel(w_e, order, False, space)
        and space.full_set.inter(b_true.complement()) <= b_f
        and space.full_set.inter(b_f) <= b_true.complement()
    )
    obligation("loop-provisos", loop_ok)
    post_loop = restrict(None, rtc(space.universal_rel), space.full_set)
    obligation("loop-post-tolerates", tolerates(post_loop, r_base, space.full_set))

    # the end-to-end bounded refinement
    lhs_d = sem.denote(parts["lhs"], space, bound)
    rhs_d = sem.denote(parts["program"], space, bound)
    ok_final = lhs_d.includes(rhs_d)
    cex = None
    if not ok_final:
        b = sem.set_counterexample(lhs_d, rhs_d)
        cex = b.render() if b else None
    obligation("final-refinement", ok_final, trace=cex)

    # negative control: a guarantee that admits additions breaks the closure
    closure_mut = rtc(r_base.union(parts["g_mutant"].inter(id_w_frame)))
    obligation(
        "trading-closure-mutated-guarantee",
        closure_mut <= r_base,
        expect=False,
    )
    return items


# ---------------------------------------------------------------------------
# reports and the driver

REPORT_SCHEMA_NAME = "report_schema.json"


def report_schema() -> dict:
    from importlib.resources import files

    return json.loads(files("rgcalc").joinpath(REPORT_SCHEMA_NAME).read_text())


def _mk_report(space, bound, seed, items) -> dict:
    ok = True
    for item in items:
        if item["status"] in ("FAIL", "VACUOUS", "UNEXPECTED_PASS"):
            ok = False
    return {
        "version": __version__,
        "space": space.digest(),
        "bound": bound,
        "seed": seed,
        "items": items,
        "pass": ok,
    }


def _law_item(law, report) -> dict:
    d = report.to_dict()
    if law.expect_fail:
        d["status"] = "EXPECTED_FAIL" if report.failures else "UNEXPECTED_PASS"
        d["failures"] = d["failures"][:3]
    return d


_FLAG_DEFAULTS = {
    "space": None,
    "bound": None,
    "seed": lawmod.DEFAULT_SEED,
    "samples": lawmod.DEFAULT_SAMPLES,
    "exhaustive": False,
    "json_path": None,
    "max_states": 256,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--space", help="space file (default: one variable x over {0,1})")
    common.add_argument("--bound", type=int,
                        help="trace-step bound K (default 3; 4 for the example)")
    common.add_argument("--seed", type=lambda s: int(s, 0))
    common.add_argument("--samples", type=int)
    common.add_argument("--exhaustive", action="store_true",
                        help="force exhaustive enumeration for every law")
    common.add_argument("--json", dest="json_path", help="write the JSON report here")
    common.add_argument("--max-states", dest="max_states", type=int)
    ap = argparse.ArgumentParser(
        prog="rgcalc",
        description="bounded checker for the rely/guarantee refinement calculus",
        parents=[common],
    )
    sub = ap.add_subparsers(dest="command")
    sub.add_parser("axioms", parents=[common],
                   help="check the primitive-identity suite")
    sub.add_parser("suite", parents=[common],
                   help="check the law registry and negative controls")
    p_law = sub.add_parser("law", parents=[common], help="check a single law by name")
    p_law.add_argument("name")
    p_ref = sub.add_parser("refine", parents=[common],
                           help="check refinement between two command files")
    p_ref.add_argument("lhs")
    p_ref.add_argument("rhs")
    p_ex = sub.add_parser("example", parents=[common], help="run a worked scenario")
    p_ex.add_argument("scenario", choices=["rem-from-set"])
    p_ex.add_argument("--n", type=int, default=2, choices=[1, 2],
                      help="number of bits in the set representation")
    return ap


def _strategy_override(args, law, ctx):
    strategy = lawmod.default_strategy(law, ctx, force_exhaustive=args.exhaustive)
    if strategy["kind"] == "random":
        return {"kind": "random", "seed": args.seed, "samples": args.samples}
    return strategy


def run(argv) -> tuple[int, dict | None]:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return (2 if e.code not in (0, None) else 0), None
    for key, value in _FLAG_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    if args.command is None:
        ap.print_usage()
        return 2, None
    try:
        bound = args.bound if args.bound is not None else (
            4 if args.command == "example" else 3)
        if args.space:
            with open(args.space) as fh:
                space = parse_space_file(fh.read(), max_states=args.max_states)
        else:
            space = parse_space_file(DEFAULT_SPACE_TEXT, max_states=args.max_states)
        ctx = lawmod.CheckContext(space, bound)

        if args.command == "axioms":
            items = [
                _law_item(law, lawmod.check_law(law, ctx, _strategy_override(args, law, ctx)))
                for law in lawmod.axiom_specs()
            ]
            report = _mk_report(space, bound, args.seed, items)
        elif args.command == "suite":
            items = []
            for law in lawmod.registry():
                items.append(_law_item(
                    law, lawmod.check_law(law, ctx, _strategy_override(args, law, ctx))
                ))
            for law in lawmod.negative_controls(ctx):
                items.append(_law_item(law, lawmod.check_law(law, ctx)))
            report = _mk_report(space, bound, args.seed, items)
        elif args.command == "law":
            law = lawmod.lookup(args.name, ctx)
            if law is None:
                print(f"no law named {args.name!r}", file=sys.stderr)
                return 2, None
            item = _law_item(law, lawmod.check_law(law, ctx, _strategy_override(args, law, ctx)))
            report = _mk_report(space, bound, args.seed, [item])
        elif args.command == "refine":
            with open(args.lhs) as fh:
                lhs = parse_command_text(fh.read(), space)
            with open(args.rhs) as fh:
                rhs = parse_command_text(fh.read(), space)
            ok = sem.refines(lhs, rhs, space, bound)
            failures = []
            if not ok:
                cex = sem.find_counterexample(lhs, rhs, space, bound)
                failures.append({
                    "params": f"{args.lhs} >= {args.rhs}",
                    "trace": cex.render() if cex else None,
                })
            report = _mk_report(space, bound, args.seed, [{
                "name": "refine",
                "status": "PASS" if ok else "FAIL",
                "instances": 1,
                "proviso_met": 1,
                "failures": failures,
            }])
        elif args.command == "example":
            items = example_rem_from_set(args.n, bound, max_states=args.max_states)
            ex_space = build_rem_from_set(args.n, max_states=args.max_states)["space"]
            report = _mk_report(ex_space, bound, args.seed, items)
        else:
            ap.print_usage()
            return 2, None
    except (RgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None

    for item in report["items"]:
        line = f"{item['status']:>15}  {item['name']}"
        extra = []
        if item.get("instances", 0) > 1:
            extra.append(f"instances={item['instances']}")
            extra.append(f"proviso_met={item['proviso_met']}")
        if extra:
            line += "  (" + ", ".join(extra) + ")"
        print(line)
        for f in item["failures"][:3]:
            print(f"                 counterexample: {f['trace']}  [{f['params']}]")
    print("overall:", "PASS" if report["pass"] else "FAIL")
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return (0 if report["pass"] else 1), report


def main() -> None:
    code, _ = run(sys.argv[1:])
    sys.exit(code)


if __name__ == "__main__":
    main()
