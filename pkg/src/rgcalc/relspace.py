"""Finite state spaces, state sets and binary relations.

States map variable names to integer values drawn from finite per-variable
domains.  Finite sets of small naturals are encoded as bitmask integers so
that set operations on values become bitwise operations.  Relations and
state sets are stored extensionally (as frozensets of state indices), which
keeps every operation exact and decidable at desk scale.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .errors import ConfigurationError, SpaceMismatchError, UnknownVariableError

DEFAULT_STATE_CAP = 256


class State:
    """A total assignment of values to the variables of one space."""

    __slots__ = ("space", "values", "index")

    def __init__(self, space: "StateSpace", values: tuple, index: int):
        self.space = space
        self.values = values
        self.index = index

    def __getitem__(self, name: str):
        return self.values[self.space.var_index(name)]

    def __eq__(self, other):
        return (
            isinstance(other, State)
            and other.space is self.space
            and other.index == self.index
        )

    def __hash__(self):
        return hash((id(self.space), self.index))

    def __repr__(self):
        return "State(%s)" % self.render()

    def render(self) -> str:
        return " ".join(
            f"{v}={x}" for v, x in zip(self.space.variables, self.values)
        )


class StateSpace:
    """An ordered sequence of variables with finite nonempty integer domains."""

    def __init__(
        self,
        variables: Sequence[tuple[str, Iterable[int]]],
        max_states: int = DEFAULT_STATE_CAP,
        bool_encoding: tuple[int, int] = (1, 0),
    ):
        names = [name for name, _ in variables]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate variable names in {names}")
        self.variables: tuple[str, ...] = tuple(names)
        self._domains = {}
        for name, domain in variables:
            dom = tuple(sorted(set(int(v) for v in domain)))
            if not dom:
                raise ConfigurationError(f"variable {name!r} has an empty domain")
            self._domains[name] = dom
        count = 1
        for name in self.variables:
            count *= len(self._domains[name])
        if count > max_states:
            raise ConfigurationError(
                f"state space has {count} states, exceeding the cap of {max_states}"
            )
        self._var_index = {name: i for i, name in enumerate(self.variables)}
        self.states: tuple[State, ...] = tuple(
            State(self, values, i)
            for i, values in enumerate(
                itertools.product(*(self._domains[n] for n in self.variables))
            )
        )
        self._state_index = {s.values: s.index for s in self.states}
        self.bool_encoding = bool_encoding
        self._all = frozenset(range(len(self.states)))

    # -- basic queries -------------------------------------------------

    def domain(self, name: str) -> tuple[int, ...]:
        try:
            return self._domains[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def var_index(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    @property
    def state_count(self) -> int:
        return len(self.states)

    def state_of(self, assignment: dict) -> State:
        values = tuple(assignment[n] for n in self.variables)
        try:
            return self.states[self._state_index[values]]
        except KeyError:
            raise ConfigurationError(f"no state with assignment {assignment}") from None

    def digest(self) -> str:
        import hashlib

        text = ";".join(
            f"{n}:{','.join(map(str, self._domains[n]))}" for n in self.variables
        )
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    # -- canonical sets and relations -----------------------------------

    def set_of(self, members) -> "StateSet":
        return StateSet(self, members)

    def set_where(self, pred) -> "StateSet":
        return StateSet(self, (s.index for s in self.states if pred(s)))

    def rel_where(self, pred) -> "Rel":
        return Rel(
            self,
            (
                (a.index, b.index)
                for a in self.states
                for b in self.states
                if pred(a, b)
            ),
        )

    @property
    def full_set(self) -> "StateSet":
        return StateSet(self, self._all)

    @property
    def empty_set(self) -> "StateSet":
        return StateSet(self, ())

    @property
    def universal_rel(self) -> "Rel":
        n = len(self.states)
        return Rel(self, ((i, j) for i in range(n) for j in range(n)))

    @property
    def identity_rel(self) -> "Rel":
        return Rel(self, ((i, i) for i in range(len(self.states))))

    @property
    def empty_rel(self) -> "Rel":
        return Rel(self, ())

    def all_state_sets(self):
        """Every subset of the state space, in a deterministic order."""
        n = len(self.states)
        for mask in range(1 << n):
            yield StateSet(self, (i for i in range(n) if mask >> i & 1))

    def all_relations(self):
        """Every binary relation over the space; 2^(n^2) of them, use with care."""
        n = len(self.states)
        pairs = [(i, j) for i in range(n) for j in range(n)]
        for mask in range(1 << len(pairs)):
            yield Rel(self, (p for k, p in enumerate(pairs) if mask >> k & 1))

    def __repr__(self):
        doms = ", ".join(f"{n}:{set(self._domains[n])}" for n in self.variables)
        return f"StateSpace({doms})"


def enumerate_states(space: StateSpace) -> tuple[State, ...]:
    """All states in lexicographic order (variable order, then value order)."""
    return space.states


def _check_space(a, b):
    if a.space is not b.space:
        raise SpaceMismatchError("operands belong to different state spaces")


class StateSet:
    """A subset of the states of one space."""

    __slots__ = ("space", "indices")

    def __init__(self, space: StateSpace, members):
        idx = set()
        for m in members:
            idx.add(m.index if isinstance(m, State) else int(m))
        self.space = space
        self.indices = frozenset(idx)

    @property
    def members(self) -> frozenset:
        return frozenset(self.space.states[i] for i in self.indices)

    def __contains__(self, state):
        return (state.index if isinstance(state, State) else state) in self.indices

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self):
        return len(self.indices)

    def __eq__(self, other):
        return (
            isinstance(other, StateSet)
            and other.space is self.space
            and other.indices == self.indices
        )

    def __hash__(self):
        return hash((id(self.space), self.indices))

    def __le__(self, other):
        _check_space(self, other)
        return self.indices <= other.indices

    def union(self, other) -> "StateSet":
        _check_space(self, other)
        return StateSet(self.space, self.indices | other.indices)

    def inter(self, other) -> "StateSet":
        _check_space(self, other)
        return StateSet(self.space, self.indices & other.indices)

    def diff(self, other) -> "StateSet":
        _check_space(self, other)
        return StateSet(self.space, self.indices - other.indices)

    def complement(self) -> "StateSet":
        return StateSet(self.space, self.space._all - self.indices)

    def __repr__(self):
        names = [self.space.states[i].render() for i in sorted(self.indices)]
        return "StateSet{%s}" % "; ".join(names)


class Rel:
    """A binary relation over the states of one space."""

    __slots__ = ("space", "ipairs")

    def __init__(self, space: StateSpace, pairs):
        ip = set()
        for a, b in pairs:
            i = a.index if isinstance(a, State) else int(a)
            j = b.index if isinstance(b, State) else int(b)
            ip.add((i, j))
        self.space = space
        self.ipairs = frozenset(ip)

    @property
    def pairs(self) -> frozenset:
        st = self.space.states
        return frozenset((st[i], st[j]) for i, j in self.ipairs)

    def __contains__(self, pair):
        a, b = pair
        i = a.index if isinstance(a, State) else a
        j = b.index if isinstance(b, State) else b
        return (i, j) in self.ipairs

    def __len__(self):
        return len(self.ipairs)

    def __eq__(self, other):
        return (
            isinstance(other, Rel)
            and other.space is self.space
            and other.ipairs == self.ipairs
        )

    def __hash__(self):
        return hash((id(self.space), self.ipairs))

    def __le__(self, other):
        _check_space(self, other)
        return self.ipairs <= other.ipairs

    def union(self, other) -> "Rel":
        _check_space(self, other)
        return Rel(self.space, self.ipairs | other.ipairs)

    def inter(self, other) -> "Rel":
        _check_space(self, other)
        return Rel(self.space, self.ipairs & other.ipairs)

    def complement(self) -> "Rel":
        n = self.space.state_count
        univ = {(i, j) for i in range(n) for j in range(n)}
        return Rel(self.space, univ - self.ipairs)

    def successors(self, i: int) -> frozenset:
        return frozenset(j for a, j in self.ipairs if a == i)

    def is_reflexive(self) -> bool:
        return all((i, i) in self.ipairs for i in range(self.space.state_count))

    def domain_where_identical(self) -> StateSet:
        """States from which the relation is satisfied by not changing state."""
        return StateSet(self.space, (i for i, j in self.ipairs if i == j))

    def __repr__(self):
        st = self.space.states
        body = "; ".join(
            f"({st[i].render()})->({st[j].render()})" for i, j in sorted(self.ipairs)
        )
        return "Rel{%s}" % body


def compose(r1: Rel, r2: Rel) -> Rel:
    """Relational composition: (a,c) when (a,b) in r1 and (b,c) in r2."""
    _check_space(r1, r2)
    succ = {}
    for b, c in r2.ipairs:
        succ.setdefault(b, []).append(c)
    out = set()
    for a, b in r1.ipairs:
        for c in succ.get(b, ()):
            out.add((a, c))
    return Rel(r1.space, out)


def rtc(r: Rel) -> Rel:
    """Reflexive transitive closure, the least fixed point of id + r;x."""
    work = r.union(r.space.identity_rel)
    while True:
        extended = work.union(compose(r, work))
        if extended == work:
            return work
        work = extended


def restrict(p: StateSet | None, r: Rel, q: StateSet | None) -> Rel:
    """Domain and/or range restriction of r; pass None (or the full set) to skip a side."""
    if p is not None:
        _check_space(p, r)
    if q is not None:
        _check_space(r, q)
    pi = None if p is None else p.indices
    qi = None if q is None else q.indices
    return Rel(
        r.space,
        (
            (i, j)
            for i, j in r.ipairs
            if (pi is None or i in pi) and (qi is None or j in qi)
        ),
    )


def image(r: Rel, p: StateSet) -> StateSet:
    """The image of p through r."""
    _check_space(r, p)
    return StateSet(r.space, (j for i, j in r.ipairs if i in p.indices))


def identity_on(space: StateSpace, names: Iterable[str]) -> Rel:
    """Pairs of states agreeing on every variable in `names`."""
    idxs = [space.var_index(n) for n in names]
    return space.rel_where(
        lambda a, b: all(a.values[k] == b.values[k] for k in idxs)
    )


def is_stable(p: StateSet, r: Rel) -> bool:
    """p is stable under r when the image of p through r stays inside p."""
    _check_space(p, r)
    return image(r, p) <= p


def tolerates(q: Rel, r: Rel, p: StateSet) -> bool:
    """q tolerates interference r from p: p stable under r and r absorbs into q
    on either side, restricted to initial states in p."""
    _check_space(q, r)
    _check_space(q, p)
    if not is_stable(p, r):
        return False
    before = restrict(p, compose(r, q), None)
    after = restrict(p, compose(q, r), None)
    return before <= q and after <= q


class ValueOrder:
    """A strict order on a finite set of values, given extensionally."""

    __slots__ = ("gt",)

    def __init__(self, gt: Iterable[tuple[int, int]]):
        self.gt = frozenset((int(a), int(b)) for a, b in gt)

    def holds(self, a, b) -> bool:
        return (a, b) in self.gt

    def holds_eq(self, a, b) -> bool:
        return a == b or (a, b) in self.gt

    def carrier(self) -> frozenset:
        return frozenset(v for pair in self.gt for v in pair)

    def __repr__(self):
        return f"ValueOrder({sorted(self.gt)})"


def superset_order(nbits: int) -> ValueOrder:
    """Strict superset on bitmask-encoded subsets of {0..nbits-1}."""
    masks = range(1 << nbits)
    return ValueOrder(
        (a, b) for a in masks for b in masks if a != b and b & ~a == 0
    )


def is_well_founded(order: ValueOrder) -> bool:
    """True when the strict order has no cycle (finite carrier, so no infinite descent)."""
    succ = {}
    for a, b in order.gt:
        succ.setdefault(a, []).append(b)
    # iterative DFS with colouring
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(order.carrier(), WHITE)
    for start in sorted(colour):
        if colour[start] != WHITE:
            continue
        stack = [(start, iter(succ.get(start, ())))]
        colour[start] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if colour[nxt] == GREY:
                    return False
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                stack.pop()
    return True
