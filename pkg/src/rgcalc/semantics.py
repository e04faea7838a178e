"""Bounded Aczel-trace semantics, fixpoint engine, and refinement oracle.

A behaviour is an initial state, a sequence of program/environment steps,
and a status: TERM (complete), ABORT (failed), or INC (observation cut
short).  Commands denote *saturated* sets of behaviours of at most K steps:

  (S1) the zero-step incomplete behaviour is present for every initial state,
  (S2) every prefix (proper or not) of a member is a member with status INC,
  (S3) an aborting behaviour is closed under every possible extension with
       every status up to the bound: abort allows any behaviour whatsoever.

Saturated sets are represented canonically as hash-consed tries.  A node
records the reached state, a TERM flag, and the outgoing labelled steps;
INC is implicit in node existence (by S2), and an aborting node *is* the
full universe from its state within the remaining budget (by S3), interned
specially.  Equality of denotations is therefore pointer equality of roots,
and refinement is a memoised simulation check.

Refinement maps to superset inclusion: c refines-to d iff den(c) >= den(d).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cmdlang as cl
from .errors import RgError, SpaceMismatchError, UnboundFixpointError
from .relspace import StateSpace, State

PGM = "pgm"
ENV = "env"
TERM = "TERM"
ABORT = "ABORT"
INC = "INC"

_LABEL_GLYPH = {PGM: "π", ENV: "ε"}

# step-label codes inside tries
_PI = 0
_EPS = 1

# how synchronisation combines step labels: {(l1, l2): l}
_PAR_LABELS = {(_PI, _EPS): _PI, (_EPS, _PI): _PI, (_EPS, _EPS): _EPS}
_CONJ_LABELS = {(_PI, _PI): _PI, (_EPS, _EPS): _EPS}


@dataclass(frozen=True)
class Step:
    label: str  # PGM or ENV
    post: State


@dataclass(frozen=True)
class Behavior:
    initial: State
    steps: tuple
    status: str

    def render(self) -> str:
        parts = [self.initial.render()]
        for st in self.steps:
            parts.append(f"--{_LABEL_GLYPH[st.label]}--> {st.post.render()}")
        return " ".join(parts) + f" [{self.status}]"


def render_behavior(b: Behavior) -> str:
    return b.render()


class _Ctx:
    """Per-space trie store: interned nodes plus operation memo tables."""

    def __init__(self, space: StateSpace):
        self.space = space
        self.n = space.state_count
        self.key2id: dict = {}
        self.state: list[int] = []
        self.term: list[bool] = []
        self.abortb: list[int] = []  # -1 for ordinary nodes, else remaining budget
        self.edges: list[tuple] = []  # sorted ((code, child), ...); code = label*n + post
        self.memo_union: dict = {}
        self.memo_meet: dict = {}
        self.memo_seq: dict = {}
        self.memo_sync: dict = {}
        self.memo_sim: dict = {}
        self.memo_trunc: dict = {}
        self.den_memo: dict = {}
        self.empty_nodes = [self._node(s, False, ()) for s in range(self.n)]
        self.term_nodes = [self._node(s, True, ()) for s in range(self.n)]

    def _node(self, state: int, term: bool, edges: tuple) -> int:
        key = (state, term, edges)
        nid = self.key2id.get(key)
        if nid is None:
            nid = len(self.state)
            self.key2id[key] = nid
            self.state.append(state)
            self.term.append(term)
            self.abortb.append(-1)
            self.edges.append(edges)
        return nid

    def universe(self, state: int, budget: int) -> int:
        key = ("A", state, budget)
        nid = self.key2id.get(key)
        if nid is None:
            nid = len(self.state)
            self.key2id[key] = nid
            self.state.append(state)
            self.term.append(True)
            self.abortb.append(budget)
            self.edges.append(())
        return nid

    def make(self, state: int, term: bool, edge_map: dict) -> int:
        if not edge_map:
            return self.term_nodes[state] if term else self.empty_nodes[state]
        return self._node(state, term, tuple(sorted(edge_map.items())))

    def is_abort(self, nid: int) -> bool:
        return self.abortb[nid] >= 0

    def universe_edges(self, nid: int):
        """Materialise the implicit outgoing steps of an abort (universe) node."""
        budget = self.abortb[nid]
        if budget <= 0:
            return ()
        out = []
        for lab in (_PI, _EPS):
            for post in range(self.n):
                out.append((lab * self.n + post, self.universe(post, budget - 1)))
        return tuple(out)

    def out_edges(self, nid: int):
        if self.abortb[nid] >= 0:
            return self.universe_edges(nid)
        return self.edges[nid]

    # -- lattice operations on nodes ------------------------------------

    def union(self, a: int, b: int) -> int:
        if a == b:
            return a
        if a > b:
            a, b = b, a
        key = (a, b)
        out = self.memo_union.get(key)
        if out is None:
            out = self._union(a, b)
            self.memo_union[key] = out
        return out

    def _union(self, a: int, b: int) -> int:
        ab, bb = self.abortb[a], self.abortb[b]
        if ab >= 0 and bb >= 0:
            return a if ab >= bb else b
        if ab >= 0 or bb >= 0:
            # a universe absorbs anything of no greater depth
            return a if ab >= 0 else b
        em = dict(self.edges[a])
        for code, child in self.edges[b]:
            cur = em.get(code)
            em[code] = child if cur is None else self.union(cur, child)
        return self.make(self.state[a], self.term[a] or self.term[b], em)

    def meet(self, a: int, b: int) -> int:
        if a == b:
            return a
        if a > b:
            a, b = b, a
        key = (a, b)
        out = self.memo_meet.get(key)
        if out is None:
            out = self._meet(a, b)
            self.memo_meet[key] = out
        return out

    def _meet(self, a: int, b: int) -> int:
        if self.abortb[a] >= 0 and self.abortb[b] >= 0:
            return a if self.abortb[a] <= self.abortb[b] else b
        if self.abortb[a] >= 0:
            return b
        if self.abortb[b] >= 0:
            return a
        eb = dict(self.edges[b])
        em = {}
        for code, child in self.edges[a]:
            other = eb.get(code)
            if other is not None:
                em[code] = self.meet(child, other)
        return self.make(self.state[a], self.term[a] and self.term[b], em)

    def seqgraft(self, nid: int, budget: int, den: "_Den") -> int:
        key = (nid, budget, den.token)
        out = self.memo_seq.get(key)
        if out is None:
            out = self._seqgraft(nid, budget, den)
            self.memo_seq[key] = out
        return out

    def _seqgraft(self, nid: int, budget: int, den: "_Den") -> int:
        if self.abortb[nid] >= 0:
            return nid  # abort absorbs whatever follows
        em = {
            code: self.seqgraft(child, budget - 1, den)
            for code, child in self.edges[nid]
        }
        base = self.make(self.state[nid], False, em)
        if self.term[nid]:
            base = self.union(base, den.at(self.state[nid], budget))
        return base

    def sync(self, a: int, b: int, partable: bool) -> int:
        key = (a, b, partable)
        out = self.memo_sync.get(key)
        if out is None:
            out = self._sync(a, b, partable)
            self.memo_sync[key] = out
        return out

    def _sync(self, a: int, b: int, partable: bool) -> int:
        # abort on either side at matched length aborts the composition
        if self.abortb[a] >= 0 and self.abortb[b] >= 0:
            return a if self.abortb[a] <= self.abortb[b] else b
        if self.abortb[a] >= 0:
            return self.universe(self.state[a], self.abortb[a])
        if self.abortb[b] >= 0:
            return self.universe(self.state[b], self.abortb[b])
        labels = _PAR_LABELS if partable else _CONJ_LABELS
        n = self.n
        by_post_b: dict = {}
        for code, child in self.edges[b]:
            by_post_b.setdefault(code % n, []).append((code // n, child))
        em: dict = {}
        for code, child in self.edges[a]:
            post = code % n
            la = code // n
            for lb, other in by_post_b.get(post, ()):
                lab = labels.get((la, lb))
                if lab is None:
                    continue
                tgt = lab * n + post
                merged = self.sync(child, other, partable)
                cur = em.get(tgt)
                em[tgt] = merged if cur is None else self.union(cur, merged)
        return self.make(self.state[a], self.term[a] and self.term[b], em)

    def simulated(self, sub: int, sup: int) -> bool:
        """Is the behaviour set of `sub` included in that of `sup`?"""
        if sub == sup:
            return True
        key = (sub, sup)
        out = self.memo_sim.get(key)
        if out is None:
            out = self._simulated(sub, sup)
            self.memo_sim[key] = out
        return out

    def _simulated(self, sub: int, sup: int) -> bool:
        if self.abortb[sup] >= 0:
            return True
        if self.abortb[sub] >= 0:
            return False
        if self.term[sub] and not self.term[sup]:
            return False
        es = dict(self.edges[sup])
        for code, child in self.edges[sub]:
            other = es.get(code)
            if other is None or not self.simulated(child, other):
                return False
        return True

    def truncate(self, nid: int, budget: int) -> int:
        key = (nid, budget)
        out = self.memo_trunc.get(key)
        if out is None:
            out = self._truncate(nid, budget)
            self.memo_trunc[key] = out
        return out

    def _truncate(self, nid: int, budget: int) -> int:
        if self.abortb[nid] >= 0:
            return self.universe(self.state[nid], min(self.abortb[nid], budget))
        if budget <= 0:
            return self.make(self.state[nid], self.term[nid], {})
        em = {
            code: self.truncate(child, budget - 1)
            for code, child in self.edges[nid]
        }
        return self.make(self.state[nid], self.term[nid], em)


_ctx_registry: dict = {}


def _ctx_for(space: StateSpace) -> _Ctx:
    ctx = _ctx_registry.get(id(space))
    if ctx is None:
        ctx = _Ctx(space)
        _ctx_registry[id(space)] = ctx
    return ctx


class _Den:
    """A denotation: state x remaining-budget -> trie node, memoised."""

    _tokens = iter(range(1 << 62))

    __slots__ = ("ctx", "fn", "memo", "token")

    def __init__(self, ctx: _Ctx, fn):
        self.ctx = ctx
        self.fn = fn
        self.memo: dict = {}
        self.token = next(_Den._tokens)

    def at(self, s: int, b: int) -> int:
        key = (s, b)
        v = self.memo.get(key)
        if v is None:
            v = self.fn(s, b)
            self.memo[key] = v
        return v


def _grid_den(ctx: _Ctx, grid: dict) -> _Den:
    return _Den(ctx, lambda s, b: grid[(s, b)])


class BehaviorSet:
    """A saturated bounded set of behaviours, one trie root per initial state."""

    __slots__ = ("space", "bound", "roots", "_ctx")

    def __init__(self, space: StateSpace, bound: int, roots: tuple, ctx: _Ctx):
        self.space = space
        self.bound = bound
        self.roots = roots
        self._ctx = ctx

    def __eq__(self, other):
        return (
            isinstance(other, BehaviorSet)
            and other.space is self.space
            and other.bound == self.bound
            and other.roots == self.roots
        )

    def __hash__(self):
        return hash((id(self.space), self.bound, self.roots))

    def includes(self, other: "BehaviorSet") -> bool:
        if other.space is not self.space:
            raise SpaceMismatchError("behavior sets over different spaces")
        if other.bound != self.bound:
            raise RgError("behavior sets at different bounds")
        ctx = self._ctx
        return all(
            ctx.simulated(o, s) for o, s in zip(other.roots, self.roots)
        )

    def truncated(self, bound: int) -> "BehaviorSet":
        if bound > self.bound:
            raise RgError("cannot extend a behavior set beyond its bound")
        ctx = self._ctx
        roots = tuple(ctx.truncate(r, bound) for r in self.roots)
        return BehaviorSet(self.space, bound, roots, ctx)

    def meet(self, other: "BehaviorSet") -> "BehaviorSet":
        if other.space is not self.space:
            raise SpaceMismatchError("behavior sets over different spaces")
        ctx = self._ctx
        roots = tuple(ctx.meet(a, b) for a, b in zip(self.roots, other.roots))
        return BehaviorSet(self.space, self.bound, roots, ctx)

    def contains(self, b: Behavior) -> bool:
        ctx = self._ctx
        nid = self.roots[b.initial.index]
        budget = self.bound
        for st in b.steps:
            code = (_PI if st.label == PGM else _EPS) * ctx.n + st.post.index
            if ctx.is_abort(nid):
                if budget <= 0:
                    return False
                nid, budget = ctx.universe(st.post.index, budget - 1), budget - 1
                continue
            nxt = dict(ctx.edges[nid]).get(code)
            if nxt is None:
                return False
            nid, budget = nxt, budget - 1
        if b.status == INC:
            return True
        if b.status == TERM:
            return ctx.term[nid]
        return ctx.is_abort(nid)

    def behaviors(self, limit: int | None = 200000):
        """Enumerate all behaviours, shortest first within each initial state."""
        ctx = self._ctx
        st = self.space.states
        count = 0
        for s0, root in enumerate(self.roots):
            stack = [(root, ())]
            while stack:
                nid, steps = stack.pop()
                statuses = [INC]
                if ctx.term[nid]:
                    statuses.append(TERM)
                if ctx.is_abort(nid):
                    statuses.append(ABORT)
                for status in statuses:
                    yield Behavior(st[s0], steps, status)
                    count += 1
                    if limit is not None and count > limit:
                        raise RgError(f"behavior enumeration exceeded {limit}")
                for code, child in reversed(ctx.out_edges(nid)):
                    lab = PGM if code // ctx.n == _PI else ENV
                    stack.append((child, steps + (Step(lab, st[code % ctx.n]),)))

    def __repr__(self):
        return f"BehaviorSet(bound={self.bound}, roots={self.roots})"


# -- denotation of commands -------------------------------------------------


def denote(c, space: StateSpace, bound: int, env: dict | None = None) -> BehaviorSet:
    """The saturated bounded behaviour set of command c over the space."""
    core = cl.desugar(c)
    dens = dict(env) if env else {}
    missing = cl.free_fixvars(core) - set(dens)
    if missing:
        raise UnboundFixpointError(f"unbound fixpoint variables: {sorted(missing)}")
    ctx = _ctx_for(space)
    den = _build_den(core, ctx, bound, dens)
    roots = tuple(den.at(s, bound) for s in range(ctx.n))
    return BehaviorSet(space, bound, roots, ctx)


def denotation_env(sets: dict) -> dict:
    """Adapt BehaviorSets to a fixpoint environment usable by `denote`."""
    env = {}
    for name, bs in sets.items():
        ctx = bs._ctx
        env[name] = _Den(ctx, lambda s, b, bs=bs, ctx=ctx: ctx.truncate(bs.roots[s], b))
    return env


def _env_key(core, dens: dict):
    names = sorted(cl.free_fixvars(core))
    return tuple((n, dens[n].token) for n in names)


def _build_den(core, ctx: _Ctx, bound: int, dens: dict) -> _Den:
    key = (core.uid, bound, _env_key(core, dens))
    den = ctx.den_memo.get(key)
    if den is None:
        den = _make_den(core, ctx, bound, dens)
        ctx.den_memo[key] = den
    return den


def _step_den(ctx: _Ctx, rel, label: int) -> _Den:
    succ = {}
    for i, j in rel.ipairs:
        succ.setdefault(i, []).append(j)
    n = ctx.n

    def fn(s, b):
        if b <= 0:
            return ctx.empty_nodes[s]
        em = {label * n + j: ctx.term_nodes[j] for j in succ.get(s, ())}
        return ctx.make(s, False, em)

    return _Den(ctx, fn)


def _make_den(core, ctx: _Ctx, bound: int, dens: dict) -> _Den:
    if isinstance(core, cl.Pgm):
        return _step_den(ctx, core.rel, _PI)
    if isinstance(core, cl.Env):
        return _step_den(ctx, core.rel, _EPS)
    if isinstance(core, cl.Test):
        members = core.pset.indices
        return _Den(
            ctx,
            lambda s, b: ctx.term_nodes[s] if s in members else ctx.empty_nodes[s],
        )
    if isinstance(core, cl.Abort):
        return _Den(ctx, ctx.universe)
    if isinstance(core, cl.Nondet):
        subs = [_build_den(b, ctx, bound, dens) for b in core.branches]

        def fn(s, b):
            out = ctx.empty_nodes[s]
            for d in subs:
                out = ctx.union(out, d.at(s, b))
            return out

        return _Den(ctx, fn)
    if isinstance(core, cl.Seq):
        first = _build_den(core.first, ctx, bound, dens)
        second = _build_den(core.second, ctx, bound, dens)
        return _Den(ctx, lambda s, b: ctx.seqgraft(first.at(s, b), b, second))
    if isinstance(core, (cl.Par, cl.Conj)):
        left = _build_den(core.left, ctx, bound, dens)
        right = _build_den(core.right, ctx, bound, dens)
        partable = isinstance(core, cl.Par)
        return _Den(
            ctx, lambda s, b: ctx.sync(left.at(s, b), right.at(s, b), partable)
        )
    if isinstance(core, cl.Fin):
        body = _build_den(core.body, ctx, bound, dens)

        def functional(X):
            return _Den(
                ctx,
                lambda s, b: ctx.union(
                    ctx.term_nodes[s], ctx.seqgraft(body.at(s, b), b, X)
                ),
            )

        return _fix(ctx, bound, functional, least=True)
    if isinstance(core, cl.Om):
        body = _build_den(core.body, ctx, bound, dens)

        def functional(X):
            return _Den(
                ctx,
                lambda s, b: ctx.union(
                    ctx.term_nodes[s], ctx.seqgraft(body.at(s, b), b, X)
                ),
            )

        return _fix(ctx, bound, functional, least=False)
    if isinstance(core, cl.Inf):
        om_den = _build_den(cl.om(core.body), ctx, bound, dens)
        magic = _Den(ctx, lambda s, b: ctx.empty_nodes[s])
        return _Den(ctx, lambda s, b: ctx.seqgraft(om_den.at(s, b), b, magic))
    if isinstance(core, (cl.Mu, cl.Nu)):
        least = isinstance(core, cl.Mu)

        def functional(X):
            inner = dict(dens)
            inner[core.var] = X
            return _build_den(core.body, ctx, bound, inner)

        return _fix(ctx, bound, functional, least=least)
    if isinstance(core, cl.FixVar):
        return dens[core.name]
    raise TypeError(f"cannot denote {core!r}")


_FIX_CAP = 10000


def _fix(ctx: _Ctx, bound: int, functional, least: bool) -> _Den:
    """Kleene iteration on the finite lattice of (state, budget)-indexed tries:
    from the minimal saturated set for least fixpoints, from the universe of
    bounded behaviours for greatest ones."""
    if least:
        cur = {
            (s, b): ctx.empty_nodes[s]
            for s in range(ctx.n)
            for b in range(bound + 1)
        }
    else:
        cur = {
            (s, b): ctx.universe(s, b)
            for s in range(ctx.n)
            for b in range(bound + 1)
        }
    for _ in range(_FIX_CAP):
        body = functional(_grid_den(ctx, cur))
        new = {sb: body.at(*sb) for sb in cur}
        if new == cur:
            return _grid_den(ctx, cur)
        cur = new
    raise AssertionError("fixpoint iteration failed to converge")


# -- saturation of raw behaviour sets ----------------------------------------


def saturate(raw, space: StateSpace, bound: int) -> BehaviorSet:
    """Least saturated superset of the given behaviours within the bound."""
    ctx = _ctx_for(space)
    tries: list = [{} for _ in range(ctx.n)]

    def fresh():
        return {"term": False, "abort": False, "edges": {}}

    roots = [fresh() for _ in range(ctx.n)]
    for b in raw:
        if len(b.steps) > bound:
            raise RgError(
                f"behavior has {len(b.steps)} steps, exceeding the bound {bound}"
            )
        prev = b.initial
        node = roots[b.initial.index]
        for st in b.steps:
            if st.post.space is not space or prev.space is not space:
                raise SpaceMismatchError("behavior states from a different space")
            code = (_PI if st.label == PGM else _EPS) * ctx.n + st.post.index
            node = node["edges"].setdefault(code, fresh())
            prev = st.post
        if b.status == TERM:
            node["term"] = True
        elif b.status == ABORT:
            node["abort"] = True

    def intern(node, state, budget):
        if node["abort"]:
            return ctx.universe(state, budget)
        em = {
            code: intern(child, code % ctx.n, budget - 1)
            for code, child in node["edges"].items()
        }
        return ctx.make(state, node["term"], em)

    del tries
    root_ids = tuple(intern(roots[s], s, bound) for s in range(ctx.n))
    return BehaviorSet(space, bound, root_ids, ctx)


# -- refinement oracle --------------------------------------------------------


def refines(c, d, space: StateSpace, bound: int) -> bool:
    """c is refined by d: every bounded behaviour of d is a behaviour of c."""
    return denote(c, space, bound).includes(denote(d, space, bound))


def equivalent(c, d, space: StateSpace, bound: int) -> bool:
    return denote(c, space, bound) == denote(d, space, bound)


def find_counterexample(c, d, space: StateSpace, bound: int) -> Behavior | None:
    """A behaviour of d absent from c, minimal by (length, lexicographic);
    None when the refinement c >= d holds at this bound."""
    return set_counterexample(denote(c, space, bound), denote(d, space, bound))


def set_counterexample(sup: BehaviorSet, sub: BehaviorSet) -> Behavior | None:
    """A behaviour of `sub` absent from `sup`, minimal by (length, lexicographic)."""
    ctx = sup._ctx
    st = sup.space.states
    from collections import deque

    queue = deque(
        (sub.roots[s], sup.roots[s], s, ())
        for s in range(ctx.n)
    )
    while queue:
        dn, cn, s0, steps = queue.popleft()
        if cn is None:
            return Behavior(st[s0], steps, INC)
        if ctx.is_abort(cn):
            continue  # universe includes everything below
        if ctx.term[dn] and not ctx.term[cn]:
            return Behavior(st[s0], steps, TERM)
        if ctx.is_abort(dn):
            return Behavior(st[s0], steps, ABORT)
        cedges = dict(ctx.edges[cn])
        for code, child in ctx.out_edges(dn):
            lab = PGM if code // ctx.n == _PI else ENV
            step = Step(lab, st[code % ctx.n])
            queue.append((child, cedges.get(code), s0, steps + (step,)))
    return None
