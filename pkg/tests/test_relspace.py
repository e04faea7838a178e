"""Relational toolkit: operations, worked instances, and algebraic properties.

Derived expectations are first computed by brute-force oracles written
directly against state tuples, then compared with the library operations.
"""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rgcalc.errors import ConfigurationError, SpaceMismatchError
from rgcalc.relspace import (
    Rel,
    StateSet,
    StateSpace,
    ValueOrder,
    compose,
    enumerate_states,
    identity_on,
    image,
    is_stable,
    is_well_founded,
    restrict,
    rtc,
    superset_order,
    tolerates,
)

# ---------------------------------------------------------------- oracles


def brute_compose(pairs1, pairs2):
    return {(a, c) for a, b in pairs1 for b2, c in pairs2 if b == b2}


def brute_closure(pairs, carrier):
    out = {(s, s) for s in carrier}
    changed = True
    while changed:
        changed = False
        for a, b in list(out):
            for b2, c in pairs:
                if b == b2 and (a, c) not in out:
                    out.add((a, c))
                    changed = True
    return out


def brute_image(pairs, members):
    return {b for a, b in pairs if a in members}


# ---------------------------------------------------------------- state spaces


def test_enumerate_single_variable():
    sp = StateSpace([("x", (0, 1))])
    assert [s.render() for s in enumerate_states(sp)] == ["x=0", "x=1"]


def test_enumerate_product_count():
    sp = StateSpace([("x", (0, 1)), ("y", (0, 1))])
    assert sp.state_count == 4
    # lexicographic: x varies slowest
    assert [s.values for s in sp.states] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_empty_domain_rejected():
    with pytest.raises(ConfigurationError):
        StateSpace([("x", ())])


def test_state_cap_enforced():
    with pytest.raises(ConfigurationError):
        StateSpace([("x", range(100)), ("y", range(100))], max_states=256)


def test_duplicate_names_rejected():
    with pytest.raises(ConfigurationError):
        StateSpace([("x", (0,)), ("x", (1,))])


def test_space_mismatch_detected(two_state):
    other = StateSpace([("x", (0, 1))])
    with pytest.raises(SpaceMismatchError):
        compose(two_state.identity_rel, other.identity_rel)


# ---------------------------------------------------------------- compose / rtc


def test_compose_identity_is_unit(two_state, rels):
    rid = two_state.identity_rel
    for r in rels:
        assert compose(r, rid) == r
        assert compose(rid, r) == r


def test_compose_single_chain(two_state):
    r1 = Rel(two_state, [(0, 1)])
    r2 = Rel(two_state, [(1, 0)])
    assert compose(r1, r2) == Rel(two_state, [(0, 0)])


def test_compose_matches_brute_oracle(two_state, rels):
    for r1 in rels:
        for r2 in rels:
            assert compose(r1, r2).ipairs == frozenset(
                brute_compose(r1.ipairs, r2.ipairs)
            )


def test_compose_associative_exhaustive(two_state, rels):
    for r1, r2, r3 in itertools.product(rels, rels, rels):
        assert compose(compose(r1, r2), r3) == compose(r1, compose(r2, r3))


def test_rtc_empty_is_identity(two_state):
    assert rtc(two_state.empty_rel) == two_state.identity_rel


def test_rtc_no_further_chaining(two_state):
    r = Rel(two_state, [(0, 1)])
    assert rtc(r) == r.union(two_state.identity_rel)


def test_rtc_matches_brute_closure(two_state, rels):
    carrier = range(two_state.state_count)
    for r in rels:
        assert rtc(r).ipairs == frozenset(brute_closure(r.ipairs, carrier))


@given(st.integers(0, 2 ** 4 - 1))
@settings(max_examples=16, deadline=None)
def test_rtc_idempotent_and_extensive(mask):
    sp = StateSpace([("x", (0, 1))])
    pairs = [(i, j) for k, (i, j) in enumerate(itertools.product((0, 1), repeat=2))
             if mask >> k & 1]
    r = Rel(sp, pairs)
    closed = rtc(r)
    assert rtc(closed) == closed
    assert sp.identity_rel <= closed
    assert r <= closed


# ---------------------------------------------------------------- restrict / image


def test_restrict_full_both_sides(two_state, rels):
    full = two_state.full_set
    for r in rels:
        assert restrict(full, r, full) == r
        assert restrict(None, r, None) == r


def test_restrict_domain_singleton(two_state):
    p = StateSet(two_state, [0])
    out = restrict(p, two_state.universal_rel, None)
    assert out == Rel(two_state, [(0, 0), (0, 1)])


def test_image_examples(two_state, sets):
    r = Rel(two_state, [(0, 1)])
    assert image(r, StateSet(two_state, [0])) == StateSet(two_state, [1])
    for p in sets:
        assert image(two_state.identity_rel, p) == p


def test_image_matches_brute(two_state, rels, sets):
    for r in rels:
        for p in sets:
            assert image(r, p).indices == frozenset(brute_image(r.ipairs, p.indices))


def test_image_distributes_over_union(two_state, rels, sets):
    for r in rels:
        for p1 in sets:
            for p2 in sets:
                assert image(r, p1.union(p2)) == image(r, p1).union(image(r, p2))


def test_identity_on(two_state):
    sp2 = StateSpace([("x", (0, 1)), ("y", (0, 1))])
    assert identity_on(sp2, sp2.variables) == sp2.identity_rel
    assert identity_on(sp2, ()) == sp2.universal_rel
    assert len(identity_on(sp2, ("x",))) == 8


# ---------------------------------------------------------------- stability


def test_stable_full_set_under_anything(two_state, rels):
    for r in rels:
        assert is_stable(two_state.full_set, r)


def test_unstable_example(two_state):
    assert not is_stable(StateSet(two_state, [0]), Rel(two_state, [(0, 1)]))


def test_stable_pred_running_example(rem_space):
    # {w subseteq pw} is stable when the environment only shrinks w
    p = rem_space.set_where(lambda s: s["w"] & ~s["pw"] == 0)
    r = rem_space.rel_where(
        lambda a, b: b["w"] & ~a["w"] == 0 and b["pw"] == a["pw"]
    )
    assert is_stable(p, r)


def test_stable_transitive_image_collapses(rem_space):
    # when p is stable under r, the image through the closure is p itself
    p = rem_space.set_where(lambda s: s["w"] & ~s["pw"] == 0)
    r = rem_space.rel_where(
        lambda a, b: b["w"] & ~a["w"] == 0 and b["pw"] == a["pw"]
    )
    assert image(rtc(r), p) == p


def test_running_example_compose_containments(rem_space):
    # oracle: direct enumeration over all state pairs at N=2
    sp = rem_space
    q_read = sp.rel_where(
        lambda a, b: b["pw"] & ~a["w"] == 0 and b["w"] & ~b["pw"] == 0
    )
    q_cas = sp.rel_where(
        lambda a, b: (b["w"] & ~a["pw"] == 0 and b["w"] != a["pw"])
        or not (b["w"] >> b["i"] & 1)
    )
    q_body = sp.rel_where(
        lambda a, b: (b["w"] & ~a["w"] == 0 and b["w"] != a["w"])
        or not (b["w"] >> b["i"] & 1)
    )
    q_calc = sp.rel_where(
        lambda a, b: b["nw"] == a["pw"] & ~(1 << a["i"])
        and b["pw"] == a["pw"]
        and b["w"] & ~b["pw"] == 0
        and b["i"] == a["i"]
    )
    oracle1 = brute_compose(q_read.ipairs, q_cas.ipairs) <= q_body.ipairs
    oracle2 = brute_compose(q_calc.ipairs, q_cas.ipairs) <= q_cas.ipairs
    assert oracle1 and oracle2
    assert compose(q_read, q_cas) <= q_body
    assert compose(q_calc, q_cas) <= q_cas


def test_running_example_closure_claim(rem_space):
    # rtc of rely + frame-restricted guarantee stays inside the rely shape
    sp = rem_space
    g = sp.rel_where(
        lambda a, b: b["w"] & ~a["w"] == 0
        and (a["w"] & ~b["w"]) & ~(1 << a["i"]) == 0
    )
    r = sp.rel_where(lambda a, b: b["w"] & ~a["w"] == 0 and b["i"] == a["i"])
    frame_id = identity_on(sp, ("pw", "nw", "i"))
    closure = rtc(r.union(g.inter(frame_id)))
    target = sp.rel_where(lambda a, b: b["w"] & ~a["w"] == 0 and b["i"] == a["i"])
    oracle = frozenset(
        brute_closure(r.union(g.inter(frame_id)).ipairs, range(sp.state_count))
    )
    assert oracle <= target.ipairs
    assert closure <= target


# ---------------------------------------------------------------- tolerates


def test_tolerates_running_example(rem_space):
    sp = rem_space
    q = sp.rel_where(
        lambda a, b: (b["w"] & ~a["pw"] == 0 and b["w"] != a["pw"])
        or not (b["w"] >> b["i"] & 1)
    )
    r = sp.rel_where(
        lambda a, b: b["w"] & ~a["w"] == 0
        and b["i"] == a["i"]
        and b["nw"] == a["nw"]
        and b["pw"] == a["pw"]
    )
    p = sp.set_where(
        lambda s: s["w"] & ~s["pw"] == 0
        and s["nw"] == s["pw"] & ~(1 << s["i"])
    )
    assert tolerates(q, r, p)


def test_tolerates_identity_always(two_state, rels, sets):
    rid = two_state.identity_rel
    for q in rels:
        for p in sets:
            assert tolerates(q, rid, p)


def test_not_tolerates_universal(two_state):
    # oracle: r;q escapes q, found by enumeration
    q = two_state.identity_rel
    r = two_state.universal_rel
    p = two_state.full_set
    escaped = brute_compose(r.ipairs, q.ipairs) - set(q.ipairs)
    assert escaped
    assert not tolerates(q, r, p)


# ---------------------------------------------------------------- value orders


def test_superset_order_well_founded():
    assert is_well_founded(superset_order(2))


def test_reflexive_order_not_well_founded():
    assert not is_well_founded(ValueOrder([(0, 0)]))


def test_two_cycle_not_well_founded():
    assert not is_well_founded(ValueOrder([(0, 1), (1, 0)]))


def test_superset_order_pairs():
    order = superset_order(1)
    assert order.gt == frozenset({(1, 0)})


# ------------------------------------------------- interference lemmas


def _dom_restrict_compose(p, r, q):
    return restrict(p, compose(r, q), None)


def test_interference_before_property(two_state, rels, sets):
    # if p is stable under r and a single r-step absorbs into q, then any
    # finite amount of prior interference absorbs into q
    for p in sets:
        for r in rels[:8]:
            for q in rels[8:]:
                if is_stable(p, r) and _dom_restrict_compose(p, r, q) <= q:
                    assert restrict(p, compose(rtc(r), q), None) <= q


def test_interference_after_property(two_state, rels, sets):
    for p in sets:
        for r in rels[:8]:
            for q in rels[8:]:
                if restrict(p, compose(q, r), None) <= q:
                    assert restrict(p, compose(q, rtc(r)), None) <= q


def test_tolerates_absorbs_closure_both_sides(two_state, rels, sets):
    # tolerance gives absorption of interference before and after together
    for p in sets:
        for r in rels[:8]:
            for q in rels[8:]:
                if tolerates(q, r, p):
                    closed = compose(compose(rtc(r), q), rtc(r))
                    assert restrict(p, closed, None) <= q
