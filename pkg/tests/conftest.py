import pytest

from rgcalc.relspace import Rel, StateSet, StateSpace


@pytest.fixture
def two_state():
    return StateSpace([("x", (0, 1))])


@pytest.fixture
def rels(two_state):
    return list(two_state.all_relations())


@pytest.fixture
def sets(two_state):
    return list(two_state.all_state_sets())


def rel_of(space, pairs):
    return Rel(space, pairs)


def set_of(space, idxs):
    return StateSet(space, idxs)


@pytest.fixture
def rem_space():
    """The remove-element space at N=2: w, pw, nw bitmasks, i an index."""
    return StateSpace(
        [("w", range(4)), ("pw", range(4)), ("nw", range(4)), ("i", range(2))]
    )
