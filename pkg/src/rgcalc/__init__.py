"""Executable kernel for the rely/guarantee concurrent refinement calculus."""

__version__ = "0.1.0"

from .relspace import (  # noqa: F401
    Rel,
    State,
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
from .exprs import (  # noqa: F401
    Binary,
    BoolEncoding,
    Constant,
    Expression,
    Unary,
    Variable,
    eq_val,
    eval_expr,
    is_invariant_under,
    is_single_reference,
    type_of,
)
from .semantics import (  # noqa: F401
    Behavior,
    BehaviorSet,
    Step,
    denote,
    equivalent,
    find_counterexample,
    refines,
    render_behavior,
    saturate,
)
