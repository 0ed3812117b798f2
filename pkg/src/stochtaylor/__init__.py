"""Constructive stochastic Taylor expansions and mean value points.

The intermediate point of a Taylor expansion with Lagrange remainder is
computed realization by realization with a deterministic sup-selector, so
``omega -> xi(omega)`` is a well-defined function of ``X(omega)``.
"""

from .probability import (
    FiniteProbabilitySpace,
    RandomVariable,
    SampleStream,
    empirical_space,
    expectation,
    is_measurable_wrt,
    sigma_generated_by,
)
from .selector import (
    INF,
    SUP,
    CandidateBracket,
    NoRootFound,
    RemainderEquation,
    SelectionErrors,
    SelectionPolicy,
    SelectionResult,
    Variant,
    apply_over_sample,
    build_remainder_equation,
    candidate_bracket,
    solve_selector,
    solve_selector_multi,
    solve_selector_uni,
)
from .taylor_core import (
    Box,
    ConvexSet,
    DomainError,
    Interval,
    OrderError,
    ScalarField,
    VectorField,
    directional_power,
    integral_remainder_vec,
    jacobian,
    lagrange_remainder_uni,
    multi_indices,
    partial_sum_multi,
    partial_sum_uni,
    partial_sum_vec,
)

__version__ = "0.1.0"
