import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bisect, dense_scan_roots
from stochtaylor.fields import exp, log_shifted, poly, poly_multi, separable, sin, square
from stochtaylor.probability import FiniteProbabilitySpace, RandomVariable
from stochtaylor.selector import (
    INF,
    SUP,
    NoRootFound,
    SelectionErrors,
    SelectionPolicy,
    Variant,
    apply_over_sample,
    build_remainder_equation,
    candidate_bracket,
    certify_sup,
    select_root,
    solve_selector_multi,
    solve_selector_uni,
)
from stochtaylor.taylor_core import DomainError, ScalarField, partial_sum_uni


def test_candidate_bracket_cases():
    b = candidate_bracket(2.0)
    assert (b.lo, b.hi, b.degenerate) == (0.0, 2.0, False)
    b = candidate_bracket(0.0)
    assert (b.lo, b.hi, b.degenerate) == (0.0, 0.0, True)
    b = candidate_bracket(-3.0)
    assert (b.lo, b.hi, b.degenerate) == (-3.0, 0.0, False)
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError):
            candidate_bracket(bad)


@given(st.floats(-1e6, 1e6))
def test_candidate_bracket_contains_zero(x):
    b = candidate_bracket(x)
    assert b.lo <= 0.0 <= b.hi and b.lo <= b.hi


def test_policy_validation():
    with pytest.raises(ValueError):
        SelectionPolicy(scan_points=1)
    with pytest.raises(ValueError):
        SelectionPolicy(refine_tol=0.0)
    assert SelectionPolicy("inf").variant is Variant.INF


# --------------------------------------------------------------------------
# remainder equation


def test_remainder_equation_quadratic():
    eq = build_remainder_equation(square(), 0.0, 2.0, 1)
    assert eq.pi == 4.0
    np.testing.assert_allclose(eq.g(np.array([0.0, 0.5, 2.0])), [0.0, 2.0, 8.0])


def test_remainder_equation_degenerate():
    eq = build_remainder_equation(exp(), 0.3, 0.0, 2)
    assert eq.pi == 0.0
    assert np.all(eq.g(np.linspace(0, 1, 5)) == 0.0)


def test_remainder_equation_periodic():
    eq = build_remainder_equation(sin(), 0.0, 2 * math.pi, 1)
    assert abs(eq.pi) < 1e-15
    s = np.array([0.0, 1.0, 2.5])
    np.testing.assert_allclose(eq.g(s), 2 * math.pi * np.cos(s))


def test_remainder_equation_multivariate():
    f = poly_multi({(2, 0): 1.0, (0, 2): 1.0})
    eq = build_remainder_equation(f, [0.0, 0.0], [2.0, 2.0], 1)
    assert eq.multivariate and eq.pi == 8.0
    np.testing.assert_allclose(eq.g(np.array([0.0, 0.5, 1.0])), [0.0, 8.0, 16.0])


# --------------------------------------------------------------------------
# univariate solves


def test_quadratic_midpoint():
    res = solve_selector_uni(square(), 0.0, 2.0, 1)
    assert res.xi == 1.0 and res.theta == 0.5 and res.residual == 0.0


def test_sine_sup_and_inf():
    sup = solve_selector_uni(sin(), 0.0, 2 * math.pi, 1, SUP)
    inf = solve_selector_uni(sin(), 0.0, 2 * math.pi, 1, INF)
    assert sup.xi == pytest.approx(3 * math.pi / 2, abs=1e-10)
    assert inf.xi == pytest.approx(math.pi / 2, abs=1e-10)
    assert sup.root_count_estimate == 2


def test_cubic_unique_root():
    res = solve_selector_uni(poly([0, 0, 0, 1]), 0.0, 3.0, 1)
    assert res.xi == pytest.approx(math.sqrt(3), abs=1e-11)


def test_degenerate_increment():
    res = solve_selector_uni(exp(), 0.4, 0.0, 3)
    assert res.xi == 0.0 and res.residual == 0.0 and res.bracket.degenerate
    assert res.point == 0.4


def test_negative_increment_in_bracket():
    res = solve_selector_uni(exp(), 0.5, -1.5, 2)
    assert res.bracket.lo == -1.5 and res.bracket.contains(res.xi)
    assert 0.0 <= res.theta <= 1.0


def test_flat_remainder_sup_returns_endpoint():
    # identity: f' == 1, every offset solves the equation
    ident = poly([0.0, 1.0])
    assert solve_selector_uni(ident, 0.2, 0.5, 1, SUP).xi == 0.5
    assert solve_selector_uni(ident, 0.2, 0.5, 1, INF).xi == 0.0
    assert solve_selector_uni(ident, 0.2, -0.5, 1, SUP).xi == 0.0
    assert solve_selector_uni(ident, 0.2, -0.5, 1, INF).xi == -0.5


def test_tangential_root_admitted():
    # g(s) - pi = (s - 0.5)^2 touches zero without a sign change
    res, count = select_root(lambda s: (np.asarray(s) - 0.5) ** 2, 0.0, 0.0, 1.0, SelectionPolicy(scan_points=5))
    assert res == 0.5 and count == 1


def test_no_root_found_on_bad_oracle():
    wrong = ScalarField(1, 3, np.exp, lambda x, a: 2 * np.exp(x) + 1)
    with pytest.raises(NoRootFound):
        solve_selector_uni(wrong, 0.0, 1.0, 1)


def test_domain_violation():
    with pytest.raises(DomainError):
        solve_selector_uni(log_shifted(), 0.0, -1.5, 1)


def test_remainder_equation_matches_taylor():
    res = solve_selector_uni(exp(), 0.5, 1.2, 3)
    lhs = math.exp(1.7)
    rhs = partial_sum_uni(exp(), 0.5, 1.2, 3) + math.exp(0.5 + res.xi) * 1.2 ** 3 / 6
    assert lhs == pytest.approx(rhs, rel=1e-13)


SMOOTH = [
    ("poly6", lambda: poly([0.3, -1.0, 0.5, 0.25, -0.8, 0.1, 0.4]), -2.0, 2.0),
    ("exp", exp, -2.0, 2.0),
    ("sin", sin, -3.0, 3.0),
    ("log1p", log_shifted, -0.85, 2.0),
]


@pytest.mark.parametrize("name,make,lo,hi", SMOOTH)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_and_containment(name, make, lo, hi, n):
    f = make()
    rng = np.random.default_rng(n)
    for x in rng.uniform(lo, hi, 200):
        res = solve_selector_uni(f, 0.0, x, n)
        assert res.bracket.contains(res.xi)
        fx = float(f(x))
        assert abs(fx - partial_sum_uni(f, 0.0, x, n) - float(f.derivative(res.xi, n)) * x ** n / math.factorial(n)) \
            <= 1e-9 * (1 + abs(fx))


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-4, 4).filter(lambda v: abs(v) > 1e-6), a=st.floats(-1, 1), n=st.integers(1, 3))
def test_inf_le_sup(x, a, n):
    f = sin()
    lo = solve_selector_uni(f, a, x, n, INF).xi
    hi = solve_selector_uni(f, a, x, n, SUP).xi
    assert lo <= hi


@settings(max_examples=40, deadline=None)
@given(x=st.floats(0.5, 30.0), a=st.floats(-3, 3))
def test_sup_certified_by_dense_scan(x, a):
    f = sin()
    res = solve_selector_uni(f, a, x, 1)
    eq = build_remainder_equation(f, a, x, 1)
    assert certify_sup(eq.g, eq.pi, res.xi, res.bracket.hi, 10 * SUP.scan_points)


def test_factorization_bit_identical():
    first = solve_selector_uni(log_shifted(), 0.5, -1.2, 3)
    for _ in range(3):
        again = solve_selector_uni(log_shifted(), 0.5, -1.2, 3)
        assert again == first


# --------------------------------------------------------------------------
# multivariate solves


def test_multi_quadratic():
    f = poly_multi({(2, 0): 1.0, (0, 2): 1.0})
    res = solve_selector_multi(f, [0.0, 0.0], [2.0, 2.0], 1)
    assert res.theta == 0.5
    np.testing.assert_array_equal(res.xi, [1.0, 1.0])


def test_multi_degenerate():
    f = poly_multi({(2, 0): 1.0, (0, 2): 1.0})
    res = solve_selector_multi(f, [0.3, 0.1], [0.0, 0.0], 2)
    assert res.theta == 0.0 and res.residual == 0.0
    np.testing.assert_array_equal(res.xi, [0.0, 0.0])


def test_multi_exp_times_y_against_scan_oracle():
    f = separable(exp(), poly([0.0, 1.0]))
    # grad f(t, 1 + t) . (1, 1) = e^t (2 + t); target f(1, 2) - f(0, 1) = 2e - 1
    r = lambda t: math.exp(t) * (2 + t) - (2 * math.e - 1)
    intervals = dense_scan_roots(r, 0.0, 1.0)
    assert len(intervals) == 1
    theta_oracle = bisect(r, *intervals[-1])
    assert theta_oracle == pytest.approx(0.5527204801851722, abs=1e-15)

    res = solve_selector_multi(f, [0.0, 1.0], [1.0, 1.0], 1)
    assert res.theta == pytest.approx(theta_oracle, abs=1e-11)
    grad = np.array([math.exp(res.theta) * (1 + res.theta), math.exp(res.theta)])
    assert abs(2 * math.e - 1 - grad @ np.array([1.0, 1.0])) <= 1e-10


def test_multi_inf_le_sup():
    f = separable(sin(), sin())
    a, X = [0.0, 0.0], [9.0, 7.0]
    assert solve_selector_multi(f, a, X, 1, INF).theta <= solve_selector_multi(f, a, X, 1, SUP).theta


# --------------------------------------------------------------------------
# over a sample space


def space_with(values):
    space = FiniteProbabilitySpace.discrete(range(len(values)))
    return RandomVariable.from_sequence(space, values)


def test_apply_over_sample_constant():
    X = space_with([1.3] * 5)
    xi = apply_over_sample(exp(), 0.0, X, 2)
    assert len(set(xi.values)) == 1


def test_apply_over_sample_equal_values_equal_xi():
    X = space_with([0.7, 2.0, 0.7, -1.0, 2.0])
    xi = apply_over_sample(sin(), 0.1, X, 1)
    assert xi["0"] == xi["2"] and xi["1"] == xi["4"]
    assert xi.space is X.space


def test_apply_over_sample_exp_closed_form():
    X = space_with([0.5, 1.0, 1.5])
    xi = apply_over_sample(exp(), 0.0, X, 1)
    for omega, x in X.items():
        assert xi[omega] == pytest.approx(math.log((math.exp(x) - 1) / x), rel=1e-10)


def test_apply_over_sample_multivariate():
    f = poly_multi({(2, 0): 1.0, (0, 2): 1.0})
    X = space_with([(2.0, 2.0), (0.0, 0.0), (1.0, -3.0)])
    xi = apply_over_sample(f, [0.0, 0.0], X, 1)
    assert xi["0"] == (1.0, 1.0) and xi["1"] == (0.0, 0.0)
    assert xi["2"] == pytest.approx((0.5, -1.5))


def test_apply_over_sample_collects_failures():
    X = space_with([0.5, -2.0, -3.0])
    with pytest.raises(SelectionErrors) as info:
        apply_over_sample(log_shifted(), 0.0, X, 1)
    assert set(info.value.failures) == {"1", "2"}
