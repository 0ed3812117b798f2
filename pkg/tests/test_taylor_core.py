import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochtaylor.fields import exp, exp_affine, log_shifted, poly, poly_multi, separable, sin, cos
from oracles import directional_fd
from stochtaylor.taylor_core import (
    Box,
    ConvexSet,
    DomainError,
    Interval,
    OrderError,
    QuadratureWarning,
    ScalarField,
    VectorField,
    directional_power,
    integral_remainder_vec,
    jacobian,
    lagrange_remainder_uni,
    multi_indices,
    multinomial,
    partial_sum_multi,
    partial_sum_uni,
    partial_sum_vec,
)


def sin_cos():
    return separable(sin(), cos(), name="sin*cos")


# --------------------------------------------------------------------------
# fields and multi-indices


def test_multi_indices_order_and_count():
    idx = list(multi_indices(3, 2))
    assert idx[0] == (2, 0, 0) and idx[-1] == (0, 0, 2)
    assert idx == sorted(idx, reverse=True)
    assert len(idx) == math.comb(2 + 3 - 1, 3 - 1)
    assert all(sum(a) == 2 for a in idx)


def test_multinomial_weights_sum_to_p_power_n():
    for p, n in [(2, 3), (3, 4), (4, 2)]:
        assert sum(multinomial(a) for a in multi_indices(p, n)) == p ** n


def test_zero_multi_index_is_eval():
    f = exp_affine([1.0, -2.0], 0.3)
    x = np.array([0.2, 0.7])
    assert f.derivative(x, (0, 0)) == f(x)
    assert sin().derivative(0.4, 0) == np.sin(0.4)


def test_mixed_partials_symmetric():
    # d/dx_i (d/dx_j f) == d/dx_j (d/dx_i f) == oracle at e_i + e_j
    step = 1e-5
    for f in (poly_multi({(2, 1, 0): 1.5, (1, 1, 1): -2.0, (0, 3, 2): 0.5}),
              separable(sin(), exp(), cos()), exp_affine([0.3, -1.0, 2.0])):
        x = np.array([0.3, -1.1, 0.8])
        for i, j in itertools.combinations(range(3), 2):
            ei, ej = np.eye(3)[i], np.eye(3)[j]
            first_i = tuple(int(k == i) for k in range(3))
            first_j = tuple(int(k == j) for k in range(3))
            d_ij = (f.derivative(x + step * ei, first_j) - f.derivative(x - step * ei, first_j)) / (2 * step)
            d_ji = (f.derivative(x + step * ej, first_i) - f.derivative(x - step * ej, first_i)) / (2 * step)
            oracle = f.derivative(x, tuple(a + b for a, b in zip(first_i, first_j)))
            assert d_ij == pytest.approx(d_ji, rel=1e-6, abs=1e-8)
            assert d_ij == pytest.approx(oracle, rel=1e-6, abs=1e-8)


def test_order_limit_enforced():
    f = ScalarField(1, 2, np.exp, lambda x, a: np.exp(x))
    f.derivative(0.0, 2)
    with pytest.raises(OrderError):
        f.derivative(0.0, 3)
    with pytest.raises(OrderError):
        partial_sum_uni(f, 0.0, 1.0, 4)


def test_finite_difference_mode_matches_analytic():
    fd = ScalarField(1, 3, np.exp)
    assert fd.derivative_mode == "finite-difference"
    for k in (1, 2, 3):
        assert fd.derivative(0.4, k) == pytest.approx(np.exp(0.4), rel=1e-4)
    fd2 = ScalarField(2, 2, lambda x: np.sin(x[0]) * np.cos(x[1]))
    x = np.array([0.3, 0.5])
    assert fd2.derivative(x, (1, 1)) == pytest.approx(-np.cos(0.3) * np.sin(0.5), rel=1e-4)


def test_vector_field_requires_matching_components():
    with pytest.raises(ValueError):
        VectorField((exp(), exp_affine([1.0, 1.0])))


def test_domains():
    assert Interval(0, 1).contains([0, 0.5, 1])
    assert not Interval(0, 1).contains(1.5)
    with pytest.raises(ValueError):
        Interval(2, 1)
    disk = ConvexSet(lambda x: x @ x < 1.0, (-1, -1), (1, 1))
    assert disk.contains([0.1, 0.2]) and not disk.contains([0.9, 0.9])
    assert disk.spot_check_convex(np.random.default_rng(0))
    annulus = ConvexSet(lambda x: 0.25 < x @ x < 1.0, (-1, -1), (1, 1))
    assert not annulus.spot_check_convex(np.random.default_rng(0))
    assert Box([0, 0], [1, 1]).contains([[0.2, 0.5], [0.3, 1.0]])


# --------------------------------------------------------------------------
# univariate partial sums and remainders


def test_partial_sum_uni_empty_sum():
    assert partial_sum_uni(poly([0, 0, 1]), 0.0, 2.0, 1) == 0.0


def test_partial_sum_uni_exp():
    assert partial_sum_uni(exp(), 0.0, 1.0, 3) == 2.5


def test_partial_sum_uni_sin_series():
    # direct series: 0.3 - 0.3**3/6
    assert partial_sum_uni(sin(), 0.0, 0.3, 5) == pytest.approx(0.2955, abs=1e-15)


def test_partial_sum_uni_domain():
    with pytest.raises(DomainError):
        partial_sum_uni(log_shifted(), 0.0, -0.95, 2)


def test_lagrange_remainder_examples():
    assert lagrange_remainder_uni(poly([0, 0, 1]), 0.0, 0.5, 2.0, 1) == 4.0
    assert lagrange_remainder_uni(sin(), 0.3, 0.2, 0.0, 3) == 0.0
    assert lagrange_remainder_uni(exp(), 0.0, 0.5, 1.0, 2) == pytest.approx(0.8243606353500641, rel=1e-14)


@pytest.mark.parametrize("theta", [0.0, 1.0, -0.1, 1.5])
def test_lagrange_remainder_rejects_theta(theta):
    with pytest.raises(ValueError):
        lagrange_remainder_uni(exp(), 0.0, theta, 1.0, 2)


# --------------------------------------------------------------------------
# multivariate


def brute_force_directional(f, x, h, n):
    """Sum over all ordered coordinate sequences; no multinomial weights."""
    total = 0.0
    for seq in itertools.product(range(len(h)), repeat=n):
        alpha = tuple(seq.count(q) for q in range(len(h)))
        total += math.prod(h[q] for q in seq) * float(f.derivative(x, alpha))
    return total


def test_directional_power_examples():
    f = poly_multi({(2, 0): 1.0, (0, 2): 1.0})
    assert directional_power(f, [0.0, 0.0], [1.0, 1.0], 2) == 4.0
    assert directional_power(f, [0.5, 2.0], [1.0, 1.0], 0) == f(np.array([0.5, 2.0]))
    xyz = poly_multi({(1, 1, 1): 1.0})
    x = np.array([0.7, -1.3, 2.2])
    assert brute_force_directional(xyz, x, [1.0, 2.0, 3.0], 3) == 36.0
    assert directional_power(xyz, x, [1.0, 2.0, 3.0], 3) == 36.0


def test_directional_power_p1_reduces():
    assert directional_power(exp(), [0.4], [2.0], 3) == pytest.approx(np.exp(0.4) * 8.0)


def test_directional_power_arity_mismatch():
    with pytest.raises(ValueError):
        directional_power(poly_multi({(1, 1): 1.0}), [0.0, 0.0], [1.0, 1.0, 1.0], 1)


@settings(max_examples=50, deadline=None)
@given(
    x=st.lists(st.floats(-1, 1), min_size=3, max_size=3),
    h=st.lists(st.floats(-1, 1), min_size=3, max_size=3),
    n=st.integers(1, 4),
)
def test_directional_power_matches_brute_force(x, h, n):
    f = separable(sin(), exp(), cos())
    got = float(directional_power(f, np.array(x), h, n))
    want = brute_force_directional(f, np.array(x), h, n)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_partial_sum_multi_examples():
    f = poly_multi({(1, 0): 1.0, (0, 1): 1.0})
    assert partial_sum_multi(f, [0, 0], [1, 2], 1) == 0.0
    assert partial_sum_multi(f, [0, 0], [1, 2], 2) == 3.0
    # exp(x + 2y) along h=(0.1, 0.1) is exp(0.3 t): 1 + .3 + .045 + .0045
    g = exp_affine([1.0, 2.0])
    assert partial_sum_multi(g, [0, 0], [0.1, 0.1], 4) == pytest.approx(1.3495, rel=1e-14)


def test_partial_sum_multi_segment_check():
    f = separable(log_shifted(), exp())
    with pytest.raises(DomainError):
        partial_sum_multi(f, [0.0, 0.0], [-2.0, 1.0], 2)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-1, 1), h=st.floats(-1, 1), n=st.integers(1, 6))
def test_multi_reduces_to_uni(a, h, n):
    assert partial_sum_multi(sin(), [a], [h], n) == pytest.approx(partial_sum_uni(sin(), a, h, n), abs=1e-12)


def random_poly_multi(rng, p, degree):
    terms = {}
    for d in range(degree + 1):
        for alpha in multi_indices(p, d):
            terms[alpha] = rng.normal()
    return poly_multi(terms)


@pytest.mark.parametrize("seed", range(5))
def test_polynomial_exactness(seed):
    rng = np.random.default_rng(seed)
    for p in (1, 2, 3):
        for deg in (0, 1, 2, 3):
            f = random_poly_multi(rng, p, deg)
            a, h = rng.uniform(-1, 1, p), rng.uniform(-1, 1, p)
            exact = float(f(a + h) if p > 1 else f((a + h)[0]))
            approx = partial_sum_multi(f, a, h, deg + 1)
            assert abs(exact - approx) <= 1e-10 * (1 + abs(exact))


MP_FIELDS = [
    (lambda: exp_affine([0.5, -1.0, 0.3]), lambda x: mp.exp(0.5 * x[0] - x[1] + 0.3 * x[2])),
    (lambda: separable(sin(), exp(), cos()), lambda x: mp.sin(x[0]) * mp.exp(x[1]) * mp.cos(x[2])),
]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("pair", MP_FIELDS)
def test_directional_power_vs_finite_difference(n, pair):
    f, f_mp = pair[0](), pair[1]
    rng = np.random.default_rng(n)
    for _ in range(10):
        x, h = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        want = directional_fd(f_mp, x, h, n)
        got = float(directional_power(f, x, h, n))
        assert got == pytest.approx(want, rel=1e-4)


# --------------------------------------------------------------------------
# Jacobian and integral remainder


def test_jacobian_examples():
    F = VectorField((poly([0, 0, 1]), poly([0, 0, 0, 1])))
    np.testing.assert_array_equal(jacobian(F, [1.0]), [[2.0], [3.0]])
    ident = VectorField(tuple(poly_multi({tuple(int(i == q) for i in range(3)): 1.0}) for q in range(3)))
    np.testing.assert_array_equal(jacobian(ident, [0.3, 0.1, -2.0]), np.eye(3))
    G = VectorField((poly_multi({(1, 1): 1.0}), poly_multi({(1, 0): 1.0, (0, 1): 1.0})))
    np.testing.assert_array_equal(jacobian(G, [2.0, 3.0]), [[3.0, 2.0], [1.0, 1.0]])


def test_integral_remainder_mvt_polynomial():
    F = VectorField((poly([0, 0, 1]), poly([0, 0, 0, 1])))
    np.testing.assert_allclose(integral_remainder_vec(F, [0.0], [1.0], 1), [1.0, 1.0], rtol=1e-14)
    np.testing.assert_array_equal(integral_remainder_vec(F, [0.5], [0.0], 2), [0.0, 0.0])


def test_integral_remainder_closes_identity_sin_cos():
    F = VectorField((sin_cos(),))
    a, h = np.array([0.0, 0.0]), np.array([0.2, 0.3])
    rem = integral_remainder_vec(F, a, h, 2)
    lhs = F(a + h)
    rhs = F(a) + jacobian(F, a) @ h + rem
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_integral_remainder_identity(n):
    F = VectorField((exp_affine([1.0, 0.5]), sin_cos(), poly_multi({(2, 1): 1.0, (0, 3): -0.5})))
    rng = np.random.default_rng(10 + n)
    for _ in range(5):
        a, h = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        residual = F(a + h) - partial_sum_vec(F, a, h, n) - integral_remainder_vec(F, a, h, n)
        assert np.max(np.abs(residual)) <= 1e-8


def test_integral_remainder_flags_disagreement():
    spiky = ScalarField(1, 1, lambda x: np.sin(400 * x), lambda x, a: 400 * np.cos(400 * np.asarray(x)))
    with pytest.warns(QuadratureWarning):
        integral_remainder_vec(spiky, [0.0], [1.0], 1, nodes=8)
