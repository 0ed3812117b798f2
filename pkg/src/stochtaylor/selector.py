"""Constructive selection of the intermediate point of a Taylor expansion.

For one realization ``X(omega)`` the intermediate point solves the remainder
equation ``g(xi) = pi`` where ``pi`` is the gap between ``f(a + X)`` and the
degree ``n - 1`` Taylor polynomial, and ``g`` is the Lagrange remainder as a
function of the intermediate offset.  The root set may have many points; a
selection policy picks the supremum (default) or the infimum, which makes
``xi`` a deterministic function of ``X(omega)``.

Roots are located by a uniform scan of the bracket for sign changes,
refined with Brent's method.  Scan nodes where the residual is already within
tolerance are admitted as tangential roots, which covers even-multiplicity
roots that produce no sign change.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from .taylor_core import (
    ScalarField,
    _check_order,
    check_segment,
    directional_power,
    partial_sum_multi,
    partial_sum_uni,
)


class NoRootFound(RuntimeError):
    """No admissible intermediate point was located in the bracket.

    Existence is guaranteed for a field with a continuous derivative of the
    requested order, so this points at a wrong derivative oracle or a domain
    violation.
    """


class SelectionErrors(RuntimeError):
    """Per-outcome failures collected while solving over a sample space."""

    def __init__(self, failures: Mapping[Hashable, Exception]):
        self.failures = dict(failures)
        ids = ", ".join(str(k) for k in list(self.failures)[:10])
        more = "" if len(self.failures) <= 10 else f" (+{len(self.failures) - 10} more)"
        super().__init__(f"selector failed on {len(self.failures)} outcome(s): {ids}{more}")


class Variant(str, enum.Enum):
    SUP = "sup"
    INF = "inf"


@dataclass(frozen=True)
class SelectionPolicy:
    """How to pick one point out of the root set.

    ``refine_tol`` is the absolute tolerance on the root location (in the
    offset for univariate problems, in the segment parameter otherwise);
    ``residual_tol`` is the accepted ``|g(xi) - pi|`` relative to
    ``1 + |pi|``.
    """

    variant: Variant = Variant.SUP
    scan_points: int = 4097
    refine_tol: float = 1e-12
    residual_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.scan_points < 2:
            raise ValueError("scan_points must be >= 2")
        if not self.refine_tol > 0 or not self.residual_tol > 0:
            raise ValueError("tolerances must be positive")


SUP = SelectionPolicy()
INF = SelectionPolicy(Variant.INF)


@dataclass(frozen=True)
class CandidateBracket:
    """Closed interval with endpoints 0 and the increment, normalized so lo <= hi."""

    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return self.lo == 0.0 and self.hi == 0.0

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


def candidate_bracket(x: float) -> CandidateBracket:
    """The set of admissible offsets for increment ``x``."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"increment must be finite, got {x}")
    if x > 0:
        return CandidateBracket(0.0, x)
    if x < 0:
        return CandidateBracket(x, 0.0)
    return CandidateBracket(0.0, 0.0)


@dataclass(frozen=True)
class RemainderEquation:
    """``g(s) = pi`` with ``s`` the offset (univariate) or segment parameter."""

    pi: float
    g: Callable
    order: int
    increment: Union[float, np.ndarray]
    multivariate: bool = False


def build_remainder_equation(f: ScalarField, a, x_inc, n: int) -> RemainderEquation:
    """Set up the remainder equation for anchor ``a`` and increment ``x_inc``.

    Univariate: ``g(s) = f^(n)(a + s) x^n / n!`` on the offset bracket.
    Multivariate: ``g(t) = (x . grad)^n f(a + t x) / n!`` on ``t in [0, 1]``.
    """
    _check_order(f, n)
    nfact = math.factorial(n)
    if f.arity == 1 and np.ndim(a) == 0 and np.ndim(x_inc) == 0:
        a = float(a)
        x = float(x_inc)
        pi = float(f(a + x)) - partial_sum_uni(f, a, x, n)
        if x == 0.0:
            return RemainderEquation(0.0, lambda s: 0.0 * np.asarray(s, dtype=float), n, 0.0)
        scale = x ** n / nfact
        if f.deriv is not None:
            # bind the analytic n-th derivative once; g is called per brentq step
            deriv, alpha = f.deriv, (n,)

            def g(s):
                return deriv(a + s, alpha) * scale

            return RemainderEquation(pi, g, n, x)

        def g(s):
            return f.derivative(a + np.asarray(s, dtype=float), n) * scale

        return RemainderEquation(pi, g, n, x)

    a = np.atleast_1d(np.asarray(a, dtype=float))
    x = np.atleast_1d(np.asarray(x_inc, dtype=float))
    if a.shape != (f.arity,) or x.shape != (f.arity,):
        raise ValueError(f"anchor/increment must have shape ({f.arity},)")
    arg = a + x if f.arity > 1 else (a + x)[0]
    pi = float(f(arg)) - partial_sum_multi(f, a, x, n)
    if not np.any(x):
        return RemainderEquation(0.0, lambda t: 0.0 * np.asarray(t, dtype=float), n, x, True)

    def g(t):
        t = np.asarray(t, dtype=float)
        pts = a.reshape((-1,) + (1,) * t.ndim) + x.reshape((-1,) + (1,) * t.ndim) * t
        return directional_power(f, pts, x, n) / nfact

    return RemainderEquation(pi, g, n, x, True)


@dataclass(frozen=True)
class SelectionResult:
    """Solved intermediate point.

    ``xi`` is the offset from the anchor: a scalar in the bracket for
    univariate problems, ``theta * X`` otherwise.  ``point`` is ``a + xi``.
    """

    xi: Union[float, np.ndarray]
    theta: float
    residual: float
    bracket: CandidateBracket
    policy: SelectionPolicy
    root_count_estimate: int
    point: Union[float, np.ndarray]


def _refine(r: Callable[[float], float], lo: float, hi: float, policy: SelectionPolicy, tol: float) -> float:
    root = brentq(r, lo, hi, xtol=policy.refine_tol, rtol=4 * np.finfo(float).eps)
    if abs(r(root)) > tol:
        # Steep g: shrink to the floating point resolution of the bracket.
        root = brentq(r, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)
    return root


def select_root(
    g: Callable, pi: float, lo: float, hi: float, policy: SelectionPolicy
) -> Tuple[float, int]:
    """Largest (sup) or smallest (inf) ``s`` in ``[lo, hi]`` with ``g(s) = pi``.

    Returns ``(s, root_count_estimate)``.  The estimate counts sign changes
    plus separate runs of in-tolerance nodes found by the scan.
    """
    tol = policy.residual_tol * (1.0 + abs(pi))
    nodes = np.linspace(lo, hi, policy.scan_points)
    resid = np.asarray(g(nodes), dtype=float) - pi
    if resid.shape != nodes.shape:
        resid = np.broadcast_to(resid, nodes.shape)
    if not np.all(np.isfinite(resid)):
        raise NoRootFound("remainder equation is not finite on the bracket")

    absr = np.abs(resid)
    crossings = np.flatnonzero(resid[:-1] * resid[1:] < 0)  # root in (k, k+1)
    touches = np.flatnonzero(absr <= tol)

    # Runs of in-tolerance nodes next to a sign change belong to that
    # crossing; the remaining runs are tangential roots.
    tangential = []
    if touches.size:
        cuts = np.flatnonzero(np.diff(touches) > 1) + 1
        crossing_nodes = np.zeros(nodes.size + 1, dtype=bool)
        crossing_nodes[crossings] = crossing_nodes[crossings + 1] = True
        for run in np.split(touches, cuts):
            if not crossing_nodes[run].any():
                tangential.append(run)
    count = int(crossings.size) + len(tangential)
    if count == 0:
        raise NoRootFound(
            f"no sign change and no node within {tol:.3e} on [{lo}, {hi}] "
            f"(min |g - pi| = {np.min(absr):.3e})"
        )

    sup = policy.variant is Variant.SUP
    if tangential:
        run = tangential[-1] if sup else tangential[0]
        best = absr[run]
        # ties (flat g) resolve toward the end the policy favours
        hits = run[best == best.min()]
        tangent_node = hits[-1] if sup else hits[0]
    if crossings.size:
        k = crossings[-1] if sup else crossings[0]
        if not tangential or (tangent_node < k if sup else tangent_node > k + 1):

            def r(s):
                return float(g(s)) - pi

            return _refine(r, float(nodes[k]), float(nodes[k + 1]), policy, tol), count
    return float(nodes[tangent_node]), count


def solve_selector_uni(
    f: ScalarField, a: float, x: float, n: int, policy: SelectionPolicy = SUP
) -> SelectionResult:
    """Intermediate offset ``xi`` in ``[0, x]`` with ``f(a+x) = T_{n-1}(a, x) + f^(n)(a+xi) x^n / n!``.

    Example:
        >>> from stochtaylor.fields import square
        >>> solve_selector_uni(square(), 0.0, 2.0, 1).xi
        1.0
    """
    if f.arity != 1:
        raise ValueError("solve_selector_uni needs a univariate field")
    bracket = candidate_bracket(x)
    a = float(a)
    check_segment(f, a, float(x))
    if bracket.degenerate:
        return SelectionResult(0.0, 0.0, 0.0, bracket, policy, 1, a)
    eq = build_remainder_equation(f, a, x, n)
    s, count = select_root(eq.g, eq.pi, bracket.lo, bracket.hi, policy)
    residual = eq.pi - float(eq.g(s))
    if abs(residual) > policy.residual_tol * (1.0 + abs(eq.pi)):
        raise NoRootFound(f"refined root at offset {s} leaves residual {residual:.3e}")
    return SelectionResult(s, s / x, residual, bracket, policy, count, a + s)


def solve_selector_multi(
    f: ScalarField, a, X, n: int, policy: SelectionPolicy = SUP
) -> SelectionResult:
    """Segment parameter ``theta`` in ``[0, 1]`` closing the multivariate Taylor identity.

    The intermediate point is confined to the segment ``a + t X``, so the
    search is one-dimensional in ``t``; ``xi = theta * X``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    X = np.atleast_1d(np.asarray(X, dtype=float))
    check_segment(f, a, X)
    bracket = CandidateBracket(0.0, 1.0)
    if not np.any(X):
        return SelectionResult(np.zeros_like(X), 0.0, 0.0, CandidateBracket(0.0, 0.0), policy, 1, a.copy())
    eq = build_remainder_equation(f, a, X, n)
    t, count = select_root(eq.g, eq.pi, 0.0, 1.0, policy)
    residual = eq.pi - float(eq.g(t))
    if abs(residual) > policy.residual_tol * (1.0 + abs(eq.pi)):
        raise NoRootFound(f"refined root at t={t} leaves residual {residual:.3e}")
    xi = t * X
    return SelectionResult(xi, t, residual, bracket, policy, count, a + xi)


def solve_selector(f: ScalarField, a, x, n: int, policy: SelectionPolicy = SUP) -> SelectionResult:
    """Dispatch on the shape of the increment."""
    if f.arity == 1 and np.ndim(x) == 0:
        return solve_selector_uni(f, float(a), float(x), n, policy)
    return solve_selector_multi(f, a, x, n, policy)


def apply_over_sample(f: ScalarField, a, Xrv, n: int, policy: SelectionPolicy = SUP, *, full: bool = False):
    """Solve the selector on every outcome of a random variable.

    Returns the random variable ``omega -> xi(omega)`` on the same space.
    With ``full=True`` also returns the per-outcome :class:`SelectionResult`
    mapping.  Failures on individual outcomes are collected and raised
    together as :class:`SelectionErrors`.

    Each solve reads only ``X(omega)``, ``a``, ``f``, ``n`` and the policy.
    """
    from .probability import RandomVariable

    results: dict = {}
    failures: dict = {}
    for omega in Xrv.space.outcomes:
        try:
            results[omega] = solve_selector(f, a, Xrv[omega], n, policy)
        except (NoRootFound, ValueError) as exc:
            failures[omega] = exc
    if failures:
        raise SelectionErrors(failures)
    values = {
        omega: (res.xi if np.ndim(res.xi) == 0 else tuple(float(v) for v in res.xi))
        for omega, res in results.items()
    }
    xi = RandomVariable(Xrv.space, values, check=False)
    return (xi, results) if full else xi


def certify_sup(
    g: Callable, pi: float, xi: float, hi: float, points: int, tol: Optional[float] = None
) -> bool:
    """True if a scan of ``(xi, hi]`` at ``points`` nodes sees no sign change of ``g - pi``.

    Residuals within ``tol`` of zero count as zero and never form a sign
    change on their own.
    """
    if xi >= hi:
        return True
    nodes = np.linspace(xi, hi, points)[1:]
    resid = np.asarray(g(nodes), dtype=float) - pi
    if tol is not None:
        resid = np.where(np.abs(resid) <= tol, 0.0, resid)
    signs = np.sign(resid)
    signs = signs[signs != 0]
    return bool(np.all(signs[1:] == signs[:-1]))
