"""Deterministic Taylor expansions with Lagrange and integral remainders.

Points are numpy arrays whose *first* axis indexes coordinates, so a field
can be evaluated on a single point of shape ``(p,)`` or on a batch of points
of shape ``(p, m)`` with the same closure.  Univariate fields accept plain
floats or 1-d arrays.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

ArrayLike = Union[float, Sequence[float], np.ndarray]
MultiIndex = Tuple[int, ...]

SEGMENT_SAMPLES = 101


class DomainError(ValueError):
    """A point or segment lies outside the domain of a field."""


class OrderError(ValueError):
    """A derivative of higher order than the field supports was requested."""


class QuadratureWarning(RuntimeWarning):
    """Two quadrature resolutions disagreed beyond tolerance."""


# --------------------------------------------------------------------------
# multi-indices


def multi_indices(p: int, n: int) -> Iterator[MultiIndex]:
    """Yield every multi-index of length ``p`` and order ``n``.

    Order is reverse lexicographic: ``(n, 0, ..., 0)`` first and
    ``(0, ..., 0, n)`` last.  The ordering is fixed so sums over indices
    are reproducible bit-for-bit.
    """
    if p < 1 or n < 0:
        raise ValueError(f"need p >= 1 and n >= 0, got p={p}, n={n}")
    if p == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in multi_indices(p - 1, n - first):
            yield (first,) + rest


def multinomial(alpha: MultiIndex) -> int:
    """``|alpha|! / (alpha_1! ... alpha_p!)``."""
    out = math.factorial(sum(alpha))
    for i in alpha:
        out //= math.factorial(i)
    return out


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]``; either end may be infinite."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.lo) & (x <= self.hi)))


@dataclass(frozen=True)
class ConvexSet:
    """Open convex set given by a membership predicate and a bounding box.

    ``predicate`` receives a point of shape ``(p,)`` and returns bool.
    Convexity is the caller's promise; :meth:`spot_check_convex` samples it.
    """

    predicate: Callable[[np.ndarray], bool]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        lo = np.asarray(self.lower, dtype=float)[:, None]
        hi = np.asarray(self.upper, dtype=float)[:, None]
        if np.any(x < lo) or np.any(x > hi):
            return False
        return all(bool(self.predicate(x[:, j])) for j in range(x.shape[1]))

    def spot_check_convex(self, rng: np.random.Generator, trials: int = 200) -> bool:
        lo = np.where(np.isfinite(self.lower), self.lower, -1e3)
        hi = np.where(np.isfinite(self.upper), self.upper, 1e3)
        members = []
        for _ in range(50 * trials):
            x = rng.uniform(lo, hi)
            if self.contains(x):
                members.append(x)
            if len(members) >= 2 * trials:
                break
        for u, v in zip(members[::2], members[1::2]):
            if not self.contains(0.5 * (u + v)):
                return False
        return True


Domain = Union[Interval, ConvexSet]


class Box(ConvexSet):
    """Axis-aligned box, the common case of :class:`ConvexSet`."""

    def __init__(self, lower: Sequence[float], upper: Sequence[float]):
        super().__init__(lambda x: True, tuple(map(float, lower)), tuple(map(float, upper)))


# --------------------------------------------------------------------------
# fields


def _fd_step(x, order: int):
    # Balances truncation O(h^2) against rounding O(eps / h^order).
    return np.finfo(float).eps ** (1.0 / (order + 2)) * (1.0 + np.abs(x))


@dataclass(frozen=True)
class ScalarField:
    """A real function of ``arity`` variables with derivatives up to ``max_order``.

    Args:
        arity: number of input variables ``p``.
        max_order: highest derivative order the field promises.
        func: ``x -> f(x)``.  For ``arity == 1`` ``x`` is a float or 1-d
            array; otherwise ``x`` has shape ``(p,)`` or ``(p, m)``.
        deriv: ``(x, alpha) -> d^|alpha| f / dx^alpha`` evaluated at ``x``.
            When omitted, derivatives come from nested central differences.
        domain: where the field is defined; unbounded when omitted.
        name: label used in reports.
    """

    arity: int
    max_order: int
    func: Callable
    deriv: Optional[Callable] = None
    domain: Optional[Domain] = None
    name: str = "f"

    def __post_init__(self):
        if self.arity < 1 or self.max_order < 0:
            raise ValueError("arity must be >= 1 and max_order >= 0")

    @property
    def derivative_mode(self) -> str:
        return "analytic" if self.deriv is not None else "finite-difference"

    def __call__(self, x):
        return self.func(x)

    def contains(self, x) -> bool:
        return self.domain is None or self.domain.contains(x)

    def derivative(self, x, alpha: Union[int, MultiIndex]):
        """Partial derivative ``d^|alpha| f / dx^alpha`` at ``x``.

        An integer ``alpha`` is shorthand for ``(alpha,)`` on univariate
        fields.  The zero multi-index returns ``f(x)``.
        """
        if isinstance(alpha, (int, np.integer)):
            alpha = (int(alpha),)
        alpha = tuple(int(i) for i in alpha)
        if len(alpha) != self.arity:
            raise ValueError(f"multi-index {alpha} does not match arity {self.arity}")
        order = sum(alpha)
        if order > self.max_order:
            raise OrderError(f"order {order} exceeds max_order {self.max_order} of {self.name}")
        if order == 0:
            return self.func(x)
        if self.deriv is not None:
            return self.deriv(x, alpha)
        return self._fd_derivative(x, alpha)

    def _fd_derivative(self, x, alpha: MultiIndex):
        """Tensor-product central difference stencil for a mixed partial."""
        x = np.asarray(x, dtype=float)
        if self.arity == 1:
            k = alpha[0]
            h = _fd_step(x, k)
            total = 0.0
            for j in range(k + 1):
                total = total + (-1) ** j * math.comb(k, j) * self.func(x + (k / 2 - j) * h)
            return total / h ** k
        order = sum(alpha)
        steps = _fd_step(x, order)
        offsets = [
            [((k / 2 - j), (-1) ** j * math.comb(k, j)) for j in range(k + 1)] for k in alpha
        ]
        total = 0.0
        for combo in itertools.product(*offsets):
            shift = np.zeros_like(x)
            weight = 1.0
            for q, (off, w) in enumerate(combo):
                shift[q] = off * steps[q]
                weight *= w
            total = total + weight * self.func(x + shift)
        denom = 1.0
        for q, k in enumerate(alpha):
            denom = denom * steps[q] ** k
        return total / denom


@dataclass(frozen=True)
class VectorField:
    """``R^p -> R^p'`` map stored as a list of component scalar fields."""

    components: Tuple[ScalarField, ...] = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        arities = {c.arity for c in comps}
        orders = {c.max_order for c in comps}
        if len(arities) != 1 or len(orders) != 1:
            raise ValueError("components must share arity and max_order")

    @property
    def arity(self) -> int:
        return self.components[0].arity

    @property
    def out_arity(self) -> int:
        return len(self.components)

    @property
    def max_order(self) -> int:
        return self.components[0].max_order

    def __call__(self, x) -> np.ndarray:
        return np.array([c(x) for c in self.components], dtype=float)

    def contains(self, x) -> bool:
        return all(c.contains(x) for c in self.components)


# --------------------------------------------------------------------------
# checks


def _as_point(x, p: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (p,):
        raise ValueError(f"expected a point of shape ({p},), got {x.shape}")
    return x


def check_segment(f: Union[ScalarField, VectorField], a, h, samples: int = SEGMENT_SAMPLES) -> None:
    """Raise :class:`DomainError` unless ``a + t h`` is in the domain at sampled ``t``.

    Interval domains are convex and closed, so only the endpoints are checked.
    """
    if isinstance(f, ScalarField) and (f.domain is None or isinstance(f.domain, Interval)):
        if f.domain is None:
            return
        ends = np.array([np.asarray(a, dtype=float), np.asarray(a, dtype=float) + h])
        if not f.domain.contains(ends):
            raise DomainError(f"segment from {a} along {h} leaves the domain")
        return
    t = np.linspace(0.0, 1.0, samples)
    a = np.asarray(a, dtype=float)
    h = np.asarray(h, dtype=float)
    if a.ndim == 0:
        pts = a + t * h
    else:
        pts = a[:, None] + h[:, None] * t[None, :]
    if not f.contains(pts):
        raise DomainError(f"segment from {a} along {h} leaves the domain")


def _check_order(f, n: int) -> None:
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if n > f.max_order:
        raise OrderError(f"order {n} exceeds max_order {f.max_order}")


# --------------------------------------------------------------------------
# univariate


def partial_sum_uni(f: ScalarField, a: float, h: float, n: int) -> float:
    """Degree ``n - 1`` Taylor polynomial of ``f`` about ``a``, evaluated at ``a + h``."""
    if f.arity != 1:
        raise ValueError("partial_sum_uni needs a univariate field")
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    _check_order(f, n - 1)
    check_segment(f, a, h)
    total = float(f(a))
    hk = 1.0
    for k in range(1, n):
        hk *= h
        total += float(f.derivative(a, k)) / math.factorial(k) * hk
    return total


def lagrange_remainder_uni(f: ScalarField, a: float, theta: float, h: float, n: int) -> float:
    """``f^(n)(a + theta h) h^n / n!`` for ``0 < theta < 1``."""
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if f.arity != 1:
        raise ValueError("lagrange_remainder_uni needs a univariate field")
    _check_order(f, n)
    x = a + theta * h
    if not f.contains(x):
        raise DomainError(f"a + theta*h = {x} outside the domain")
    if h == 0.0:
        return 0.0
    return float(f.derivative(x, n)) / math.factorial(n) * h ** n


# --------------------------------------------------------------------------
# multivariate


def directional_power(f: ScalarField, point, h, n: int):
    """``(h . grad)^n f`` at ``point``.

    Sums ``n!/(alpha!) h^alpha d^alpha f(point)`` over every multi-index of
    order ``n``.  ``point`` may be a batch of shape ``(p, m)``, in which case
    one value per column is returned.
    """
    _check_order(f, n)
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if h.shape != (f.arity,):
        raise ValueError(f"increment has shape {h.shape}, field arity is {f.arity}")
    if f.arity == 1:
        x = np.asarray(point, dtype=float)
        if x.ndim >= 1 and x.shape[0] == 1:
            x = x[0]
        return f.derivative(x, (n,)) * h[0] ** n
    x = np.asarray(point, dtype=float)
    if x.shape[0] != f.arity:
        raise ValueError(f"point has leading dimension {x.shape[0]}, field arity is {f.arity}")
    if n == 0:
        return f(x)
    total = 0.0
    for alpha in multi_indices(f.arity, n):
        coeff = multinomial(alpha) * math.prod(hq ** i for hq, i in zip(h, alpha))
        if coeff == 0.0:
            continue
        total = total + coeff * f.derivative(x, alpha)
    return total


def partial_sum_multi(f: ScalarField, a, h, n: int) -> float:
    """``f(a) + sum_{k<n} (h . grad)^k f(a) / k!``."""
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    _check_order(f, n - 1)
    a = _as_point(a, f.arity)
    h = _as_point(h, f.arity)
    check_segment(f, a, h)
    arg = a if f.arity > 1 else a[0]
    total = float(f(arg))
    for k in range(1, n):
        total += float(directional_power(f, a, h, k)) / math.factorial(k)
    return total


def jacobian(F: Union[VectorField, ScalarField], x) -> np.ndarray:
    """``p' x p`` matrix of first partials; a scalar field gives one row."""
    comps = F.components if isinstance(F, VectorField) else (F,)
    p = comps[0].arity
    x = _as_point(x, p)
    if not F.contains(x):
        raise DomainError(f"{x} outside the domain")
    arg = x if p > 1 else x[0]
    out = np.empty((len(comps), p))
    for i, comp in enumerate(comps):
        for q in range(p):
            alpha = tuple(1 if j == q else 0 for j in range(p))
            out[i, q] = float(comp.derivative(arg, alpha))
    return out


def partial_sum_vec(F: VectorField, a, h, n: int) -> np.ndarray:
    """Componentwise :func:`partial_sum_multi`."""
    return np.array([partial_sum_multi(c, a, h, n) for c in F.components])


# --------------------------------------------------------------------------
# integral remainder


def gauss_legendre_01(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    x, w = leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def _integral_remainder(F: VectorField, a, h, n: int, nodes: int) -> np.ndarray:
    t, w = gauss_legendre_01(nodes)
    kernel = (1.0 - t) ** (n - 1) * w
    pts = a[:, None] + h[:, None] * t[None, :]
    if F.arity == 1:
        pts = pts[0]
    out = np.empty(F.out_arity)
    for i, comp in enumerate(F.components):
        vals = np.broadcast_to(directional_power(comp, pts, h, n), t.shape)
        out[i] = kernel @ vals
    return out / math.factorial(n - 1)


def integral_remainder_vec(
    F: Union[VectorField, ScalarField],
    a,
    h,
    n: int,
    nodes: int = 64,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> np.ndarray:
    """Integral-form remainder of the order ``n`` Taylor expansion of ``F``.

    Computes ``1/(n-1)! * int_0^1 (1-t)^(n-1) D^n F(a + t h) h^(n) dt`` with a
    ``nodes``-point Gauss-Legendre rule.  The rule is re-run with twice the
    nodes; a :class:`QuadratureWarning` is issued if the two disagree beyond
    ``atol + rtol * |value|``.  For ``n == 1`` this is the integral mean
    value form ``int_0^1 DF(a + t h) h dt``.
    """
    if isinstance(F, ScalarField):
        F = VectorField((F,))
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    _check_order(F, n)
    a = _as_point(a, F.arity)
    h = _as_point(h, F.arity)
    check_segment(F, a, h)
    if not np.any(h):
        return np.zeros(F.out_arity)
    coarse = _integral_remainder(F, a, h, n, nodes)
    fine = _integral_remainder(F, a, h, n, 2 * nodes)
    if np.any(np.abs(fine - coarse) > atol + rtol * np.abs(fine)):
        warnings.warn(
            f"quadrature with {nodes} and {2 * nodes} nodes differ by "
            f"{np.max(np.abs(fine - coarse)):.3e}",
            QuadratureWarning,
            stacklevel=2,
        )
    return coarse
