"""Builtin scalar fields with exact derivative oracles.

These back the CLI's function registry and the test suites.  Each
constructor returns a :class:`~stochtaylor.taylor_core.ScalarField`.
"""

from __future__ import annotations

import math
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .taylor_core import Box, Interval, ScalarField

UNBOUNDED_ORDER = 64


def poly(coeffs: Sequence[float], name: str | None = None) -> ScalarField:
    """Univariate polynomial, ``coeffs`` in increasing degree."""
    c = np.asarray(coeffs, dtype=float)
    derivs = [c]
    for _ in range(len(c)):
        derivs.append(P.polyder(derivs[-1]) if len(derivs[-1]) > 1 else np.zeros(1))

    def deriv(x, alpha):
        k = alpha[0]
        return P.polyval(x, derivs[k] if k < len(derivs) else derivs[-1])

    label = name or "poly:" + ",".join(f"{v:g}" for v in coeffs)
    return ScalarField(1, UNBOUNDED_ORDER, lambda x: P.polyval(x, c), deriv, Interval(), label)


def exp() -> ScalarField:
    return ScalarField(1, UNBOUNDED_ORDER, np.exp, lambda x, alpha: np.exp(x), Interval(), "exp")


def sin() -> ScalarField:
    cycle = (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))
    return ScalarField(1, UNBOUNDED_ORDER, np.sin, lambda x, alpha: cycle[alpha[0] % 4](x), Interval(), "sin")


def cos() -> ScalarField:
    cycle = (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin)
    return ScalarField(1, UNBOUNDED_ORDER, np.cos, lambda x, alpha: cycle[alpha[0] % 4](x), Interval(), "cos")


def log_shifted(shift: float = 1.0, floor: float | None = None) -> ScalarField:
    """``log(shift + x)``, defined for ``x >= floor`` (default ``-shift + 0.1``).

    The closed domain stays strictly inside ``x > -shift`` so every
    derivative is bounded on it.
    """
    if floor is None:
        floor = -shift + 0.1
    if floor <= -shift:
        raise ValueError("floor must exceed -shift")

    def deriv(x, alpha):
        k = alpha[0]
        return (-1) ** (k - 1) * math.factorial(k - 1) / (shift + np.asarray(x, dtype=float)) ** k

    return ScalarField(
        1, UNBOUNDED_ORDER, lambda x: np.log(shift + np.asarray(x, dtype=float)), deriv,
        Interval(floor, math.inf), f"log-shifted:{shift:g}",
    )


def identity() -> ScalarField:
    return poly([0.0, 1.0], name="identity")


def square() -> ScalarField:
    return poly([0.0, 0.0, 1.0], name="square")


# --------------------------------------------------------------------------
# multivariate


def poly_multi(terms: Mapping[Tuple[int, ...], float], name: str = "poly_multi") -> ScalarField:
    """Polynomial in ``p`` variables given as ``{exponents: coefficient}``."""
    terms = {tuple(int(i) for i in k): float(v) for k, v in terms.items()}
    p = len(next(iter(terms)))

    def deriv(x, alpha):
        x = np.asarray(x, dtype=float)
        if p == 1:
            x = x[None]
        total = np.zeros(x.shape[1:]) if x.ndim > 1 else 0.0
        for expo, c in terms.items():
            if any(e < a for e, a in zip(expo, alpha)):
                continue
            term = c
            for q, (e, a) in enumerate(zip(expo, alpha)):
                term = term * math.perm(e, a) * x[q] ** (e - a)
            total = total + term
        return total

    return ScalarField(p, UNBOUNDED_ORDER, lambda x: deriv(x, (0,) * p), deriv, None, name)


def exp_affine(weights: Sequence[float], offset: float = 0.0) -> ScalarField:
    """``exp(offset + w . x)``; every partial is ``w^alpha`` times the value."""
    w = np.asarray(weights, dtype=float)
    p = len(w)

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.exp(offset + np.tensordot(w, x, axes=(0, 0)))

    def deriv(x, alpha):
        return math.prod(wq ** i for wq, i in zip(w, alpha)) * func(x)

    return ScalarField(p, UNBOUNDED_ORDER, func, deriv, None, "exp_affine")


def separable(*factors: ScalarField, name: str = "separable") -> ScalarField:
    """Product ``g_1(x_1) g_2(x_2) ... g_p(x_p)`` of univariate fields."""
    p = len(factors)

    def deriv(x, alpha):
        x = np.asarray(x, dtype=float)
        out = 1.0
        for q, (g, i) in enumerate(zip(factors, alpha)):
            out = out * g.derivative(x[q], i)
        return out

    lower, upper = [], []
    for g in factors:
        dom = g.domain if isinstance(g.domain, Interval) else Interval()
        lower.append(dom.lo)
        upper.append(dom.hi)
    domain = Box(lower, upper)
    max_order = min(g.max_order for g in factors)
    return ScalarField(p, max_order, lambda x: deriv(x, (0,) * p), deriv, domain, name)


# --------------------------------------------------------------------------
# registry


def parse_fn(spec: str) -> ScalarField:
    """Build a univariate builtin from a CLI spec.

    Accepted forms: ``poly:c0,c1,...`` (increasing degree), ``exp``, ``sin``,
    ``cos``, ``log-shifted`` (``log(1 + x)``) and ``log-shifted:c``
    (``log(c + x)``).
    """
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "poly":
        if not args:
            raise ValueError("poly needs coefficients, e.g. poly:0,0,1")
        return poly([float(c) for c in args.split(",")])
    if name in ("exp", "sin", "cos") and not args:
        return {"exp": exp, "sin": sin, "cos": cos}[name]()
    if name in ("log-shifted", "log1p"):
        return log_shifted(float(args) if args else 1.0)
    raise ValueError(f"unknown function spec {spec!r}")


BUILTINS: Dict[str, str] = {
    "poly:c0,c1,...": "polynomial with coefficients in increasing degree",
    "exp": "exponential",
    "sin": "sine",
    "cos": "cosine",
    "log-shifted[:c]": "log(c + x) on x >= -c + 0.1, c defaults to 1",
}
