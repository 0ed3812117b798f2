"""Statistical uses of the random intermediate point.

* :func:`mle_score_expansion` expands the score at the MLE around the true
  parameter and returns the intermediate parameter as a solved value.
* :func:`mle_monte_carlo` repeats that over seeded replicates, so the
  intermediate parameter is visibly one value per replicate.
* :func:`delta_method_experiment` runs the mean value expansion behind the
  Delta method on sample means.
* :func:`two_rv_selector` solves the mean value equation between two random
  variables on a finite space and reports measurability w.r.t. ``sigma(X, Y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .probability import RandomVariable, is_measurable_wrt, joint, sigma_generated_by
from .selector import SUP, NoRootFound, SelectionErrors, SelectionPolicy, solve_selector_uni
from .taylor_core import Interval, ScalarField

IDENTITY_RTOL = 1e-9
MLE_TOL = 1e-10


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replicate ``index``; random access, so parallel-safe."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


# --------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class ParametricModel:
    """Scalar-parameter model with analytic score and second derivative.

    ``score`` and ``hessian`` take ``(theta, data)`` and must accept an
    array of ``theta`` values.  ``fisher_info`` is per observation.
    """

    name: str
    loglik: Callable
    score: Callable
    hessian: Callable
    fisher_info: Callable[[float], float]
    domain: Interval
    theta0: float
    sampler: Callable[[float, int, np.random.Generator], np.ndarray]

    def sample(self, n: int, rng: np.random.Generator, theta: Optional[float] = None) -> np.ndarray:
        return self.sampler(self.theta0 if theta is None else theta, n, rng)

    def score_field(self, data) -> ScalarField:
        """The score as a field in ``theta``, with the second derivative as its oracle."""
        data = np.asarray(data, dtype=float)
        return ScalarField(
            1, 1,
            lambda t: self.score(t, data),
            lambda t, alpha: self.hessian(t, data),
            self.domain,
            f"{self.name}-score",
        )


def bernoulli(p0: float) -> ParametricModel:
    def loglik(p, x):
        s, n = np.sum(x), len(x)
        return s * np.log(p) + (n - s) * np.log1p(-p)

    def score(p, x):
        s, n = np.sum(x), len(x)
        return s / p - (n - s) / (1.0 - p)

    def hessian(p, x):
        s, n = np.sum(x), len(x)
        return -s / p ** 2 - (n - s) / (1.0 - p) ** 2

    return ParametricModel(
        "bernoulli", loglik, score, hessian,
        lambda p: 1.0 / (p * (1.0 - p)),
        Interval(0.0, 1.0), p0,
        lambda p, n, rng: (rng.random(n) < p).astype(float),
    )


def normal_mean(mu0: float, sigma: float = 1.0) -> ParametricModel:
    var = sigma ** 2

    def loglik(m, x):
        m = np.asarray(m, dtype=float)
        return -(np.sum(x * x) - 2 * m * np.sum(x) + len(x) * m * m) / (2 * var)

    def score(m, x):
        return (np.sum(x) - len(x) * np.asarray(m, dtype=float)) / var

    def hessian(m, x):
        return np.full(np.shape(m), -len(x) / var)[()]

    return ParametricModel(
        "normal-mean", loglik, score, hessian,
        lambda m: 1.0 / var,
        Interval(), mu0,
        lambda m, n, rng: rng.normal(m, sigma, n),
    )


def exponential_rate(rate0: float) -> ParametricModel:
    def loglik(lam, x):
        return len(x) * np.log(lam) - lam * np.sum(x)

    def score(lam, x):
        return len(x) / lam - np.sum(x)

    def hessian(lam, x):
        return -len(x) / np.asarray(lam, dtype=float) ** 2

    return ParametricModel(
        "exponential-rate", loglik, score, hessian,
        lambda lam: 1.0 / lam ** 2,
        Interval(0.0, math.inf), rate0,
        lambda lam, n, rng: rng.exponential(1.0 / lam, n),
    )


MODELS = {"bernoulli": bernoulli, "normal-mean": normal_mean, "exponential-rate": exponential_rate}


# --------------------------------------------------------------------------
# maximization


@dataclass(frozen=True)
class MLEFit:
    theta_hat: float
    at_boundary: bool
    method: str


def _interior(domain: Interval) -> Tuple[float, float]:
    lo = domain.lo + 1e-12 * max(1.0, abs(domain.lo)) if math.isfinite(domain.lo) else -math.inf
    hi = domain.hi - 1e-12 * max(1.0, abs(domain.hi)) if math.isfinite(domain.hi) else math.inf
    return lo, hi


def golden_section(func: Callable[[float], float], lo: float, hi: float, tol: float = MLE_TOL) -> float:
    """Maximizer of a unimodal ``func`` on ``[lo, hi]``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = func(c), func(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = func(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = func(d)
    return 0.5 * (lo + hi)


def fit_mle(model: ParametricModel, data, tol: float = MLE_TOL) -> MLEFit:
    """Maximize the log-likelihood.

    Bisects on the sign of the score inside a bracket grown outward from
    ``theta0``; falls back to golden-section search on the log-likelihood
    when no sign change is found.  A maximizer that sits on the edge of the
    parameter domain is flagged.
    """
    data = np.asarray(data, dtype=float)
    dlo, dhi = _interior(model.domain)

    def score(t):
        return float(model.score(t, data))

    width = 0.5 * max(1.0, abs(model.theta0))
    lo, hi = model.theta0, model.theta0
    s_lo = s_hi = score(model.theta0)
    for _ in range(200):
        if s_lo > 0 > s_hi or (s_lo > 0 and hi >= dhi) or (s_hi < 0 and lo <= dlo):
            break
        if s_lo <= 0 and lo > dlo:
            lo = max(dlo, lo - width)
            s_lo = score(lo)
        if s_hi >= 0 and hi < dhi:
            hi = min(dhi, hi + width)
            s_hi = score(hi)
        width *= 2.0

    if s_lo == 0.0:
        return MLEFit(lo, lo <= dlo, "bisection")
    if s_hi == 0.0:
        return MLEFit(hi, hi >= dhi, "bisection")
    if s_lo > 0 > s_hi:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            s_mid = score(mid)
            if s_mid == 0.0:
                return MLEFit(mid, False, "bisection")
            if s_mid > 0:
                lo = mid
            else:
                hi = mid
        return MLEFit(0.5 * (lo + hi), False, "bisection")

    lo = lo if math.isfinite(lo) else model.theta0 - width
    hi = hi if math.isfinite(hi) else model.theta0 + width
    theta = golden_section(lambda t: float(model.loglik(t, data)), lo, hi, tol)
    at_boundary = theta - lo <= 2 * tol and lo <= dlo or hi - theta <= 2 * tol and hi >= dhi
    return MLEFit(theta, bool(at_boundary), "golden-section")


# --------------------------------------------------------------------------
# score expansion


@dataclass(frozen=True)
class ScoreExpansionRecord:
    theta_hat: float
    theta0: float
    theta_star: float
    residual: float
    score_hat: float
    theta: float = 0.0
    flagged: bool = False
    replicate: Optional[int] = None

    @property
    def lo(self) -> float:
        return min(self.theta_hat, self.theta0)

    @property
    def hi(self) -> float:
        return max(self.theta_hat, self.theta0)

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / (1.0 + abs(self.score_hat))

    def between(self, strict: bool = False) -> bool:
        if strict:
            return self.lo < self.theta_star < self.hi
        return self.lo <= self.theta_star <= self.hi


def mle_score_expansion(
    model: ParametricModel, data, theta_hat: float, policy: SelectionPolicy = SUP
) -> ScoreExpansionRecord:
    """Solve ``score(theta_hat) = score(theta0) + (theta_hat - theta0) * d2logL(theta_star)``.

    ``theta_star`` is the selector's intermediate point for the score
    expanded to first order around ``theta0``.
    """
    data = np.asarray(data, dtype=float)
    theta0 = model.theta0
    f = model.score_field(data)
    s_hat = float(f(theta_hat))
    if theta_hat == theta0:
        return ScoreExpansionRecord(theta_hat, theta0, theta0, 0.0, s_hat)
    res = solve_selector_uni(f, theta0, theta_hat - theta0, 1, policy)
    theta_star = theta0 + res.xi
    residual = s_hat - float(f(theta0)) - (theta_hat - theta0) * float(model.hessian(theta_star, data))
    return ScoreExpansionRecord(theta_hat, theta0, theta_star, residual, s_hat, res.theta)


@dataclass
class MonteCarloResult:
    records: List[ScoreExpansionRecord]
    summary: Dict[str, float]


def ks_normal(z, scale: float = 1.0) -> float:
    """Kolmogorov-Smirnov distance between the sample and ``N(0, scale^2)``."""
    return float(stats.kstest(np.asarray(z, dtype=float) / scale, "norm").statistic)


def mle_monte_carlo(
    model: ParametricModel, n: int, reps: int, seed: int, policy: SelectionPolicy = SUP
) -> MonteCarloResult:
    """Score expansion over ``reps`` seeded replicates of size ``n``.

    Replicate ``i`` draws from :func:`replicate_rng(seed, i) <replicate_rng>`.
    Replicates whose MLE lands on the domain boundary are kept and flagged;
    their expansion fields are NaN.
    """
    if reps < 1 or n < 1:
        raise ValueError("need reps >= 1 and n >= 1")
    records = []
    for i in range(reps):
        data = model.sample(n, replicate_rng(seed, i))
        fit = fit_mle(model, data)
        if fit.at_boundary:
            nan = math.nan
            records.append(ScoreExpansionRecord(fit.theta_hat, model.theta0, nan, nan, nan, nan, True, i))
            continue
        rec = mle_score_expansion(model, data, fit.theta_hat, policy)
        records.append(ScoreExpansionRecord(
            rec.theta_hat, rec.theta0, rec.theta_star, rec.residual, rec.score_hat, rec.theta, False, i,
        ))

    ok = [r for r in records if not r.flagged]
    dev = np.array([math.sqrt(n) * (r.theta_hat - model.theta0) for r in ok])
    star = np.array([r.theta_star for r in ok])
    sd0 = 1.0 / math.sqrt(model.fisher_info(model.theta0))
    summary = {
        "reps": reps,
        "n": n,
        "flagged": reps - len(ok),
        "identity_pass": sum(r.relative_residual <= IDENTITY_RTOL for r in ok),
        "max_relative_residual": max((r.relative_residual for r in ok), default=0.0),
        "between_fraction": float(np.mean([r.between() for r in ok])) if ok else math.nan,
        "strictly_between_fraction": float(np.mean([r.between(strict=True) for r in ok])) if ok else math.nan,
        "sqrt_n_dev_mean": float(dev.mean()) if ok else math.nan,
        "sqrt_n_dev_sd": float(dev.std(ddof=1)) if len(ok) > 1 else math.nan,
        "asymptotic_sd": sd0,
        "ks_distance": ks_normal(dev, sd0) if ok else math.nan,
        "theta_star_mean": float(star.mean()) if ok else math.nan,
        "theta_star_sd": float(star.std(ddof=1)) if len(ok) > 1 else math.nan,
    }
    return MonteCarloResult(records, summary)


# --------------------------------------------------------------------------
# Delta method


@dataclass
class DeltaReport:
    n: int
    reps: int
    xbar: np.ndarray
    standardized: np.ndarray
    xi: np.ndarray
    theta: np.ndarray
    residuals: np.ndarray
    ks_distance: float
    max_abs_xi_dev: float

    @property
    def critical_value_1pct(self) -> float:
        return 1.63 / math.sqrt(self.reps)


def delta_method_experiment(
    g: ScalarField,
    mu: float,
    sigma: float,
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    n: int,
    reps: int,
    seed: int,
    policy: SelectionPolicy = SUP,
) -> DeltaReport:
    """Mean value expansion of ``g(mean)`` around ``mu`` over seeded replicates.

    For each replicate the sample mean ``xbar`` is drawn and ``xi`` (a point
    between ``mu`` and ``xbar``) solves ``g(xbar) = g(mu) + g'(xi)(xbar - mu)``.
    The statistic ``sqrt(n) (g(xbar) - g(mu)) / (sigma |g'(mu)|)`` uses the
    true ``sigma`` and ``g'(mu)``.
    """
    slope = float(g.derivative(mu, 1))
    if abs(slope) < 1e-14:
        raise ValueError(f"g'(mu) = {slope}: the first-order expansion is degenerate at mu={mu}")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    g_mu = float(g(mu))
    xbar = np.empty(reps)
    xi = np.empty(reps)
    theta = np.empty(reps)
    resid = np.empty(reps)
    for i in range(reps):
        xbar[i] = float(np.mean(sampler(replicate_rng(seed, i), n)))
        res = solve_selector_uni(g, mu, xbar[i] - mu, 1, policy)
        xi[i] = res.point
        theta[i] = res.theta
        resid[i] = res.residual
    z = math.sqrt(n) * (g(xbar) - g_mu) / (sigma * abs(slope))
    return DeltaReport(
        n, reps, xbar, np.asarray(z, dtype=float), xi, theta, resid,
        ks_normal(z), float(np.max(np.abs(xi - mu))),
    )


def delta_sweep(
    g: ScalarField, mu: float, sigma: float, sampler, ns: Sequence[int], reps: int, seed: int,
    policy: SelectionPolicy = SUP,
) -> Dict[int, DeltaReport]:
    """Run :func:`delta_method_experiment` for each sample size in ``ns``."""
    return {n: delta_method_experiment(g, mu, sigma, sampler, n, reps, seed, policy) for n in ns}


# --------------------------------------------------------------------------
# two random variables


@dataclass
class TwoRVReport:
    measurable: bool
    max_residual: float
    all_between: bool
    residuals: Dict[str, float] = field(default_factory=dict)
    thetas: Dict[str, float] = field(default_factory=dict)


def two_rv_selector(
    f: ScalarField, X: RandomVariable, Y: RandomVariable, policy: SelectionPolicy = SUP
) -> Tuple[RandomVariable, TwoRVReport]:
    """Pointwise ``xi`` with ``f(X) = f(Y) + f'(xi)(X - Y)`` and ``xi`` between ``Y`` and ``X``.

    Measurability is reported with respect to the partition generated by
    ``(X, Y)`` jointly.  This is an empirical probe on finite spaces only.
    """
    if X.space != Y.space:
        raise ValueError("X and Y must share a probability space")
    values, residuals, thetas, failures = {}, {}, {}, {}
    between = True
    for o in X.space.outcomes:
        x, y = float(X[o]), float(Y[o])
        if x == y:
            values[o], residuals[o], thetas[o] = x, 0.0, 0.0
            continue
        try:
            res = solve_selector_uni(f, y, x - y, 1, policy)
        except (NoRootFound, ValueError) as exc:
            failures[o] = exc
            continue
        values[o], residuals[o], thetas[o] = res.point, res.residual, res.theta
        between &= min(x, y) <= res.point <= max(x, y)
    if failures:
        raise SelectionErrors(failures)
    xi = RandomVariable(X.space, values, check=False)
    report = TwoRVReport(
        measurable=is_measurable_wrt(xi, sigma_generated_by(joint(X, Y))),
        max_residual=max((abs(r) for r in residuals.values()), default=0.0),
        all_between=between,
        residuals=residuals,
        thetas=thetas,
    )
    return xi, report
