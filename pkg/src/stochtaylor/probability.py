"""Finite probability spaces with partition-generated sigma-algebras.

On a finite space every sigma-algebra is generated by a partition of the
outcomes into atoms, and a map is measurable iff it is constant on each
atom.  That makes measurability exactly decidable.

Outcome identifiers are strings.  Values are floats or tuples of floats;
vector values are compared componentwise with exact equality, so callers
that need a tolerance must quantize first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

Value = Union[float, Tuple[float, ...]]
Partition = Tuple[Tuple[str, ...], ...]


class NotMeasurable(ValueError):
    pass


def _freeze(v) -> Value:
    if np.ndim(v) == 0:
        return float(v)
    return tuple(float(c) for c in np.asarray(v, dtype=float).ravel())


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    """Outcomes, a partition generating the sigma-algebra, and weights."""

    outcomes: Tuple[str, ...]
    atoms: Partition
    weights: Tuple[float, ...]

    def __post_init__(self):
        outcomes = tuple(str(o) for o in self.outcomes)
        atoms = tuple(tuple(str(o) for o in atom) for atom in self.atoms)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

        if len(set(outcomes)) != len(outcomes):
            raise ValueError("duplicate outcome ids")
        if len(weights) != len(outcomes):
            raise ValueError("one weight per outcome required")
        if any(w < 0 or not math.isfinite(w) for w in weights):
            raise ValueError("weights must be finite and nonnegative")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {math.fsum(weights)!r}, not 1")
        seen = [o for atom in atoms for o in atom]
        if any(len(atom) == 0 for atom in atoms):
            raise ValueError("atoms must be nonempty")
        if len(seen) != len(set(seen)) or set(seen) != set(outcomes):
            raise ValueError("atoms must be pairwise disjoint and cover the outcomes")

    @classmethod
    def discrete(cls, outcomes: Iterable[Hashable], weights: Sequence[float] | None = None):
        """Space whose sigma-algebra is the full power set."""
        outcomes = tuple(str(o) for o in outcomes)
        if weights is None:
            weights = [1.0 / len(outcomes)] * len(outcomes)
        return cls(outcomes, tuple((o,) for o in outcomes), tuple(weights))

    def weight(self, omega: str) -> float:
        return self.weights[self.outcomes.index(omega)]

    def __len__(self) -> int:
        return len(self.outcomes)


class RandomVariable:
    """Map from outcomes to scalars or fixed-length vectors.

    With ``check=True`` the map must be constant on every atom of the
    space, i.e. measurable with respect to the space's sigma-algebra.
    """

    def __init__(self, space: FiniteProbabilitySpace, values: Mapping, check: bool = True):
        self.space = space
        vals = {str(k): _freeze(v) for k, v in values.items()}
        if set(vals) != set(space.outcomes):
            raise ValueError("values must be given for exactly the outcomes of the space")
        self._values: Dict[str, Value] = {o: vals[o] for o in space.outcomes}
        if check and not is_measurable_wrt(self, space.atoms):
            raise NotMeasurable("random variable is not constant on the atoms of its space")

    @classmethod
    def from_sequence(cls, space: FiniteProbabilitySpace, values: Sequence, check: bool = True):
        return cls(space, dict(zip(space.outcomes, values)), check=check)

    def __getitem__(self, omega: str) -> Value:
        return self._values[omega]

    def items(self):
        return self._values.items()

    @property
    def values(self) -> List[Value]:
        return [self._values[o] for o in self.space.outcomes]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def map(self, fn) -> "RandomVariable":
        return RandomVariable(self.space, {o: fn(v) for o, v in self._values.items()}, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, RandomVariable)
            and self.space == other.space
            and self._values == other._values
        )

    def __repr__(self):
        return f"RandomVariable({self._values!r})"


def joint(*rvs: RandomVariable) -> RandomVariable:
    """``omega -> (X1(omega), X2(omega), ...)`` flattened into one tuple."""
    space = rvs[0].space
    if any(r.space != space for r in rvs):
        raise ValueError("random variables live on different spaces")
    vals = {}
    for o in space.outcomes:
        parts: List[float] = []
        for r in rvs:
            v = r[o]
            parts.extend(v if isinstance(v, tuple) else (v,))
        vals[o] = tuple(parts)
    return RandomVariable(space, vals, check=False)


def sigma_generated_by(X: RandomVariable) -> Partition:
    """Partition of the outcomes into level sets of ``X``, in order of first appearance."""
    blocks: Dict[Value, List[str]] = {}
    for o in X.space.outcomes:
        blocks.setdefault(X[o], []).append(o)
    return tuple(tuple(b) for b in blocks.values())


def is_measurable_wrt(g: RandomVariable, partition: Iterable[Iterable[str]]) -> bool:
    """True iff ``g`` takes a single value on every block of ``partition``."""
    for block in partition:
        block = list(block)
        first = g[block[0]]
        if any(g[o] != first for o in block[1:]):
            return False
    return True


def expectation(X: RandomVariable):
    """Probability-weighted mean; componentwise for vector values."""
    arr = X.as_array()
    w = np.asarray(X.space.weights)
    out = np.tensordot(w, arr, axes=(0, 0))
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# sampling


def parse_distribution(spec: str):
    """Parse ``name:arg1,arg2`` into a sampler ``(rng, size) -> ndarray``.

    Supported: ``uniform:lo,hi``, ``normal:mu,sigma``, ``bernoulli:p``,
    ``exponential:rate``, ``choice:v1,v2,...`` (uniform over listed values).
    """
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    try:
        params = [float(a) for a in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad parameters in distribution spec {spec!r}") from None
    if name == "uniform" and len(params) == 2 and params[0] < params[1]:
        lo, hi = params
        return lambda rng, size: rng.uniform(lo, hi, size)
    if name == "normal" and len(params) == 2 and params[1] > 0:
        mu, sd = params
        return lambda rng, size: rng.normal(mu, sd, size)
    if name == "bernoulli" and len(params) == 1 and 0 <= params[0] <= 1:
        p = params[0]
        return lambda rng, size: (rng.random(size) < p).astype(float)
    if name == "exponential" and len(params) == 1 and params[0] > 0:
        rate = params[0]
        return lambda rng, size: rng.exponential(1.0 / rate, size)
    if name == "choice" and params:
        vals = np.asarray(params)
        return lambda rng, size: rng.choice(vals, size)
    raise ValueError(f"unsupported distribution spec {spec!r}")


def distribution_moments(spec: str) -> Tuple[float, float]:
    """Mean and standard deviation of a parsed distribution spec."""
    parse_distribution(spec)
    name, _, args = spec.partition(":")
    params = [float(a) for a in args.split(",")] if args else []
    name = name.strip().lower()
    if name == "uniform":
        lo, hi = params
        return 0.5 * (lo + hi), (hi - lo) / math.sqrt(12.0)
    if name == "normal":
        return params[0], params[1]
    if name == "bernoulli":
        p = params[0]
        return p, math.sqrt(p * (1.0 - p))
    if name == "exponential":
        return 1.0 / params[0], 1.0 / params[0]
    vals = np.asarray(params)
    return float(vals.mean()), float(vals.std())


@dataclass(frozen=True)
class SampleStream:
    """``count`` draws from ``distribution`` with a fixed seed."""

    seed: int
    distribution: str
    count: int

    def draw(self) -> np.ndarray:
        if self.count < 1:
            raise ValueError("count must be >= 1")
        sampler = parse_distribution(self.distribution)
        return np.asarray(sampler(np.random.default_rng(self.seed), self.count), dtype=float)


def empirical_space(stream: SampleStream) -> Tuple[FiniteProbabilitySpace, RandomVariable]:
    """Uniform-weight space on the drawn outcomes, with ``X`` the drawn values."""
    draws = stream.draw()
    width = len(str(stream.count - 1))
    outcomes = tuple(f"w{i:0{width}d}" for i in range(stream.count))
    space = FiniteProbabilitySpace.discrete(outcomes)
    return space, RandomVariable.from_sequence(space, draws, check=False)


# --------------------------------------------------------------------------
# JSON


def to_dict(X: RandomVariable) -> dict:
    s = X.space
    return {
        "outcomes": list(s.outcomes),
        "atoms": [list(a) for a in s.atoms],
        "weights": list(s.weights),
        "values": {o: (list(v) if isinstance(v, tuple) else v) for o, v in X.items()},
    }


def from_dict(data: Mapping) -> RandomVariable:
    from .schemas import SPACE_SCHEMA, validate

    validate(data, SPACE_SCHEMA)
    space = FiniteProbabilitySpace(
        tuple(str(o) for o in data["outcomes"]),
        tuple(tuple(str(o) for o in a) for a in data["atoms"]),
        tuple(data["weights"]),
    )
    return RandomVariable(space, {str(k): v for k, v in data["values"].items()})


def dumps(X: RandomVariable) -> str:
    return json.dumps(to_dict(X), indent=2)


def loads(text: str) -> RandomVariable:
    return from_dict(json.loads(text))


def load(path) -> RandomVariable:
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))
