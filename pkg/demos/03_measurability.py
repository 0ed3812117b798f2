"""
The intermediate point as a random variable
===========================================

On a finite space the selector is applied outcome by outcome.  Because it
depends on the outcome only through X, the result is constant on every
level set of X, which is exactly measurability with respect to sigma(X).
"""

from pathlib import Path

from stochtaylor.fields import exp
from stochtaylor.probability import RandomVariable, is_measurable_wrt, load, sigma_generated_by
from stochtaylor.selector import apply_over_sample

X = load(Path(__file__).parent / "data" / "die.json")
print("X      :", dict(X.items()))
print("sigma(X) atoms:", sigma_generated_by(X))

xi = apply_over_sample(exp(), 0.0, X, 1)
for omega, value in xi.items():
    print(f"  outcome {omega}: X={X[omega]}  xi={value:.12f}")

print("measurable w.r.t. sigma(X):", is_measurable_wrt(xi, sigma_generated_by(X)))

# A map that separates two outcomes with the same X is not.
spoiled = dict(X.items())
spoiled["1"] += 1e-9
print("perturbed map measurable:", is_measurable_wrt(RandomVariable(X.space, spoiled, check=False), sigma_generated_by(X)))
