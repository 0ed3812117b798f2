"""
Two random variables
====================

f(X) = f(Y) + f'(xi)(X - Y) with xi between Y and X.  The selector gives a
xi that is a function of the pair (X, Y), hence measurable with respect to
the sigma-algebra they generate jointly.
"""

from pathlib import Path

from stochtaylor.fields import sin
from stochtaylor.probability import is_measurable_wrt, joint, load, sigma_generated_by
from stochtaylor.stats_apps import two_rv_selector

data = Path(__file__).parent / "data"
X, Y = load(data / "die.json"), load(data / "die_y.json")
xi, report = two_rv_selector(sin(), X, Y)

for omega in X.space.outcomes:
    print(f"  {omega}: X={X[omega]} Y={Y[omega]}  xi={xi[omega]:.10f}")
print("measurable w.r.t. sigma(X, Y):", report.measurable)
print("measurable w.r.t. sigma(X) alone:", is_measurable_wrt(xi, sigma_generated_by(X)))
print("all between, max residual:", report.all_between, f"{report.max_residual:.1e}")
print("joint partition:", sigma_generated_by(joint(X, Y)))
