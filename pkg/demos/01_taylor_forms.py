"""
Taylor expansions in three forms
================================

Partial sums, the Lagrange remainder and the integral remainder, side by
side for a few smooth functions.
"""

import math

import numpy as np

from stochtaylor.fields import exp, exp_affine, separable, sin, cos
from stochtaylor.taylor_core import (
    VectorField,
    directional_power,
    integral_remainder_vec,
    lagrange_remainder_uni,
    partial_sum_uni,
    partial_sum_vec,
)

# Univariate: sin around 0 with increment 0.3.  The cubic partial sum
# already matches to about 2e-5.
f = sin()
for n in (1, 2, 3, 4):
    approx = partial_sum_uni(f, 0.0, 0.3, n)
    print(f"T_{n - 1}(0.3) = {approx:.10f}   error {math.sin(0.3) - approx:+.2e}")

# The Lagrange form evaluates the remainder at a chosen fraction theta of
# the step.  For exp with theta = 1/2 it is exp(1/2) * h / 1!.
print("Lagrange remainder, exp, theta=1/2:", lagrange_remainder_uni(exp(), 0.0, 0.5, 1.0, 1))

# Multivariate: (h . grad)^n f is the n-th derivative along h.
g = exp_affine([1.0, 2.0])
h = np.array([0.1, -0.2])
for n in (1, 2, 3):
    print(f"(h.grad)^{n} exp(x + 2y) at 0 =", float(directional_power(g, [0.0, 0.0], h, n)))

# Integral form for a vector field: the identity closes to machine precision.
F = VectorField((exp_affine([1.0, 0.5]), separable(sin(), cos())))
a, h = np.array([0.2, -0.4]), np.array([0.6, 0.3])
for n in (1, 2, 3):
    gap = F(a + h) - partial_sum_vec(F, a, h, n) - integral_remainder_vec(F, a, h, n)
    print(f"n={n}: F(a+h) - T - R = {gap}")
