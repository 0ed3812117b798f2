"""
Choosing the intermediate point
===============================

The mean value form f(a+X) = T(a, X) + f^(n)(a+xi) X^n / n! holds for some
xi between 0 and X, but there may be several.  The selector scans the
bracket and returns the largest (sup) or smallest (inf) solution.
"""

import math

import numpy as np

from stochtaylor.fields import exp, poly, sin, square
from stochtaylor.selector import INF, SUP, build_remainder_equation, certify_sup, solve_selector_uni

# x^2 over [0, X]: the slope equation is linear, so xi is the midpoint.
print("x^2, X=2:", solve_selector_uni(square(), 0.0, 2.0, 1).xi)

# exp at 0: the closed form is log((e^X - 1) / X).
for x in (0.5, 1.0, -2.0):
    xi = solve_selector_uni(exp(), 0.0, x, 1).xi
    print(f"exp, X={x}: xi={xi:.12f}  closed form={math.log(math.expm1(x) / x):.12f}")

# sin over a full period has two solutions, pi/2 and 3pi/2.
sup = solve_selector_uni(sin(), 0.0, 2 * math.pi, 1, SUP)
inf = solve_selector_uni(sin(), 0.0, 2 * math.pi, 1, INF)
print(f"sin, X=2pi: sup xi={sup.xi / math.pi:.6f} pi, inf xi={inf.xi / math.pi:.6f} pi, "
      f"roots seen={sup.root_count_estimate}")

# Long brackets have many solutions.  A scan at ten times the resolution
# confirms nothing lies above the sup choice.
res = solve_selector_uni(sin(), 0.3, 40.0, 1)
eq = build_remainder_equation(sin(), 0.3, 40.0, 1)
print(f"sin, X=40: xi={res.xi:.6f}, {res.root_count_estimate} roots, "
      f"certified={certify_sup(eq.g, eq.pi, res.xi, res.bracket.hi, 10 * SUP.scan_points)}")

# Higher order: a sextic with n=3 and a negative increment.
p6 = poly([0.3, -1.0, 0.5, 0.25, -0.8, 0.1, 0.4])
res = solve_selector_uni(p6, 0.5, -1.7, 3)
print(f"sextic, n=3, X=-1.7: xi={res.xi:.10f} theta={res.theta:.6f} residual={res.residual:.1e}")

# Same input, same output, bit for bit.
print("repeatable:", all(solve_selector_uni(p6, 0.5, -1.7, 3) == res for _ in range(5)))
