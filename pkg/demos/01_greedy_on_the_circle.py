"""
Greedy points on the circle
===========================

Each new point is placed where the potential of the points so far is
smallest. With the kernel x^2 - x + 1/6 the potential is a parabola on every
gap between consecutive points, so the minimiser is found exactly.
"""

from fractions import Fraction

import numpy as np

from greedyseq import SolverConfig, bernoulli2, greedy

kernel = bernoulli2()

# start from two points and add six more
ps = greedy(kernel, [1 / 3, 4 / 5], 8, seed_literals=["1/3", "4/5"])
for i, x in enumerate(ps.x, start=1):
    print(f"x_{i} = {x:.6f}  ~ {Fraction(x).limit_denominator(1000)}")

# at step 5 two gaps give exactly the same minimum; the default keeps the smaller coordinate
print("steps decided by a tie:", ps.provenance["tie_steps"])

# breaking ties towards the larger coordinate changes the order, not the set
other = greedy(kernel, [1 / 3, 4 / 5], 8, SolverConfig(tie_break="largest"))
print("largest-first order:", np.round(other.x[2:], 4))
print("same set:", np.allclose(np.sort(ps.x), np.sort(other.x)))

# the potential at each new point is never positive
x = ps.x
for n in range(2, 8):
    print(f"potential at x_{n + 1}: {kernel(x[n] - x[:n]).sum():+.5f}")
