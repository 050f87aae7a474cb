"""
Potential profiles as CSV
=========================

Tabulates f_n(x) = sum_{k<=n} f(x - x_k) for a few n and the scatter of
(i/n, x_i), ready for any plotting tool. The next greedy point is the
minimiser of the profile for the current n.
"""

import sys
from pathlib import Path

import numpy as np

from greedyseq import bernoulli2, greedy
from greedyseq.experiments import figure_data

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
kernel = bernoulli2()
ps = greedy(kernel, [0.3, 0.8], 250)
paths = figure_data(ps, kernel, [10, 100, 249], out)
print("wrote", *paths.values())

table = np.loadtxt(paths["curves"], delimiter=",", skiprows=1)
x, f100 = table[:, 0], table[:, 2]
print(f"argmin of f_100 on the grid: {x[np.argmin(f100)]:.4f}; x_101 = {ps.x[100]:.4f}")
print(f"sup |f_100| = {np.abs(f100).max():.4f} <= sqrt(100)/6 = {10 / 6:.4f}")
