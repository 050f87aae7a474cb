"""
Greedy, Kronecker, van der Corput and random points
===================================================

Uniformity measured four ways at powers of two: pair energy, circular
Wasserstein distance to the uniform measure, star discrepancy and diaphony.
"""

from greedyseq.experiments import compare

metrics = ["energy", "w2_exact", "star_discrepancy", "diaphony"]
generators = ["greedy:bernoulli2:1/3,4/5", "kronecker:sqrt2", "vdc:2", "random:1"]

res = compare(generators, 4096, metrics, window=1024)

for metric in metrics:
    print(f"\n{metric}")
    print("n".rjust(6) + "".join(label.rjust(20) for label in res.labels))
    for i, n in enumerate(res.checkpoints):
        vals = [getattr(res.table[label][i], metric) for label in res.labels]
        print(f"{n:6d}" + "".join(f"{v:20.6g}" for v in vals))

# fitted power laws c * n^alpha, reported only
print("\nfitted exponents for w2_exact")
for label in res.labels:
    fit = res.fits[label]["w2_exact"]
    print(f"  {label:20s} alpha = {fit.params['alpha']:+.3f}  (rms log residual {fit.rms:.3f})")
