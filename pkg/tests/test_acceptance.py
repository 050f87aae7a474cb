"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as a script.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from acceptance_log import record
from greedyseq.diagnostics import (
    SpectralState,
    energy_spectral,
    pair_energy,
    pair_energy_prefixes,
    star_discrepancy,
    weyl_ratio,
)
from greedyseq.experiments import (
    conjecture_report,
    doubling_window_l1_check,
    fit_gn_constant,
    fit_growth,
    prefix_sup_norms,
    td_scaling,
    interpolation_envelope,
    write_conjecture_tables,
)
from greedyseq.kernel import bernoulli2
from greedyseq.sequence import exact_bernoulli_argmin, greedy, kronecker
from greedyseq.transport import w2_circle_exact

N = 4096
B2 = bernoulli2()
EXAMPLE_SEED = [1 / 3, 4 / 5]
PUBLISHED = [0.066, 0.566, 0.941, 0.441, 0.191, 0.691]


@pytest.fixture(scope="module")
def example_run():
    return greedy(B2, EXAMPLE_SEED, N)


@pytest.fixture(scope="module")
def random_runs():
    rng = np.random.Generator(np.random.PCG64(2024))
    return [greedy(B2, rng.random(2), N) for _ in range(10)]


def test_c01_example_sequence():
    t0 = time.perf_counter()
    ps = greedy(B2, EXAMPLE_SEED, 8)
    elapsed = time.perf_counter() - t0
    err = np.abs(ps.x[2:] - np.array(PUBLISHED))
    ok = bool(np.all(err <= 5e-4)) and elapsed < 1.0
    got = ", ".join(f"{v:.5f}" for v in ps.x[2:])
    record(1, ok, f"next six = [{got}], max |error| = {err.max():.3g} (tol 5e-4), {elapsed * 1e3:.1f} ms")


def test_c02_energy_bound(random_runs):
    worst = -math.inf
    for ps in random_runs:
        n = np.arange(1, N + 1)
        e = pair_energy_prefixes(ps, B2)
        worst = max(worst, float(np.max(e - n / 6 - n * 1e-9)))
    record(2, worst <= 0, f"max over 10 runs and n <= {N} of energy - n/6 - n*1e-9 = {worst:.3g}")


def test_c03_sup_norm_bound(random_runs):
    worst = 0.0
    n = np.arange(1, N + 1)
    for ps in random_runs:
        sup = prefix_sup_norms(ps, B2)
        worst = max(worst, float(np.max(sup / (np.sqrt(n) / 6))))
    record(3, worst <= 1 + 1e-6, f"max sup_norm / (sqrt(n)/6) = {worst:.9f} (limit 1 + 1e-6)")


def test_c04_weyl_ratio(example_run, random_runs):
    worst = 0.0
    for ps in [example_run] + random_runs:
        state = SpectralState(256)
        for i in range(N):
            state.absorb(ps.points[i : i + 1])
            worst = max(worst, weyl_ratio(state, B2))
    record(4, worst <= 1 + 1e-6, f"max weyl_ratio over 11 runs, n <= {N}, K = 256: {worst:.9f}")


def test_c05_w2_rate(example_run):
    t0 = time.perf_counter()
    ns = [2**j for j in range(5, 13)]
    scaled = [w2_circle_exact(example_run.x[:n]) * math.sqrt(n) for n in ns]
    fit = fit_growth(ns, [s / math.sqrt(n) for s, n in zip(scaled, ns)], "inv_sqrt")
    elapsed = time.perf_counter() - t0
    ok = max(scaled) <= 10 * scaled[0] and elapsed < 60
    record(5, ok, f"max w2*sqrt(n) = {max(scaled):.4f} vs 10 x {scaled[0]:.4f}; "
                  f"fitted c = {fit.params['c']:.4f} (rms log residual {fit.rms:.3f}); {elapsed:.2f} s")


def test_c06_doubling_windows(example_run):
    rep = doubling_window_l1_check(example_run, B2, N, tol=1e-3, windows="all")
    missing = [w for w in rep.windows if w[2] is None]
    record(6, rep.ok, f"{len(rep.windows)} windows [n, 2n] in [1, {N}], {len(missing)} without a witness; "
                      f"max L1 over all prefixes = {rep.l1.max():.6f}")


def test_c07_interpolation_chain(example_run):
    c_gn = fit_gn_constant()
    rep = interpolation_envelope(example_run, B2, N, c_gn=c_gn)
    slack = min(b - s for _, s, b, _ in rep.checks)
    ok = rep.chain_ok and rep.envelope_nonincreasing and rep.envelope_bounded
    record(7, ok, f"C_GN = {c_gn:.4f}, {len(rep.checks)} witnesses, min slack {slack:.4f}; "
                  f"envelope {rep.envelope[0]:.4f} -> {rep.envelope[-1]:.4f}")


def test_c08_kronecker_energy():
    t0 = time.perf_counter()
    n_max = 2**14
    ps = kronecker(math.sqrt(2), n_max)
    energies = pair_energy_prefixes(ps, B2)
    ns = [2**j for j in range(6, 15)]
    ratios = [energies[n - 1] / math.log(n) for n in ns]
    # spectral cross-check with its tail bound at every checkpoint
    K = 4096
    state = SpectralState(K)
    done, spectral_ok = 0, True
    for n in ns:
        state.absorb(ps.points[done:n])
        done = n
        est = energy_spectral(state, B2)
        spectral_ok &= abs(est.value - energies[n - 1]) <= est.tail_bound
    elapsed = time.perf_counter() - t0
    ok = max(ratios) <= 3 * ratios[0] and spectral_ok and elapsed < 60
    record(8, ok, f"max energy/log n = {max(ratios):.4f} vs 3 x {ratios[0]:.4f}; "
                  f"spectral within tail: {spectral_ok}; {elapsed:.2f} s")


def test_c09_torus_scaling():
    t0 = time.perf_counter()
    r3 = td_scaling(3, N=512, grid=64, window=16)
    r2 = td_scaling(2, N=1024, grid=256, window=32)
    elapsed = time.perf_counter() - t0

    def bounded(rep):
        ref = rep.normalized[rep.checkpoints.index(8)]
        vals = [v for n, v in zip(rep.checkpoints, rep.normalized) if n > 1]
        return max(vals) <= 5 * ref, max(vals) / ref

    ok3, q3 = bounded(r3)
    ok2, q2 = bounded(r2)
    ok = ok3 and ok2 and r3.offdiag_ok and r2.offdiag_ok and elapsed < 600
    record(9, ok, f"T^3 max/n=8 ratio {q3:.3f}, T^2 max/n=8 ratio {q2:.3f} (limit 5); "
                  f"gates {r3.max_gate_residual:.2e}, {r2.max_gate_residual:.2e}; {elapsed:.1f} s")


def _b2(x):
    x = np.mod(x, 1.0)
    return x * x - x + 1 / 6


def test_c10_oracles():
    rng = np.random.Generator(np.random.PCG64(77))
    M = 1_000_000
    grid = np.arange(M) / M
    argmin_ok = 0
    for _ in range(100):
        pts = rng.random(int(rng.integers(2, 9)))
        loc, _ = exact_bernoulli_argmin(pts)
        pot = np.zeros(M)
        for p in pts:
            pot += _b2(grid - p)
        g = grid[int(np.argmin(pot))]
        argmin_ok += min(abs(loc - g), 1 - abs(loc - g)) <= 1e-6

    w2_ok = 0
    for n in range(1, 7):
        for _ in range(2):
            pts = rng.random(n)
            src = np.repeat(pts, 600 // n)
            dst = (np.arange(600) + 0.5) / 600
            d = np.abs(src[:, None] - dst[None, :])
            cost = np.minimum(d, 1 - d) ** 2
            r, c = linear_sum_assignment(cost)
            w2_ok += abs(math.sqrt(cost[r, c].mean()) - w2_circle_exact(pts)) <= 2e-3

    energy_ok = 0
    for _ in range(50):
        pts = rng.random(int(rng.integers(1, 80)))
        est = energy_spectral(SpectralState.of(pts, int(rng.integers(16, 1024))), B2)
        energy_ok += abs(est.value - pair_energy(pts, B2)) <= est.tail_bound

    closed_ok = True
    for n in (1, 2, 10, 100, 1000):
        mid = (np.arange(n) + 0.5) / n
        closed_ok &= abs(w2_circle_exact(mid) - 1 / (2 * math.sqrt(3) * n)) <= 1e-12
        closed_ok &= abs(star_discrepancy(mid) - 1 / (2 * n)) <= 1e-12

    ok = argmin_ok == 100 and w2_ok == 12 and energy_ok == 50 and closed_ok
    record(10, ok, f"argmin {argmin_ok}/100, w2 assignment {w2_ok}/12, spectral energy {energy_ok}/50, "
                   f"closed forms {'ok' if closed_ok else 'failed'}")


def test_c11_conjecture_report(tmp_path):
    rep = conjecture_report(N)
    paths = write_conjecture_tables(rep, tmp_path)
    tables = all(paths[k].exists() for k in ("greedy", "kronecker", "vdc"))
    last = rep["greedy"][-1]
    record(11, tables and rep["greedy_bounds_ok"],
           f"tables for greedy/kronecker/vdc up to n = {N}; proven columns pass: {rep['greedy_bounds_ok']}; "
           f"greedy at n = {N}: energy/log n = {last['energy_over_log_n']:.4f}, "
           f"w2 n/sqrt(log n) = {last['w2_n_over_sqrt_log_n']:.4f}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
