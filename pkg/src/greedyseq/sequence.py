"""Point sequences on the circle and on flat tori.

The greedy construction appends, one at a time, a minimiser of the potential
generated by all points so far. Three solver modes exist:

``exact_piecewise``
    Bernoulli kernel on the circle only. The potential is piecewise quadratic
    and its global minimum is found exactly (see :mod:`greedyseq.piecewise`).
``grid_refine``
    Any kernel on the circle. Best of ``M`` uniform candidates, then a bounded
    Brent search on the two grid cells around it.
``grid``
    Kernels on ``T^d``. Best of ``M^d`` uniform candidates; the potential on
    the whole grid comes from one inverse FFT of the running exponential sums.

Ties are broken towards the smallest (lexicographic) coordinate. Classical
baselines (Kronecker, van der Corput, uniform random) live here too.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft
from scipy.optimize import minimize_scalar

from . import piecewise
from .kernel import BERNOULLI2, FOURIER, Kernel1D, KernelTd, kernel_dim, kernel_to_json

__all__ = [
    "PointSet",
    "SolverConfig",
    "GateError",
    "greedy_extend",
    "greedy",
    "exact_bernoulli_argmin",
    "kronecker",
    "van_der_corput",
    "radical_inverse",
    "random_points",
    "default_config",
]

EXACT = "exact_piecewise"
GRID_REFINE = "grid_refine"
GRID = "grid"

DEFAULT_GRID = {1: 4096, 2: 256, 3: 64}


class GateError(RuntimeError):
    """No candidate reached a nonpositive potential (grid too coarse)."""


def threads() -> int:
    try:
        return max(1, int(os.environ.get("GREEDYSEQ_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class PointSet:
    """Ordered points on ``[0, 1)^d`` with the recipe that produced them."""

    points: np.ndarray
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError("points must have shape (n, d)")
        if pts.size and (np.any(pts < 0.0) or np.any(pts >= 1.0)):
            raise ValueError("all coordinates must lie in [0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def x(self) -> np.ndarray:
        """Coordinates of a one-dimensional set as a flat array."""
        if self.dim != 1:
            raise ValueError("x is only defined for one-dimensional point sets")
        return self.points[:, 0]

    def prefix(self, n: int) -> "PointSet":
        return PointSet(self.points[:n], self.provenance)


@dataclass(frozen=True)
class SolverConfig:
    """Settings of one greedy run.

    ``eps_pot`` defaults to ``1e-9`` in exact mode and ``1e-6`` otherwise.
    ``tie_break`` is ``"smallest"``; ``"largest"`` exists for comparison runs.
    """

    mode: str = EXACT
    grid_size: int = 4096
    refine_tol: float = 1e-12
    tie_break: str = "smallest"
    eps_pot: float | None = None

    def __post_init__(self):
        if self.mode not in (EXACT, GRID_REFINE, GRID):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        if self.refine_tol <= 0:
            raise ValueError("refine_tol must be positive")
        if self.tie_break not in ("smallest", "largest"):
            raise ValueError("tie_break must be 'smallest' or 'largest'")

    @property
    def gate(self) -> float:
        if self.eps_pot is not None:
            return self.eps_pot
        return 1e-9 if self.mode == EXACT else 1e-6

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "grid_size": self.grid_size,
            "refine_tol": self.refine_tol,
            "tie_break": self.tie_break,
            "eps_pot": self.gate,
        }


def default_config(kernel) -> SolverConfig:
    d = kernel_dim(kernel)
    if d > 1:
        return SolverConfig(mode=GRID, grid_size=DEFAULT_GRID.get(d, 32))
    if kernel.variant == BERNOULLI2:
        return SolverConfig(mode=EXACT)
    return SolverConfig(mode=GRID_REFINE, grid_size=DEFAULT_GRID[1])


def exact_bernoulli_argmin(points, tie_break: str = "smallest") -> tuple[float, float]:
    """Exact global minimiser and minimum of ``sum_k B2({x - x_k})``."""
    y = np.sort(np.asarray(points, dtype=float).ravel())
    if y.size == 0:
        raise ValueError("need at least one point")
    loc, _, _ = piecewise.argmin(y, tie_break)
    return loc, float(piecewise.values_at(y, loc)[0])


class _ExactSolver:
    def __init__(self, pts: np.ndarray, config: SolverConfig):
        self.sorted = np.sort(pts)
        self.config = config

    def step(self) -> tuple[float, float, int]:
        loc, _, ntied = piecewise.argmin(self.sorted, self.config.tie_break)
        u = np.mod(loc - self.sorted, 1.0)
        return loc, float(np.sum(u * u - u + 1.0 / 6.0)), ntied

    def add(self, x: float) -> None:
        i = np.searchsorted(self.sorted, x)
        self.sorted = np.insert(self.sorted, i, x)


def _pick(values: np.ndarray, tie_break: str, n: int) -> tuple[int, int]:
    """Index of the minimum with a deterministic tie rule, plus the tie count."""
    best = values.min()
    tol = 1e-12 * max(1.0, abs(best), n)
    tied = np.flatnonzero(values <= best + tol)
    return int(tied[0] if tie_break == "smallest" else tied[-1]), int(tied.size)


class _GridRefineSolver:
    """Grid search plus bounded refinement for any kernel on the circle."""

    def __init__(self, pts: np.ndarray, kernel: Kernel1D, config: SolverConfig):
        self.kernel = kernel
        self.config = config
        M = config.grid_size
        self.grid = np.arange(M) / M
        self.spectral = kernel.variant == FOURIER
        if self.spectral:
            self.freqs = np.arange(1, kernel.cutoff + 1)
            self.coeffs = kernel.coefficients_upto(kernel.cutoff)
            self.sums = np.zeros(kernel.cutoff, dtype=complex)
        else:
            self.values = np.zeros(M)
        self.pts: list[float] = []
        for x in pts:
            self.add(float(x))

    def add(self, x: float) -> None:
        self.pts.append(x)
        if self.spectral:
            self.sums += np.exp(-2j * np.pi * self.freqs * x)
        else:
            self.values += self.kernel(self.grid - x, singular="inf")

    def grid_values(self) -> np.ndarray:
        if not self.spectral:
            return self.values
        M = self.config.grid_size
        folded = np.zeros(M, dtype=complex)
        np.add.at(folded, self.freqs % M, self.coeffs * self.sums)
        # f_n(m/M) = 2 Re sum_k fhat(k) S(k) e^{2 pi i k m / M}
        return 2.0 * np.real(scipy.fft.ifft(folded, workers=threads())) * M

    def value(self, x: float) -> float:
        if self.spectral:
            return float(2.0 * np.real(np.sum(self.coeffs * self.sums * np.exp(2j * np.pi * self.freqs * x))))
        return float(np.sum(self.kernel(x - np.asarray(self.pts), singular="inf")))

    def step(self) -> tuple[float, float, int]:
        M = self.config.grid_size
        vals = self.grid_values()
        i, ntied = _pick(vals, self.config.tie_break, len(self.pts))
        best_x, best_v = self.grid[i], self.value(self.grid[i])
        h = 1.0 / M
        res = minimize_scalar(
            lambda t: self.value(t % 1.0),
            bounds=(best_x - h, best_x + h),
            method="bounded",
            options={"xatol": self.config.refine_tol},
        )
        if res.fun < best_v:
            best_x, best_v = float(res.x) % 1.0, float(res.fun)
        if best_x >= 1.0:
            best_x = 0.0
        return best_x, best_v, ntied


class _TorusGridSolver:
    """Grid search on ``T^d`` driven by running exponential sums."""

    def __init__(self, pts: np.ndarray, kernel: KernelTd, config: SolverConfig):
        self.kernel = kernel
        self.config = config
        M = config.grid_size
        self.k = kernel.half_frequencies.astype(float)
        self.w = kernel.half_weights
        self.sums = np.zeros(len(self.k), dtype=complex)
        self.idx = tuple(np.mod(kernel.half_frequencies, M).T)
        self.nidx = tuple(np.mod(-kernel.half_frequencies, M).T)
        self.n = 0
        for p in pts:
            self.add(p)

    def add(self, x: np.ndarray) -> None:
        self.sums += np.exp(-2j * np.pi * (self.k @ np.asarray(x, dtype=float)))
        self.n += 1

    def grid_values(self) -> np.ndarray:
        M, d = self.config.grid_size, self.kernel.dim
        arr = np.zeros((M,) * d, dtype=complex)
        c = self.w * self.sums
        np.add.at(arr, self.idx, c)
        np.add.at(arr, self.nidx, np.conj(c))
        return np.real(scipy.fft.ifftn(arr, workers=threads())) * M**d

    def value(self, x: np.ndarray) -> float:
        phase = np.exp(2j * np.pi * (self.k @ np.asarray(x, dtype=float)))
        return float(2.0 * np.real(np.sum(self.w * self.sums * phase)))

    def step(self) -> tuple[np.ndarray, float, int]:
        M = self.config.grid_size
        vals = self.grid_values().ravel()
        i, ntied = _pick(vals, self.config.tie_break, self.n)
        x = np.array(np.unravel_index(i, (M,) * self.kernel.dim), dtype=float) / M
        return x, self.value(x), ntied


def _solver(pts: np.ndarray, kernel, config: SolverConfig):
    if isinstance(kernel, KernelTd):
        if config.mode != GRID:
            raise ValueError("kernels on T^d need mode='grid'")
        return _TorusGridSolver(pts, kernel, config)
    if config.mode == EXACT:
        if kernel.variant != BERNOULLI2:
            raise ValueError("exact_piecewise mode needs the bernoulli2 kernel")
        return _ExactSolver(pts[:, 0], config)
    if config.mode == GRID:
        raise ValueError("mode='grid' is for T^d; use grid_refine on the circle")
    return _GridRefineSolver(pts[:, 0], kernel, config)


def greedy_extend(points: PointSet, kernel, config: SolverConfig | None = None, steps: int = 1) -> PointSet:
    """Append ``steps`` greedy points to ``points``.

    Every appended point satisfies ``sum_{k<n} f(x_n - x_k) <= eps_pot``;
    otherwise :class:`GateError` is raised. The returned provenance records
    the seed, kernel, solver settings, the largest gate residual and the
    number of steps that were decided by the tie rule.
    """
    if len(points) == 0:
        raise ValueError("greedy_extend needs a nonempty seed")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    d = kernel_dim(kernel)
    if points.dim != d:
        raise ValueError(f"dimension mismatch: points are {points.dim}-d, kernel is {d}-d")
    config = config or default_config(kernel)
    pts = np.array(points.points)
    solver = _solver(pts, kernel, config)
    new = np.empty((steps, d))
    residual = -math.inf
    tie_steps = []
    n0 = len(points)
    for s in range(steps):
        x, value, ntied = solver.step()
        if not value <= config.gate:
            raise GateError(
                f"no nonpositive candidate at step {n0 + s + 1}: best potential {value:.3e} > eps_pot {config.gate:g}"
            )
        residual = max(residual, value)
        if ntied > 1:
            tie_steps.append(n0 + s + 1)
        new[s] = x
        solver.add(x if d > 1 else float(x))
    prov = dict(points.provenance)
    if prov.get("kind") != "greedy":
        prov = {
            "kind": "greedy",
            "kernel": kernel_to_json(kernel),
            "seed": pts.tolist(),
            "seed_literals": prov.get("seed_literals"),
            "solver": config.to_dict(),
            "max_gate_residual": None,
            "tie_steps": [],
        }
    prov["n"] = n0 + steps
    if steps:
        prev = prov.get("max_gate_residual")
        prov["max_gate_residual"] = residual if prev is None else max(prev, residual)
    prov["tie_steps"] = list(prov.get("tie_steps", [])) + tie_steps
    return PointSet(np.vstack([pts, new]), prov)


def greedy(kernel, seed, n: int, config: SolverConfig | None = None, seed_literals=None) -> PointSet:
    """Greedy sequence of ``n`` points in total, the first ones being ``seed``."""
    d = kernel_dim(kernel)
    seed = np.asarray(seed, dtype=float)
    if seed.size == 0 or seed.size % d:
        raise ValueError(f"seed has {seed.size} coordinates; expected a nonzero multiple of {d}")
    seed = seed.reshape(-1, d)
    seed = np.mod(seed, 1.0)
    if n < len(seed):
        raise ValueError("n must be at least the number of seed points")
    start = PointSet(seed, {"seed_literals": seed_literals} if seed_literals else {})
    return greedy_extend(start, kernel, config, n - len(seed))


def kronecker(alpha: float, n: int) -> PointSet:
    """``x_m = {m alpha}`` for ``m = 1..n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = np.arange(1, n + 1, dtype=float)
    x = np.mod(m * alpha, 1.0)
    return PointSet(x, {"kind": "kronecker", "alpha": float(alpha), "n": n})


def radical_inverse(m, base: int = 2) -> np.ndarray:
    """Digit reversal of the integers ``m`` about the radix point."""
    if base < 2:
        raise ValueError("base must be >= 2")
    m = np.atleast_1d(np.asarray(m, dtype=np.int64)).copy()
    out = np.zeros(m.shape)
    scale = 1.0 / base
    while np.any(m > 0):
        m, digit = np.divmod(m, base)
        out += digit * scale
        scale /= base
    return out


def van_der_corput(base: int, n: int) -> PointSet:
    """Radical inverses of ``1..n`` in ``base``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x = radical_inverse(np.arange(1, n + 1), base)
    return PointSet(x, {"kind": "vdc", "base": int(base), "n": n})


def random_points(seed: int, n: int, d: int = 1) -> PointSet:
    """``n`` i.i.d. uniform points from numpy's PCG64 generator seeded with ``seed``."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return PointSet(rng.random((n, d)), {"kind": "random", "rng": "PCG64", "seed": int(seed), "n": n})


def with_provenance(points: PointSet, **extra) -> PointSet:
    return replace(points, provenance={**points.provenance, **extra})
