"""Distribution-quality functionals of finite point sets.

Spectral quantities are computed from a :class:`SpectralState`, the running
exponential sums ``S_n(k) = sum_m exp(-2 pi i k.x_m)`` over a frequency
window. Every spectral output is an :class:`Estimate` whose ``tail_bound``
bounds the absolute error caused by truncating the window (``inf`` when no
finite bound exists).

Quantities of the Bernoulli potential are computed exactly from its
piecewise-quadratic form; other kernels fall back to grid evaluation.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import polygamma

from . import piecewise
from .kernel import BERNOULLI2, FOURIER, LOGSIN, Kernel1D, KernelTd, _lattice
from .sequence import PointSet
from .transport import w1_circle_exact, w2_circle_exact

__all__ = [
    "Estimate",
    "SpectralState",
    "MetricReport",
    "METRICS",
    "KernelRequired",
    "pair_energy",
    "pair_energy_prefixes",
    "energy_spectral",
    "potential",
    "potential_sup_norm",
    "potential_l1_norm",
    "potential_mean",
    "potential_deriv_l2",
    "potential_deriv_l2_exact",
    "weyl_ratio",
    "diaphony",
    "w2_proxy",
    "star_discrepancy",
    "extreme_discrepancy",
    "interval_count_error",
    "w2_circle_exact",
    "w1_circle_exact",
    "metric_reports",
    "default_window",
]

DEFAULT_WINDOW = {1: 10_000, 2: 32, 3: 16}


class Estimate(NamedTuple):
    value: float
    tail_bound: float


class KernelRequired(ValueError):
    """A metric that depends on the kernel was requested without one."""


def default_window(dim: int) -> int:
    return DEFAULT_WINDOW.get(dim, 8)


def _zeta2_tail(K: int) -> float:
    return float(polygamma(1, K + 1))


def _coords(points) -> np.ndarray:
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


def _x1d(points) -> np.ndarray:
    pts = _coords(points)
    if pts.shape[1] != 1:
        raise ValueError("this diagnostic is only defined on the circle (d = 1)")
    return pts[:, 0]


class SpectralState:
    """Running exponential sums over half of the window ``0 < |k|_inf <= K``.

    In 1D the half window is ``k = 1..K``; on ``T^d`` it is the set of lattice
    points whose first nonzero entry is positive. ``S(-k)`` is the conjugate of
    ``S(k)`` and is never stored. Updating with one point costs ``O(window)``.
    """

    def __init__(self, K: int, dim: int = 1):
        if K < 0:
            raise ValueError("K must be >= 0")
        self.K = int(K)
        self.dim = int(dim)
        if dim == 1:
            self.freqs = np.arange(1, K + 1, dtype=float)[:, None]
        elif K == 0:
            self.freqs = np.zeros((0, dim))
        else:
            self.freqs = _lattice(dim, K).astype(float)
        self.norm2 = np.sum(self.freqs**2, axis=1)
        self.sums = np.zeros(len(self.freqs), dtype=complex)
        self.n = 0

    @classmethod
    def of(cls, points, K: int | None = None) -> "SpectralState":
        pts = _coords(points)
        state = cls(default_window(pts.shape[1]) if K is None else K, pts.shape[1])
        state.absorb(pts)
        return state

    def absorb(self, points) -> "SpectralState":
        pts = _coords(points)
        if pts.shape[1] != self.dim:
            raise ValueError("dimension mismatch")
        if len(self.freqs):
            for s in range(0, len(pts), 256):
                phase = pts[s : s + 256] @ self.freqs.T
                self.sums += np.exp(-2j * np.pi * phase).sum(axis=0)
        self.n += len(pts)
        return self

    def copy(self) -> "SpectralState":
        new = object.__new__(SpectralState)
        new.__dict__.update(self.__dict__)
        new.sums = self.sums.copy()
        return new

    @property
    def modulus2(self) -> np.ndarray:
        return self.sums.real**2 + self.sums.imag**2


def _require_1d_state(state: SpectralState):
    if state.dim != 1:
        raise ValueError("this diagnostic needs a one-dimensional spectral state")


# energies -------------------------------------------------------------------


def pair_energy_prefixes(points, kernel) -> np.ndarray:
    """``E_n = sum_{k,l <= n} f(x_k - x_l)`` for every prefix ``n``.

    Uses ``E_n = E_{n-1} + f(0) + 2 sum_{k<n} f(x_n - x_k)``. For the
    logarithmic kernel the diagonal is dropped (off-diagonal sum).
    For explicit Fourier kernels and kernels on ``T^d`` the energy is the
    exact finite spectral sum ``sum_k fhat(k) |S_n(k)|^2``.
    """
    pts = _coords(points)
    n = len(pts)
    out = np.empty(n)
    if isinstance(kernel, KernelTd) or kernel.variant == FOURIER:
        if isinstance(kernel, KernelTd):
            state, w = SpectralState(kernel.cutoff, kernel.dim), kernel.half_weights
        else:
            state, w = SpectralState(kernel.cutoff), kernel.coefficients_upto(kernel.cutoff)
        for i in range(n):
            state.absorb(pts[i : i + 1])
            out[i] = 2.0 * float(np.dot(w, state.modulus2))
        return out
    x = pts[:, 0]
    diag = 0.0 if kernel.variant == LOGSIN else kernel.f0
    acc = 0.0
    for i in range(n):
        cross = float(np.sum(kernel(x[i] - x[:i], singular="inf"))) if i else 0.0
        acc += diag + 2.0 * cross
        out[i] = acc
    return out


def pair_energy(points, kernel) -> float:
    """Pairwise energy ``sum_{k,l} f(x_k - x_l)`` (off-diagonal for the logarithmic kernel)."""
    return float(pair_energy_prefixes(points, kernel)[-1])


def energy_spectral(state: SpectralState, kernel: Kernel1D) -> Estimate:
    """``sum_{0<|k|<=K} fhat(k) |S_n(k)|^2`` with tail bound ``n^2 sum_{|k|>K} fhat(k)``."""
    _require_1d_state(state)
    coeffs = kernel.coefficients_upto(state.K)
    value = 2.0 * float(np.dot(coeffs, state.modulus2))
    tail = state.n**2 * 2.0 * kernel.tail_sum(state.K)
    return Estimate(value, tail)


# potential field ------------------------------------------------------------


def potential(points, kernel: Kernel1D, x) -> np.ndarray:
    """``f_n(x) = sum_k f(x - x_k)`` at the given locations."""
    pts = _x1d(points)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if kernel.variant == FOURIER:
        state = SpectralState.of(pts, kernel.cutoff)
        c = kernel.coefficients_upto(kernel.cutoff) * state.sums
        k = state.freqs[:, 0]
        out = np.empty(x.shape)
        for s in range(0, x.size, 512):
            out[s : s + 512] = 2.0 * np.real(np.exp(2j * np.pi * np.outer(x[s : s + 512], k)) @ c)
        return out
    out = np.zeros(x.shape)
    for s in range(0, pts.size, 64):
        out += np.sum(kernel(x[None, :] - pts[s : s + 64, None], singular="inf"), axis=0)
    return out


def potential_sup_norm(points, kernel: Kernel1D, grid: int = 4096) -> float:
    """``max_x |f_n(x)|``.

    Exact for the Bernoulli kernel (arc endpoints and vertices); otherwise the
    maximum over a uniform grid plus the points themselves.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    pts = _x1d(points)
    if kernel.variant == BERNOULLI2:
        return piecewise.sup_norm(np.sort(pts))
    if kernel.variant == LOGSIN:
        return math.inf
    xs = np.concatenate([np.arange(grid) / grid, pts])
    return float(np.abs(potential(pts, kernel, xs)).max())


def potential_l1_norm(points, kernel: Kernel1D, grid: int = 4096) -> Estimate:
    """``int |f_n|`` with a quadrature-error estimate.

    Exact (error 0) for the Bernoulli kernel. Otherwise the trapezoid rule on
    ``grid`` points; the estimate is its difference to the half-size rule.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    pts = _x1d(points)
    if kernel.variant == BERNOULLI2:
        return Estimate(piecewise.l1_norm(np.sort(pts)), 0.0)
    # shift half a cell so no node lands on a point (logarithmic singularity)
    xs = (np.arange(grid) + 0.5) / grid
    vals = np.abs(potential(pts, kernel, xs))
    fine = float(vals.mean())
    coarse = float(vals[::2].mean())
    return Estimate(fine, abs(fine - coarse))


def potential_mean(points, kernel: Kernel1D, grid: int = 4096) -> float:
    """Signed integral ``int f_n``; zero for every mean-zero kernel."""
    pts = _x1d(points)
    if kernel.variant == BERNOULLI2:
        return piecewise.signed_integral(np.sort(pts))
    xs = (np.arange(grid) + 0.5) / grid
    return float(potential(pts, kernel, xs).mean())


def potential_deriv_l2(state: SpectralState, kernel: Kernel1D) -> Estimate:
    """``||f_n'||_{L^2}`` from ``(sum_{0<|k|<=K} 4 pi^2 k^2 fhat(k)^2 |S_n(k)|^2)^{1/2}``."""
    _require_1d_state(state)
    k = state.freqs[:, 0]
    coeffs = kernel.coefficients_upto(state.K)
    sq = 2.0 * float(np.sum((2.0 * np.pi * k * coeffs) ** 2 * state.modulus2))
    tail_sq = state.n**2 * 2.0 * kernel.deriv_tail_sum(state.K)
    value = math.sqrt(sq)
    return Estimate(value, math.sqrt(sq + tail_sq) - value)


def potential_deriv_l2_exact(points) -> float:
    """Exact ``||f_n'||_{L^2}`` for the Bernoulli kernel."""
    return piecewise.deriv_l2(np.sort(_x1d(points)))


def weyl_ratio(state: SpectralState, kernel: Kernel1D) -> float:
    """``max_k (|S_n(k)|/n) / (sqrt(f(0)/fhat(k)) / sqrt(n))`` over the window."""
    _require_1d_state(state)
    if not kernel.finite_at_zero:
        raise ValueError("weyl_ratio needs a kernel with finite f(0)")
    if state.n == 0 or state.K == 0:
        return 0.0
    coeffs = kernel.coefficients_upto(state.K)
    if np.any(coeffs <= 0):
        raise ValueError("weyl_ratio needs positive coefficients on the whole window")
    ratio = np.sqrt(state.modulus2 * coeffs / (state.n * kernel.f0))
    return float(ratio.max())


def diaphony(state: SpectralState) -> Estimate:
    """``(sum_{0<|k|<=K} |S_n(k)/n|^2 / k^2)^{1/2}``; the tail adds at most ``2/K`` under the root."""
    _require_1d_state(state)
    return w2_proxy(state)


def w2_proxy(state: SpectralState) -> Estimate:
    """Negative Sobolev norm ``(sum_{0<|k|_inf<=K} |S_n(k)/n|^2 / |k|^2)^{1/2}``.

    The sum runs over both halves of the window, so in 1D it equals the
    diaphony; the one-sided norm is this value over ``sqrt(2)``. On ``T^d``
    with ``d >= 2`` no finite tail bound exists and ``inf`` is reported.
    """
    if state.n == 0:
        raise ValueError("empty spectral state")
    if len(state.freqs) == 0:
        sq = 0.0
    else:
        sq = 2.0 * float(np.sum(state.modulus2 / state.norm2)) / state.n**2
    value = math.sqrt(sq)
    if state.dim == 1:
        tail = math.sqrt(sq + 2.0 * _zeta2_tail(state.K)) - value
    else:
        tail = math.inf
    return Estimate(value, tail)


# counting -------------------------------------------------------------------


def star_discrepancy(points) -> float:
    """Anchored star discrepancy over boxes ``[0, t)`` via the sorted-order formula."""
    x = np.sort(_x1d(points))
    n = x.size
    if n == 0:
        raise ValueError("no points")
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(i / n - x, x - (i - 1) / n)))


def extreme_discrepancy(points) -> float:
    """Discrepancy over all arcs of the circle (wrap-around allowed).

    ``1/n + max_i (i/n - x_(i)) - min_i (i/n - x_(i))``.
    """
    x = np.sort(_x1d(points))
    n = x.size
    if n == 0:
        raise ValueError("no points")
    g = np.arange(1, n + 1) / n - x
    return float(1.0 / n + g.max() - g.min())


def interval_count_error(points, left: float, length: float) -> float:
    """``|#{x_i in J}/n - |J||`` for the arc ``J = [left, left + length)`` mod 1."""
    x = _x1d(points)
    if x.size == 0:
        raise ValueError("no points")
    if not 0.0 <= length <= 1.0:
        raise ValueError("length must lie in [0, 1]")
    if length == 1.0:
        count = x.size
    else:
        count = int(np.count_nonzero(np.mod(x - left, 1.0) < length))
    return abs(count / x.size - length)


# reports --------------------------------------------------------------------

METRICS = (
    "energy",
    "sup_norm",
    "l1_norm",
    "deriv_l2",
    "diaphony",
    "star_discrepancy",
    "w2_exact",
    "w1_exact",
    "w2_proxy",
    "weyl_max_ratio",
)
_KERNEL_METRICS = {"energy", "sup_norm", "l1_norm", "deriv_l2", "weyl_max_ratio"}
_TD_METRICS = {"energy", "w2_proxy"}


@dataclass
class MetricReport:
    """Diagnostics of one prefix; ``tails`` holds per-metric error bounds."""

    n: int
    energy: float = math.nan
    sup_norm: float = math.nan
    l1_norm: float = math.nan
    deriv_l2: float = math.nan
    diaphony: float = math.nan
    star_discrepancy: float = math.nan
    w2_exact: float = math.nan
    w1_exact: float = math.nan
    w2_proxy: float = math.nan
    weyl_max_ratio: float = math.nan
    tails: dict = field(default_factory=dict)

    def rows(self, metrics: Sequence[str] | None = None) -> list[tuple[int, str, float, float]]:
        names = metrics or [m for m in METRICS if not math.isnan(getattr(self, m))]
        return [(self.n, m, getattr(self, m), self.tails.get(m, 0.0)) for m in names]

    def to_dict(self) -> dict:
        return asdict(self)


def _check_metrics(metrics, kernel, dim):
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    if kernel is None and _KERNEL_METRICS & set(metrics):
        raise KernelRequired(f"metrics {sorted(_KERNEL_METRICS & set(metrics))} need a kernel")
    if dim > 1 and set(metrics) - _TD_METRICS:
        raise ValueError(f"on T^{dim} only {sorted(_TD_METRICS)} are available")
    if kernel is not None:
        kdim = kernel.dim if isinstance(kernel, KernelTd) else 1
        if kdim != dim:
            raise ValueError("kernel and points have different dimensions")


def metric_reports(
    points,
    kernel=None,
    checkpoints: Sequence[int] | None = None,
    metrics: Sequence[str] | None = None,
    K: int | None = None,
    grid: int = 4096,
    timings: list | None = None,
) -> list[MetricReport]:
    """Evaluate ``metrics`` on the prefixes ``points[:n]`` for ``n`` in ``checkpoints``.

    Exponential sums and energies are carried forward incrementally between
    checkpoints; sorted-order quantities are recomputed per prefix. When
    ``timings`` is a list, the seconds spent on each checkpoint are appended.
    """
    pts = _coords(points)
    dim = pts.shape[1]
    N = len(pts)
    if N == 0:
        raise ValueError("no points")
    checkpoints = sorted(set(checkpoints or _powers_of_two(N)))
    if checkpoints[0] < 1 or checkpoints[-1] > N:
        raise ValueError(f"checkpoints must lie in [1, {N}]")
    if metrics is None:
        metrics = [m for m in METRICS if (kernel is not None or m not in _KERNEL_METRICS)]
        if dim > 1:
            metrics = [m for m in metrics if m in _TD_METRICS]
    _check_metrics(metrics, kernel, dim)
    K = default_window(dim) if K is None else K
    wants = set(metrics)
    state = SpectralState(K, dim)
    energies = pair_energy_prefixes(pts, kernel) if "energy" in wants else None
    reports = []
    done = 0
    for n in checkpoints:
        tick = time.perf_counter()
        state.absorb(pts[done:n])
        done = n
        rep = MetricReport(n)
        prefix = pts[:n]
        if energies is not None:
            rep.energy = float(energies[n - 1])
        if "sup_norm" in wants:
            rep.sup_norm = potential_sup_norm(prefix, kernel, grid)
        if "l1_norm" in wants:
            rep.l1_norm, rep.tails["l1_norm"] = potential_l1_norm(prefix, kernel, grid)
        if "deriv_l2" in wants:
            if kernel.variant == BERNOULLI2:
                rep.deriv_l2 = potential_deriv_l2_exact(prefix)
            else:
                rep.deriv_l2, rep.tails["deriv_l2"] = potential_deriv_l2(state, kernel)
        if "diaphony" in wants:
            rep.diaphony, rep.tails["diaphony"] = diaphony(state)
        if "w2_proxy" in wants:
            rep.w2_proxy, rep.tails["w2_proxy"] = w2_proxy(state)
        if "star_discrepancy" in wants:
            rep.star_discrepancy = star_discrepancy(prefix)
        if "w2_exact" in wants:
            rep.w2_exact = w2_circle_exact(prefix)
        if "w1_exact" in wants:
            rep.w1_exact = w1_circle_exact(prefix)
        if "weyl_max_ratio" in wants:
            rep.weyl_max_ratio = weyl_ratio(state, kernel)
        reports.append(rep)
        if timings is not None:
            timings.append(time.perf_counter() - tick)
    return reports


def _powers_of_two(N: int) -> list[int]:
    out = [1 << j for j in range(N.bit_length()) if (1 << j) <= N]
    if out[-1] != N:
        out.append(N)
    return out
