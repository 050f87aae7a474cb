"""Admissible kernels on the circle and on flat tori.

A kernel here is an even, mean-zero function on the torus with positive
Fourier coefficients. Two closed-form kernels on the circle are provided
(the second Bernoulli polynomial and the logarithmic kernel
``-log(2 sin(pi |x|))``), plus kernels given by an explicit table of Fourier
coefficients. On ``T^d`` the truncated Green's function of the Laplacian (and
its weighted variants) is available.

All kernels are immutable; concurrent reads are safe.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np
from scipy.special import polygamma

__all__ = [
    "SingularEvaluation",
    "MeanFrequencyError",
    "Kernel1D",
    "KernelTd",
    "AdmissibilityReport",
    "bernoulli2",
    "logsin",
    "explicit_fourier",
    "green",
    "eval_kernel",
    "eval_kernel_td",
    "fourier_coefficient",
    "verify_admissibility",
    "kernel_from_json",
    "kernel_to_json",
]

BERNOULLI2 = "bernoulli2"
LOGSIN = "logsin"
FOURIER = "fourier"

_TWO_PI_SQ = 2.0 * math.pi**2


class SingularEvaluation(ValueError):
    """Raised when a kernel is evaluated at its singularity."""


class MeanFrequencyError(ValueError):
    """Raised when the k = 0 Fourier coefficient is requested."""


def _zeta2_tail(K: int) -> float:
    """sum_{k > K} 1/k^2."""
    return float(polygamma(1, K + 1))


@dataclass(frozen=True)
class Kernel1D:
    """Even, mean-zero kernel on the circle ``T = [0, 1)``.

    Parameters
    ----------
    variant : str
        One of ``"bernoulli2"``, ``"logsin"``, ``"fourier"``.
    coefficients : ndarray, optional
        For ``"fourier"`` only: ``coefficients[k - 1]`` is the coefficient at
        frequency ``k >= 1``; negative frequencies follow by evenness.
    cutoff : int
        Largest frequency used in spectral evaluation.
    satisfies_c_over_k2 : bool
        True once ``fhat(k) >= c / k^2`` has been certified with constant
        ``c``.
    """

    variant: str
    coefficients: np.ndarray | None = field(default=None, repr=False, compare=False)
    cutoff: int = 10_000
    satisfies_c_over_k2: bool = False
    c: float = 0.0

    def __post_init__(self):
        if self.variant not in (BERNOULLI2, LOGSIN, FOURIER):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.cutoff < 1:
            raise ValueError("cutoff must be a positive integer")
        if self.variant == FOURIER:
            if self.coefficients is None:
                raise ValueError("fourier kernel needs coefficients")
            coeffs = np.asarray(self.coefficients, dtype=float)
            if coeffs.ndim != 1:
                raise ValueError("coefficients must be one-dimensional")
            coeffs.setflags(write=False)
            object.__setattr__(self, "coefficients", coeffs)

    @property
    def name(self) -> str:
        if self.variant == FOURIER:
            return f"fourier[{self.coefficients.size}]"
        return self.variant

    @property
    def f0(self) -> float:
        """Value at the origin (``inf`` for the logarithmic kernel)."""
        if self.variant == BERNOULLI2:
            return 1.0 / 6.0
        if self.variant == LOGSIN:
            return math.inf
        return 2.0 * float(np.sum(self.coefficients[: self.cutoff]))

    @property
    def finite_at_zero(self) -> bool:
        return self.variant != LOGSIN

    def __call__(self, x, singular: str = "raise"):
        """Evaluate the kernel at torus coordinates ``x`` (reduced mod 1).

        ``singular`` controls the logarithmic kernel at ``x = 0``: ``"raise"``
        raises :class:`SingularEvaluation`, ``"inf"`` returns ``+inf``.
        """
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        if self.variant == BERNOULLI2:
            out = x * x - x + 1.0 / 6.0
        elif self.variant == LOGSIN:
            hit = x == 0.0
            if np.any(hit) and singular == "raise":
                raise SingularEvaluation("logsin kernel is singular at x = 0")
            with np.errstate(divide="ignore"):
                out = -np.log(2.0 * np.sin(np.pi * x))
            out = np.where(hit, np.inf, out)
        else:
            out = self._fourier_eval(x)
        return float(out) if np.ndim(out) == 0 else out

    def _fourier_eval(self, x: np.ndarray) -> np.ndarray:
        coeffs = self.coefficients[: self.cutoff]
        k = np.arange(1, coeffs.size + 1)
        flat = x.reshape(-1)
        out = np.empty_like(flat)
        step = max(1, 2_000_000 // max(1, k.size))
        for start in range(0, flat.size, step):
            chunk = flat[start : start + step]
            out[start : start + step] = 2.0 * (np.cos(2.0 * np.pi * np.outer(chunk, k)) @ coeffs)
        return out.reshape(x.shape)

    def fourier_coefficient(self, k: int) -> float:
        """Fourier coefficient ``fhat(k)`` for ``k != 0``."""
        k = int(k)
        if k == 0:
            raise MeanFrequencyError("the k = 0 coefficient is 0 by convention")
        k = abs(k)
        if self.variant == BERNOULLI2:
            return 1.0 / (_TWO_PI_SQ * k * k)
        if self.variant == LOGSIN:
            return 1.0 / (2.0 * k)
        if k <= self.coefficients.size:
            return float(self.coefficients[k - 1])
        return 0.0

    def coefficients_upto(self, K: int) -> np.ndarray:
        """Array of ``fhat(1), ..., fhat(K)``."""
        k = np.arange(1, K + 1, dtype=float)
        if self.variant == BERNOULLI2:
            return 1.0 / (_TWO_PI_SQ * k * k)
        if self.variant == LOGSIN:
            return 0.5 / k
        out = np.zeros(K)
        m = min(K, self.coefficients.size)
        out[:m] = self.coefficients[:m]
        return out

    def tail_sum(self, K: int) -> float:
        """One-sided tail ``sum_{k > K} fhat(k)``."""
        if self.variant == BERNOULLI2:
            return _zeta2_tail(K) / _TWO_PI_SQ
        if self.variant == LOGSIN:
            return math.inf
        return float(np.sum(self.coefficients[K:]))

    def deriv_tail_sum(self, K: int) -> float:
        """One-sided tail ``sum_{k > K} (2 pi k fhat(k))^2``."""
        if self.variant == BERNOULLI2:
            return _zeta2_tail(K) / math.pi**2
        if self.variant == LOGSIN:
            return math.inf
        k = np.arange(K + 1, self.coefficients.size + 1, dtype=float)
        return float(np.sum((2.0 * np.pi * k * self.coefficients[K:]) ** 2))

    def truncation_bound(self) -> float:
        """Sup-norm error of evaluating the series up to ``cutoff``."""
        return 2.0 * self.tail_sum(self.cutoff) if self.variant == FOURIER else 0.0

    def with_certificate(self, c: float) -> "Kernel1D":
        return replace(self, satisfies_c_over_k2=True, c=float(c))


def bernoulli2() -> Kernel1D:
    """The second Bernoulli polynomial ``x^2 - x + 1/6``."""
    return Kernel1D(BERNOULLI2, satisfies_c_over_k2=True, c=1.0 / _TWO_PI_SQ)


def logsin() -> Kernel1D:
    """The kernel ``-log(2 sin(pi |x|))`` with ``fhat(k) = 1/(2|k|)``."""
    return Kernel1D(LOGSIN, satisfies_c_over_k2=True, c=0.5)


def explicit_fourier(coeffs, cutoff: int | None = None) -> Kernel1D:
    """Kernel given by Fourier coefficients at positive frequencies.

    ``coeffs`` is either a mapping ``{k: value}``, an iterable of
    ``(k, value)`` pairs, or a dense sequence starting at ``k = 1``.
    Negative or zero frequencies are rejected; evenness is structural.
    """
    if isinstance(coeffs, Mapping):
        pairs = list(coeffs.items())
    else:
        coeffs = list(coeffs)
        if coeffs and np.ndim(coeffs[0]) == 1:
            pairs = [(int(k), float(v)) for k, v in coeffs]
        else:
            pairs = [(k + 1, float(v)) for k, v in enumerate(coeffs)]
    if not pairs:
        raise ValueError("no coefficients given")
    kmax = max(int(k) for k, _ in pairs)
    dense = np.zeros(kmax)
    for k, v in pairs:
        k = int(k)
        if k <= 0:
            raise ValueError(f"coefficients are stored for k >= 1 only, got k = {k}")
        if v <= 0:
            raise ValueError(f"coefficient at k = {k} is not positive")
        dense[k - 1] = v
    return Kernel1D(FOURIER, coefficients=dense, cutoff=cutoff or kmax)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    largest_c: float
    k_max: int
    kernel: Kernel1D


def verify_admissibility(kernel: Kernel1D, c: float, k_max: int) -> AdmissibilityReport:
    """Check ``fhat(k) >= c k^{-2}`` for ``1 <= k <= k_max``.

    The returned report carries a copy of ``kernel`` with the certificate set
    when the check passes.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    k = np.arange(1, k_max + 1, dtype=float)
    scaled = kernel.coefficients_upto(k_max) * k * k
    largest = float(scaled.min())
    # k^2 * fhat(k) is computed in floating point; forgive rounding at the last few ulps
    ok = largest >= c * (1.0 - 1e-12)
    return AdmissibilityReport(ok, largest, k_max, kernel.with_certificate(c) if ok else kernel)


def _lattice(dim: int, cutoff: int) -> np.ndarray:
    """Half of the window ``0 < |k|_inf <= cutoff``: first nonzero entry positive."""
    rng = range(-cutoff, cutoff + 1)
    pts = np.array(list(itertools.product(rng, repeat=dim)), dtype=np.int64)
    nz = pts != 0
    first = np.argmax(nz, axis=1)
    lead = pts[np.arange(len(pts)), first]
    return pts[nz.any(axis=1) & (lead > 0)]


@dataclass(frozen=True)
class KernelTd:
    """Truncated kernel ``sum a_k e^{2 pi i k.x} / (4 pi^2 |k|^2)`` on ``T^d``.

    The sum runs over ``0 < |k|_inf <= cutoff``. ``weight`` maps an integer
    frequency array of shape ``(m, d)`` to ``a_k``; ``None`` gives the Green's
    function (``a_k = 1``). ``c1 < a_k < c2`` is the stored two-sided bound.
    """

    dim: int
    cutoff: int
    weight: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    c1: float = 0.5
    c2: float = 2.0
    name: str = "green"

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("KernelTd needs dimension >= 2; use Kernel1D on the circle")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        half = _lattice(self.dim, self.cutoff)
        a = np.ones(len(half)) if self.weight is None else np.asarray(self.weight(half), float)
        if not (np.all(a > self.c1) and np.all(a < self.c2)):
            raise ValueError("weights violate the two-sided bound c1 < a_k < c2")
        w = a / (4.0 * np.pi**2 * np.sum(half.astype(float) ** 2, axis=1))
        half.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "_half", half)
        object.__setattr__(self, "_w", w)

    @property
    def half_frequencies(self) -> np.ndarray:
        """Frequencies with first nonzero component positive, shape ``(m, d)``."""
        return self._half

    @property
    def half_weights(self) -> np.ndarray:
        """``a_k / (4 pi^2 |k|^2)`` on :attr:`half_frequencies`."""
        return self._w

    @property
    def f0(self) -> float:
        return 2.0 * float(self._w.sum())

    def __call__(self, x) -> np.ndarray | float:
        """Evaluate at displacement(s) ``x`` of shape ``(d,)`` or ``(m, d)``."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim}-dimensional input, got shape {x.shape}")
        flat = np.mod(x.reshape(-1, self.dim), 1.0)
        out = np.empty(len(flat))
        step = max(1, 4_000_000 // len(self._half))
        kT = self._half.T.astype(float)
        for s in range(0, len(flat), step):
            phase = 2.0 * np.pi * (flat[s : s + step] @ kT)
            out[s : s + step] = 2.0 * (np.cos(phase) @ self._w)
        return float(out[0]) if x.ndim == 1 else out.reshape(x.shape[:-1])

    def folded_coefficients(self, grid: int) -> np.ndarray:
        """Full-window weights folded onto an ``grid^d`` FFT array (index ``k mod grid``).

        Folding is exact for evaluation at the grid points ``m / grid``.
        """
        arr = np.zeros((grid,) * self.dim)
        for sign in (1, -1):
            idx = tuple(np.mod(sign * self._half, grid).T)
            np.add.at(arr, idx, self._w)
        return arr


def green(dim: int, cutoff: int) -> KernelTd:
    """Truncated Green's function of the Laplacian on ``T^dim``."""
    return KernelTd(dim, cutoff)


def eval_kernel(kernel: Kernel1D, x: float) -> float:
    return kernel(x)


def eval_kernel_td(kernel: KernelTd, x) -> float:
    return kernel(x)


def fourier_coefficient(kernel: Kernel1D, k: int) -> float:
    return kernel.fourier_coefficient(k)


def kernel_from_json(doc) -> Kernel1D | KernelTd:
    """Build a kernel from a JSON document (string, bytes or parsed dict).

    Recognised forms::

        {"type": "fourier", "coeffs": [[k, value], ...], "cutoff": K}
        {"type": "green", "dim": d, "cutoff": K}
        {"type": "bernoulli2"}
        {"type": "logsin"}
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    kind = doc.get("type")
    if kind == "fourier":
        return explicit_fourier([(int(k), float(v)) for k, v in doc["coeffs"]], doc.get("cutoff"))
    if kind == "green":
        return green(int(doc["dim"]), int(doc["cutoff"]))
    if kind == BERNOULLI2:
        return bernoulli2()
    if kind == LOGSIN:
        return logsin()
    raise ValueError(f"unknown kernel type {kind!r}")


def kernel_to_json(kernel: Kernel1D | KernelTd) -> dict:
    if isinstance(kernel, KernelTd):
        if kernel.weight is not None:
            raise ValueError("only the unweighted Green kernel serialises to JSON")
        return {"type": "green", "dim": kernel.dim, "cutoff": kernel.cutoff}
    if kernel.variant == FOURIER:
        nz = np.flatnonzero(kernel.coefficients)
        return {
            "type": "fourier",
            "coeffs": [[int(i + 1), float(kernel.coefficients[i])] for i in nz],
            "cutoff": kernel.cutoff,
        }
    return {"type": kernel.variant}


def kernel_dim(kernel) -> int:
    return kernel.dim if isinstance(kernel, KernelTd) else 1
