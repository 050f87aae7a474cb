"""Scaling scans, proven-bound sweeps and baseline comparisons.

Only inequalities that are proven are checked (energy bound, Weyl ratio,
sup-norm bound, doubling-window L1 witnesses, the greedy gate on ``T^d``).
Conjectured growth rates are fitted and reported, never asserted.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import piecewise
from .diagnostics import (
    METRICS,
    MetricReport,
    SpectralState,
    metric_reports,
    pair_energy_prefixes,
    potential,
    potential_deriv_l2,
    w2_circle_exact,
    w2_proxy,
)
from .io import atomic_write_text, write_metric_csv
from .kernel import BERNOULLI2, LOGSIN, Kernel1D, KernelTd, bernoulli2, green, kernel_from_json, kernel_to_json
from .sequence import (
    PointSet,
    SolverConfig,
    default_config,
    greedy,
    kronecker,
    random_points,
    van_der_corput,
)

__all__ = [
    "GN_RIGOROUS",
    "ScanSpec",
    "ScanResult",
    "FitResult",
    "fit_growth",
    "parse_generator",
    "generate",
    "run_scan",
    "prefix_sup_norms",
    "prefix_l1_norms",
    "doubling_window_l1_check",
    "fit_gn_constant",
    "interpolation_envelope",
    "td_scaling",
    "figure_data",
    "conjecture_report",
    "compare",
]

# max|g| <= 4^{1/3} ||g'||_2^{2/3} ||g||_1^{1/3} for mean-zero g on the circle:
# |g| >= M/2 on an arc of length 2r with sqrt(r) ||g'||_2 = M/2.
GN_RIGOROUS = 4.0 ** (1.0 / 3.0)


def parse_seed(text: str | Sequence) -> tuple[list[float], list[str]]:
    """Parse ``"1/3,4/5"`` or ``"0.3,0.8"`` into floats, keeping the literals."""
    if isinstance(text, str):
        literals = [t.strip() for t in text.split(",") if t.strip()]
    else:
        literals = [str(t) for t in text]
    return [float(Fraction(t)) for t in literals], literals


# generators -------------------------------------------------------------------


def parse_generator(spec) -> dict:
    """Normalise a generator description.

    Accepts a dict or a compact string: ``"greedy:bernoulli2:1/3,4/5"``,
    ``"greedy:logsin:0.5"``, ``"kronecker:sqrt2"``, ``"kronecker:0.618..."``,
    ``"vdc:2"``, ``"random:7"``.
    """
    if isinstance(spec, dict):
        out = dict(spec)
        if "kind" not in out:
            raise ValueError("generator spec needs a 'kind'")
        return out
    parts = str(spec).split(":")
    kind = parts[0]
    if kind == "greedy":
        if len(parts) != 3:
            raise ValueError("greedy generator is 'greedy:<kernel>:<seed list>'")
        return {"kind": "greedy", "kernel": {"type": parts[1]}, "seed": parts[2]}
    if kind == "kronecker":
        arg = parts[1] if len(parts) > 1 else "sqrt2"
        alpha = {"sqrt2": math.sqrt(2.0), "golden": (1 + math.sqrt(5.0)) / 2}.get(arg)
        return {"kind": "kronecker", "alpha": alpha if alpha is not None else float(arg)}
    if kind == "vdc":
        return {"kind": "vdc", "base": int(parts[1]) if len(parts) > 1 else 2}
    if kind == "random":
        return {"kind": "random", "seed": int(parts[1]) if len(parts) > 1 else 0, "dim": 1}
    raise ValueError(f"unknown generator {spec!r}")


def generator_label(gen: dict) -> str:
    kind = gen["kind"]
    if kind == "greedy":
        return f"greedy-{gen['kernel'].get('type')}"
    if kind == "kronecker":
        return f"kronecker-{gen['alpha']:.6g}"
    if kind == "vdc":
        return f"vdc-{gen['base']}"
    return f"random-{gen['seed']}"


def generate(gen, n: int) -> PointSet:
    gen = parse_generator(gen)
    kind = gen["kind"]
    if kind == "greedy":
        kernel = kernel_from_json(gen["kernel"])
        seed, literals = parse_seed(gen["seed"])
        cfg = SolverConfig(**gen["solver"]) if gen.get("solver") else default_config(kernel)
        return greedy(kernel, seed, n, cfg, seed_literals=literals)
    if kind == "kronecker":
        return kronecker(float(gen["alpha"]), n)
    if kind == "vdc":
        return van_der_corput(int(gen["base"]), n)
    if kind == "random":
        return random_points(int(gen["seed"]), n, int(gen.get("dim", 1)))
    raise ValueError(f"unknown generator kind {kind!r}")


# fits -------------------------------------------------------------------------

_FIXED_POWERS = {"inv_sqrt": -0.5, "inv_cbrt": -1.0 / 3.0, "inv": -1.0, "sqrt": 0.5, "cbrt": 1.0 / 3.0}
_LINEAR_SHAPES = {
    "log": lambda n: np.log(n),
    "sqrtlog_over_n": lambda n: np.sqrt(np.log(n)) / n,
    "sqrtlog_over_sqrt_n": lambda n: np.sqrt(np.log(n) / n),
}


@dataclass
class FitResult:
    model: str
    params: dict
    residuals: list
    rms: float


def fit_growth(ns, values, model: str) -> FitResult:
    """Least-squares fit of a growth model.

    ``"power"`` fits ``c n^alpha`` in log space; the fixed powers
    (``"inv_sqrt"``, ``"inv_cbrt"``, ...) fit ``c`` in log space with the
    exponent held; ``"log"``, ``"sqrtlog_over_n"`` and ``"sqrtlog_over_sqrt_n"``
    fit ``c`` in linear space. Points where the model shape vanishes
    (``log 1 = 0``) are skipped for the linear models.
    """
    n = np.asarray(ns, dtype=float)
    v = np.asarray(values, dtype=float)
    if model == "power" or model in _FIXED_POWERS:
        keep = v > 0
        ln, lv = np.log(n[keep]), np.log(v[keep])
        if model == "power":
            A = np.column_stack([np.ones_like(ln), ln])
            (logc, alpha), *_ = np.linalg.lstsq(A, lv, rcond=None)
        else:
            alpha = _FIXED_POWERS[model]
            logc = float(np.mean(lv - alpha * ln))
        res = lv - (logc + alpha * ln)
        return FitResult(model, {"c": float(np.exp(logc)), "alpha": float(alpha)}, res.tolist(), _rms(res))
    if model in _LINEAR_SHAPES:
        keep = n > 1
        shape = _LINEAR_SHAPES[model](n[keep])
        c = float(np.dot(shape, v[keep]) / np.dot(shape, shape))
        res = v[keep] - c * shape
        return FitResult(model, {"c": c}, res.tolist(), _rms(res))
    raise ValueError(f"unknown growth model {model!r}")


def _rms(res) -> float:
    res = np.asarray(res)
    return float(np.sqrt(np.mean(res**2))) if res.size else math.nan


# scans ------------------------------------------------------------------------


@dataclass
class ScanSpec:
    """One scaling experiment: a generator, prefix sizes, metrics and fits."""

    name: str
    generator: dict
    checkpoints: list
    metrics: list
    fits: dict = field(default_factory=dict)
    kernel: dict | None = None
    window: int | None = None
    grid: int = 4096

    def __post_init__(self):
        self.generator = parse_generator(self.generator)
        if not self.metrics:
            raise ValueError("metrics must be nonempty")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if not self.checkpoints or self.checkpoints[0] < 1:
            raise ValueError("checkpoints must be positive")
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise ValueError(f"unknown metrics {sorted(unknown)}")
        if isinstance(self.fits, list):
            self.fits = {m: list(self.fits) for m in self.metrics}

    @classmethod
    def from_json(cls, doc) -> "ScanSpec":
        if isinstance(doc, (str, Path)) and Path(doc).exists():
            doc = json.loads(Path(doc).read_text())
        elif isinstance(doc, str):
            doc = json.loads(doc)
        return cls(**doc)

    def resolved_kernel(self):
        if self.kernel is not None:
            return kernel_from_json(self.kernel)
        if self.generator["kind"] == "greedy":
            return kernel_from_json(self.generator["kernel"])
        return bernoulli2()


@dataclass
class ScanResult:
    spec: ScanSpec
    reports: list
    fits: dict
    wallclock: dict

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(r, metric) for r in self.reports])

    @property
    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.reports])

    def summary(self) -> dict:
        return {
            "name": self.spec.name,
            "generator": self.spec.generator,
            "checkpoints": self.spec.checkpoints,
            "metrics": self.spec.metrics,
            "fits": {m: [asdict(f) for f in fs] for m, fs in self.fits.items()},
            "wallclock": self.wallclock,
            "reports": [r.to_dict() for r in self.reports],
        }

    def write(self, outdir) -> Path:
        """Write ``<outdir>/<name>/<metric>.csv`` per metric plus ``summary.json``."""
        root = Path(outdir) / self.spec.name
        root.mkdir(parents=True, exist_ok=True)
        for m in self.spec.metrics:
            write_metric_csv(root / f"{m}.csv", [row for r in self.reports for row in r.rows([m])])
        atomic_write_text(root / "summary.json", json.dumps(self.summary(), indent=2, default=_jsonable))
        return root


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o)}")


def run_scan(spec: ScanSpec) -> ScanResult:
    """Generate the sequence once and evaluate every metric at every checkpoint."""
    t0 = time.perf_counter()
    pts = generate(spec.generator, spec.checkpoints[-1])
    t1 = time.perf_counter()
    kernel = spec.resolved_kernel()
    per_checkpoint: list[float] = []
    reports = metric_reports(pts, kernel, spec.checkpoints, spec.metrics, spec.window, spec.grid, per_checkpoint)
    timings = {"generation": t1 - t0, "checkpoints": dict(zip(spec.checkpoints, per_checkpoint))}
    fits = {}
    ns = [r.n for r in reports]
    for metric, models in spec.fits.items():
        vals = [getattr(r, metric) for r in reports]
        fits[metric] = [fit_growth(ns, vals, m) for m in models]
    return ScanResult(spec, reports, fits, timings)


# prefix sweeps ------------------------------------------------------------------


def prefix_sup_norms(points, kernel: Kernel1D, N: int | None = None, grid: int = 4096) -> np.ndarray:
    """``||f_m||_inf`` for ``m = 1..N`` (exact for the Bernoulli kernel)."""
    x = _x(points)[: N or None]
    out = np.empty(x.size)
    if kernel.variant == BERNOULLI2:
        y = np.empty(0)
        for m in range(x.size):
            y = np.insert(y, np.searchsorted(y, x[m]), x[m])
            out[m] = piecewise.sup_norm(y)
        return out
    xs = np.arange(grid) / grid
    vals = np.zeros(grid)
    for m in range(x.size):
        vals += kernel(xs - x[m], singular="inf")
        out[m] = max(np.abs(vals).max(), np.abs(potential(x[: m + 1], kernel, x[: m + 1])).max())
    return out


def prefix_l1_norms(points, kernel: Kernel1D, N: int | None = None, grid: int = 4096) -> np.ndarray:
    """``||f_m||_{L^1}`` for ``m = 1..N`` (exact for the Bernoulli kernel, midpoint rule otherwise)."""
    x = _x(points)[: N or None]
    out = np.empty(x.size)
    if kernel.variant == BERNOULLI2:
        y = np.empty(0)
        for m in range(x.size):
            y = np.insert(y, np.searchsorted(y, x[m]), x[m])
            out[m] = piecewise.l1_norm(y)
        return out
    xs = (np.arange(grid) + 0.5) / grid
    vals = np.zeros(grid)
    for m in range(x.size):
        vals += kernel(xs - x[m], singular="inf")
        out[m] = np.abs(vals).mean()
    return out


def _x(points) -> np.ndarray:
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    return pts.reshape(len(pts), -1)[:, 0] if np.ndim(pts) == 2 else np.asarray(pts, dtype=float)


@dataclass
class DoublingReport:
    ok: bool
    threshold: float
    windows: list  # (n, upper, witness or None)
    l1: np.ndarray = field(repr=False)


def doubling_window_l1_check(
    points,
    kernel: Kernel1D,
    N: int,
    tol: float = 1e-3,
    windows: str = "dyadic",
    grid: int = 4096,
) -> DoublingReport:
    """Find in every window ``[n, 2n] ∩ [1, N]`` some ``m`` with ``||f_m||_1 <= 2 f(0) + tol``.

    ``windows="dyadic"`` checks ``n = 1, 2, 4, ...``; ``"all"`` checks every
    ``n`` with ``2n <= N``. The witness reported is the smallest such ``m``.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if not kernel.finite_at_zero:
        raise ValueError("the doubling-window check needs a kernel with finite f(0)")
    l1 = prefix_l1_norms(points, kernel, N, grid)
    if l1.size < N:
        raise ValueError(f"only {l1.size} points available, N = {N}")
    threshold = 2.0 * kernel.f0 + tol
    good = l1 <= threshold
    starts = [1 << j for j in range(N.bit_length()) if 2 * (1 << j) <= N] if windows == "dyadic" else range(1, N // 2 + 1)
    out = []
    for n in starts:
        hits = np.flatnonzero(good[n - 1 : 2 * n]) + n
        out.append((n, 2 * n, int(hits[0]) if hits.size else None))
    return DoublingReport(all(w is not None for _, _, w in out), threshold, out, l1)


def fit_gn_constant(trials: int = 600, seed: int = 20190601, grid: int = 8192) -> float:
    """Empirical constant of ``max|g| <= C ||g'||_2^{2/3} ||g||_1^{1/3}`` for mean-zero ``g``.

    Maximum ratio over random trigonometric polynomials of random degree
    (up to 128): half with random phases, half positive-definite cosine sums,
    all with coefficient decay ``k^{-p}``, ``p`` uniform in ``[0, 3]``. The
    generator is fixed, so the constant is reproducible.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.arange(grid) / grid
    best = 0.0
    for t in range(trials):
        D = int(rng.integers(1, 129))
        p = rng.uniform(0.0, 3.0)
        k = np.arange(1, D + 1)
        if t % 2:
            a = rng.uniform(0.0, 1.0, D) / k**p
            b = np.zeros(D)
        else:
            a = rng.standard_normal(D) / k**p
            b = rng.standard_normal(D) / k**p
        phase = 2.0 * np.pi * np.outer(x, k)
        g = np.cos(phase) @ a + np.sin(phase) @ b
        sup = np.abs(g).max()
        l1 = np.abs(g).mean()
        d = math.sqrt(0.5 * float(np.sum((2.0 * np.pi * k) ** 2 * (a * a + b * b))))
        best = max(best, sup / (d ** (2.0 / 3.0) * l1 ** (1.0 / 3.0)))
    return float(best)


@dataclass
class InterpolationReport:
    sup: np.ndarray = field(repr=False)
    envelope: np.ndarray = field(repr=False)
    witnesses: list
    checks: list  # (m, sup, bound, ok)
    c_gn: float
    chain_ok: bool
    envelope_nonincreasing: bool
    envelope_bounded: bool


def interpolation_envelope(
    points,
    kernel: Kernel1D,
    N: int,
    c_gn: float | None = None,
    tol: float = 1e-3,
    doubling: DoublingReport | None = None,
) -> InterpolationReport:
    """Lower envelope ``min_{m<=n} ||f_m||_inf / m^{1/3}`` and the interpolation chain.

    At every doubling-window witness ``m`` checks
    ``||f_m||_inf <= C_GN ||f_m'||_2^{2/3} (2 f(0) + tol)^{1/3}``.
    """
    if not isinstance(kernel, Kernel1D) or kernel.variant != BERNOULLI2 and not _two_sided(kernel):
        raise ValueError("kernel needs c1 k^-2 <= fhat(k) <= c2 k^-2")
    c_gn = fit_gn_constant() if c_gn is None else c_gn
    x = _x(points)[:N]
    sup = prefix_sup_norms(x, kernel)
    m = np.arange(1, sup.size + 1)
    envelope = np.minimum.accumulate(sup / m ** (1.0 / 3.0))
    if doubling is None and sup.size >= 2:
        doubling = doubling_window_l1_check(x, kernel, sup.size, tol)
    witnesses = sorted({w for _, _, w in doubling.windows if w is not None}) if doubling else []
    l1_bound = 2.0 * kernel.f0 + tol
    checks = []
    for w in witnesses:
        prefix = x[:w]
        if kernel.variant == BERNOULLI2:
            d = piecewise.deriv_l2(np.sort(prefix))
        else:
            d = potential_deriv_l2(SpectralState.of(prefix, kernel.cutoff), kernel).value
        bound = c_gn * d ** (2.0 / 3.0) * l1_bound ** (1.0 / 3.0)
        checks.append((w, float(sup[w - 1]), float(bound), bool(sup[w - 1] <= bound)))
    return InterpolationReport(
        sup,
        envelope,
        witnesses,
        checks,
        c_gn,
        all(c[3] for c in checks),
        bool(np.all(np.diff(envelope) <= 0)),
        bool(np.all(envelope <= envelope[0])),
    )


def _two_sided(kernel: Kernel1D) -> bool:
    if kernel.variant == LOGSIN:
        return False
    k = np.arange(1, kernel.cutoff + 1, dtype=float)
    scaled = kernel.coefficients_upto(kernel.cutoff) * k * k
    return bool(scaled.min() > 0 and np.isfinite(scaled.max()))


# T^d --------------------------------------------------------------------------


@dataclass
class TdReport:
    dim: int
    points: PointSet = field(repr=False)
    checkpoints: list
    proxy: list
    normalized: list
    fits: list
    max_gate_residual: float
    offdiag_energy: list
    offdiag_ok: bool
    grid: int
    window: int


def td_scaling(
    dim: int,
    kernel: KernelTd | None = None,
    N: int = 512,
    grid: int | None = None,
    window: int | None = None,
    seed=None,
    checkpoints: Sequence[int] | None = None,
) -> TdReport:
    """Greedy run on ``T^dim`` with the proxy ``||mu_n - dx||_{H^-1}`` at checkpoints.

    Normalisation is ``sqrt(n / log n)`` for ``d = 2`` and ``n^{1/d}``
    otherwise. The off-diagonal energy of the truncated kernel is checked
    against ``n * eps_pot``.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    window = window or {2: 32, 3: 16}.get(dim, 8)
    kernel = kernel or green(dim, window)
    grid = grid or {2: 256, 3: 64}.get(dim, 32)
    cfg = SolverConfig(mode="grid", grid_size=grid)
    seed = np.full(dim, 0.5) if seed is None else np.asarray(seed, dtype=float)
    pts = greedy(kernel, seed, N, cfg)
    checkpoints = list(checkpoints or [c for c in (1 << j for j in range(N.bit_length())) if c <= N])
    state = SpectralState(window, dim)
    energies = pair_energy_prefixes(pts, kernel)
    proxy, norm, offdiag = [], [], []
    done = 0
    for n in checkpoints:
        state.absorb(pts.points[done:n])
        done = n
        p = w2_proxy(state).value
        proxy.append(p)
        if n == 1:
            norm.append(math.nan)
        else:
            norm.append(p * (math.sqrt(n / math.log(n)) if dim == 2 else n ** (1.0 / dim)))
        offdiag.append(float(energies[n - 1] - n * kernel.f0))
    fits = [fit_growth(checkpoints, proxy, "sqrtlog_over_sqrt_n" if dim == 2 else "power")]
    if dim > 2:
        fits.append(fit_growth(checkpoints, proxy, "inv_cbrt" if dim == 3 else "power"))
    gate = cfg.gate
    ok = all(e <= n * gate for e, n in zip(offdiag, checkpoints))
    return TdReport(
        dim, pts, checkpoints, proxy, norm, fits,
        float(pts.provenance.get("max_gate_residual") or -math.inf), offdiag, ok, grid, window,
    )


# figures ----------------------------------------------------------------------


def figure_data(points, kernel: Kernel1D, n_list: Sequence[int], outdir, grid: int = 2048) -> dict:
    """Write sampled potentials and the ``(i/n, x_i)`` scatter table as CSV.

    ``curves.csv`` has columns ``x, f_<n>...`` with ``f_n(x) = sum_{k<=n} f(x - x_k)``
    on ``grid`` uniform nodes; ``scatter.csv`` has ``i, i_over_n, x``.
    """
    x = _x(points)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    xs = np.arange(grid) / grid
    cols = [xs]
    header = ["x"]
    for n in n_list:
        if not 1 <= n <= x.size:
            raise ValueError(f"n = {n} outside 1..{x.size}")
        cols.append(potential(x[:n], kernel, xs))
        header.append(f"f_{n}")
    lines = [",".join(header)]
    lines += [",".join(f"{v:.17g}" for v in row) for row in np.column_stack(cols)]
    atomic_write_text(out / "curves.csv", "\n".join(lines) + "\n")
    n = x.size
    rows = ["i,i_over_n,x"] + [f"{i},{i / n:.17g},{x[i - 1]:.17g}" for i in range(1, n + 1)]
    atomic_write_text(out / "scatter.csv", "\n".join(rows) + "\n")
    return {"curves": out / "curves.csv", "scatter": out / "scatter.csv"}


# comparisons ------------------------------------------------------------------


@dataclass
class CompareResult:
    labels: list
    checkpoints: list
    metrics: list
    table: dict  # label -> list[MetricReport]
    fits: dict  # label -> metric -> FitResult

    def rows(self) -> list[tuple]:
        out = []
        for label in self.labels:
            for rep in self.table[label]:
                for _, m, v, t in rep.rows(self.metrics):
                    out.append((label, rep.n, m, v, t))
        return out


_RATE_MODELS = {"energy": "log", "sup_norm": "log", "w2_exact": "power", "w1_exact": "power",
                "star_discrepancy": "power", "diaphony": "power", "w2_proxy": "power",
                "l1_norm": "power", "deriv_l2": "power", "weyl_max_ratio": "power"}


def compare(generators: Sequence, N: int, metrics: Sequence[str], checkpoints=None, kernel=None, window=None) -> CompareResult:
    """Evaluate several generators on shared checkpoints with side-by-side rate fits."""
    gens = [parse_generator(g) for g in generators]
    if len(gens) < 2:
        raise ValueError("need two generators")
    kernel = kernel or bernoulli2()
    checkpoints = list(checkpoints or [c for c in (1 << j for j in range(N.bit_length())) if c <= N])
    labels, table, fits = [], {}, {}
    for g in gens:
        label = generator_label(g)
        while label in table:
            label += "'"
        pts = generate(g, checkpoints[-1])
        reps = metric_reports(pts, kernel, checkpoints, list(metrics), window)
        labels.append(label)
        table[label] = reps
        fits[label] = {
            m: fit_growth([r.n for r in reps], [getattr(r, m) for r in reps], _RATE_MODELS.get(m, "power"))
            for m in metrics
        }
    return CompareResult(labels, checkpoints, list(metrics), table, fits)


def conjecture_report(N: int = 4096, kernel: Kernel1D | None = None, seed=(1 / 3, 4 / 5)) -> dict:
    """Open-problem probes for greedy, Kronecker and van der Corput sequences.

    Columns ``energy/log n``, ``sup/log n`` and ``w2 n / sqrt(log n)`` are
    reported only. For the greedy run the proven columns (energy bound,
    sup-norm bound) are evaluated and flagged.
    """
    kernel = kernel or bernoulli2()
    checkpoints = [c for c in (1 << j for j in range(1, N.bit_length())) if c <= N]
    seqs = {
        "greedy": greedy(kernel, list(seed), N),
        "kronecker": kronecker(math.sqrt(2.0), N),
        "vdc": van_der_corput(2, N),
    }
    out = {}
    for name, ps in seqs.items():
        energies = pair_energy_prefixes(ps, kernel)
        sups = prefix_sup_norms(ps, kernel, N)
        rows = []
        for n in checkpoints:
            sup = float(sups[n - 1])
            e = float(energies[n - 1])
            w2 = w2_circle_exact(ps.x[:n])
            row = {
                "n": n,
                "energy_over_log_n": e / math.log(n),
                "sup_over_log_n": sup / math.log(n),
                "w2_n_over_sqrt_log_n": w2 * n / math.sqrt(math.log(n)),
            }
            if name == "greedy":
                row["energy_bound_ok"] = bool(e <= n * kernel.f0 + n * 1e-9)
                row["sup_bound_ok"] = bool(sup <= kernel.f0 * math.sqrt(n) * (1 + 1e-6))
            rows.append(row)
        if name == "greedy":
            # every prefix, not only checkpoints
            n_all = np.arange(1, N + 1)
            rows_ok = bool(np.all(energies <= n_all * kernel.f0 + n_all * 1e-9)) and bool(
                np.all(sups <= kernel.f0 * np.sqrt(n_all) * (1 + 1e-6))
            )
            out["greedy_bounds_ok"] = rows_ok
        out[name] = rows
    return out


def reports_to_rows(reports: Sequence[MetricReport], metrics: Sequence[str]) -> list:
    return [row for r in reports for row in r.rows(list(metrics))]


def write_conjecture_tables(report: dict, outdir) -> dict:
    """One CSV per sequence from :func:`conjecture_report`, plus a JSON summary."""
    out = Path(outdir)
    paths = {}
    for name, rows in report.items():
        if not isinstance(rows, list):
            continue
        cols = list(rows[0])
        lines = [",".join(cols)] + [",".join(str(r[c]) for c in cols) for r in rows]
        paths[name] = out / f"conjecture_{name}.csv"
        atomic_write_text(paths[name], "\n".join(lines) + "\n")
    paths["summary"] = out / "conjecture_summary.json"
    atomic_write_text(paths["summary"], json.dumps({"greedy_bounds_ok": report.get("greedy_bounds_ok")}))
    return paths
