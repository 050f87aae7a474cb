"""Greedy energy-minimising sequences on the torus and their uniformity diagnostics."""

from .kernel import (
    Kernel1D,
    KernelTd,
    MeanFrequencyError,
    SingularEvaluation,
    bernoulli2,
    explicit_fourier,
    green,
    kernel_from_json,
    kernel_to_json,
    logsin,
    verify_admissibility,
)
from .sequence import (
    GateError,
    PointSet,
    SolverConfig,
    default_config,
    greedy,
    greedy_extend,
    kronecker,
    random_points,
    van_der_corput,
)
from .transport import w1_circle_exact, w2_circle_exact
from .diagnostics import METRICS, KernelRequired, MetricReport, metric_reports

__version__ = "0.1.0"
