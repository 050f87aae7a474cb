import itertools
import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from greedyseq.kernel import (
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


def _coef_by_quadrature(f, k):
    # the kernels are even, so the Fourier coefficient is a cosine integral
    val, _ = quad(lambda x: f(x) * math.cos(2 * math.pi * k * x), 0.0, 0.5, limit=400)
    return 2.0 * val


@pytest.mark.parametrize("k", [1, 2, 3, 7, 15])
def test_bernoulli2_coefficients_match_quadrature(k):
    kern = bernoulli2()
    assert kern.fourier_coefficient(k) == pytest.approx(_coef_by_quadrature(kern, k), rel=1e-9, abs=1e-13)
    assert kern.fourier_coefficient(k) == pytest.approx(1 / (2 * math.pi**2 * k**2), rel=1e-15)


@pytest.mark.parametrize("k", [1, 2, 5, 9])
def test_logsin_coefficients_match_quadrature(k):
    kern = logsin()
    f = lambda x: kern(x) if x > 0 else 0.0
    assert _coef_by_quadrature(f, k) == pytest.approx(1 / (2 * k), rel=1e-7)


def test_bernoulli2_values_and_periodicity():
    kern = bernoulli2()
    assert kern(0.0) == pytest.approx(1 / 6)
    assert kern(0.5) == pytest.approx(-1 / 12)
    x = np.linspace(-2, 2, 97)
    np.testing.assert_allclose(kern(x), kern(-x), atol=1e-14)
    np.testing.assert_allclose(kern(x + 1), kern(x), atol=1e-12)
    assert kern.f0 == pytest.approx(1 / 6)


def test_bernoulli2_fourier_series_agrees():
    kern = bernoulli2()
    x = np.linspace(0, 1, 41)
    k = np.arange(1, 20001)
    series = 2 * np.cos(2 * np.pi * np.outer(x, k)) @ (1 / (2 * np.pi**2 * k**2))
    np.testing.assert_allclose(series, kern(x), atol=2 * kern.tail_sum(20000) + 1e-12)


def test_bernoulli2_mean_zero():
    val, _ = quad(bernoulli2(), 0, 1)
    assert abs(val) < 1e-14


def test_logsin_singularity_policy():
    kern = logsin()
    with pytest.raises(SingularEvaluation):
        kern(0.0)
    with pytest.raises(SingularEvaluation):
        kern(3.0)
    assert kern(0.0, singular="inf") == math.inf
    assert kern(0.5) == pytest.approx(-math.log(2))
    assert not kern.finite_at_zero


def test_mean_frequency_is_rejected():
    with pytest.raises(MeanFrequencyError):
        bernoulli2().fourier_coefficient(0)


def test_negative_frequency_is_symmetric():
    for kern in (bernoulli2(), logsin(), explicit_fourier({1: 0.3, 4: 0.1})):
        for k in (1, 2, 4):
            assert kern.fourier_coefficient(-k) == kern.fourier_coefficient(k)


def test_explicit_fourier_evaluation_and_validation():
    kern = explicit_fourier({1: 0.25, 3: 0.05})
    x = np.linspace(0, 1, 17)
    expected = 0.5 * np.cos(2 * np.pi * x) + 0.1 * np.cos(6 * np.pi * x)
    np.testing.assert_allclose(kern(x), expected, atol=1e-14)
    assert kern.f0 == pytest.approx(0.6)
    assert kern.fourier_coefficient(2) == 0.0
    with pytest.raises(ValueError):
        explicit_fourier({0: 1.0})
    with pytest.raises(ValueError):
        explicit_fourier({2: -1.0})
    with pytest.raises(ValueError):
        explicit_fourier({})


def test_explicit_fourier_matches_bernoulli_when_given_its_coefficients():
    K = 4000
    k = np.arange(1, K + 1)
    kern = explicit_fourier(1 / (2 * np.pi**2 * k**2))
    x = np.linspace(0, 1, 33)
    np.testing.assert_allclose(kern(x), bernoulli2()(x), atol=2 * bernoulli2().tail_sum(K) + 1e-12)


def test_tail_sum_against_direct_sum():
    kern = bernoulli2()
    k = np.arange(101, 2_000_001, dtype=float)
    # remainder beyond 2e6 by the integral test, accurate to O(1/N^2)
    direct = np.sum(1 / (2 * np.pi**2 * k**2)) + 1 / (2 * np.pi**2 * (2_000_000 + 0.5))
    assert kern.tail_sum(100) == pytest.approx(direct, rel=1e-9)


def test_admissibility():
    rep = verify_admissibility(bernoulli2(), 1 / (2 * math.pi**2), 512)
    assert rep.admissible and rep.kernel.satisfies_c_over_k2
    assert rep.largest_c == pytest.approx(1 / (2 * math.pi**2))
    rep = verify_admissibility(bernoulli2(), 0.06, 512)
    assert not rep.admissible
    assert verify_admissibility(logsin(), 0.5, 100).admissible
    bad = explicit_fourier({1: 1.0, 2: 0.01})
    assert not verify_admissibility(bad, 0.1, 2).admissible
    with pytest.raises(ValueError):
        verify_admissibility(bernoulli2(), 0.0, 10)


@pytest.mark.parametrize("doc", [
    {"type": "bernoulli2"},
    {"type": "logsin"},
    {"type": "fourier", "coeffs": [[1, 0.5], [2, 0.125]]},
    {"type": "green", "dim": 2, "cutoff": 4},
])
def test_json_roundtrip(doc):
    kern = kernel_from_json(json.dumps(doc))
    again = kernel_from_json(kernel_to_json(kern))
    assert kernel_to_json(again) == kernel_to_json(kern)


def test_json_rejects_unknown_type():
    with pytest.raises(ValueError):
        kernel_from_json({"type": "gaussian"})


@pytest.mark.parametrize("dim,K", [(2, 1), (2, 3), (3, 2)])
def test_green_lattice_enumeration(dim, K):
    kern = green(dim, K)
    half = kern.half_frequencies
    assert len(half) == ((2 * K + 1) ** dim - 1) // 2
    full = {tuple(v) for v in half} | {tuple(-v) for v in half}
    brute = {k for k in itertools.product(range(-K, K + 1), repeat=dim) if any(k)}
    assert full == brute


def test_green_values_by_brute_force():
    kern = green(2, 3)
    rng = np.random.default_rng(1)
    for x in rng.random((5, 2)):
        s = 0.0
        for k in itertools.product(range(-3, 4), repeat=2):
            if any(k):
                s += math.cos(2 * math.pi * np.dot(k, x)) / (4 * math.pi**2 * np.dot(k, k))
        assert kern(x) == pytest.approx(s, abs=1e-13)
    assert green(2, 1)(np.zeros(2)) == pytest.approx(6 / (4 * math.pi**2))


def test_green_symmetries():
    kern = green(3, 3)
    rng = np.random.default_rng(2)
    x = rng.random(3)
    base = kern(x)
    for perm in itertools.permutations(range(3)):
        assert kern(x[list(perm)]) == pytest.approx(base, abs=1e-13)
    for signs in itertools.product([1, -1], repeat=3):
        assert kern(np.array(signs) * x) == pytest.approx(base, abs=1e-13)
    assert kern(x + np.array([1.0, -2.0, 3.0])) == pytest.approx(base, abs=1e-12)


def test_green_mean_zero_on_grid():
    kern = green(2, 4)
    g = np.arange(16) / 16
    X = np.stack(np.meshgrid(g, g, indexing="ij"), -1).reshape(-1, 2)
    assert abs(kern(X).mean()) < 1e-14


def test_green_dimension_checks():
    with pytest.raises(ValueError):
        green(1, 4)
    with pytest.raises(ValueError):
        green(2, 4)(np.zeros(3))
