import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from psifrac.errors import EvalError, NonConvergence, ParamError
from psifrac.quadrature import (GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gamma, integrate_adaptive,
                                integrate_adaptive_batch, integrate_endpoint_singular)


def test_rule_integrity():
    assert NODES.size == 21
    np.testing.assert_allclose(KRONROD_WEIGHTS.sum(), 2.0, rtol=1e-15)
    np.testing.assert_allclose(GAUSS_WEIGHTS.sum(), 2.0, rtol=1e-15)
    # Kronrod is exact through degree 31, Gauss through 19
    for d in range(0, 31, 2):
        assert abs(KRONROD_WEIGHTS @ NODES**d - 2.0 / (d + 1)) < 1e-14
    for d in range(0, 20, 2):
        assert abs(GAUSS_WEIGHTS @ NODES**d - 2.0 / (d + 1)) < 1e-14


@pytest.mark.parametrize("g, lo, hi, expected, tol", [
    (lambda t: t**2, 0.0, 1.0, 1.0 / 3.0, 1e-10),
    (lambda t: np.ones_like(t), 2.0, 5.0, 3.0, 0.0),
    (lambda t: t * (1 - t), 0.0, 1.0, 1.0 / 6.0, 1e-12),
])
def test_adaptive_examples(g, lo, hi, expected, tol):
    res = integrate_adaptive(g, lo, hi, tol=1e-10)
    assert abs(res.value - expected) <= max(tol, 4 * np.finfo(float).eps)
    assert res.error_estimate >= 0 and res.evaluations > 0


def test_endpoint_singular_examples():
    assert integrate_endpoint_singular(lambda u: np.ones_like(u), 0, 1, -0.5).value == pytest.approx(2.0, rel=1e-12)
    assert integrate_endpoint_singular(lambda u: u, 0, 1, -0.5).value == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert integrate_endpoint_singular(lambda u: np.ones_like(u), 1, 3, 0.0).value == pytest.approx(2.0, rel=1e-14)


def test_graded_mesh_confirms_beta_half():
    # midpoint sum in d = 1-u on a mesh graded towards the singularity at d=0
    d = np.linspace(0, 1, 200_001) ** 4
    dm = 0.5 * (d[1:] + d[:-1])
    brute = np.sum((1 - dm) * dm**-0.5 * np.diff(d))
    assert brute == pytest.approx(4.0 / 3.0, rel=1e-8)
    assert integrate_endpoint_singular(lambda u: u, 0, 1, -0.5).value == pytest.approx(brute, rel=1e-8)


@pytest.mark.parametrize("singular_at", ["lo", "hi"])
def test_singular_polynomials_to_degree_12(singular_at):
    rng = np.random.default_rng(0)
    for gam in (-0.7, -0.2, 0.4):
        c = rng.uniform(-1, 1, 13)
        g = np.polynomial.Polynomial(c)
        if singular_at == "hi":
            exact = sum(c[k] * oracles.beta_moment(k, gam) for k in range(13))
        else:
            exact = sum(c[k] * oracles.beta_moment(0, gam + k) for k in range(13))
        got = integrate_endpoint_singular(g, 0, 1, gam, singular_at, tol=1e-12).value
        assert got == pytest.approx(exact, rel=1e-10, abs=1e-12)


def test_gamma_against_stdlib():
    x = np.linspace(0.05, 20, 2000)
    ref = np.array([math.gamma(v) for v in x])
    assert np.max(np.abs(gamma(x) / ref - 1)) < 1e-13
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert math.isinf(gamma(0.0)) and math.isinf(gamma(-2.0))
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-13)


def test_evaluations_monotone_as_tol_loosens():
    g = lambda t: np.sqrt(t) * np.cos(7 * t)
    counts = [integrate_adaptive(g, 0, 2, tol).evaluations for tol in (1e-12, 1e-10, 1e-8, 1e-6, 1e-4)]
    assert counts == sorted(counts, reverse=True)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95))
def test_interval_additivity(frac):
    g = lambda t: np.exp(-t) * np.sin(3 * t) + t**0.5
    lo, hi = 0.0, 2.0
    mid = lo + frac * (hi - lo)
    whole = integrate_adaptive(g, lo, hi, 1e-11)
    left = integrate_adaptive(g, lo, mid, 1e-11)
    right = integrate_adaptive(g, mid, hi, 1e-11)
    slack = whole.error_estimate + left.error_estimate + right.error_estimate + 1e-13
    assert abs(whole.value - left.value - right.value) <= slack


def test_batch_matches_scalar_and_zero_width():
    vals, _, evals = integrate_adaptive_batch(lambda x, j: x ** (j[:, None] + 1), [0, 0, 1], [1, 1, 1])
    np.testing.assert_allclose(vals, [0.5, 1 / 3, 0.0], rtol=1e-14)
    assert evals[2] == 0


def test_failures_are_typed():
    with pytest.raises(EvalError):
        integrate_adaptive(lambda t: np.where(t > 0.3, np.nan, 1.0), 0, 1)
    with pytest.raises(NonConvergence):
        integrate_adaptive_batch(lambda x, j: np.sin(1.0 / np.maximum(x, 1e-300)), [0.0], [1.0],
                                 1e-14, max_panels=64)
    with pytest.raises(ParamError):
        integrate_adaptive(np.sin, 1, 0)
    with pytest.raises(ParamError):
        integrate_endpoint_singular(np.sin, 0, 1, -1.0)
