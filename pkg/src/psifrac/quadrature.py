"""Adaptive Gauss-Kronrod quadrature, endpoint-singular integrals and Gamma.

All integrators are built on one batched engine: many independent integrals
are refined together, and the integrand is called once per sweep with every
active panel's nodes stacked into a single array.  Integrands therefore take
``(x, owner)`` where ``owner[i]`` is the index of the integral that row
``x[i]`` belongs to.  The scalar helpers wrap a batch of size one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvalError, NonConvergence, ParamError

__all__ = [
    "QuadResult",
    "gamma",
    "integrate_adaptive",
    "integrate_adaptive_batch",
    "integrate_endpoint_singular",
    "integrate_endpoint_singular_batch",
    "MAX_PANELS",
]

MAX_PANELS = 2**14

# 21-point Kronrod extension of the 10-point Gauss-Legendre rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077808850005032,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9]] = _WG
GAUSS_WEIGHTS[[19, 17, 15, 13, 11]] = _WG

_EPS = np.finfo(float).eps
# Panels narrower than this fraction of their integral's range are accepted as is.
_MIN_REL_WIDTH = 1e-13


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int


BatchIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


def integrate_adaptive_batch(func: BatchIntegrand, lo, hi, tol=1e-9, max_panels=MAX_PANELS,
                             rtol=0.0):
    """Integrate ``len(lo)`` integrals ``int_lo[j]^hi[j] func(x, j) dx`` together.

    Every panel is accepted once its Kronrod/Gauss discrepancy is below its
    share ``width / (hi - lo)`` of the tolerance, otherwise it is bisected.
    The tolerance is ``max(tol, rtol * S)`` with ``S`` the first-pass
    estimate of ``int |func|``.  Integrals with ``lo == hi`` are zero and
    cost nothing.

    Returns ``(values, errors, evaluations)`` arrays of shape ``(len(lo),)``.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    nint = lo.shape[0]
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (nint,))
    if np.any(tol <= 0):
        raise ParamError("tolerance must be positive")
    if np.any(hi < lo):
        raise ParamError("integration limits must satisfy lo <= hi")

    values = np.zeros(nint)
    errors = np.zeros(nint)
    evals = np.zeros(nint, dtype=np.int64)
    panels = np.zeros(nint, dtype=np.int64)
    span = hi - lo

    owner = np.flatnonzero(span > 0)
    a = lo[owner].copy()
    b = hi[owner].copy()
    panels[owner] = 1
    budget = tol.copy()
    first = True

    while owner.size:
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        x = mid[:, None] + half[:, None] * NODES[None, :]
        fx = np.asarray(func(x, owner), dtype=float)
        if fx.shape != x.shape:
            fx = np.broadcast_to(fx, x.shape)
        if not np.all(np.isfinite(fx)):
            raise EvalError("integrand returned a non-finite value")
        evals += np.bincount(owner, minlength=nint) * NODES.size

        kronrod = half * (fx @ KRONROD_WEIGHTS)
        gauss = half * (fx @ GAUSS_WEIGHTS)
        err = np.abs(kronrod - gauss)
        abs_mass = np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
        if first:
            budget[owner] = np.maximum(tol[owner], rtol * abs_mass)
            first = False
        roundoff = 50.0 * _EPS * abs_mass
        allowed = budget[owner] * (b - a) / span[owner]
        tiny = (b - a) <= _MIN_REL_WIDTH * span[owner]
        done = (err <= np.maximum(allowed, roundoff)) | tiny

        np.add.at(values, owner[done], kronrod[done])
        np.add.at(errors, owner[done], err[done])

        keep = ~done
        if not np.any(keep):
            break
        owner, a, b, mid = owner[keep], a[keep], b[keep], mid[keep]
        panels += np.bincount(owner, minlength=nint)
        if np.any(panels > max_panels):
            bad = int(np.flatnonzero(panels > max_panels)[0])
            raise NonConvergence(
                f"integral {bad} on [{lo[bad]}, {hi[bad]}] needs more than {max_panels} panels"
            )
        owner = np.concatenate([owner, owner])
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])

    return values, errors, evals


def integrate_adaptive(g, lo: float, hi: float, tol: float = 1e-9, rtol: float = 0.0) -> QuadResult:
    """Adaptive GK21 integral of a vectorized callable ``g`` over ``[lo, hi]``."""
    if not hi > lo:
        raise ParamError(f"need lo < hi, got [{lo}, {hi}]")
    vals, errs, evals = integrate_adaptive_batch(lambda x, _: g(x), [lo], [hi], tol, rtol=rtol)
    return QuadResult(float(vals[0]), float(errs[0]), int(evals[0]))


def integrate_endpoint_singular_batch(g: BatchIntegrand, lo, hi, gamma: float,
                                      singular_at: str = "hi", tol=1e-9):
    """Batched ``int_lo^hi w(u) g(u, j) du`` with ``w = (hi-u)^gamma`` or ``(u-lo)^gamma``.

    The change of variables ``v = (hi - u)^(gamma+1)`` (mirrored for ``lo``)
    turns ``w(u) du`` into ``dv / (gamma + 1)`` so the weight disappears.
    """
    if not gamma > -1.0:
        raise ParamError(f"kernel exponent {gamma} <= -1 is not integrable")
    if singular_at not in ("lo", "hi"):
        raise ParamError("singular_at must be 'lo' or 'hi'")
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    e = gamma + 1.0
    q = 1.0 / e
    vmax = (hi - lo) ** e

    if singular_at == "hi":
        def h(v, owner):
            return g(hi[owner][:, None] - v ** q, owner)
    else:
        def h(v, owner):
            return g(lo[owner][:, None] + v ** q, owner)

    vals, errs, evals = integrate_adaptive_batch(h, np.zeros_like(vmax), vmax,
                                                 np.asarray(tol, dtype=float) * e)
    return vals / e, errs / e, evals


def integrate_endpoint_singular(g, lo: float, hi: float, gamma: float,
                                singular_at: str = "hi", tol: float = 1e-9) -> QuadResult:
    """Integral of ``g`` against an algebraic endpoint weight of exponent ``gamma > -1``."""
    if not hi > lo:
        raise ParamError(f"need lo < hi, got [{lo}, {hi}]")
    vals, errs, evals = integrate_endpoint_singular_batch(
        lambda u, _: g(u), [lo], [hi], gamma, singular_at, tol)
    return QuadResult(float(vals[0]), float(errs[0]), int(evals[0]))


# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])


def _gamma_right(x):
    # valid for x >= 0.5
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, _LANCZOS_COEF.size):
        acc = acc + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * np.exp(-t) * acc


def gamma(x):
    """Gamma function by the Lanczos approximation with reflection below 1/2.

    Accepts scalars or arrays; returns the same kind.  Poles (non-positive
    integers) give ``inf``.
    """
    xa = np.asarray(x, dtype=float)
    out = np.empty_like(xa)
    right = xa >= 0.5
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out[right] = _gamma_right(xa[right])
        xl = xa[~right]
        refl = math.pi / (np.sin(math.pi * xl) * _gamma_right(1.0 - xl))
        refl[xl == np.round(xl)] = np.inf
        out[~right] = refl
    if np.ndim(x) == 0:
        return float(out)
    return out
