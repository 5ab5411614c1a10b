"""Sup norm, psi-weighted Lp norms and the per-regime bound coefficients."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EvalError, ParamError, RegimeError
from .psi import PsiFunction
from .quadrature import gamma, integrate_adaptive

__all__ = [
    "Regime",
    "NormValue",
    "sup_norm",
    "weighted_lp_norm",
    "theorem_coefficient",
    "holder_conjugate",
    "SUP_GRID",
]

SUP_GRID = 2049
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# absolute tolerance per unit of psi-length in weighted_lp_norm
_ABS_FLOOR = 1e-13


class Regime(enum.Enum):
    LINF = "Linf"
    L1PSI = "L1psi"
    LQPSI = "Lqpsi"

    @classmethod
    def coerce(cls, regime: "Regime | str") -> "Regime":
        if isinstance(regime, cls):
            return regime
        for r in cls:
            if r.value.lower() == str(regime).lower():
                return r
        raise ParamError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class NormValue:
    regime: str
    value: float
    estimate_grid: int


def _finite(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise EvalError("function returned a non-finite value")
    return values


def sup_norm(g, interval, grid: int = SUP_GRID, refine: int = 5, iters: int = 60) -> NormValue:
    """``max |g|`` on a uniform grid, polished by golden-section search.

    The ``refine`` largest grid values each seed a golden-section ascent on
    the bracket formed by their two grid neighbours; all brackets are
    searched together so ``g`` is called with arrays of ``refine`` points.
    """
    a, b = (float(x) for x in interval)
    t = np.linspace(a, b, grid)
    vals = np.abs(_finite(np.asarray(g(t), dtype=float)))
    best = float(vals.max())

    seeds = np.argsort(vals)[::-1][:refine]
    lo = t[np.maximum(seeds - 1, 0)]
    hi = t[np.minimum(seeds + 1, grid - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = np.abs(_finite(np.asarray(g(x1), dtype=float)))
    f2 = np.abs(_finite(np.asarray(g(x2), dtype=float)))
    for _ in range(iters):
        up = f1 < f2  # maximum lies in [x1, hi]
        lo = np.where(up, x1, lo)
        hi = np.where(up, hi, x2)
        new_x1 = np.where(up, x2, hi - _GOLDEN * (hi - lo))
        new_x2 = np.where(up, lo + _GOLDEN * (hi - lo), x1)
        x_eval = np.where(up, new_x2, new_x1)
        f_eval = np.abs(_finite(np.asarray(g(x_eval), dtype=float)))
        f1, f2 = np.where(up, f2, f_eval), np.where(up, f_eval, f1)
        x1, x2 = new_x1, new_x2
        best = max(best, float(f_eval.max()))
        if np.all(hi - lo <= 1e-12 * max(1.0, abs(a), abs(b))):
            break
    best = max(best, float(f1.max()), float(f2.max()))
    return NormValue("sup", best, grid)


def weighted_lp_norm(g, psi: PsiFunction, p: float, interval=None, tol: float = 1e-9) -> NormValue:
    """``(int_a^b |g(s)|^p psi'(s) ds)^(1/p)``; ``p = 1`` is the psi-weighted L1 norm.

    ``tol`` is a relative tolerance on the integral of ``|g|^p``, so the norm
    scales exactly with ``g``; the absolute floor only stops refinement of
    integrands at roundoff level.
    """
    if not p >= 1:
        raise ParamError(f"norm exponent must be >= 1, got {p}")
    a, b = (psi.a, psi.b) if interval is None else (float(x) for x in interval)

    def integrand(s):
        return np.abs(np.asarray(g(s), dtype=float)) ** p * psi.deriv(s)

    floor = _ABS_FLOOR * float(psi(b) - psi(a))
    res = integrate_adaptive(integrand, a, b, floor, rtol=tol)
    label = "L1psi" if p == 1 else f"Lqpsi(q={p:g})"
    return NormValue(label, res.value ** (1.0 / p), res.evaluations)


def holder_conjugate(p: float) -> float:
    if not p > 1:
        raise ParamError(f"Hoelder exponent must exceed 1, got {p}")
    return p / (p - 1.0)


def theorem_coefficient(regime: Regime | str, alpha: float, p: float | None = None,
                        as_printed: bool = False) -> tuple[float, float]:
    """Return ``(divisor, theta)`` so that a bound reads ``norm / divisor * bracket(theta)``.

    ``Linf``: ``Gamma(alpha+2)``, ``alpha+1``.
    ``L1psi`` (``alpha >= 1``): ``Gamma(alpha+1)``, ``alpha``; with
    ``as_printed`` the alternative ``Gamma(alpha+2)``, ``alpha+1`` is returned
    for side-by-side comparison.
    ``Lqpsi`` (Hoelder pair ``p``, ``q = p/(p-1)``, ``alpha > 1/q``):
    ``Gamma(alpha) (alpha+1/p) (p(alpha-1)+1)^(1/p)``, ``alpha+1/p``.
    """
    regime = Regime.coerce(regime)
    if regime is Regime.LINF:
        if not alpha > 0:
            raise RegimeError(f"sup-norm bound needs alpha > 0, got {alpha}")
        return gamma(alpha + 2.0), alpha + 1.0
    if regime is Regime.L1PSI:
        if not alpha >= 1:
            raise RegimeError(f"weighted L1 bound needs alpha >= 1, got {alpha}")
        if as_printed:
            return gamma(alpha + 2.0), alpha + 1.0
        return gamma(alpha + 1.0), alpha
    if p is None:
        raise ParamError("the weighted Lq regime needs the Hoelder exponent p")
    q = holder_conjugate(p)
    if not alpha > 1.0 / q:
        raise RegimeError(f"weighted Lq bound needs alpha > 1/q = {1.0 / q:g}, got {alpha}")
    divisor = gamma(alpha) * (alpha + 1.0 / p) * (p * (alpha - 1.0) + 1.0) ** (1.0 / p)
    return divisor, alpha + 1.0 / p
