"""psi-Riemann-Liouville integrals, psi-Caputo derivatives and Taylor formulae.

Everything is evaluated in the variable ``u = psi(s)``, where the measure
``psi'(s) ds`` becomes ``du`` and the kernel is a plain algebraic weight
``(U - u)^gamma`` handled by :func:`integrate_endpoint_singular_batch`.
All operators accept a scalar or an array of evaluation points; an array is
computed as one batched quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._common import Side, integer_order
from .errors import DomainError, ParamError
from .psi import PsiFunction, ScalarFunction, psi_derivative
from .quadrature import gamma, integrate_endpoint_singular_batch

__all__ = [
    "Side",
    "FracParams",
    "integer_order",
    "rl_integral",
    "caputo_derivative",
    "caputo_function",
    "taylor_partial_sum",
    "taylor_residual",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FracParams:
    alpha: float
    side: Side
    interval: tuple[float, float]
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "side", Side.coerce(self.side))
        object.__setattr__(self, "n", integer_order(self.alpha))
        a, b = self.interval
        if not a < b:
            raise ParamError(f"need a < b, got {self.interval}")


def _deriv_in_u(f, psi: PsiFunction, k: int) -> Callable[[np.ndarray], np.ndarray]:
    # u -> f^{[k]}_psi(psi^{-1}(u)); skips the inverse when f = g o psi is known
    outer = getattr(f, "outer", None)
    if outer is not None and getattr(f, "outer_psi", None) == psi:
        psi_derivative(f, psi, k)  # order check
        return lambda u: np.asarray(outer(u, k), dtype=float)
    d = psi_derivative(f, psi, k)
    return lambda u: np.asarray(d(psi.inverse(u)), dtype=float)


def _check_point(psi: PsiFunction, t: np.ndarray):
    slack = 1e-12 * max(1.0, abs(psi.a), abs(psi.b))
    if np.any(t < psi.a - slack) or np.any(t > psi.b + slack):
        raise DomainError(f"evaluation point outside [{psi.a}, {psi.b}]")


def _weighted_integral(side: Side, G, psi: PsiFunction, gam: float, t, tol):
    """``int_A^U (U-u)^gam G(u) du`` (left) or ``int_U^B (u-U)^gam G(u) du`` (right)."""
    t = np.asarray(t, dtype=float)
    _check_point(psi, t)
    U = np.atleast_1d(psi(np.clip(t, psi.a, psi.b))).ravel()
    A, B = psi.range
    U = np.clip(U, A, B)
    if side is Side.LEFT:
        lo, hi, where = np.full_like(U, A), U, "hi"
    else:
        lo, hi, where = U, np.full_like(U, B), "lo"
    vals, _, _ = integrate_endpoint_singular_batch(lambda u, _o: G(u), lo, hi, gam, where, tol)
    return vals.reshape(t.shape)


def _scalar(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


def rl_integral(side: Side | str, f, psi: PsiFunction, alpha: float, t, tol: float = DEFAULT_TOL):
    """Left/right psi-Riemann-Liouville integral of order ``alpha`` at ``t``.

    Left: ``1/Gamma(alpha) int_a^t psi'(s) (psi(t) - psi(s))^(alpha-1) f(s) ds``;
    the right integral runs over ``[t, b]`` with kernel ``(psi(s) - psi(t))``.
    Zero at the anchor.
    """
    side = Side.coerce(side)
    if not alpha > 0:
        raise ParamError(f"fractional order must be positive, got {alpha}")
    G = _deriv_in_u(f, psi, 0)
    out = _weighted_integral(side, G, psi, alpha - 1.0, t, tol * gamma(alpha)) / gamma(alpha)
    return _scalar(np.asarray(out))


def caputo_derivative(side: Side | str, f, psi: PsiFunction, alpha: float, t,
                      tol: float = DEFAULT_TOL):
    """Left/right psi-Caputo derivative of order ``alpha`` at ``t``.

    With ``n`` the integer order (``floor(alpha)+1``, or ``alpha`` itself when
    integral) the left derivative is

        1/Gamma(n-alpha) int_a^t psi'(s) (psi(t)-psi(s))^(n-alpha-1) f^{[n]}_psi(s) ds

    and the right one uses ``(psi(s)-psi(t))`` on ``[t, b]`` and
    ``(-1)^n f^{[n]}_psi``.  Integer orders return ``(+-1)^n f^{[n]}_psi(t)``.
    """
    side = Side.coerce(side)
    n = integer_order(alpha)
    sign = 1.0 if side is Side.LEFT else (-1.0) ** n
    G = _deriv_in_u(f, psi, n)
    t_arr = np.asarray(t, dtype=float)
    if float(alpha).is_integer():
        _check_point(psi, t_arr)
        out = sign * G(np.asarray(psi(np.clip(t_arr, psi.a, psi.b)), dtype=float))
        return _scalar(np.asarray(out, dtype=float))
    gam = n - alpha - 1.0
    out = _weighted_integral(side, G, psi, gam, t_arr, tol * gamma(n - alpha))
    return _scalar(np.asarray(sign * out / gamma(n - alpha)))


def caputo_function(side: Side | str, f, psi: PsiFunction, alpha: float,
                    tol: float = DEFAULT_TOL) -> ScalarFunction:
    """``s -> D^{alpha,psi} f(s)`` as a vectorized :class:`ScalarFunction`."""
    return ScalarFunction(lambda s: caputo_derivative(side, f, psi, alpha, s, tol), (psi.a, psi.b))


def taylor_partial_sum(side: Side | str, f, psi: PsiFunction, n: int, t):
    """Degree ``n-1`` psi-Taylor polynomial of ``f`` about ``a`` (left) or ``b`` (right)."""
    side = Side.coerce(side)
    if n < 1:
        raise ParamError("Taylor order n must be >= 1")
    t = np.asarray(t, dtype=float)
    anchor = psi.a if side is Side.LEFT else psi.b
    # on the right (-1)^k (psi(b) - psi(t))^k == (psi(t) - psi(b))^k
    x = psi(t) - psi(anchor)
    out = np.zeros_like(t)
    for k in range(n):
        dk = float(psi_derivative(f, psi, k)(anchor))
        out = out + dk / math.factorial(k) * x**k
    return _scalar(out)


def taylor_residual(side: Side | str, f, psi: PsiFunction, alpha: float, grid,
                    tol_inner: float = 1e-9, tol_outer: float = 1e-7) -> float:
    """Max over ``grid`` of ``|f - partial_sum - I^alpha D^alpha f|``.

    The inner Caputo derivative is itself a quadrature, evaluated in one batch
    at every node the outer integral asks for.
    """
    side = Side.coerce(side)
    grid = np.asarray(grid, dtype=float)
    n = integer_order(alpha)
    D = caputo_function(side, f, psi, alpha, tol_inner)
    remainder = rl_integral(side, D, psi, alpha, grid, tol_outer)
    partial = taylor_partial_sum(side, f, psi, n, grid)
    return float(np.max(np.abs(np.asarray(f(grid)) - partial - remainder)))
