"""Weight functions psi and the psi-derivative ``((1/psi') d/dt)^k``."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, OrderError, ParamError, RangeError

__all__ = [
    "PsiKind",
    "PsiFunction",
    "ScalarFunction",
    "make_psi",
    "psi_inverse",
    "psi_derivative",
    "fd_step",
]

_EPS = np.finfo(float).eps
INVERSE_RTOL = 1e-12
# Highest order the finite-difference path is trusted for.
FD_MAX_ORDER = 4


class PsiKind(enum.Enum):
    IDENTITY = "identity"
    AFFINE = "affine"
    LOG = "log"
    POWER = "power"
    EXP = "exp"


@dataclass(frozen=True)
class PsiFunction:
    """A strictly increasing, smooth weight on ``[a, b]``.

    Construct through :func:`make_psi`, which validates the domain and
    parameters.  Calls are vectorized.
    """

    kind: PsiKind
    params: tuple[float, ...]
    a: float
    b: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k is PsiKind.IDENTITY:
            out = t.copy()
        elif k is PsiKind.AFFINE:
            c0, c1 = self.params
            out = c0 + c1 * t
        elif k is PsiKind.LOG:
            out = np.log(t)
        elif k is PsiKind.POWER:
            out = t ** self.params[0]
        else:
            out = np.exp(t)
        return out[()] if out.ndim == 0 else out

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k is PsiKind.IDENTITY:
            out = np.ones_like(t)
        elif k is PsiKind.AFFINE:
            out = np.full_like(t, self.params[1])
        elif k is PsiKind.LOG:
            out = 1.0 / t
        elif k is PsiKind.POWER:
            s = self.params[0]
            out = s * t ** (s - 1.0)
        else:
            out = np.exp(t)
        return out[()] if out.ndim == 0 else out

    def _closed_inverse(self, u):
        k = self.kind
        if k is PsiKind.IDENTITY:
            return u.copy()
        if k is PsiKind.AFFINE:
            c0, c1 = self.params
            return (u - c0) / c1
        if k is PsiKind.LOG:
            return np.exp(u)
        if k is PsiKind.POWER:
            return u ** (1.0 / self.params[0])
        return np.log(u)

    def inverse(self, u):
        """Vectorized inverse on ``[psi(a), psi(b)]`` (see :func:`psi_inverse`)."""
        u = np.asarray(u, dtype=float)
        lo, hi = self.range
        slack = 1e-13 * max(1.0, abs(lo), abs(hi))
        if np.any(u < lo - slack) or np.any(u > hi + slack):
            raise RangeError(f"value outside psi range [{lo}, {hi}]")
        u = np.clip(u, lo, hi)
        t = np.clip(self._closed_inverse(u), self.a, self.b)
        bad = np.abs(self(t) - u) > INVERSE_RTOL * np.maximum(1.0, np.abs(u))
        if np.any(bad):
            t = np.where(bad, _bisect_inverse(self, u), t)
        return t[()] if t.ndim == 0 else t

    @property
    def range(self) -> tuple[float, float]:
        return float(self(self.a)), float(self(self.b))

    @property
    def width(self) -> float:
        lo, hi = self.range
        return hi - lo

    @property
    def label(self) -> str:
        if self.params:
            args = ",".join(f"{p:g}" for p in self.params)
            return f"{self.kind.value}({args})[{self.a:g},{self.b:g}]"
        return f"{self.kind.value}[{self.a:g},{self.b:g}]"


def _bisect_inverse(psi: PsiFunction, u: np.ndarray) -> np.ndarray:
    lo = np.full_like(u, psi.a)
    hi = np.full_like(u, psi.b)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = psi(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 4 * _EPS * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


_NATURAL_DOMAIN = {
    PsiKind.IDENTITY: (-math.inf, math.inf, False),
    PsiKind.AFFINE: (-math.inf, math.inf, False),
    PsiKind.LOG: (0.0, math.inf, True),
    PsiKind.POWER: (0.0, math.inf, True),
    PsiKind.EXP: (-math.inf, math.inf, False),
}

_NPARAMS = {PsiKind.IDENTITY: 0, PsiKind.AFFINE: 2, PsiKind.LOG: 0,
            PsiKind.POWER: 1, PsiKind.EXP: 0}


def make_psi(kind: PsiKind | str, params: Sequence[float] = (),
             domain: Sequence[float] = (0.0, 1.0)) -> PsiFunction:
    """Validate and build a :class:`PsiFunction`.

    ``params`` is ``(c0, c1)`` for ``affine`` (``c0 + c1 t``, ``c1 > 0``),
    ``(sigma,)`` for ``power`` (``t**sigma``, ``sigma > 0``) and empty for
    ``identity``, ``log`` and ``exp``.  ``log`` and ``power`` need ``a > 0``.
    """
    try:
        kind = PsiKind(kind)
    except ValueError:
        raise ParamError(f"unknown psi kind {kind!r}") from None
    params = tuple(float(p) for p in params)
    if len(params) != _NPARAMS[kind]:
        raise ParamError(f"{kind.value} takes {_NPARAMS[kind]} parameter(s), got {len(params)}")
    a, b = (float(x) for x in domain)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"need a finite interval a < b, got [{a}, {b}]")
    low, high, open_low = _NATURAL_DOMAIN[kind]
    if (open_low and a <= low) or a < low or b > high:
        raise DomainError(f"[{a}, {b}] leaves the natural domain of {kind.value}")
    if kind is PsiKind.AFFINE and not params[1] > 0:
        raise ParamError("affine psi needs slope c1 > 0")
    if kind is PsiKind.POWER and not params[0] > 0:
        raise ParamError("power psi needs sigma > 0")
    return PsiFunction(kind, params, a, b)


def psi_inverse(psi: PsiFunction, u: float) -> float:
    """Return ``t`` in ``[a, b]`` with ``psi(t) = u``; :class:`RangeError` off range."""
    return float(psi.inverse(u))


@dataclass(frozen=True)
class ScalarFunction:
    """A vectorized real function on a closed interval.

    ``outer``/``outer_psi`` optionally record that ``f = g o psi``, with
    ``outer(u, k)`` returning ``g^(k)(u)``; :func:`psi_derivative` then uses
    the chain rule instead of finite differences.  ``order`` caps the
    derivative order that ``outer`` can supply (``None`` for no cap).
    """

    func: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    outer: Callable[[np.ndarray, int], np.ndarray] | None = field(default=None, compare=False)
    outer_psi: PsiFunction | None = None
    order: int | None = None

    def __call__(self, t):
        out = np.asarray(self.func(np.asarray(t, dtype=float)), dtype=float)
        return out[()] if out.ndim == 0 else out


def fd_step(psi: PsiFunction, k: int) -> float:
    """Step in ``u = psi(t)`` for a k-th order finite difference.

    ``max(1e-5, 1e-5 * width)`` for first derivatives; higher orders grow the
    step to ``eps**(1/(k+4))`` (relative to the width) to keep roundoff,
    which scales as ``eps / h**k``, below the Richardson-corrected truncation.
    """
    width = psi.width
    h = max(1e-5, 1e-5 * width)
    if k >= 2:
        h = max(h, _EPS ** (1.0 / (k + 4)) * max(1.0, width))
    return min(h, width / (4.0 * (k + 2)))


def _fd_weights(offsets: np.ndarray, k: int) -> np.ndarray:
    m = np.arange(offsets.size)[:, None]
    vander = offsets[None, :] ** m / np.array([math.factorial(i) for i in range(offsets.size)])[:, None]
    rhs = np.zeros(offsets.size)
    rhs[k] = 1.0
    return np.linalg.solve(vander, rhs)


def _fd_in_u(F: Callable[[np.ndarray], np.ndarray], u: np.ndarray, k: int,
             h: float, lo: float, hi: float) -> np.ndarray:
    # second-order stencils (central when they fit, shifted one-sided otherwise),
    # then one Richardson step
    half = (k + 1) // 2 if k % 2 else k // 2
    central = np.arange(-half, half + 1, dtype=float)
    if central.size < k + 1:
        central = np.arange(-half - 1, half + 2, dtype=float)
    onesided = np.arange(k + 2, dtype=float)
    out = np.empty_like(u)

    inside = (u + central[0] * h >= lo) & (u + central[-1] * h <= hi)
    groups = [(inside, central)]
    rest = ~inside
    if np.any(rest):
        span = onesided[-1]
        # shift = index of u inside the stencil, clamped so the stencil fits
        shift = np.clip(np.floor((u - lo) / h), 0, span).astype(int)
        for s in np.unique(shift[rest]):
            sel = rest & (shift == s)
            offs = onesided - s
            while u[sel].max() + offs[-1] * h > hi + 1e-15 and offs[0] > -span:
                offs = offs - 1
            groups.append((sel, offs))

    for sel, offs in groups:
        if not np.any(sel):
            continue
        us = u[sel]
        d = []
        for step in (h, h / 2):
            w = _fd_weights(offs, k)
            pts = np.clip(us[:, None] + offs[None, :] * step, lo, hi)
            d.append((F(pts) @ w) / step**k)
        out[sel] = (4.0 * d[1] - d[0]) / 3.0
    return out


def psi_derivative(f, psi: PsiFunction, k: int) -> ScalarFunction:
    """Return ``t -> ((1/psi'(t)) d/dt)^k f(t)`` as a :class:`ScalarFunction`.

    If ``f`` is known to be ``g o psi`` the result is ``g^(k)(psi(t))``;
    otherwise the derivative is taken by finite differences in ``u = psi(t)``.
    """
    if k < 0:
        raise OrderError("derivative order must be non-negative")
    domain = (psi.a, psi.b)
    outer = getattr(f, "outer", None)
    if outer is not None and getattr(f, "outer_psi", None) == psi:
        order = getattr(f, "order", None)
        if order is not None and k > order:
            raise OrderError(f"function provides psi-derivatives up to order {order}, asked {k}")
        return ScalarFunction(lambda t: outer(psi(t), k), domain)
    if k == 0:
        return ScalarFunction(lambda t: f(t), domain)
    if k > FD_MAX_ORDER:
        raise OrderError(f"finite-difference psi-derivatives are limited to order {FD_MAX_ORDER}")

    lo, hi = psi.range
    h = fd_step(psi, k)

    def F(u):
        return np.asarray(f(psi.inverse(u)), dtype=float)

    def deriv(t):
        t = np.asarray(t, dtype=float)
        u = np.atleast_1d(psi(t)).astype(float)
        out = _fd_in_u(F, u, k, h, lo, hi)
        return out.reshape(t.shape)

    return ScalarFunction(deriv, domain)
