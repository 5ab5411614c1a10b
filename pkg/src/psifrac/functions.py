"""Test functions of the form ``g o psi`` with closed-form psi-derivatives.

Every function here carries ``g^(k)`` exactly, and most also carry their
left/right psi-Caputo derivatives in closed form via the power rule

    D^{alpha,psi}_{a+} (psi - psi(a))^beta = Gamma(beta+1)/Gamma(beta+1-alpha) (psi - psi(a))^(beta-alpha)

for ``beta > n - 1`` (mirrored on the right).  The test-suite checks that
rule against direct quadrature of the defining integral before anything
relies on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from ._common import Side, integer_order
from .errors import ParamError
from .psi import PsiFunction, ScalarFunction
from .quadrature import gamma

__all__ = [
    "TestFunction",
    "psi_monomial",
    "psi_polynomial",
    "from_polynomial",
    "boundary_flat",
    "random_test_functions",
]

CaputoRule = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction(ScalarFunction):
    """``f = g o psi`` with ``outer(u, k) = g^(k)(u)``.

    ``caputo`` maps a :class:`Side` to ``(alpha, t) -> D^{alpha,psi} f(t)``
    for the sides where a closed form is known.
    """

    __test__ = False  # not a pytest class

    caputo: dict = field(default_factory=dict, compare=False)
    tag: str = ""

    @property
    def psi(self) -> PsiFunction:
        return self.outer_psi

    def psi_deriv_closed(self, k: int, t):
        """``f^{[k]}_psi(t)``, exact."""
        out = np.asarray(self.outer(self.outer_psi(t), k), dtype=float)
        return out[()] if out.ndim == 0 else out

    def caputo_closed(self, side: Side | str, alpha: float, t):
        """Closed-form psi-Caputo derivative, or ``None`` if unknown for ``side``."""
        rule = self.caputo.get(Side.coerce(side))
        if rule is None:
            return None
        out = np.asarray(rule(alpha, np.asarray(t, dtype=float)), dtype=float)
        return out[()] if out.ndim == 0 else out

    def scaled(self, lam: float) -> "TestFunction":
        """``lam * f`` with every closed form scaled alongside."""
        outer, func = self.outer, self.func
        caputo = {s: (lambda r: lambda al, t: lam * r(al, t))(r) for s, r in self.caputo.items()}
        return TestFunction(lambda t: lam * func(t), self.domain,
                            lambda u, k: lam * outer(u, k), self.outer_psi, self.order,
                            caputo, f"{lam:g}*{self.tag}")


def _falling(beta: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= beta - j
    return out


def _power_rule(beta: float, alpha: float) -> float:
    # Gamma(beta+1)/Gamma(beta+1-alpha), zero where the denominator has a pole
    den = beta + 1.0 - alpha
    if den <= 0 and float(den).is_integer():
        return 0.0
    return gamma(beta + 1.0) / gamma(den)


def _check_power_rule(beta: float, alpha: float) -> bool:
    n = integer_order(alpha)
    if float(beta).is_integer() and beta <= n - 1:
        return True
    if beta > n - 1:
        return True
    raise ParamError(f"no psi-Caputo derivative of order {alpha} for exponent {beta} <= n-1")


def psi_monomial(psi: PsiFunction, anchor: float, beta: float) -> TestFunction:
    """``(psi(t) - psi(a))^beta`` (anchor ``a``) or ``(psi(b) - psi(t))^beta`` (anchor ``b``)."""
    if not beta >= 0:
        raise ParamError(f"monomial exponent must be >= 0, got {beta}")
    A, B = psi.range
    if anchor == psi.a:
        side, base, sign = Side.LEFT, A, 1.0
    elif anchor == psi.b:
        side, base, sign = Side.RIGHT, B, -1.0
    else:
        raise ParamError(f"anchor must be an endpoint of [{psi.a}, {psi.b}], got {anchor}")
    beta = float(beta)

    def outer(u, k):
        u = np.asarray(u, dtype=float)
        c = _falling(beta, k) * sign**k
        if c == 0.0:
            return np.zeros_like(u)
        x = np.maximum(sign * (u - base), 0.0)
        with np.errstate(divide="ignore"):
            return c * x ** (beta - k)

    def rule(alpha, t):
        _check_power_rule(beta, alpha)
        n = integer_order(alpha)
        if float(beta).is_integer() and beta <= n - 1:
            return np.zeros_like(t)
        x = np.maximum(sign * (psi(t) - base), 0.0)
        with np.errstate(divide="ignore"):
            return _power_rule(beta, alpha) * x ** (beta - alpha)

    label = "left" if side is Side.LEFT else "right"
    return TestFunction(lambda t: outer(psi(t), 0), (psi.a, psi.b), outer, psi, None,
                        {side: rule}, f"monomial({label},beta={beta:g})")


def _poly_rule(taylor: np.ndarray, base: float, sign: float, psi: PsiFunction) -> CaputoRule:
    # taylor[k] is the coefficient of (sign*(u - base))^k
    def rule(alpha, t):
        n = integer_order(alpha)
        x = np.maximum(sign * (psi(t) - base), 0.0)
        out = np.zeros_like(x)
        for k in range(n, taylor.size):
            if taylor[k] != 0.0:
                out = out + taylor[k] * _power_rule(k, alpha) * x ** (k - alpha)
        return out

    return rule


def from_polynomial(psi: PsiFunction, poly: Polynomial, tag: str = "poly") -> TestFunction:
    """``poly(psi(t))`` for a numpy ``Polynomial`` in the variable ``u = psi(t)``."""
    A, B = psi.range
    derivs = [poly]
    for _ in range(poly.degree()):
        derivs.append(derivs[-1].deriv())
    fact = np.array([math.factorial(k) for k in range(len(derivs))], dtype=float)
    left = np.array([d(A) for d in derivs]) / fact
    right = np.array([d(B) for d in derivs]) / fact * (-1.0) ** np.arange(len(derivs))

    def outer(u, k):
        u = np.asarray(u, dtype=float)
        if k >= len(derivs):
            return np.zeros_like(u)
        return derivs[k](u)

    caputo = {Side.LEFT: _poly_rule(left, A, 1.0, psi),
              Side.RIGHT: _poly_rule(right, B, -1.0, psi)}
    return TestFunction(lambda t: poly(psi(t)), (psi.a, psi.b), outer, psi, None, caputo, tag)


def psi_polynomial(psi: PsiFunction, coeffs: Sequence[float], anchor: float) -> TestFunction:
    """``sum_k coeffs[k] * (psi(t) - psi(anchor))^k``."""
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ParamError("polynomial needs at least one coefficient")
    u0 = float(psi(anchor))
    shift = Polynomial([-u0, 1.0])
    poly = Polynomial([0.0])
    for k, c in enumerate(coeffs):
        poly = poly + c * shift**k
    tag = "poly(" + ",".join(f"{c:.6g}" for c in coeffs) + f";anchor={anchor:g})"
    return from_polynomial(psi, poly, tag)


def boundary_flat(psi: PsiFunction, a: float, b: float, r: int) -> TestFunction:
    """``[(psi(t) - psi(a)) (psi(b) - psi(t))]^r``: psi-derivatives of order < r vanish at both ends."""
    if int(r) != r or r < 1:
        raise ParamError(f"flatness order must be an integer >= 1, got {r}")
    if (a, b) != (psi.a, psi.b):
        raise ParamError("boundary_flat interval must match the psi domain")
    A, B = psi.range
    poly = (Polynomial([-A, 1.0]) * Polynomial([B, -1.0])) ** int(r)
    return from_polynomial(psi, poly, f"flat(r={int(r)})")


def random_test_functions(psi: PsiFunction, rng: np.random.Generator,
                          n_poly: int = 4, flat_orders: Sequence[int] = (1, 2)) -> list[TestFunction]:
    """Random psi-polynomials anchored at ``a`` (coefficients U[-2, 2], degree 1..4)
    followed by one :func:`boundary_flat` function per entry of ``flat_orders``."""
    out = []
    for _ in range(n_poly):
        deg = int(rng.integers(1, 5))
        coeffs = rng.uniform(-2.0, 2.0, size=deg + 1)
        out.append(psi_polynomial(psi, coeffs, psi.a))
    out.extend(boundary_flat(psi, psi.a, psi.b, r) for r in flat_orders)
    return out
