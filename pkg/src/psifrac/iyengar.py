"""Two-sided fractional Taylor bounds on the trapezoid-type integral error.

For a split point ``s`` the approximation of ``int f dpsi`` is

    sum_{k<n} 1/(k+1)! [f^{[k]}(a) (psi(s)-psi(a))^(k+1) + (-1)^k f^{[k]}(b) (psi(b)-psi(s))^(k+1)]

and the deviation is bounded by ``max(N_left, N_right) / divisor * bracket``
with ``bracket = (psi(s)-psi(a))^theta + (psi(b)-psi(s))^theta``, where
``N_left``/``N_right`` are norms of the left/right psi-Caputo derivatives
and ``(divisor, theta)`` depend on the norm regime.

The integral is taken against ``dpsi(t) = psi'(t) dt`` by default, the
measure under which integrating the one-sided Taylor bounds produces the
``(k+1)!`` terms.  ``measure="dt"`` evaluates ``int f dt`` instead; it
coincides for the identity weight and is kept only for comparison.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._common import Side, integer_order
from .errors import HypothesisError, ParamError
from .functions import TestFunction
from .norms import (SUP_GRID, Regime, holder_conjugate, sup_norm, theorem_coefficient,
                    weighted_lp_norm)
from .operators import caputo_function
from .psi import PsiFunction, ScalarFunction, make_psi, psi_derivative
from .quadrature import integrate_adaptive

__all__ = [
    "Variant",
    "InequalityInstance",
    "CheckReport",
    "CaputoNorms",
    "classical_iyengar",
    "iyengar_lhs",
    "iyengar_rhs",
    "check",
    "check_split",
    "check_midpoint",
    "check_partition",
    "sweep_split",
    "SweepResult",
    "midpoint_split",
    "tol_check",
    "FLAT_TOL",
    "RETRY_SUP_GRID",
]

FLAT_TOL = 1e-9
RETRY_SUP_GRID = 8193
HARNESS_TOL = 1e-7
INNER_TOL = 1e-9


class Variant(enum.Enum):
    SPLIT = "split"
    MIDPOINT = "midpoint"
    SHARP_MIDPOINT = "sharp_midpoint"
    PARTITION = "partition"
    PARTITION_FLAT = "partition_flat"
    TRAPEZOID = "trapezoid"


def tol_check(rhs: float) -> float:
    return 1e-6 * max(1.0, abs(rhs))


@dataclass(frozen=True)
class InequalityInstance:
    """One inequality to check.  The interval is the domain of ``psi``.

    ``s`` is used by ``split``; ``i``/``m`` by the partition variants; ``p``
    is the Hoelder exponent of the ``Lqpsi`` regime (the norm uses
    ``q = p/(p-1)``).
    """

    f: TestFunction
    psi: PsiFunction
    alpha: float
    regime: Regime = Regime.LINF
    variant: Variant = Variant.SPLIT
    s: float | None = None
    i: int | None = None
    m: int | None = None
    p: float | None = None
    measure: str = "dpsi"
    as_printed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime.coerce(self.regime))
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.measure not in ("dpsi", "dt"):
            raise ParamError("measure must be 'dpsi' or 'dt'")
        if self.variant is Variant.SPLIT:
            if self.s is None:
                raise ParamError("split variant needs s")
            _check_split_point(self.psi, self.s)
        if self.variant in (Variant.PARTITION, Variant.PARTITION_FLAT):
            if self.i is None or self.m is None:
                raise ParamError("partition variants need i and m")
            _check_partition(self.i, self.m)
        if self.regime is Regime.LQPSI and self.p is None:
            raise ParamError("Lqpsi regime needs the Hoelder exponent p")

    @property
    def n(self) -> int:
        return integer_order(self.alpha)

    @property
    def q(self) -> float | None:
        return None if self.p is None else holder_conjugate(self.p)

    @property
    def interval(self) -> tuple[float, float]:
        return self.psi.a, self.psi.b


@dataclass(frozen=True)
class CheckReport:
    lhs: float
    rhs: float
    margin: float
    passed: bool
    diagnostics: dict = field(default_factory=dict, compare=False)


def _check_split_point(psi: PsiFunction, s: float):
    if not psi.a <= s <= psi.b:
        raise ParamError(f"split point {s} outside [{psi.a}, {psi.b}]")


def _check_partition(i: int, m: int):
    if int(m) != m or m < 1:
        raise ParamError(f"partition size m must be an integer >= 1, got {m}")
    if int(i) != i or not 0 <= i <= m:
        raise IndexError(f"partition index {i} outside [0, {m}]")


class CaputoNorms:
    """Lazily computed, memoized norms of the left/right psi-Caputo derivatives.

    One object serves every regime, variant and split point of a given
    ``(f, psi, alpha)``.
    """

    def __init__(self, f, psi: PsiFunction, alpha: float, sup_grid: int = SUP_GRID,
                 tol: float = HARNESS_TOL, inner_tol: float = INNER_TOL):
        self.f, self.psi, self.alpha = f, psi, alpha
        self.sup_grid, self.tol, self.inner_tol = sup_grid, tol, inner_tol
        self._cache: dict = {}
        self.left = caputo_function(Side.LEFT, f, psi, alpha, inner_tol)
        self.right = caputo_function(Side.RIGHT, f, psi, alpha, inner_tol)

    def pair(self, regime: Regime | str, q: float | None = None) -> tuple[float, float]:
        regime = Regime.coerce(regime)
        key = (regime, q)
        if key not in self._cache:
            interval = (self.psi.a, self.psi.b)
            if regime is Regime.LINF:
                vals = tuple(sup_norm(g, interval, self.sup_grid).value
                             for g in (self.left, self.right))
            else:
                power = 1.0 if regime is Regime.L1PSI else q
                vals = tuple(weighted_lp_norm(g, self.psi, power, interval, self.tol).value
                             for g in (self.left, self.right))
            self._cache[key] = vals
        return self._cache[key]

    def refined(self, sup_grid: int) -> "CaputoNorms":
        other = CaputoNorms(self.f, self.psi, self.alpha, sup_grid, self.tol, self.inner_tol)
        other._cache = {k: v for k, v in self._cache.items() if k[0] is not Regime.LINF}
        return other


def midpoint_split(psi: PsiFunction) -> float:
    """The split ``s*`` with ``psi(s*)`` the midpoint of ``[psi(a), psi(b)]``."""
    A, B = psi.range
    return float(psi.inverse(0.5 * (A + B)))


def _endpoint_derivs(f, psi: PsiFunction, n: int):
    da = [float(psi_derivative(f, psi, k)(psi.a)) for k in range(n)]
    db = [float(psi_derivative(f, psi, k)(psi.b)) for k in range(n)]
    return da, db


def _integral(inst: InequalityInstance):
    f, psi = inst.f, inst.psi
    if inst.measure == "dt":
        res = integrate_adaptive(lambda t: np.asarray(f(t), dtype=float), psi.a, psi.b, HARNESS_TOL)
    else:
        res = integrate_adaptive(lambda t: np.asarray(f(t), dtype=float) * psi.deriv(t),
                                 psi.a, psi.b, HARNESS_TOL)
    return res.value, res.error_estimate


def _require_flat(inst: InequalityInstance, ks: range, da, db):
    for k in ks:
        if abs(da[k]) > FLAT_TOL or abs(db[k]) > FLAT_TOL:
            raise HypothesisError(
                f"{inst.variant.value} needs f^[{k}]_psi to vanish at both ends "
                f"(got {da[k]:.3g}, {db[k]:.3g})")


def _lhs_parts(inst: InequalityInstance, s: float):
    psi = inst.psi
    n = inst.n
    A, B = psi.range
    us = float(psi(s))
    da, db = _endpoint_derivs(inst.f, psi, n)
    integral, qerr = _integral(inst)
    corr = 0.0
    corr_alt = 0.0
    for k in range(n):
        c = 1.0 / math.factorial(k + 1)
        corr += c * (da[k] * (us - A) ** (k + 1) + (-1) ** k * db[k] * (B - us) ** (k + 1))
        corr_alt += c * (da[k] * (us - A) ** (k + 1) + (-1) ** k * db[k] * (us - B) ** (k + 1))
    return integral, corr, corr_alt, qerr, da, db


def iyengar_lhs(inst: InequalityInstance, s: float) -> float:
    """``|int f - two-sided Taylor correction at s|``."""
    _check_split_point(inst.psi, s)
    integral, corr, _, _, _, _ = _lhs_parts(inst, s)
    return abs(integral - corr)


def _bound_scale(inst: InequalityInstance, norms: CaputoNorms):
    divisor, theta = theorem_coefficient(inst.regime, inst.alpha, inst.p, inst.as_printed)
    left, right = norms.pair(inst.regime, inst.q)
    return max(left, right) / divisor, theta, (left, right)


def iyengar_rhs(inst: InequalityInstance, s: float, norms: CaputoNorms | None = None) -> float:
    """``max(N_left, N_right) / divisor * [(psi(s)-psi(a))^theta + (psi(b)-psi(s))^theta]``."""
    _check_split_point(inst.psi, s)
    norms = norms or CaputoNorms(inst.f, inst.psi, inst.alpha)
    scale, theta, _ = _bound_scale(inst, norms)
    A, B = inst.psi.range
    us = float(inst.psi(s))
    return scale * ((us - A) ** theta + (B - us) ** theta)


def _report(lhs: float, rhs: float, **diag) -> CheckReport:
    margin = rhs - lhs
    return CheckReport(lhs, rhs, margin, margin >= -tol_check(rhs), diag)


def check_split(inst: InequalityInstance, s: float | None = None,
                norms: CaputoNorms | None = None) -> CheckReport:
    """Check the bound at split point ``s`` (defaults to ``inst.s``)."""
    s = inst.s if s is None else s
    if s is None:
        raise ParamError("no split point given")
    _check_split_point(inst.psi, s)
    norms = norms or CaputoNorms(inst.f, inst.psi, inst.alpha)
    integral, corr, corr_alt, qerr, _, _ = _lhs_parts(inst, s)
    lhs = abs(integral - corr)
    rhs = iyengar_rhs(inst, s, norms)
    diag = _norm_diag(inst, norms, integral, qerr, s)
    if abs(corr_alt - corr) > 0:
        diag["lhs_alt_sign"] = abs(integral - corr_alt)
    return _report(lhs, rhs, **diag)


def _norm_diag(inst, norms, integral, qerr, s):
    scale, theta, (left, right) = _bound_scale(inst, norms)
    return {"norm_left": left, "norm_right": right, "theta": theta, "integral": integral,
            "quad_error": qerr, "s": s}


def check_midpoint(inst: InequalityInstance, sharp: bool | None = None,
                   norms: CaputoNorms | None = None) -> CheckReport:
    """Check at ``s*``; the sharp form needs ``f^{[k]}_psi`` to vanish at both ends for ``k < n``."""
    if sharp is None:
        sharp = inst.variant is Variant.SHARP_MIDPOINT
    s_star = midpoint_split(inst.psi)
    norms = norms or CaputoNorms(inst.f, inst.psi, inst.alpha)
    if not sharp:
        return check_split(inst, s_star, norms)
    da, db = _endpoint_derivs(inst.f, inst.psi, inst.n)
    _require_flat(inst, range(inst.n), da, db)
    integral, qerr = _integral(inst)
    rhs = iyengar_rhs(inst, s_star, norms)
    return _report(abs(integral), rhs, **_norm_diag(inst, norms, integral, qerr, s_star))


def check_partition(inst: InequalityInstance, i: int | None = None, m: int | None = None,
                    flat: bool | None = None, norms: CaputoNorms | None = None) -> CheckReport:
    """Check at the node ``t_i`` with ``psi(t_i) = psi(a) + i (psi(b)-psi(a))/m``.

    The flat form replaces the correction by ``(Delta/m) [i f(a) + (m-i) f(b)]``
    and requires ``f^{[k]}_psi(a) = f^{[k]}_psi(b) = 0`` for ``1 <= k < n``.
    """
    i = inst.i if i is None else i
    m = inst.m if m is None else m
    if i is None or m is None:
        raise ParamError("no partition index given")
    _check_partition(i, m)
    if flat is None:
        flat = inst.variant in (Variant.PARTITION_FLAT, Variant.TRAPEZOID)
    psi, n = inst.psi, inst.n
    A, B = psi.range
    h = (B - A) / m
    t_i = float(psi.inverse(A + i * h))
    norms = norms or CaputoNorms(inst.f, psi, inst.alpha)
    da, db = _endpoint_derivs(inst.f, psi, n)
    if flat:
        _require_flat(inst, range(1, n), da, db)
        corr = h * (i * da[0] + (m - i) * db[0])
    else:
        corr = sum(h ** (k + 1) / math.factorial(k + 1)
                   * (i ** (k + 1) * da[k] + (-1) ** k * (m - i) ** (k + 1) * db[k])
                   for k in range(n))
    integral, qerr = _integral(inst)
    scale, theta, _ = _bound_scale(inst, norms)
    rhs = scale * h**theta * (i**theta + (m - i) ** theta)
    diag = _norm_diag(inst, norms, integral, qerr, t_i)
    diag.update(i=i, m=m)
    return _report(abs(integral - corr), rhs, **diag)


def check(inst: InequalityInstance, norms: CaputoNorms | None = None,
          retry: bool = True) -> CheckReport:
    """Dispatch on ``inst.variant``.

    A failing sup-norm check is recomputed once on a finer grid before it is
    reported, since an underestimated sup only ever shrinks the bound.
    """
    norms = norms or CaputoNorms(inst.f, inst.psi, inst.alpha)
    v = inst.variant
    if v is Variant.SPLIT:
        rep = check_split(inst, inst.s, norms)
    elif v in (Variant.MIDPOINT, Variant.SHARP_MIDPOINT):
        rep = check_midpoint(inst, v is Variant.SHARP_MIDPOINT, norms)
    elif v is Variant.TRAPEZOID:
        rep = check_partition(inst, 1, 2, True, norms)
    else:
        rep = check_partition(inst, inst.i, inst.m, v is Variant.PARTITION_FLAT, norms)
    if not rep.passed and retry and inst.regime is Regime.LINF and norms.sup_grid < RETRY_SUP_GRID:
        return check(inst, norms.refined(RETRY_SUP_GRID), retry=False)
    return rep


def classical_iyengar(g, M: float, interval) -> CheckReport:
    """``|int g - (b-a)(g(a)+g(b))/2| <= M (b-a)^2/4 - (g(b)-g(a))^2/(4M)`` for ``|g'| <= M``."""
    if not M > 0:
        raise ParamError("derivative bound M must be positive")
    a, b = (float(x) for x in interval)
    ident = make_psi("identity", (), (a, b))
    outer_psi = getattr(g, "outer_psi", None)
    dpsi = outer_psi if outer_psi is not None and (outer_psi.a, outer_psi.b) == (a, b) else ident
    d1 = psi_derivative(g, dpsi, 1)
    gprime = ScalarFunction(lambda t: np.asarray(d1(t)) * dpsi.deriv(t), (a, b))
    sup = sup_norm(gprime, (a, b)).value
    if sup > M + 1e-9:
        raise HypothesisError(f"sup|g'| = {sup:.12g} exceeds M = {M:.12g}")
    ga, gb = float(g(a)), float(g(b))
    res = integrate_adaptive(lambda t: np.asarray(g(t), dtype=float), a, b, 1e-12)
    lhs = abs(res.value - 0.5 * (b - a) * (ga + gb))
    rhs = M * (b - a) ** 2 / 4.0 - (gb - ga) ** 2 / (4.0 * M)
    return _report(lhs, rhs, sup_derivative=sup, integral=res.value, quad_error=res.error_estimate)


@dataclass(frozen=True)
class SweepResult:
    s: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    theta: float
    argmin: int
    degenerate: bool

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs


def sweep_split(inst: InequalityInstance, grid_size: int,
                norms: CaputoNorms | None = None) -> SweepResult:
    """LHS/RHS on ``grid_size`` split points equally spaced in ``psi``-coordinates.

    For ``theta > 1`` the bracket is strictly convex in ``psi(s)`` and the
    RHS minimum sits at the point nearest ``s*``; ``theta == 1`` makes the
    bracket constant (``degenerate``).
    """
    if grid_size < 3:
        raise ParamError("sweep needs at least 3 points")
    psi = inst.psi
    norms = norms or CaputoNorms(inst.f, psi, inst.alpha)
    A, B = psi.range
    u = np.linspace(A, B, grid_size)
    s = np.asarray(psi.inverse(u), dtype=float)
    s[0], s[-1] = psi.a, psi.b
    scale, theta, _ = _bound_scale(inst, norms)
    rhs = scale * ((u - A) ** theta + (B - u) ** theta)
    integral, _ = _integral(inst)
    n = inst.n
    da, db = _endpoint_derivs(inst.f, psi, n)
    corr = sum((da[k] * (u - A) ** (k + 1) + (-1) ** k * db[k] * (B - u) ** (k + 1))
               / math.factorial(k + 1) for k in range(n))
    lhs = np.abs(integral - corr)
    degenerate = abs(theta - 1.0) < 1e-12
    return SweepResult(s, lhs, rhs, theta, int(np.argmin(rhs)), degenerate)


def with_variant(inst: InequalityInstance, **changes) -> InequalityInstance:
    return replace(inst, **changes)
