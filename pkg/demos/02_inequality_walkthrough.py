"""Walk through one Iyengar-type check by hand, then let the library do it.

Run with ``python demos/02_inequality_walkthrough.py``.
"""

import math

from psifrac import (CaputoNorms, InequalityInstance, Regime, Variant, boundary_flat, check,
                     classical_iyengar, gamma, make_psi, psi_monomial)

ident = make_psi("identity", (), (0.0, 1.0))
f = psi_monomial(ident, 0.0, 2.0)  # f(t) = t^2

# alpha = 1 means n = 1: the correction is f(a)(s - a) + f(b)(b - s) = 1 - s,
# so at s = 1/2 the left side is |1/3 - 1/2| = 1/6.
# The derivative is 2t, whose sup is 2, and the bound is
#   2 / Gamma(3) * [(1/2)^2 + (1/2)^2] = 1/2.
by_hand = (abs(1 / 3 - 0.5), 2 / gamma(3.0) * 2 * 0.5**2)
print("by hand:", by_hand)

for regime, p in ((Regime.LINF, None), (Regime.L1PSI, None), (Regime.LQPSI, 2.0)):
    inst = InequalityInstance(f, ident, 1.0, regime, Variant.SPLIT, s=0.5, p=p)
    rep = check(inst)
    print(f"{regime.value:6s} lhs={rep.lhs:.7f} rhs={rep.rhs:.7f} margin={rep.margin:.7f}")

# The classical inequality subtracts a second term and is never looser.
print("classical:", classical_iyengar(f, 2.0, (0.0, 1.0)))

# For a function flat at both ends the correction disappears entirely.
bump = boundary_flat(ident, 0.0, 1.0, 1)  # t (1 - t)
norms = CaputoNorms(bump, ident, 0.5)
rep = check(InequalityInstance(bump, ident, 0.5, Regime.LINF, Variant.SHARP_MIDPOINT), norms)
print(f"sharp midpoint: |int f| = {rep.lhs:.7f} <= {rep.rhs:.7f}")
print("sup of the half derivative:", norms.pair(Regime.LINF)[0],
      "(it is attained twice: at t = 1/4 and t = 1)")
print("check against 0.3761264 / (Gamma(2.5) sqrt 2):", 0.3761264 / (gamma(2.5) * math.sqrt(2)))

# Scaling f scales both sides, so the verdict never changes.
for lam in (0.01, 1.0, 100.0):
    r = check(InequalityInstance(bump.scaled(lam), ident, 0.5, Regime.LINF, Variant.MIDPOINT))
    print(f"lambda={lam:>6}: ratio lhs/rhs = {r.lhs / r.rhs:.12f}")

