"""Where the bound is tightest, and why the left side integrates against dpsi.

Run with ``python demos/03_split_point_and_measure.py``.
"""

import math

import numpy as np

from psifrac import InequalityInstance, Regime, Variant, check, make_psi, psi_polynomial, sweep_split

log = make_psi("log", (), (1.0, math.e))
f = psi_polynomial(log, [0.2, 1.0, -0.5, 0.3], 1.0)

# The bracket (psi(s) - psi(a))^theta + (psi(b) - psi(s))^theta is convex in
# psi(s) for theta > 1, so the best split is the midpoint in psi-coordinates.
# Here that is s = e^(1/2) rather than the plain midpoint (1 + e)/2.
res = sweep_split(InequalityInstance(f, log, 0.5, Regime.LINF, Variant.MIDPOINT), 101)
print(f"theta={res.theta}, argmin s={res.s[res.argmin]:.7f}, e^0.5={math.exp(0.5):.7f}, "
      f"(1+e)/2={(1 + math.e) / 2:.7f}")
for k in (0, 25, 50, 75, 100):
    print(f"  s={res.s[k]:.4f} lhs={res.lhs[k]:.6f} rhs={res.rhs[k]:.6f}")

# theta = 1 (weighted L1 bound at alpha = 1) makes the bracket constant.
flat = sweep_split(InequalityInstance(f, log, 1.0, Regime.L1PSI, Variant.MIDPOINT), 11)
print("theta=1 degenerate:", flat.degenerate, np.ptp(flat.rhs))

# With dt in place of dpsi on the left side even a constant breaks the bound:
# int_1^e dt = e - 1, while the correction measures psi-lengths that sum to 1.
one = psi_polynomial(log, [1.0], 1.0)
for measure in ("dpsi", "dt"):
    rep = check(InequalityInstance(one, log, 0.5, Regime.LINF, Variant.SPLIT, s=1.5, measure=measure))
    print(f"measure={measure:4s} lhs={rep.lhs:.6f} rhs={rep.rhs:.6f} passed={rep.passed}")
