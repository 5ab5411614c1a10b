"""Fractional integrals and Caputo derivatives with respect to a weight psi.

Run with ``python demos/01_operators.py``.
"""

import math

import numpy as np

from psifrac import caputo_derivative, make_psi, psi_monomial, psi_polynomial, rl_integral

# With psi(t) = t the operators are the classical ones.  The half derivative
# of f(t) = t is 2 sqrt(t / pi).
ident = make_psi("identity", (), (0.0, 1.0))
line = psi_monomial(ident, 0.0, 1.0)
t = np.linspace(0.0, 1.0, 5)
print("D^0.5 t        :", caputo_derivative("left", line, ident, 0.5, t))
print("2 sqrt(t/pi)   :", 2 * np.sqrt(t / math.pi))

# psi = ln t gives Hadamard-type operators.  Powers of ln t play the role
# that powers of t play classically.
log = make_psi("log", (), (1.0, math.e))
sq_log = psi_monomial(log, 1.0, 2.0)
print("D^0.5 (ln t)^2 at e:", caputo_derivative("left", sq_log, log, 0.5, math.e),
      " closed form:", math.gamma(3) / math.gamma(2.5))

# Caputo derivatives kill psi-polynomials of degree below n = floor(alpha) + 1.
cubic = psi_polynomial(log, [1.0, -2.0, 0.5], 1.0)
print("D^2.5 of a quadratic in ln t:", caputo_derivative("left", cubic, log, 2.5, [1.5, 2.0, 2.5]))

# The left and right integrals of a constant are powers of psi-distances.
one = psi_polynomial(log, [1.0], 1.0)
for side in ("left", "right"):
    print(f"I^0.7 1 ({side}) at t=2:", rl_integral(side, one, log, 0.7, 2.0))
print("closed forms:", math.log(2) ** 0.7 / math.gamma(1.7), (1 - math.log(2)) ** 0.7 / math.gamma(1.7))
