"""
Composing momenta
=================

The composition law D(k, q) from the closed form, from the flow equation and
from the second-order formulas, and how fast the formulas converge.
"""
from fractions import Fraction

import numpy as np

from kappa_snyder import momentum as mom
from kappa_snyder.numerics import DeformParams, RealizationSpec

MAG, UNIT = RealizationSpec.maggiore(), RealizationSpec.unit()
params = DeformParams([Fraction(1, 5), Fraction(1, 10), Fraction(-1, 10)], Fraction(1, 10))
k, q = np.array([0.3, -0.2, 0.4]), np.array([-0.1, 0.5, 0.2])

# %% exact and integrated paths
exact = mom.compose(MAG, params, k, q, method="exact")
ode = mom.compose(MAG, params, k, q, method="ode")
print("exact      ", exact.value, exact.diagnostics["newton_iters"], "Newton steps")
print("ode        ", ode.value)
print("difference ", np.linalg.norm(exact.value - ode.value))

# %% the unit realization has no closed form; integrate instead
print("unit f=1   ", mom.compose(UNIT, params, k, q).value)

# %% antipodes: both conditions vanish at the solution
S = mom.antipode(MAG, params, k)
print("S(k)       ", S.value, "residuals", S.diagnostics["left_residual"], S.diagnostics["mirror_residual"])

# %% second-order formulas: the error drops by 8 when eps halves
base = DeformParams([Fraction(1, 2), Fraction(1, 5), Fraction(-3, 10)], Fraction(2, 5))
prev = None
for eps in (Fraction(1, 5), Fraction(1, 10), Fraction(1, 20)):
    p = base.scaled(eps)
    err = np.linalg.norm(mom.compose_perturbative(Fraction(1, 2), p, k, q) - mom.compose(MAG, p, k, q).value)
    print(f"eps={float(eps):5.3f}  error={err:.3e}" + (f"  ratio={prev / err:.2f}" if prev else ""))
    prev = err
