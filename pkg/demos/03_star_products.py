"""
Star products and Hopf checks
=============================

Plane waves and polynomials under the deformed product, the associator that
appears once s is switched on, and the Lorentz Leibniz rule.
"""
from fractions import Fraction

import numpy as np

from kappa_snyder import hopf
from kappa_snyder.numerics import DeformParams, RealizationSpec
from kappa_snyder.weyl import WeylAlgebra

MAG = RealizationSpec.maggiore()

# %% X_0 * X_1 - X_1 * X_0 reproduces the kappa commutator
params = DeformParams([Fraction(1, 3), Fraction(-1, 4)], Fraction(1, 5))
W = WeylAlgebra(2, 2)
X = W.X
for u in (0, Fraction(1, 2), 1):
    comm = hopf.star_poly(X[0], X[1], u, params) - hopf.star_poly(X[1], X[0], u, params)
    print(f"u={u}: [X0, X1]_* =", comm)

# %% associativity holds for s = 0 and fails for s != 0
p, k, q = np.array([0.0, 0.5]), np.array([0.3, 0.1]), np.array([-0.2, 0.4])
for s in (0, Fraction(1, 10)):
    d = hopf.associator_defect(MAG, DeformParams([0, 0], s), p, k, q)
    print(f"s={s}: associator norm {np.linalg.norm(d):.3e}")
collinear = np.array([0.0, 0.5])
d = hopf.associator_defect(MAG, DeformParams([0, 0], Fraction(1, 10)), collinear, collinear, collinear)
print(f"collinear triple: {np.linalg.norm(d):.3e}")

# %% the Lorentz Leibniz rule: exact for pure kappa or pure Snyder, third-order defect when mixed
k3, q3 = np.array([0.3, -0.2, 0.4]), np.array([-0.1, 0.5, 0.2])
for a, s in (([Fraction(1, 5), Fraction(1, 10), 0], 0), ([0, 0, 0], Fraction(1, 10)),
             ([Fraction(1, 5), Fraction(1, 10), 0], Fraction(1, 10))):
    params = DeformParams(a, s)
    worst = max(hopf.lorentz_leibniz_defect(params, k3, q3, m, v) for m in range(3) for v in range(m + 1, 3))
    print(f"a={[float(x) for x in a]} s={float(s)}: Leibniz defect {worst:.3e}")
