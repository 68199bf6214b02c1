"""
Realized coordinates in the Weyl algebra
========================================

Build the noncommutative coordinates for two choices of f(B), then check the
defining commutators exactly at fourth order in the deformation.
"""
from fractions import Fraction

from kappa_snyder import DeformParams, RealizationSpec, build_frame, verify_algebra, verify_snyder
from kappa_snyder.weyl import weyl_commutator

params = DeformParams([Fraction(1, 3), Fraction(-1, 5), Fraction(2, 7)], Fraction(3, 11))

# %% first-order part of xhat_0 is the same for every realization
for spec in (RealizationSpec.maggiore(), RealizationSpec.unit()):
    frame = build_frame(spec, params, order=4)
    print(spec.label, "xhat_0 at eps^1:", frame.xhat[0].eps_part(1))

# %% the commutator [xhat_0, xhat_1] is linear in xhat plus s M
frame = build_frame(RealizationSpec.maggiore(), params, order=4)
c = weyl_commutator(frame.xhat[0], frame.xhat[1])
print("terms in [xhat_0, xhat_1]:", len(c.terms))

# %% every identity at once, exact rational arithmetic
for spec in (RealizationSpec.maggiore(), RealizationSpec.unit(), RealizationSpec.general_u(Fraction(1, 3))):
    frame = build_frame(spec, params, order=4)
    rep = verify_algebra(frame)
    sny = verify_snyder(frame)
    print(f"{spec.label:10s} relations={len(rep.relations()):2d} residuals={len(rep.residuals):4d} "
          f"all zero={rep.ok and sny.ok}")
