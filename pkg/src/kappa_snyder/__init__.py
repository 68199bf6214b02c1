"""Exact and numerical verification tools for the kappa-Snyder deformed phase space."""
from .numerics import DeformParams, RealizationSpec, EpsSeries, GaussianRational, qqi, I
from .weyl import WeylAlgebra, WeylOp, weyl_mul, weyl_commutator, weyl_act
from .realizations import (build_frame, build_xhat, build_M, build_Z, build_box,
                           build_inverse, snyder_map, verify_algebra, verify_snyder)
from .ncorder import NCAlgebra, nc_normal_order, circ_project, pbw_defect, invariant_I2
from .momentum import (ComposeResult, ConvergenceError, DomainError, antipode, compose,
                       compose_closed, compose_ode, compose_perturbative, kvec, kvec_inverse,
                       p_exact_maggiore)
from .hopf import (PlaneWave, associator_defect, compose_nested, lorentz_leibniz_defect,
                   star_plane_waves, star_poly)

__all__ = [
    "DeformParams", "RealizationSpec", "EpsSeries", "GaussianRational", "qqi", "I",
    "WeylAlgebra", "WeylOp", "weyl_mul", "weyl_commutator", "weyl_act",
    "build_frame", "build_xhat", "build_M", "build_Z", "build_box", "build_inverse",
    "snyder_map", "verify_algebra", "verify_snyder",
    "NCAlgebra", "nc_normal_order", "circ_project", "pbw_defect", "invariant_I2",
    "ComposeResult", "ConvergenceError", "DomainError", "antipode", "compose",
    "compose_closed", "compose_ode", "compose_perturbative", "kvec", "kvec_inverse",
    "p_exact_maggiore",
    "PlaneWave", "associator_defect", "compose_nested", "lorentz_leibniz_defect",
    "star_plane_waves", "star_poly",
]
