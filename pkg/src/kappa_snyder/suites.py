"""Verification suites shared by the command line and the demos."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations

import numpy as np

from . import hopf, momentum
from .ncorder import NCAlgebra, circ_project, invariant_I2, lorentz_defect, pbw_defect
from .numerics import I, DeformParams, RealizationSpec
from .realizations import build_frame, verify_algebra, verify_snyder
from .weyl import WeylAlgebra

__all__ = ["CheckReport", "RunConfig", "run_verify", "random_momenta"]


@dataclass
class CheckReport:
    name: str
    max_residual: float
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"check": self.name, "max_residual": float(self.max_residual),
                "pass": bool(self.passed), "details": self.details}


@dataclass(frozen=True)
class RunConfig:
    dim: int
    a: tuple
    s: Fraction
    realization: RealizationSpec
    order: int = 4
    seed: int = 1
    tol: float = 1e-9
    samples: int = 4

    def __post_init__(self):
        if len(self.a) != self.dim:
            raise ValueError(f"a has {len(self.a)} components but dim is {self.dim}")
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    @property
    def params(self) -> DeformParams:
        return DeformParams(self.a, self.s)


def random_momenta(rng: np.random.Generator, count: int, n: int, radius: float = 0.5) -> np.ndarray:
    """Points drawn uniformly from a cube and pulled into the Euclidean ball of ``radius``."""
    pts = rng.uniform(-1.0, 1.0, (count, n))
    norms = np.maximum(1.0, np.linalg.norm(pts, axis=1))
    return radius * pts / norms[:, None]


def _exact_report(name, residuals, seed) -> CheckReport:
    bad = [r for r in residuals if not r.ok]
    worst = max((r.value.max_abs_coeff() for r in residuals), default=0.0)
    details = {"count": len(residuals), "seed": seed}
    if bad:
        details["first_failure"] = {"relation": bad[0].relation, "indices": repr(bad[0].indices)}
    return CheckReport(name, worst, not bad, details)


def _realization_checks(cfg: RunConfig) -> list:
    frame = build_frame(cfg.realization, cfg.params, cfg.order)
    out = []
    for label, rep in (("realizations", verify_algebra(frame)), ("realizations.snyder", verify_snyder(frame))):
        groups: dict = {}
        for r in rep.residuals:
            groups.setdefault(r.relation, []).append(r)
        for rel, items in groups.items():
            out.append(_exact_report(f"{label}.{rel}", items, cfg.seed))
    return out


def _nc_checks(cfg: RunConfig) -> list:
    if cfg.realization.kind != "maggiore":
        return []
    order = min(cfg.order, 2)
    alg = NCAlgebra(build_frame(cfg.realization, cfg.params, order, with_inverse=False))
    n, a = cfg.dim, cfg.params.a
    out = []
    excess = 0
    count = 0
    for m in (1, 2, 3):
        for idx in combinations_with_replacement(range(n), m):
            for perm in set(permutations(range(m))):
                proj = circ_project(pbw_defect(alg, perm, idx))
                excess = max(excess, proj.x_degree() - (m - 1))
                count += 1
    out.append(CheckReport("nc_order.pbw_degree", float(excess), excess <= 0,
                           {"count": count, "order": order}))
    worst = 0.0
    for m, v in combinations(range(n), 2):
        comm = alg.x[m] * alg.x[v] - alg.x[v] * alg.x[m]
        expected = ((alg.x[v] * a[m] - alg.x[m] * a[v]) * I).graded(1)
        diff = circ_project(comm) - expected
        worst = max(worst, max((abs(complex(c)) for c in diff.terms.values()), default=0.0))
    out.append(CheckReport("nc_order.commutator_projection", worst, worst == 0, {"order": order}))
    I2, closed = invariant_I2(alg)
    diff = I2 - closed
    worst = max((abs(complex(c)) for c in diff.terms.values()), default=0.0)
    out.append(CheckReport("nc_order.invariant_I2", worst, worst == 0, {"order": order}))
    defects = lorentz_defect(alg, I2)
    worst = max((abs(complex(c)) for d in defects.values() for c in d.terms.values()), default=0.0)
    out.append(CheckReport("nc_order.lorentz_defect", worst, worst == 0, {"order": order}))
    return out


def _momentum_checks(cfg: RunConfig, rng) -> list:
    spec, p, tol = cfg.realization, cfg.params, cfg.tol
    ks = random_momenta(rng, cfg.samples, cfg.dim)
    qs = random_momenta(rng, cfg.samples, cfg.dim)
    out = []
    zero = np.zeros(cfg.dim)
    unit = 0.0
    roundtrip = 0.0
    anti = 0.0
    for k, q in zip(ks, qs):
        unit = max(unit, np.linalg.norm(momentum.compose(spec, p, k, zero).value - k),
                   np.linalg.norm(momentum.compose(spec, p, zero, q).value - q))
        x = momentum.kvec_inverse(spec, p, k)
        roundtrip = max(roundtrip, np.linalg.norm(momentum.kvec(spec, p, x) - k))
        anti = max(anti, momentum.antipode(spec, p, k).diagnostics["residual"])
    out.append(CheckReport("momentum.unit_laws", unit, unit <= tol, {"samples": cfg.samples, "seed": cfg.seed}))
    out.append(CheckReport("momentum.kvec_roundtrip", roundtrip, roundtrip <= 1e-12,
                           {"samples": cfg.samples, "seed": cfg.seed}))
    out.append(CheckReport("momentum.antipode_residuals", anti, anti <= 1e-12,
                           {"samples": cfg.samples, "seed": cfg.seed}))
    if spec.kind == "maggiore":
        ode = np.abs(momentum.rk4_flow(spec, p, ks, qs) - momentum.p_exact_maggiore(p, ks, qs)).max()
        out.append(CheckReport("momentum.ode_vs_exact", float(ode), ode <= tol,
                               {"samples": cfg.samples, "seed": cfg.seed}))
        zb = 0.0
        for k in ks:
            zl, zr = momentum.zinv_of_k(p, k)
            bl, br = momentum.box_of_k(p, k)
            zb = max(zb, abs(zl - zr), abs(bl - br))
        out.append(CheckReport("momentum.zinv_box_from_kinv", zb, zb <= 1e-10,
                               {"samples": cfg.samples, "seed": cfg.seed}))
    return out


def _hopf_checks(cfg: RunConfig, rng) -> list:
    spec, p, tol, n = cfg.realization, cfg.params, cfg.tol, cfg.dim
    out = []
    trip = random_momenta(rng, 3, n)
    assoc = float(np.linalg.norm(hopf.associator_defect(spec, p, *trip)))
    if p.s == 0:
        out.append(CheckReport("hopf.associator_vanishes", assoc, assoc <= 1e-12, {"seed": cfg.seed}))
    else:
        out.append(CheckReport("hopf.associator_nonzero", assoc, assoc > 1e-12,
                               {"seed": cfg.seed, "note": "pass means the defect is strictly positive"}))
    order = 2
    W = WeylAlgebra(n, order)
    monos = hopf.monomials(n, 2)
    mismatches = 0
    for u in (Fraction(0), Fraction(1, 2), Fraction(1)):
        memo: dict = {}
        for e1 in monos:
            for e2 in monos:
                f, g = W.monomial(e1), W.monomial(e2)
                if hopf.star_poly(f, g, u, p) != hopf.star_poly_oracle(f, g, u, p, memo):
                    mismatches += 1
    out.append(CheckReport("hopf.star_poly_vs_action", float(mismatches), mismatches == 0,
                           {"pairs": 3 * len(monos) ** 2, "order": order}))
    if spec.kind == "maggiore":
        ks = random_momenta(rng, cfg.samples, n)
        qs = random_momenta(rng, cfg.samples, n)
        worst = max(hopf.lorentz_leibniz_defect(p, k, q, m, v)
                    for k, q in zip(ks, qs) for m in range(n) for v in range(m + 1, n))
        out.append(CheckReport("hopf.lorentz_leibniz", worst, worst <= tol,
                               {"samples": cfg.samples, "seed": cfg.seed}))
        exact = hopf.lorentz_leibniz_exact(p, order=2, degree=2)
        out.append(CheckReport("hopf.lorentz_leibniz_exact_eps2", max(exact.values(), default=0.0),
                               not exact, {"order": 2, "degree": 2}))
    return out


def run_verify(cfg: RunConfig) -> list:
    """All suites for one configuration, sorted by check name."""
    rng = np.random.default_rng(cfg.seed)
    reports = (_realization_checks(cfg) + _nc_checks(cfg)
               + _momentum_checks(cfg, rng) + _hopf_checks(cfg, rng))
    return sorted(reports, key=lambda r: r.name)
