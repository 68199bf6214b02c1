"""Operator realizations of the kappa-Snyder coordinate algebra.

Coordinates are realized inside the undeformed Weyl algebra as

    xhat_mu = X_mu (-A + f(B)) + i (aX) D_mu - (a^2 - s) (XD) D_mu gamma2(B),

with ``A = i a.D`` and ``B = (a^2 - s) D^2``. Every insertion of a component
of ``a`` carries one power of the grading parameter eps and every ``s`` two,
so all operators below are finite sums truncated at ``order``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from gmpy2 import mpq

from .numerics import I, DeformParams, EpsSeries, RealizationSpec
from .weyl import WeylAlgebra, WeylOp, weyl_commutator

__all__ = [
    "gamma2", "box_kernel", "RealizedFrame", "build_frame",
    "build_xhat", "build_M", "build_Z", "build_box", "build_inverse",
    "snyder_map", "snyder_representation",
    "apply_series", "op_reciprocal",
    "Residual", "AlgebraReport", "AlgebraIdentityError", "verify_algebra",
]


class AlgebraIdentityError(AssertionError):
    pass


def gamma2(spec: RealizationSpec, order: int) -> EpsSeries:
    """Taylor series of gamma2(t) = -(1 + 2 f f')/(f - 2 t f') up to t**order."""
    F = spec.f_taylor(order + 1)
    Fp = F.derivative().truncate(order)
    F = F.truncate(order)
    num = 1 + 2 * F * Fp
    den = F - 2 * Fp.shift(1)
    return -(num * den.reciprocal())


def box_kernel(spec: RealizationSpec, order: int) -> EpsSeries:
    """Series H(t) with (1/t) * integral_0^t ds/(f(s) - s gamma2(s)) = H(t).

    The generalized d'Alembertian is then D^2 H(B): the 1/(a^2 - s) prefactor
    is absorbed by one power of B.
    """
    F = spec.f_taylor(order + 1)
    g = gamma2(spec, order + 1)
    h = (F - g.shift(1)).reciprocal()
    return EpsSeries(h.antiderivative().coeffs[1:], order)


def apply_series(taylor: EpsSeries, op: WeylOp) -> WeylOp:
    """sum_m taylor[m] op**m; ``op`` must have no eps**0 part unless taylor is short."""
    coeffs = list(taylor.coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    acc = op.scalar(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * op + op.scalar(c)
    return acc


def op_reciprocal(op: WeylOp) -> WeylOp:
    """Inverse of an operator whose eps**0 part is the unit, as a geometric series."""
    if op.eps_part(0) != op.scalar(1):
        raise ValueError("reciprocal needs an operator equal to 1 at eps**0")
    rest = op.scalar(1) - op
    acc = op.scalar(1)
    for _ in range(op.order):
        acc = op.scalar(1) + rest * acc
    return acc


@dataclass(frozen=True)
class RealizedFrame:
    """All realized operators for one (spec, params, order)."""

    spec: RealizationSpec
    params: DeformParams
    order: int
    W: WeylAlgebra
    A: WeylOp
    B: WeylOp
    f_of_B: WeylOp
    gamma2_of_B: WeylOp
    phi: WeylOp
    phi_inv: WeylOp
    xhat: tuple
    M: tuple
    box: WeylOp
    Z: WeylOp | None = None
    Zinv: WeylOp | None = None
    xinv: tuple = field(default=())

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def a2_minus_s(self):
        return self.params.a2 - self.params.s


def _basics(spec: RealizationSpec, params: DeformParams, order: int):
    W = WeylAlgebra(params.n, order)
    A = (W.contract(params.a, W.D) * I).graded(1)
    B = (W.box0() * (params.a2 - params.s)).graded(2)
    f_of_B = apply_series(spec.f_taylor(order // 2), B)
    g_of_B = apply_series(gamma2(spec, order // 2), B)
    return W, A, B, f_of_B, g_of_B


def build_xhat(spec: RealizationSpec, params: DeformParams, order: int = 4) -> tuple:
    """The realized coordinates xhat_mu, one WeylOp per index."""
    W, A, B, f_of_B, g_of_B = _basics(spec, params, order)
    return _xhat(W, params, A, f_of_B, g_of_B)


def _xhat(W, params, A, f_of_B, g_of_B):
    phi = f_of_B - A
    iaX = (W.contract(params.a, W.X) * I).graded(1)
    XD = W.dot(W.X, W.D)
    tail = (XD * g_of_B * (params.a2 - params.s)).graded(2)
    return tuple(W.X[mu] * phi + iaX * W.D[mu] - tail * W.D[mu] for mu in range(W.n))


def build_frame(spec: RealizationSpec, params: DeformParams, order: int = 4,
                with_inverse: bool = True) -> RealizedFrame:
    W, A, B, f_of_B, g_of_B = _basics(spec, params, order)
    xhat = _xhat(W, params, A, f_of_B, g_of_B)
    phi = f_of_B - A
    phi_inv = op_reciprocal(phi)
    n = params.n
    M = tuple(tuple(W.X[m] * W.D[v] - W.X[v] * W.D[m] for v in range(n)) for m in range(n))
    box = W.box0() * apply_series(box_kernel(spec, order // 2), B)
    Z = Zinv = None
    if spec.kind == "maggiore":
        Zinv, Z = phi, phi_inv
    frame = RealizedFrame(spec, params, order, W, A, B, f_of_B, g_of_B, phi, phi_inv,
                          xhat, M, box, Z, Zinv)
    if with_inverse:
        object.__setattr__(frame, "xinv", build_inverse(frame))
    return frame


def build_M(frame: RealizedFrame, mode: str = "coordinate") -> tuple:
    """Lorentz generators as an n x n nested tuple.

    ``coordinate`` gives X_mu D_nu - X_nu D_mu; ``from-xhat`` gives
    (xhat_mu D_nu - xhat_nu D_mu) / phi, which uses Z = 1/phi for the
    Maggiore realization.
    """
    W, n = frame.W, frame.n
    if mode == "coordinate":
        return frame.M
    if mode != "from-xhat":
        raise ValueError(f"unknown mode {mode!r}")
    right = frame.Z if frame.Z is not None else frame.phi_inv
    x, D = frame.xhat, W.D
    return tuple(tuple((x[m] * D[v] - x[v] * D[m]) * right for v in range(n)) for m in range(n))


def build_Z(frame: RealizedFrame) -> tuple:
    """(Z, Z^-1) with Z^-1 = -A + sqrt(1 - B); Maggiore realization only."""
    if frame.spec.kind != "maggiore":
        raise ValueError("the shift operator Z exists only for the Maggiore realization")
    return frame.Z, frame.Zinv


def build_box(frame: RealizedFrame) -> WeylOp:
    return frame.box


def build_inverse(frame: RealizedFrame) -> tuple:
    """X_mu rebuilt from the realized xhat via the inverse map.

    X_mu = [xhat_mu - i (a xhat) h D_mu + (a^2 - s)(xhat D) h D_mu gamma2] / phi
    with h = 1/(f(B) - B gamma2(B)); equals the bare X_mu when everything is
    consistent.
    """
    W, p = frame.W, frame.params
    h = op_reciprocal(frame.f_of_B - frame.B * frame.gamma2_of_B)
    a_xhat = (W.contract(p.a, frame.xhat) * I).graded(1)
    xhat_D = W.dot(frame.xhat, W.D)
    tail = (xhat_D * h * frame.gamma2_of_B * frame.a2_minus_s).graded(2)
    return tuple((frame.xhat[mu] - a_xhat * h * W.D[mu] + tail * W.D[mu]) * frame.phi_inv
                 for mu in range(frame.n))


def snyder_map(frame: RealizedFrame) -> tuple:
    """xtilde_mu = xhat_mu - i a^alpha M_{alpha mu}."""
    W, p = frame.W, frame.params
    out = []
    for mu in range(frame.n):
        col = [frame.M[al][mu] for al in range(frame.n)]
        out.append(frame.xhat[mu] - (W.contract(p.a, col) * I).graded(1))
    return tuple(out)


def snyder_representation(frame: RealizedFrame) -> tuple:
    """X_mu f(B) - (a^2 - s)(XD) D_mu gamma2(B)."""
    W = frame.W
    XD = W.dot(W.X, W.D)
    tail = (XD * frame.gamma2_of_B * frame.a2_minus_s).graded(2)
    return tuple(W.X[mu] * frame.f_of_B - tail * W.D[mu] for mu in range(frame.n))


# -- verification ------------------------------------------------------------

@dataclass(frozen=True)
class Residual:
    relation: str
    indices: tuple
    value: WeylOp

    @property
    def ok(self) -> bool:
        return self.value.is_zero()


@dataclass
class AlgebraReport:
    residuals: list = field(default_factory=list)

    def add(self, relation: str, indices: tuple, value: WeylOp):
        self.residuals.append(Residual(relation, tuple(indices), value))

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.residuals)

    @property
    def failures(self) -> list:
        return [r for r in self.residuals if not r.ok]

    @property
    def first_failure(self) -> Residual | None:
        return next(iter(self.failures), None)

    def relations(self) -> dict:
        """relation -> (number checked, number nonzero)."""
        out: dict = {}
        for r in self.residuals:
            n, bad = out.get(r.relation, (0, 0))
            out[r.relation] = (n + 1, bad + (not r.ok))
        return out

    def max_residual(self) -> float:
        return max((r.value.max_abs_coeff() for r in self.residuals), default=0.0)

    def raise_on_failure(self):
        bad = self.first_failure
        if bad is not None:
            raise AlgebraIdentityError(
                f"relation {bad.relation} fails at indices {bad.indices}: {bad.value}")


def verify_algebra(frame: RealizedFrame, jacobi: bool = True,
                   relations: Iterable[str] | None = None) -> AlgebraReport:
    """Residuals of every defining identity; each must be the zero operator."""
    W, p, n = frame.W, frame.params, frame.n
    a, s, eta = p.a, p.s, W.signs
    x, M, D = frame.xhat, frame.M, W.D
    ia = [(W.scalar(I * ai)).graded(1) for ai in a]  # i a_mu eps
    s_op = W.scalar(s).graded(2)
    wanted = set(relations) if relations is not None else None
    rep = AlgebraReport()
    cache: dict = {}

    def comm(key1, op1, key2, op2):
        if (key1, key2) in cache:
            return cache[(key1, key2)]
        if (key2, key1) in cache:
            return -cache[(key2, key1)]
        c = weyl_commutator(op1, op2)
        cache[(key1, key2)] = c
        return c

    def want(name):
        return wanted is None or name in wanted

    if want("xx"):
        for m, v in combinations(range(n), 2):
            r = comm(("x", m), x[m], ("x", v), x[v]) - (ia[m] * x[v] - ia[v] * x[m]) - s_op * M[m][v]
            rep.add("xx", (m, v), r)
    if want("MM"):
        pairs = list(combinations(range(n), 2))
        for (m, v), (l, r_) in combinations(pairs, 2):
            lhs = comm(("M", m, v), M[m][v], ("M", l, r_), M[l][r_])
            rhs = (M[m][r_] * (eta[v] * (v == l)) - M[v][r_] * (eta[m] * (m == l))
                   - M[m][l] * (eta[v] * (v == r_)) + M[v][l] * (eta[m] * (m == r_)))
            rep.add("MM", (m, v, l, r_), lhs - rhs)
    if want("Mx"):
        for m, v in combinations(range(n), 2):
            for l in range(n):
                lhs = comm(("M", m, v), M[m][v], ("x", l), x[l])
                rhs = (x[m] * (eta[v] * (v == l)) - x[v] * (eta[m] * (m == l))
                       - (ia[m] * M[v][l] - ia[v] * M[m][l]))
                rep.add("Mx", (m, v, l), lhs - rhs)
    if want("DD"):
        for m, v in combinations(range(n), 2):
            rep.add("DD", (m, v), comm(("D", m), D[m], ("D", v), D[v]))
    if want("MD"):
        for m, v in combinations(range(n), 2):
            for l in range(n):
                lhs = comm(("M", m, v), M[m][v], ("D", l), D[l])
                rhs = D[m] * (eta[v] * (v == l)) - D[v] * (eta[m] * (m == l))
                rep.add("MD", (m, v, l), lhs - rhs)
    if want("Dx"):
        g_tail = (frame.gamma2_of_B * frame.a2_minus_s).graded(2)
        for m in range(n):
            for v in range(n):
                phi_mv = frame.phi * (eta[m] * (m == v)) + ia[m] * D[v] - D[m] * D[v] * g_tail
                rep.add("Dx", (m, v), comm(("D", m), D[m], ("x", v), x[v]) - phi_mv)
    if want("trilinear"):
        for m, v in combinations(range(n), 2):
            inner = comm(("x", m), x[m], ("x", v), x[v])
            for l in range(n):
                lhs = weyl_commutator(inner, x[l])
                al = W.scalar(a[l]).graded(1)
                rhs = (al * (W.scalar(a[m]).graded(1) * x[v] - W.scalar(a[v]).graded(1) * x[m])
                       + s_op * (x[m] * (eta[v] * (v == l)) - x[v] * (eta[m] * (m == l))))
                rep.add("trilinear", (m, v, l), lhs - rhs)
    if want("box"):
        for m in range(n):
            rep.add("box-x", (m,), weyl_commutator(frame.box, x[m]) - D[m] * 2)
        for m, v in combinations(range(n), 2):
            rep.add("M-box", (m, v), weyl_commutator(M[m][v], frame.box))
    if want("M-modes"):
        alt = build_M(frame, "from-xhat")
        for m, v in combinations(range(n), 2):
            rep.add("M-modes", (m, v), alt[m][v] - M[m][v])
    if want("inverse") and frame.xinv:
        for m in range(n):
            rep.add("inverse", (m,), frame.xinv[m] - W.X[m])
    if frame.Z is not None and want("Z"):
        Z, Zi = frame.Z, frame.Zinv
        rep.add("Z*Zinv", (), Z * Zi - W.one)
        for m in range(n):
            rep.add("Zinv-x", (m,), weyl_commutator(Zi, x[m]) - (-(ia[m] * Zi) + s_op * D[m]))
            rep.add("Z-x", (m,), weyl_commutator(Z, x[m]) - (ia[m] * Z - s_op * D[m] * Z * Z))
            rep.add("Z-D", (m,), weyl_commutator(Z, D[m]))
        for m, v in combinations(range(n), 2):
            rep.add("xZx", (m, v), x[m] * Z * x[v] - x[v] * Z * x[m])
            rep.add("Zinv-M", (m, v), weyl_commutator(Zi, M[m][v]) + (ia[m] * D[v] - ia[v] * D[m]))
    if jacobi and want("jacobi"):
        gens = ([(("x", m), x[m]) for m in range(n)]
                + [(("M", m, v), M[m][v]) for m, v in combinations(range(n), 2)]
                + [(("D", m), D[m]) for m in range(n)])
        for (ka, A), (kb, B), (kc, C) in combinations(gens, 3):
            j = (weyl_commutator(comm(ka, A, kb, B), C)
                 + weyl_commutator(comm(kb, B, kc, C), A)
                 + weyl_commutator(comm(kc, C, ka, A), B))
            rep.add("jacobi", (ka, kb, kc), j)
    return rep


def verify_snyder(frame: RealizedFrame) -> AlgebraReport:
    """Identities of the mapped coordinates xtilde."""
    W, n, eta = frame.W, frame.n, frame.W.signs
    xt = snyder_map(frame)
    rep_ = snyder_representation(frame)
    M = frame.M
    c = W.scalar(frame.params.s - frame.params.a2).graded(2)
    inv_f = op_reciprocal(frame.f_of_B)
    rep = AlgebraReport()
    for m in range(n):
        rep.add("xtilde-representation", (m,), xt[m] - rep_[m])
    for m, v in combinations(range(n), 2):
        rep.add("xtilde-xtilde", (m, v), weyl_commutator(xt[m], xt[v]) - c * M[m][v])
        rep.add("M-from-xtilde", (m, v), (xt[m] * W.D[v] - xt[v] * W.D[m]) * inv_f - M[m][v])
        for l in range(n):
            rhs = xt[m] * (eta[v] * (v == l)) - xt[v] * (eta[m] * (m == l))
            rep.add("M-xtilde", (m, v, l), weyl_commutator(M[m][v], xt[l]) - rhs)
    return rep
