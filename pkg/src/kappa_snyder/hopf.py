"""Star products, the associator, nested compositions and the Lorentz Leibniz rule.

Plane waves compose through the momentum law D(k, q). Polynomials are
multiplied with the bidifferential expansion

    (f * g)(X) = exp(i X_alpha delta^alpha(-i D_Y, -i D_Z)) f(Y) g(Z) |_{Y=Z=X}

where delta = D(k, q) - k - q is the second-order composition law of the
family f(B) = 1 - uB. Polynomial fields are X-only WeylOps.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .momentum import (_eta, _mdot, _box_value, _sqrt_checked, _vec, compose,
                       kvec_inverse, kvec_maggiore, p_exact_maggiore)
from .numerics import I, DeformParams, RealizationSpec, metric, to_exact
from .realizations import build_xhat
from .weyl import WeylAlgebra, WeylOp, weyl_act

__all__ = ["PlaneWave", "star_plane_waves", "associator_defect", "compose_nested",
           "lorentz_leibniz_defect", "composition_jacobians",
           "star_poly", "hat_of", "star_poly_oracle", "monomials", "lift",
           "lorentz_leibniz_exact"]


@dataclass(frozen=True)
class PlaneWave:
    momentum: np.ndarray
    amplitude: complex = 1.0


def star_plane_waves(spec: RealizationSpec, params: DeformParams, f: PlaneWave, g: PlaneWave,
                     method: str = "auto") -> PlaneWave:
    res = compose(spec, params, f.momentum, g.momentum, method=method)
    return PlaneWave(res.value, f.amplitude * g.amplitude)


def associator_defect(spec: RealizationSpec, params: DeformParams, p, k, q,
                      method: str = "auto") -> np.ndarray:
    """D(p, D(k, q)) - D(D(p, k), q)."""
    def D(x, y):
        return compose(spec, params, x, y, method=method).value
    return D(p, D(k, q)) - D(D(p, k), q)


def compose_nested(spec: RealizationSpec, params: DeformParams, momenta: Sequence,
                   bracketing=None, method: str = "auto") -> np.ndarray:
    """Fold the composition law over a binary tree of indices into ``momenta``.

    A tree is an index or a pair (left, right). The default is the right comb
    (0, (1, (2, ...))).
    """
    momenta = [_vec(m, params.n) for m in momenta]
    if len(momenta) < 2:
        raise ValueError("need at least two momenta")
    if bracketing is None or bracketing == "right":
        bracketing = len(momenta) - 1
        for i in range(len(momenta) - 2, -1, -1):
            bracketing = (i, bracketing)
    elif bracketing == "left":
        tree = 0
        for i in range(1, len(momenta)):
            tree = (tree, i)
        bracketing = tree

    def fold(t):
        if isinstance(t, int):
            return momenta[t]
        left, right = t
        return compose(spec, params, fold(left), fold(right), method=method).value

    return fold(bracketing)


# -- Lorentz generators ---------------------------------------------------------------

_MAGGIORE = RealizationSpec.maggiore()


def _jacobian(func, x, h=1e-3):
    """Five-point central differences; columns are derivatives along x_j."""
    n = len(x)
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        cols.append((-func(x + 2 * e) + 8 * func(x + e) - 8 * func(x - e) + func(x - 2 * e)) / (12 * h))
    return np.array(cols).T


def composition_jacobians(params: DeformParams, k, q):
    """(D, dD/dk, dD/dq) for the Maggiore composition law."""
    k, q = _vec(k, params.n), _vec(q, params.n)
    x = kvec_inverse(_MAGGIORE, params, k)
    D = p_exact_maggiore(params, x, q)
    JPk = _jacobian(lambda y: p_exact_maggiore(params, y, q), x)
    JK = _jacobian(lambda y: kvec_maggiore(params, y), x)
    Jk = JPk @ np.linalg.inv(JK)
    Jq = _jacobian(lambda y: p_exact_maggiore(params, x, y), q)
    return D, Jk, Jq


def lorentz_leibniz_defect(params: DeformParams, k, q, mu: int, nu: int) -> float:
    """Norm of M ⊳ (e^{ikX} * e^{iqX}) minus the coproduct of M applied legwise.

    Both sides are a degree-one polynomial times e^{iD(k,q)X}; the returned
    value is the norm of the difference of the X_gamma coefficient vectors.
    The coproduct is

        M (x) 1 + 1 (x) M + i a_mu (D^l - i a^l box / 2) Z (x) M_{l nu} - (mu <-> nu)

    with D, Z and box evaluated at the first-leg momentum.
    """
    n = params.n
    k, q = _vec(k, n), _vec(q, n)
    eta = _eta(n)
    a = params.a_float
    c = float(params.a2 - params.s)
    D, Jk, Jq = composition_jacobians(params, k, q)

    def left_side(m, v):
        out = np.zeros(n, dtype=complex)
        out[m] += 1j * D[v]
        out[v] -= 1j * D[m]
        return out

    def leg(J, p, m, v):
        # (M_{mv} e^{ipX}) starred with the other wave: i (p_v X_m - p_m X_v)
        return 1j * (p[v] * eta * eta[m] * J[:, m] - p[m] * eta * eta[v] * J[:, v])

    k2 = _mdot(k, k, eta)
    z = 1.0 / (_mdot(a, k, eta) + _sqrt_checked(1 + c * k2, "1 + (a^2 - s) k^2"))
    box = _box_value(c, k2)
    L = (1j * k - 0.5j * a * box) * z  # lower index

    def twisted(m, v):
        out = np.zeros(n, dtype=complex)
        for lam in range(n):
            right = 1j * (q[v] * eta[lam] * Jq[:, lam] - q[lam] * eta[v] * Jq[:, v]) * eta
            out += eta[lam] * L[lam] * right
        return 1j * a[m] * out

    rhs = leg(Jk, k, mu, nu) + leg(Jq, q, mu, nu) + twisted(mu, nu) - twisted(nu, mu)
    return float(np.linalg.norm(left_side(mu, nu) - rhs))


# -- polynomial star product ---------------------------------------------------------

def _exps_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _unit(n, mu):
    return tuple(int(i == mu) for i in range(n))


def _delta_terms(u, params: DeformParams):
    """delta_mu(k, q) = D_mu - k_mu - q_mu as {(eps, kexp, qexp): coeff} per mu."""
    n = params.n
    eta = metric(n)
    a = params.a
    u = to_exact(u)
    a2 = params.a2
    c = a2 - params.s

    def dot(vec_a, var):
        # sum_al eta_al vec_al var_al as linear form {exp: coeff}
        return {_unit(n, al): eta[al] * vec_a[al] for al in range(n) if vec_a[al] != 0}

    def square(_):
        return {tuple(2 * x for x in _unit(n, al)): eta[al] for al in range(n)}

    def kq():
        return [(_unit(n, al), _unit(n, al), eta[al]) for al in range(n)]

    out = []
    for mu in range(n):
        t: dict = {}

        def add(e, ke, qe, cval):
            if cval == 0:
                return
            key = (e, ke, qe)
            t[key] = t.get(key, 0) + cval

        km, qm = _unit(n, mu), _unit(n, mu)
        # first order: k (aq) - a (kq)
        for qe, cv in dot(a, "q").items():
            add(1, km, qe, cv)
        for ke, qe, cv in kq():
            add(1, ke, qe, -a[mu] * cv)
        # second order
        for ke, qe, cv in kq():  # q_mu (kq) and k_mu (kq) and a_mu (kq)(ak)
            add(2, ke, _exps_add(qe, qm), -(1 - 2 * u) * c * cv)
            add(2, _exps_add(ke, km), qe, (-a2 / 2 - (1 - 4 * u) * c / 2) * cv)
            for ke2, cv2 in dot(a, "k").items():
                add(2, _exps_add(ke, ke2), qe, a[mu] * cv * cv2)
        for ke, cv in square("k").items():  # q_mu k^2 and a_mu (aq) k^2
            add(2, ke, qm, -(1 - 2 * u) * c * cv / 2)
            for qe, cv2 in dot(a, "q").items():
                add(2, ke, qe, -a[mu] * cv * cv2 / 2)
        for qe, cv in square("q").items():  # k_mu q^2
            add(2, km, qe, u * c * cv)
        out.append({k_: v for k_, v in t.items() if v != 0})
    return out


_NEG_I_POWERS = (mpq(1), -I, mpq(-1), I)


def _star_operator(u, params: DeformParams, order: int) -> dict:
    """exp(i X_alpha delta^alpha(-i D_Y, -i D_Z)) as {(eps, xexp, yexp, zexp): coeff}."""
    n = params.n
    eta = metric(n)
    T: dict = {}
    for al, terms in enumerate(_delta_terms(u, params)):
        for (e, ke, qe), c in terms.items():
            deg = sum(ke) + sum(qe)
            coeff = I * eta[al] * c * _NEG_I_POWERS[deg % 4]
            key = (e, _unit(n, al), ke, qe)
            T[key] = T.get(key, 0) + coeff
    zero = (0,) * n
    result = {(0, zero, zero, zero): mpq(1)}
    power = {(0, zero, zero, zero): mpq(1)}
    for m in range(1, order + 1):
        nxt: dict = {}
        for (e1, x1, y1, z1), c1 in power.items():
            for (e2, x2, y2, z2), c2 in T.items():
                if e1 + e2 > order:
                    continue
                key = (e1 + e2, _exps_add(x1, x2), _exps_add(y1, y2), _exps_add(z1, z2))
                nxt[key] = nxt.get(key, 0) + c1 * c2
        power = {k_: v for k_, v in nxt.items() if v != 0}
        for key, c in power.items():
            result[key] = result.get(key, 0) + c * mpq(1, factorial(m))
    return {k_: v for k_, v in result.items() if v != 0}


def star_poly(f: WeylOp, g: WeylOp, u, params: DeformParams) -> WeylOp:
    """Star product of two polynomials at the truncation order of their algebra (at most 2)."""
    if f.order > 2:
        raise ValueError("the polynomial star product is available to second order only")
    if not (f.is_polynomial() and g.is_polynomial()):
        raise ValueError("star_poly expects X-only polynomials")
    W = WeylAlgebra(f.n, f.order, f.signs)
    zero = (0,) * f.n
    out = W.zero
    for (e, xe, ye, ze), c in _star_operator(u, params, f.order).items():
        fy = weyl_act(W.monomial(zero, ye), f) if any(ye) else f
        gz = weyl_act(W.monomial(zero, ze), g) if any(ze) else g
        if fy.is_zero() or gz.is_zero():
            continue
        out = out + W.monomial(xe, None, c, e) * fy * gz
    return out


def monomials(n: int, max_degree: int) -> list:
    """All exponent tuples of total degree <= max_degree, in graded order."""
    out = []

    def rec(prefix, left, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, slots - 1)

    for d in range(max_degree + 1):
        rec([], d, n)
    return sorted(set(out), key=lambda e: (sum(e), tuple(-x for x in e)))


def hat_of(xhat: Sequence[WeylOp], exps: Sequence[int], memo: dict | None = None) -> WeylOp:
    """The symmetrized xhat-polynomial whose action on 1 is the monomial X^exps."""
    memo = {} if memo is None else memo
    exps = tuple(exps)
    if exps in memo:
        return memo[exps]
    W1 = xhat[0]
    one = W1.scalar(1)
    word = [mu for mu, e in enumerate(exps) for _ in range(e)]
    if not word:
        memo[exps] = one
        return one
    sym = W1.scalar(0)
    perms = set(permutations(word))
    for p in perms:
        prod = one
        for mu in p:
            prod = prod * xhat[mu]
        sym = sym + prod
    sym = sym * mpq(1, len(perms))
    image = weyl_act(sym, one)
    correction = W1.scalar(0)
    for t in image.iter_terms():
        if t.x_exp == exps:
            assert t.coeff.coeffs[0] == 1 and not any(t.coeff.coeffs[1:])
            continue
        for e, c in enumerate(t.coeff.coeffs):
            if c != 0:
                correction = correction + (hat_of(xhat, t.x_exp, memo) * c).graded(e)
    memo[exps] = sym - correction
    return memo[exps]


def star_poly_oracle(f: WeylOp, g: WeylOp, u, params: DeformParams, memo: dict | None = None) -> WeylOp:
    """f_hat ⊳ g with f_hat the symmetrized lift of f in the realization f(B) = 1 - uB."""
    xhat = build_xhat(RealizationSpec.general_u(Fraction(u)), params, f.order)
    return weyl_act(lift(xhat, f, memo), g)


def lift(xhat: Sequence[WeylOp], f: WeylOp, memo: dict | None = None) -> WeylOp:
    """Symmetrized xhat-polynomial acting on 1 as the polynomial f."""
    memo = {} if memo is None else memo
    out = f.scalar(0)
    for t in f.iter_terms():
        for e, c in enumerate(t.coeff.coeffs):
            if c != 0:
                out = out + (hat_of(xhat, t.x_exp, memo) * c).graded(e)
    return out


def lorentz_leibniz_exact(params: DeformParams, order: int = 3, degree: int = 3) -> dict:
    """Exact residual of the Lorentz Leibniz rule on polynomial pairs (Maggiore).

    For all monomials f, g of degree <= ``degree`` compares M ⊳ (f * g) with
    the coproduct applied legwise, f * g = f_hat ⊳ g. Returns
    {eps power: largest |coefficient|} of the nonzero residual parts; an
    empty dict means the rule holds exactly at this truncation.
    """
    from .realizations import build_frame

    frame = build_frame(_MAGGIORE, params, order, with_inverse=False)
    W, n, eta, a = frame.W, frame.n, frame.W.signs, params.a
    memo: dict = {}

    def star(f, g):
        return weyl_act(lift(frame.xhat, f, memo), g)

    legs = [((W.D[lam] * eta[lam] - (frame.box * (I * a[lam] * eta[lam] * mpq(1, 2))).graded(1))
             * frame.Z) for lam in range(n)]
    worst: dict = {}
    monos = monomials(n, degree)
    for e1 in monos:
        f = W.monomial(e1)
        for e2 in monos:
            g = W.monomial(e2)
            fg = star(f, g)
            for m in range(n):
                for v in range(m + 1, n):
                    M = frame.M
                    rhs = star(weyl_act(M[m][v], f), g) + star(f, weyl_act(M[m][v], g))
                    for mm, vv, sign in ((m, v, 1), (v, m, -1)):
                        if a[mm] == 0:
                            continue
                        for lam in range(n):
                            term = star(weyl_act(legs[lam], f), weyl_act(M[lam][vv], g))
                            rhs = rhs + (term * (I * a[mm] * sign)).graded(1)
                    diff = weyl_act(M[m][v], fg) - rhs
                    for (e, _, _), c in diff.terms.items():
                        worst[e] = max(worst.get(e, 0.0), abs(complex(c)))
    return worst
