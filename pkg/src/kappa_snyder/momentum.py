"""Momentum space: the flow P^(t)(k, q), the map K, composition of momenta, antipodes.

Vectors are lower-index numpy arrays with the time component first. The
composition law is D(k, q) = P(K^-1(k), q), where P solves

    dP_mu/dt = Phi_{mu alpha}(iP) k^alpha,    P(0) = q,

and K(k) = P(k, 0). The Maggiore realization has a closed-form solution;
every other realization goes through a fixed-step RK4 integrator that works
on batches of trajectories at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import DeformParams, RealizationSpec, metric

__all__ = [
    "DomainError", "ConvergenceError", "ComposeResult", "check_domain",
    "phi_matrix", "flow_rhs", "rk4_flow", "compose_ode",
    "w_functions", "p_exact_maggiore", "kvec_maggiore",
    "p_of", "kvec", "kvec_inverse", "compose", "compose_closed",
    "compose_perturbative", "kvec_perturbative", "kvec_inverse_perturbative",
    "antipode", "antipode_perturbative", "zinv_of_k", "box_of_k",
    "newton_solve", "compose_from_coproduct_expansion",
]

DEFAULT_STEPS = 1000


class DomainError(ValueError):
    """Input outside the region where the square roots are real."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ComposeResult:
    value: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)


def _vec(x, n: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or (n is not None and v.shape[0] != n):
        raise ValueError(f"expected a vector of length {n}, got shape {v.shape}")
    return v


def _eta(n: int) -> np.ndarray:
    return np.array(metric(n), dtype=float)


def _mdot(u, v, eta):
    return np.sum(eta * u * v, axis=-1)


def _sqrt_checked(x, what: str):
    if np.any(np.asarray(x) < 0):
        raise DomainError(f"{what} is negative; no real square root")
    return np.sqrt(x)


def check_domain(spec: RealizationSpec, params: DeformParams, *momenta) -> None:
    """Maggiore momenta must satisfy 1 + (a^2 - s) k^2 > 0; other realizations pass."""
    if spec.kind != "maggiore":
        return
    n = params.n
    c = float(params.a2 - params.s)
    eta = _eta(n)
    for k in momenta:
        k = _vec(k, n)
        if not 1 + c * _mdot(k, k, eta) > 0:
            raise DomainError("1 + (a^2 - s) k^2 must be positive for the Maggiore realization")


# -- the flow -----------------------------------------------------------------

def phi_matrix(spec: RealizationSpec, params: DeformParams, P) -> np.ndarray:
    """Phi_{mu alpha} evaluated at D = iP."""
    n = params.n
    P = _vec(P, n)
    eta = _eta(n)
    a, c = params.a_float, float(params.a2 - params.s)
    B = -c * _mdot(P, P, eta)
    if spec.kind == "maggiore" and B > 1:
        raise DomainError("1 + (a^2 - s) P^2 is negative")
    return (np.diag(eta) * (_mdot(a, P, eta) + spec.f(B))
            - np.outer(a, P) + c * spec.gamma2(B) * np.outer(P, P))


def flow_rhs(spec: RealizationSpec, a: np.ndarray, c: float, k: np.ndarray,
             P: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Phi(iP) k for batches: k, P have shape (m, n)."""
    B = -c * _mdot(P, P, eta)
    if spec.kind == "maggiore" and np.any(B > 1):
        raise DomainError("1 + (a^2 - s) P^2 became negative along the flow")
    kP = _mdot(k, P, eta)
    return (k * (_mdot(a, P, eta) + spec.f(B))[:, None]
            - a * kP[:, None]
            + c * P * (kP * spec.gamma2(B))[:, None])


def rk4_flow(spec: RealizationSpec, params: DeformParams, k, q,
             steps: int = DEFAULT_STEPS, t_end: float = 1.0) -> np.ndarray:
    """Classical RK4 for P^(t), vectorized over the leading axis of k and q."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    k = np.atleast_2d(np.asarray(k, dtype=float))
    P = np.atleast_2d(np.asarray(q, dtype=float)).copy()
    k = np.broadcast_to(k, P.shape) if k.shape[0] == 1 else k
    eta = _eta(params.n)
    a, c = params.a_float, float(params.a2 - params.s)
    h = t_end / steps
    for _ in range(steps):
        k1 = flow_rhs(spec, a, c, k, P, eta)
        k2 = flow_rhs(spec, a, c, k, P + 0.5 * h * k1, eta)
        k3 = flow_rhs(spec, a, c, k, P + 0.5 * h * k2, eta)
        k4 = flow_rhs(spec, a, c, k, P + h * k3, eta)
        P = P + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return P


def compose_ode(spec: RealizationSpec, params: DeformParams, k, q,
                steps: int = DEFAULT_STEPS, tol: float = 1e-9) -> ComposeResult:
    """P(k, q) at t = 1 with a Richardson error estimate from a 2*steps run."""
    n = params.n
    k, q = _vec(k, n), _vec(q, n)
    coarse = rk4_flow(spec, params, k, q, steps)[0]
    fine = rk4_flow(spec, params, k, q, 2 * steps)[0]
    err = float(np.linalg.norm(coarse - fine)) * 16.0 / 15.0
    return ComposeResult(coarse, "ode", {"residual": err, "ode_steps": steps,
                                         "newton_iters": 0, "converged": err <= tol,
                                         "richardson": fine + (fine - coarse) / 15.0})


# -- the Maggiore closed form -----------------------------------------------------

def w_functions(W2, t: float = 1.0):
    """cosh(tW), sinh(tW)/W and (cosh(tW) - 1)/W^2 as real functions of W^2."""
    W2 = np.asarray(W2, dtype=float)
    x = t * t * W2
    small = np.abs(x) < 1e-8
    w = np.sqrt(np.abs(np.where(small, 1.0, x)))
    pos = x > 0
    ch = np.where(pos, np.cosh(w), np.cos(w))
    shc = np.where(pos, np.sinh(w), np.sin(w)) / w
    half = np.where(pos, np.sinh(w / 2), np.sin(w / 2)) / w
    chm1 = 2.0 * half * half
    ch = np.where(small, 1 + x / 2 + x * x / 24, ch)
    shc = t * np.where(small, 1 + x / 6 + x * x / 120, shc)
    chm1 = t * t * np.where(small, 0.5 + x / 24 + x * x / 720, chm1)
    return ch, shc, chm1


def p_exact_maggiore(params: DeformParams, k, q, t: float = 1.0) -> np.ndarray:
    """Closed-form P^(t)(k, q) for f(B) = sqrt(1 - B); batched over rows."""
    single = np.ndim(k) == 1 and np.ndim(q) == 1
    k = np.atleast_2d(np.asarray(k, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    eta = _eta(params.n)
    a, s = params.a_float, params.s_float
    c = float(params.a2 - params.s)
    zq = _mdot(a, q, eta) + _sqrt_checked(1 + c * _mdot(q, q, eta), "1 + (a^2 - s) q^2")
    ak, kq, k2 = _mdot(a, k, eta), _mdot(k, q, eta), _mdot(k, k, eta)
    _, shc, chm1 = w_functions(ak * ak - s * k2, t)
    lin = k * zq[:, None] - a * kq[:, None]
    quad = ((k * ak[:, None] - a * k2[:, None]) * zq[:, None]
            + a * (ak * kq)[:, None] - s * k * kq[:, None])
    out = q + lin * shc[:, None] + quad * chm1[:, None]
    return out[0] if single else out


def kvec_maggiore(params: DeformParams, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return p_exact_maggiore(params, k, np.zeros_like(k))


def p_of(spec: RealizationSpec, params: DeformParams, k, q,
         steps: int = DEFAULT_STEPS) -> np.ndarray:
    """P(k, q) for batches of rows: closed form for Maggiore, RK4 otherwise."""
    if spec.kind == "maggiore":
        return np.atleast_2d(p_exact_maggiore(params, np.atleast_2d(k), np.atleast_2d(q)))
    return rk4_flow(spec, params, k, q, steps)


def kvec(spec: RealizationSpec, params: DeformParams, k,
         steps: int = DEFAULT_STEPS) -> np.ndarray:
    """K(k) = P(k, 0)."""
    k = _vec(k, params.n)
    return p_of(spec, params, k, np.zeros_like(k), steps)[0]


# -- Newton ---------------------------------------------------------------------

def newton_solve(func: Callable[[np.ndarray], np.ndarray], target, x0,
                 tol: float = 1e-12, h: float = 1e-7, max_iter: int = 50):
    """Solve func(x) = target; func maps an (m, n) batch to (m, n).

    The Jacobian is a central finite difference with step h, evaluated in the
    same batch as the residual. Returns (x, residual norm, iterations).
    Once the residual is below ``tol`` the iteration continues while it keeps
    shrinking, so round-off in later steps stays well inside the tolerance.
    """
    target = np.asarray(target, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    n = x.shape[0]
    E = np.eye(n) * h
    prev = np.inf
    best = (np.inf, x, 0)
    for it in range(max_iter + 1):
        pts = np.vstack([x[None, :], x + E, x - E])
        vals = func(pts)
        r = vals[0] - target
        res = float(np.linalg.norm(r))
        if res < best[0]:
            best = (res, x.copy(), it)
        if res <= tol and (res <= 1e-3 * tol or res > 0.5 * prev):
            break
        if it == max_iter:
            break
        prev = res
        J = ((vals[1:n + 1] - vals[n + 1:]) / (2 * h)).T
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e14:
            raise ConvergenceError(f"degenerate Jacobian at x = {x}")
        x = x - np.linalg.solve(J, r)
    res, x, it = best
    if res > tol:
        raise ConvergenceError(f"Newton did not converge in {max_iter} iterations (residual {res:.3e})")
    return x, res, it


def kvec_inverse(spec: RealizationSpec, params: DeformParams, k, tol: float = 1e-12,
                 steps: int = DEFAULT_STEPS, with_info: bool = False):
    """K^-1(k) by Newton from the initial guess k."""
    k = _vec(k, params.n)
    check_domain(spec, params, k)

    def K(pts):
        return p_of(spec, params, pts, np.zeros_like(pts), steps)

    x, res, it = newton_solve(K, k, k, tol)
    return (x, res, it) if with_info else x


def compose(spec: RealizationSpec, params: DeformParams, k, q, method: str = "auto",
            tol: float = 1e-12, steps: int = DEFAULT_STEPS) -> ComposeResult:
    """D(k, q) = P(K^-1(k), q).

    ``exact`` uses the Maggiore closed form, ``ode`` the integrator; ``auto``
    picks the closed form when it exists.
    """
    n = params.n
    k, q = _vec(k, n), _vec(q, n)
    check_domain(spec, params, k, q)
    if method == "auto":
        method = "exact" if spec.kind == "maggiore" else "ode"
    if method == "exact":
        if spec.kind != "maggiore":
            raise ValueError("the exact path exists only for the Maggiore realization")
        x, res, it = kvec_inverse(spec, params, k, tol, with_info=True)
        val = p_exact_maggiore(params, x, q)
        return ComposeResult(val, "exact", {"residual": res, "newton_iters": it, "ode_steps": 0})
    if method == "ode":
        ode_spec = spec
        x, res, it = newton_solve(
            lambda pts: rk4_flow(ode_spec, params, pts, np.zeros_like(pts), steps), k, k, tol)
        val = rk4_flow(spec, params, x, q, steps)[0]
        return ComposeResult(val, "ode", {"residual": res, "newton_iters": it, "ode_steps": steps})
    raise ValueError(f"unknown method {method!r}")


# -- special cases in closed form ------------------------------------------------------

def _box_value(c: float, k2):
    """(2/c)(1 - sqrt(1 + c k^2)) written without the removable 1/c."""
    root = _sqrt_checked(1 + c * k2, "1 + (a^2 - s) k^2")
    return -2.0 * k2 / (1.0 + root)


def compose_closed(case: str, params: DeformParams, k, q) -> np.ndarray:
    """Composition law of the three cases with a closed form.

    The operator coproducts are turned into momentum laws with D -> i k on the
    left factor, D -> i q on the right, and D(k, q) = -i Delta D.

    ``kappa`` (s = 0):
        D = k Zinv(q) + q - a (kq) Z(k) + 1/2 a (aq) box(k) Z(k)
    ``snyder-maggiore`` (a = 0):
        D = q + k sqrt(1 - s q^2) - s k (kq) / (1 + sqrt(1 - s k^2))
    ``snyder-unit`` (a = 0):
        D = [k (1 - s (kq) / (1 + sqrt(1 + s k^2))) + q sqrt(1 + s k^2)] / (1 - s (kq))
    """
    n = params.n
    k, q = _vec(k, n), _vec(q, n)
    eta = _eta(n)
    a, s = params.a_float, params.s_float
    kq, k2, q2 = _mdot(k, q, eta), _mdot(k, k, eta), _mdot(q, q, eta)
    if case == "kappa":
        if params.s != 0:
            raise ValueError("the kappa closed form needs s = 0")
        a2 = float(params.a2)
        zinv_q = _mdot(a, q, eta) + _sqrt_checked(1 + a2 * q2, "1 + a^2 q^2")
        z_k = 1.0 / (_mdot(a, k, eta) + _sqrt_checked(1 + a2 * k2, "1 + a^2 k^2"))
        box_k = _box_value(a2, k2)
        return k * zinv_q + q - a * kq * z_k + 0.5 * a * _mdot(a, q, eta) * box_k * z_k
    if any(x != 0 for x in params.a):
        raise ValueError(f"the {case} closed form needs a = 0")
    if case == "snyder-maggiore":
        return (q + k * _sqrt_checked(1 - s * q2, "1 - s q^2")
                - s * k * kq / (1 + _sqrt_checked(1 - s * k2, "1 - s k^2")))
    if case == "snyder-unit":
        root = _sqrt_checked(1 + s * k2, "1 + s k^2")
        den = 1 - s * kq
        if den == 0:
            raise DomainError("1 - s (kq) vanishes")
        return (k * (1 - s * kq / (1 + root)) + q * root) / den
    raise ValueError(f"unknown closed case {case!r}")


def zinv_of_k(params: DeformParams, k) -> tuple:
    """Z^-1(k) from its definition and from K^-1(k); the two must agree."""
    n = params.n
    k = _vec(k, n)
    eta = _eta(n)
    a, s, c = params.a_float, params.s_float, float(params.a2 - params.s)
    left = _mdot(a, k, eta) + _sqrt_checked(1 + c * _mdot(k, k, eta), "1 + (a^2 - s) k^2")
    x = kvec_inverse(RealizationSpec.maggiore(), params, k)
    ax = _mdot(a, x, eta)
    ch, shc, _ = w_functions(ax * ax - s * _mdot(x, x, eta))
    return float(left), float(ch + ax * shc)


def box_of_k(params: DeformParams, k) -> tuple:
    """box(k) from its definition and from K^-1(k); the two must agree."""
    n = params.n
    k = _vec(k, n)
    eta = _eta(n)
    a, s, c = params.a_float, params.s_float, float(params.a2 - params.s)
    left = _box_value(c, _mdot(k, k, eta))
    x = kvec_inverse(RealizationSpec.maggiore(), params, k)
    ax = _mdot(a, x, eta)
    _, _, chm1 = w_functions(ax * ax - s * _mdot(x, x, eta))
    return float(left), float(-2.0 * _mdot(x, x, eta) * chm1)


# -- second-order formulas for f = 1 - uB ------------------------------------------------

def _pert_setup(params: DeformParams, *vecs):
    n = params.n
    eta = _eta(n)
    vs = [_vec(v, n) for v in vecs]
    a = params.a_float
    a2 = float(params.a2)
    c = a2 - params.s_float
    return eta, a, a2, c, vs


def kvec_perturbative(u, params: DeformParams, k) -> np.ndarray:
    eta, a, a2, c, (k,) = _pert_setup(params, k)
    u = float(u)
    ak, k2 = _mdot(a, k, eta), _mdot(k, k, eta)
    return (k * (1 + ak / 2 + ak * ak / 6 - a2 * k2 / 6 - (1 - 3 * u) * c * k2 / 3)
            - a * k2 / 2)


def kvec_inverse_perturbative(u, params: DeformParams, k) -> np.ndarray:
    eta, a, a2, c, (k,) = _pert_setup(params, k)
    u = float(u)
    ak, k2 = _mdot(a, k, eta), _mdot(k, k, eta)
    return (k * (1 - ak / 2 + ak * ak / 3 - a2 * k2 / 12 + (1 - 3 * u) * c * k2 / 3)
            + a * k2 / 2 - a * ak * k2 / 4)


def compose_perturbative(u, params: DeformParams, k, q) -> np.ndarray:
    eta, a, a2, c, (k, q) = _pert_setup(params, k, q)
    u = float(u)
    ak, aq = _mdot(a, k, eta), _mdot(a, q, eta)
    kq, k2, q2 = _mdot(k, q, eta), _mdot(k, k, eta), _mdot(q, q, eta)
    return (q * (1 - (1 - 2 * u) * c * kq - 0.5 * (1 - 2 * u) * c * k2)
            + k * (1 + aq + u * c * q2 - 0.5 * a2 * kq - 0.5 * (1 - 4 * u) * c * kq)
            + a * (kq * (ak - 1) - 0.5 * aq * k2))


def antipode_perturbative(params: DeformParams, k) -> np.ndarray:
    """Second-order antipode for a purely timelike a = (a0, 0, ..., 0).

    Obtained by solving D(S, k) = 0 order by order with the second-order
    composition law; u and s drop out at this order:

        S_i = -k_i [1 + a0 k0 + (a0^2 / 2)(k0^2 + sum_j k_j^2)]
        S_0 = -k0 (1 + a0^2 sum_j k_j^2) - a0 sum_j k_j^2
    """
    if any(x != 0 for x in params.a[1:]):
        raise ValueError("the perturbative antipode needs a timelike a = (a0, 0, ..., 0)")
    n = params.n
    k = _vec(k, n)
    a0 = params.a_float[0]
    k0, ks = k[0], k[1:]
    kk = float(np.dot(ks, ks))
    out = np.empty(n)
    out[1:] = -ks * (1 + a0 * k0 + 0.5 * a0 * a0 * (k0 * k0 + kk))
    out[0] = -k0 * (1 + a0 * a0 * kk) - a0 * kk
    return out


def compose_from_coproduct_expansion(params: DeformParams, k, q) -> np.ndarray:
    """Second-order operator coproduct of D read as a momentum law.

    Delta D = D(x)1 + 1(x)D - i D(x)aD + i a D_l(x)D^l - (a^2 - s)/2 D(x)D^2
              - a (aD) D_l(x)D^l + a/2 D^2(x)aD + s/2 D D_l(x)D^l
    with D -> i k on the left factor, D -> i q on the right, and the law
    equal to -i Delta D.
    """
    eta, a, a2, c, (k, q) = _pert_setup(params, k, q)
    s = params.s_float
    ik, iq = 1j * k, 1j * q
    aD_l, aD_r = _mdot(a, ik, eta), _mdot(a, iq, eta)
    DD, D2_l, D2_r = _mdot(ik, iq, eta), _mdot(ik, ik, eta), _mdot(iq, iq, eta)
    delta = (ik + iq - 1j * ik * aD_r + 1j * a * DD - 0.5 * c * ik * D2_r
             - a * aD_l * DD + 0.5 * a * D2_l * aD_r + 0.5 * s * ik * DD)
    out = -1j * delta
    return out.real


# -- antipode -------------------------------------------------------------------

def antipode(spec: RealizationSpec, params: DeformParams, k, tol: float = 1e-12,
             steps: int = DEFAULT_STEPS) -> ComposeResult:
    """S(k) with D(S(k), k) = 0.

    Solves P(y, k) = 0 for y = K^-1(S) and maps back with K, which avoids a
    nested inversion. The mirror condition D(k, S(k)) = 0 is evaluated and
    reported alongside.
    """
    n = params.n
    k = _vec(k, n)
    check_domain(spec, params, k)
    y, res, it = newton_solve(lambda pts: p_of(spec, params, pts, np.broadcast_to(k, pts.shape), steps),
                              np.zeros(n), -k, tol)
    S = kvec(spec, params, y, steps)
    left = float(np.linalg.norm(p_of(spec, params, y, k, steps)[0]))
    mirror = compose(spec, params, k, S, tol=tol, steps=steps).value
    right = float(np.linalg.norm(mirror))
    return ComposeResult(S, "exact" if spec.kind == "maggiore" else "ode",
                         {"residual": max(left, right), "left_residual": left,
                          "mirror_residual": right, "newton_iters": it,
                          "ode_steps": 0 if spec.kind == "maggiore" else steps})
