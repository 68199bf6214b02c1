"""Ordered-basis calculus in the enveloping algebra generated by xhat and D.

Elements are kept in canonical form: a word of xhat factors in ascending
coordinate order on the left, a D-monomial on the right. Two rewrite rules
suffice (Maggiore realization, where Z is available):

    xhat_nu xhat_mu -> xhat_mu xhat_nu - i(a_mu xhat_nu - a_nu xhat_mu)
                       - s (xhat_mu D_nu - xhat_nu D_mu) Z          (mu < nu)
    P(D) xhat_nu   -> xhat_nu P(D) + sum_mu dP/dD_mu Phi_{mu nu}(D)

Each rule either lowers the number of xhat factors or the number of
inversions, so rewriting terminates.
"""
from __future__ import annotations

from itertools import permutations
from typing import Iterable, Sequence

from gmpy2 import mpq

from .numerics import I, to_exact
from .realizations import RealizedFrame, op_reciprocal
from .weyl import WeylOp, unpack

__all__ = ["NCAlgebra", "NCOp", "nc_normal_order", "circ_project", "pbw_defect",
           "invariant_I2", "lorentz_defect", "all_pbw_defects", "lorentz_generator"]

_BITS = 8


def _exp(code: int, mu: int) -> int:
    return (code >> (_BITS * mu)) & ((1 << _BITS) - 1)


def _add(out: dict, key, c):
    v = out.get(key, 0) + c
    if v == 0:
        out.pop(key, None)
    else:
        out[key] = v


def _dpoly(op: WeylOp) -> dict:
    """(eps, packed D) -> coeff for an operator that is a function of D only."""
    if any(xp for _, xp, _ in op.terms):
        raise ValueError("expected a function of D alone")
    return {(e, dp): c for (e, _, dp), c in op.terms.items()}


class NCAlgebra:
    """Canonical-form arithmetic for one realized frame (Maggiore only)."""

    def __init__(self, frame: RealizedFrame):
        if frame.spec.kind != "maggiore":
            raise ValueError("ordered-basis rewriting needs Z, which exists only for the Maggiore realization")
        self.frame = frame
        self.n = frame.n
        self.order = frame.order
        W, p = frame.W, frame.params
        self._a = p.a
        self._s = p.s
        self._Z = _dpoly(frame.Z)
        g_tail = (frame.gamma2_of_B * frame.a2_minus_s).graded(2)
        eta = W.signs
        self._Phi = [[_dpoly(frame.phi * (eta[m] * (m == v))
                             + (W.D[v] * (I * p.a[m])).graded(1)
                             - W.D[m] * W.D[v] * g_tail)
                      for v in range(self.n)] for m in range(self.n)]
        self._move_memo: dict = {}
        self._order_memo: dict = {}
        self._word_weyl: dict = {(): W.one}
        self.x = [self._term(0, (mu,), 0) for mu in range(self.n)]
        self.D = [self._term(0, (), 1 << (_BITS * mu)) for mu in range(self.n)]
        self.one = self._term(0, (), 0)
        self.zero = NCOp({}, self)

    def _term(self, e, word, dp, c=1):
        return NCOp({(e, tuple(word), dp): to_exact(c)}, self)

    def scalar(self, c, eps: int = 0) -> "NCOp":
        c = to_exact(c)
        if c == 0 or eps > self.order:
            return self.zero
        return self._term(eps, (), 0, c)

    def from_weyl_dfunction(self, op: WeylOp) -> "NCOp":
        """Embed a function of D (given as a WeylOp without X) as a canonical element."""
        return NCOp({(e, (), dp): c for (e, dp), c in _dpoly(op).items()}, self)

    # -- rewriting -------------------------------------------------------
    def _move(self, d: int, word: tuple, budget: int) -> dict:
        """D^d * word -> {(eps, subword, dexp): c}; subwords keep the original order."""
        if budget < 0:
            return {}
        if not word or d == 0:
            return {(0, word, d): mpq(1)}
        key = (d, word, budget)
        hit = self._move_memo.get(key)
        if hit is not None:
            return hit
        w0, rest = word[0], word[1:]
        out: dict = {}
        for (e, sw, dd), c in self._move(d, rest, budget).items():
            _add(out, (e, (w0,) + sw, dd), c)
        for mu in range(self.n):
            k = _exp(d, mu)
            if not k:
                continue
            dm = d - (1 << (_BITS * mu))
            for (e1, dp1), c1 in self._Phi[mu][w0].items():
                if e1 > budget:
                    continue
                for (e2, sw, dd), c2 in self._move(dm + dp1, rest, budget - e1).items():
                    _add(out, (e1 + e2, sw, dd), k * c1 * c2)
        self._move_memo[key] = out
        return out

    def _order(self, word: tuple, budget: int) -> dict:
        """Canonical form of a bare xhat word: {(eps, ascending word, dexp): c}."""
        if budget < 0:
            return {}
        i = next((j for j in range(len(word) - 1) if word[j] > word[j + 1]), None)
        if i is None:
            return {(0, word, 0): mpq(1)}
        key = (word, budget)
        hit = self._order_memo.get(key)
        if hit is not None:
            return hit
        L, nu, mu, R = word[:i], word[i], word[i + 1], word[i + 2:]
        out: dict = {}
        for k, c in self._order(L + (mu, nu) + R, budget).items():
            _add(out, k, c)
        for coef, keep in ((-I * self._a[mu], nu), (I * self._a[nu], mu)):
            if coef != 0:
                for (e, w, d), c in self._order(L + (keep,) + R, budget - 1).items():
                    _add(out, (e + 1, w, d), coef * c)
        if self._s != 0:
            # -s x_mu D_nu Z + s x_nu D_mu Z, then pushed through R
            for coef, left, dvar in ((-self._s, mu, nu), (self._s, nu, mu)):
                for (e1, dz), cz in self._Z.items():
                    b1 = budget - 2 - e1
                    if b1 < 0:
                        continue
                    for (e2, sw, dd), c2 in self._move(dz + (1 << (_BITS * dvar)), R, b1).items():
                        for (e3, w, d3), c3 in self._order(L + (left,) + sw, b1 - e2).items():
                            _add(out, (2 + e1 + e2 + e3, w, d3 + dd), coef * cz * c2 * c3)
        self._order_memo[key] = out
        return out

    def mul(self, A: "NCOp", B: "NCOp") -> "NCOp":
        N = self.order
        out: dict = {}
        for (e1, w1, d1), c1 in A.terms.items():
            for (e2, w2, d2), c2 in B.terms.items():
                b = N - e1 - e2
                if b < 0:
                    continue
                for (e3, sw, dd), c3 in self._move(d1, w2, b).items():
                    for (e4, w, d4), c4 in self._order(w1 + sw, b - e3).items():
                        _add(out, (e1 + e2 + e3 + e4, w, d4 + dd + d2), c1 * c2 * c3 * c4)
        return NCOp(out, self)

    def word(self, indices: Sequence[int]) -> "NCOp":
        """Normal-ordered product xhat_{i1} ... xhat_{im}."""
        return NCOp(dict(self._order(tuple(indices), self.order)), self)

    # -- realization -----------------------------------------------------
    def realize(self, A: "NCOp") -> WeylOp:
        """Image in the Weyl algebra under the realization of the frame."""
        W = self.frame.W
        out = W.zero
        for (e, w, dp), c in A.terms.items():
            if w not in self._word_weyl:
                self._word_weyl[w] = self.realize_word(w)
            dmono = W.monomial((0,) * self.n, unpack(dp, self.n), c, e)
            out = out + self._word_weyl[w] * dmono
        return out

    def realize_word(self, w: Sequence[int]) -> WeylOp:
        out = self.frame.W.one
        for mu in w:
            out = out * self.frame.xhat[mu]
        return out


class NCOp:
    """Canonical element: {(eps, ascending xhat word, packed D exponent): coeff}."""

    __slots__ = ("terms", "alg")

    def __init__(self, terms: dict, alg: NCAlgebra):
        self.terms = {k: c for k, c in terms.items() if c != 0}
        self.alg = alg

    @property
    def n(self) -> int:
        return self.alg.n

    @property
    def order(self) -> int:
        return self.alg.order

    def is_zero(self) -> bool:
        return not self.terms

    def is_canonical(self) -> bool:
        return all(list(w) == sorted(w) for _, w, _ in self.terms)

    def x_degree(self) -> int:
        return max((len(w) for _, w, _ in self.terms), default=-1)

    def has_derivatives(self) -> bool:
        return any(d for _, _, d in self.terms)

    def __add__(self, other):
        if not isinstance(other, NCOp):
            other = self.alg.scalar(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add(out, k, c)
        return NCOp(out, self.alg)

    __radd__ = __add__

    def __neg__(self):
        return NCOp({k: -c for k, c in self.terms.items()}, self.alg)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NCOp):
            return self.alg.mul(self, other)
        other = to_exact(other)
        return NCOp({k: c * other for k, c in self.terms.items()}, self.alg)

    def __rmul__(self, other):
        return self * other

    def graded(self, k: int) -> "NCOp":
        return NCOp({(e + k, w, d): c for (e, w, d), c in self.terms.items()
                     if e + k <= self.order}, self.alg)

    def __eq__(self, other):
        if isinstance(other, NCOp):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "NCOp(0)"
        parts = []
        for (e, w, d), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])):
            mono = "".join(f"x{m}" for m in w)
            dex = unpack(d, self.n)
            mono += "".join(f"D{m}" + (f"^{k}" if k > 1 else "") for m, k in enumerate(dex) if k)
            parts.append(f"({c})e^{e}{mono or '1'}")
        return "NCOp(" + " + ".join(parts) + ")"


def nc_normal_order(alg: NCAlgebra, factors: Iterable) -> NCOp:
    """Canonical form of a product; factors are NCOps, scalars or ('x'|'D', index)."""
    out = alg.one
    for f in factors:
        if isinstance(f, tuple):
            kind, mu = f
            f = alg.x[mu] if kind == "x" else alg.D[mu]
        out = out * f
    return out


def circ_project(A: NCOp) -> NCOp:
    """Action on the unit: every term carrying a derivative is dropped."""
    return NCOp({k: c for k, c in A.terms.items() if k[2] == 0}, A.alg)


def pbw_defect(alg: NCAlgebra, perm: Sequence[int], indices: Sequence[int]) -> NCOp:
    """Ordered form of the permuted word minus the ordered form of the original."""
    indices = tuple(indices)
    permuted = tuple(indices[p] for p in perm)
    return alg.word(permuted) - alg.word(indices)


def all_pbw_defects(alg: NCAlgebra, indices: Sequence[int]) -> dict:
    """perm -> projected defect for every permutation of ``indices``."""
    m = len(indices)
    return {perm: circ_project(pbw_defect(alg, perm, indices)) for perm in permutations(range(m))}


def _inverse_coordinates(alg: NCAlgebra) -> list:
    """X_mu written in xhat and D through the inverse of the realization."""
    fr = alg.frame
    W, p, eta = fr.W, fr.params, fr.W.signs
    h = alg.from_weyl_dfunction(op_reciprocal(fr.f_of_B - fr.B * fr.gamma2_of_B))
    g = alg.from_weyl_dfunction(fr.gamma2_of_B)
    phi_inv = alg.from_weyl_dfunction(fr.phi_inv)
    a_x = alg.zero
    x_D = alg.zero
    for al in range(alg.n):
        a_x = a_x + alg.x[al] * (eta[al] * p.a[al])
        x_D = x_D + alg.x[al] * alg.D[al] * eta[al]
    a_x = (a_x * I).graded(1)
    x_D = (x_D * (p.a2 - p.s)).graded(2)
    return [(alg.x[m] - a_x * h * alg.D[m] + x_D * h * alg.D[m] * g) * phi_inv
            for m in range(alg.n)]


def invariant_I2(alg: NCAlgebra) -> tuple:
    """(I2, closed form): the projected image of X_alpha X^alpha and
    x^alpha x_alpha - i(n-1) a^alpha x_alpha, both acting on the unit."""
    eta, a, n = alg.frame.W.signs, alg.frame.params.a, alg.n
    X = _inverse_coordinates(alg)
    full = alg.zero
    for al in range(n):
        full = full + X[al] * X[al] * eta[al]
    closed = alg.zero
    lin = alg.zero
    for al in range(n):
        closed = closed + alg.x[al] * alg.x[al] * eta[al]
        lin = lin + alg.x[al] * (eta[al] * a[al])
    closed = closed - (lin * (I * (n - 1))).graded(1)
    return circ_project(full), circ_project(closed)


def lorentz_generator(alg: NCAlgebra, mu: int, nu: int) -> NCOp:
    """M_{mu nu} = (xhat_mu D_nu - xhat_nu D_mu) Z."""
    Z = alg.from_weyl_dfunction(alg.frame.Z)
    return (alg.x[mu] * alg.D[nu] - alg.x[nu] * alg.D[mu]) * Z


def lorentz_defect(alg: NCAlgebra, I2: NCOp | None = None) -> dict:
    """(mu, nu) -> projection of M_{mu nu} times the lifted invariant; all must vanish."""
    if I2 is None:
        I2 = invariant_I2(alg)[0]
    return {(m, v): circ_project(lorentz_generator(alg, m, v) * I2)
            for m in range(alg.n) for v in range(m + 1, alg.n)}
