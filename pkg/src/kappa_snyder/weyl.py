"""Normal-ordered arithmetic in the Heisenberg-Weyl algebra H(X, D).

Every element is a finite sum of terms ``c * eps**e * X^alpha D^beta`` with
all coordinates to the left of all derivatives. The only rewrite rule is
``D_mu X_nu = X_nu D_mu + eta_{mu nu}``. Coefficients are graded by the
formal deformation parameter eps and truncated above ``order``.

Multi-indices are packed into Python ints (``_BITS`` bits per variable) so
that monomial multiplication is integer addition.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Iterable, Iterator, NamedTuple, Sequence

from gmpy2 import mpq

from .numerics import EpsSeries, metric as minkowski_metric, to_exact

__all__ = [
    "WeylOp", "WeylTerm", "WeylAlgebra",
    "weyl_mul", "weyl_commutator", "weyl_act",
    "pack", "unpack",
]

_BITS = 8
_MASK = (1 << _BITS) - 1


def pack(exps: Sequence[int]) -> int:
    out = 0
    for i, e in enumerate(exps):
        if not 0 <= e <= _MASK:
            raise ValueError(f"exponent {e} out of range")
        out |= e << (_BITS * i)
    return out


def unpack(code: int, n: int) -> tuple:
    return tuple((code >> (_BITS * i)) & _MASK for i in range(n))


def _unit(mu: int) -> int:
    return 1 << (_BITS * mu)


@lru_cache(maxsize=None)
def _reorder(d: int, x: int, signs: tuple) -> tuple:
    """Expand D^d X^x as sum of (weight, X^x', D^d'); the first entry is the
    uncontracted term X^x D^d."""
    n = len(signs)
    dd, xx = unpack(d, n), unpack(x, n)
    per_axis = []
    for i in range(n):
        opts = []
        for k in range(min(dd[i], xx[i]) + 1):
            w = comb(dd[i], k) * comb(xx[i], k) * factorial(k) * signs[i] ** k
            opts.append((k * _unit(i), w))
        per_axis.append(opts)
    out = []
    for choice in product(*per_axis):
        shift = 0
        w = 1
        for sh, wi in choice:
            shift += sh
            w *= wi
        out.append((x - shift, d - shift, w))
    return tuple(out)


@lru_cache(maxsize=None)
def _full_contraction(d: int, x: int, signs: tuple):
    """Weight and remainder of D^d acting on the polynomial X^x, or None if it vanishes."""
    n = len(signs)
    dd, xx = unpack(d, n), unpack(x, n)
    w = 1
    for i in range(n):
        if dd[i] > xx[i]:
            return None
        w *= factorial(xx[i]) // factorial(xx[i] - dd[i]) * signs[i] ** dd[i]
    return x - d, w


class WeylTerm(NamedTuple):
    coeff: EpsSeries
    x_exp: tuple
    d_exp: tuple


class WeylOp:
    """Element of the Weyl algebra in canonical normal-ordered form.

    ``terms`` maps ``(eps_degree, packed_x, packed_d)`` to a nonzero scalar.
    Instances are treated as immutable.
    """

    __slots__ = ("terms", "n", "order", "signs")

    def __init__(self, terms: dict, n: int, order: int, signs: tuple | None = None):
        self.terms = terms
        self.n = n
        self.order = order
        self.signs = signs if signs is not None else minkowski_metric(n)

    # -- construction ----------------------------------------------------
    @classmethod
    def from_terms(cls, items: Iterable, n: int, order: int, signs=None) -> "WeylOp":
        """Build from ``(coeff, x_exp, d_exp, eps_degree)`` tuples."""
        out: dict = {}
        for c, xe, de, e in items:
            if e > order:
                continue
            key = (e, pack(xe), pack(de))
            out[key] = out.get(key, 0) + to_exact(c)
        return cls(_clean(out), n, order, signs)

    def _like(self, terms: dict) -> "WeylOp":
        return WeylOp(terms, self.n, self.order, self.signs)

    # -- inspection ------------------------------------------------------
    def coeff(self, x_exp: Sequence[int], d_exp: Sequence[int]) -> EpsSeries:
        xp, dp = pack(x_exp), pack(d_exp)
        c = [self.terms.get((e, xp, dp), mpq(0)) for e in range(self.order + 1)]
        return EpsSeries(c, self.order)

    def iter_terms(self) -> Iterator[WeylTerm]:
        """Canonical term list sorted by (x_exp, d_exp), coefficients as EpsSeries."""
        grouped: dict = {}
        for (e, xp, dp), c in self.terms.items():
            grouped.setdefault((xp, dp), {})[e] = c
        for xp, dp in sorted(grouped, key=lambda k: (unpack(k[0], self.n), unpack(k[1], self.n))):
            by_e = grouped[(xp, dp)]
            coeffs = [by_e.get(e, mpq(0)) for e in range(self.order + 1)]
            yield WeylTerm(EpsSeries(coeffs, self.order), unpack(xp, self.n), unpack(dp, self.n))

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        """True when no term carries a derivative."""
        return all(dp == 0 for _, _, dp in self.terms)

    def max_degree(self) -> tuple:
        """(max x-degree, max d-degree) over the terms."""
        xd = dd = 0
        for _, xp, dp in self.terms:
            xd = max(xd, sum(unpack(xp, self.n)))
            dd = max(dd, sum(unpack(dp, self.n)))
        return xd, dd

    def eps_part(self, e: int) -> "WeylOp":
        return self._like({k: c for k, c in self.terms.items() if k[0] == e})

    def drop_derivative_terms(self) -> "WeylOp":
        return self._like({k: c for k, c in self.terms.items() if k[2] == 0})

    def max_abs_coeff(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    # -- arithmetic ------------------------------------------------------
    def _compat(self, other: "WeylOp"):
        if self.n != other.n or self.signs != other.signs:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        if self.order != other.order:
            raise ValueError(f"truncation order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, WeylOp):
            other = self.scalar(other)
        self._compat(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self._like(_clean(out))

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, WeylOp):
            other = self.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WeylOp):
            return weyl_mul(self, other)
        other = to_exact(other)
        if other == 0:
            return self._like({})
        return self._like({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, WeylOp):
            return weyl_mul(other, self)
        return self * other

    def __pow__(self, k: int):
        out = self.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def graded(self, k: int) -> "WeylOp":
        """Multiply by eps**k."""
        return self._like({(e + k, xp, dp): c for (e, xp, dp), c in self.terms.items()
                           if e + k <= self.order})

    def scalar(self, c, eps: int = 0) -> "WeylOp":
        c = to_exact(c)
        if c == 0 or eps > self.order:
            return self._like({})
        return self._like({(eps, 0, 0): c})

    def __eq__(self, other):
        if isinstance(other, WeylOp):
            return (self.n, self.order, self.signs) == (other.n, other.order, other.signs) \
                and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "WeylOp(0)"
        parts = []
        for t in self.iter_terms():
            mono = _mono_str(t.x_exp, "X") + _mono_str(t.d_exp, "D")
            coeffs = " + ".join(f"{c}e^{m}" for m, c in enumerate(t.coeff.coeffs) if c != 0)
            parts.append(f"({coeffs}){mono or '1'}")
        return "WeylOp(" + " + ".join(parts) + ")"


def _mono_str(exps, name):
    return "".join(f"{name}{i}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e)


def _clean(terms: dict) -> dict:
    return {k: c for k, c in terms.items() if c != 0}


def _grouped(op: WeylOp) -> list:
    groups = [[] for _ in range(op.order + 1)]
    for (e, xp, dp), c in op.terms.items():
        groups[e].append((xp, dp, c))
    return groups


def weyl_mul(A: WeylOp, B: WeylOp) -> WeylOp:
    """Normal-ordered product, truncated at the common order."""
    A._compat(B)
    N, signs = A.order, A.signs
    groups = _grouped(B)
    out: dict = {}
    get = out.get
    for (e1, x1, d1), c1 in A.terms.items():
        for e2 in range(N - e1 + 1):
            e = e1 + e2
            for x2, d2, c2 in groups[e2]:
                c = c1 * c2
                if d1 == 0 or x2 == 0:
                    key = (e, x1 + x2, d1 + d2)
                    out[key] = get(key, 0) + c
                    continue
                for xr, dr, w in _reorder(d1, x2, signs):
                    key = (e, x1 + xr, dr + d2)
                    out[key] = get(key, 0) + c * w
    return A._like(_clean(out))


def weyl_commutator(A: WeylOp, B: WeylOp) -> WeylOp:
    """AB - BA; the uncontracted terms cancel pairwise and are never formed."""
    A._compat(B)
    N, signs = A.order, A.signs
    ga, gb = _grouped(A), _grouped(B)
    out: dict = {}
    get = out.get
    for e1 in range(N + 1):
        for e2 in range(N - e1 + 1):
            e = e1 + e2
            for x1, d1, c1 in ga[e1]:
                for x2, d2, c2 in gb[e2]:
                    if d1 and x2:
                        c = c1 * c2
                        for xr, dr, w in _reorder(d1, x2, signs)[1:]:
                            key = (e, x1 + xr, dr + d2)
                            out[key] = get(key, 0) + c * w
                    if d2 and x1:
                        c = c1 * c2
                        for xr, dr, w in _reorder(d2, x1, signs)[1:]:
                            key = (e, x2 + xr, dr + d1)
                            out[key] = get(key, 0) - c * w
    return A._like(_clean(out))


def weyl_act(A: WeylOp, p: WeylOp) -> WeylOp:
    """Action on a commutative polynomial: derivatives act first, then X multiplies.

    ``p`` must be a polynomial (no derivative terms); the result is one too.
    This equals the normal-ordered product ``A p`` with derivative terms dropped,
    i.e. ``(A p) |> 1`` with ``D |> 1 = 0``.
    """
    A._compat(p)
    if not p.is_polynomial():
        raise ValueError("weyl_act expects a polynomial (no derivative terms)")
    N, signs = A.order, A.signs
    groups = _grouped(p)
    out: dict = {}
    get = out.get
    for (e1, x1, d1), c1 in A.terms.items():
        for e2 in range(N - e1 + 1):
            e = e1 + e2
            for x2, _, c2 in groups[e2]:
                hit = _full_contraction(d1, x2, signs) if d1 else (x2, 1)
                if hit is None:
                    continue
                xr, w = hit
                key = (e, x1 + xr, 0)
                out[key] = get(key, 0) + c1 * c2 * w
    return A._like(_clean(out))


class WeylAlgebra:
    """Factory for generators of H(X, D) at fixed dimension and truncation order.

    >>> W = WeylAlgebra(2, order=2)
    >>> W.D[0] * W.X[0] == W.X[0] * W.D[0] - 1
    True
    """

    def __init__(self, n: int, order: int = 4, signs: Sequence[int] | None = None):
        self.n = n
        self.order = order
        self.signs = tuple(signs) if signs is not None else minkowski_metric(n)
        if len(self.signs) != n:
            raise ValueError("metric signature length must equal the dimension")
        self.X = [self._gen(_unit(mu), 0) for mu in range(n)]
        self.D = [self._gen(0, _unit(mu)) for mu in range(n)]
        self.one = self.scalar(1)
        self.zero = WeylOp({}, n, order, self.signs)
        self.eps = self.scalar(1, eps=1)

    def _gen(self, xp, dp):
        return WeylOp({(0, xp, dp): mpq(1)}, self.n, self.order, self.signs)

    def scalar(self, c, eps: int = 0) -> WeylOp:
        return WeylOp({}, self.n, self.order, self.signs).scalar(c, eps)

    def monomial(self, x_exp, d_exp=None, coeff=1, eps: int = 0) -> WeylOp:
        d_exp = d_exp if d_exp is not None else (0,) * self.n
        return WeylOp.from_terms([(coeff, tuple(x_exp), tuple(d_exp), eps)],
                                 self.n, self.order, self.signs)

    def contract(self, u: Sequence, ops: Sequence[WeylOp]) -> WeylOp:
        """u^alpha ops_alpha for a lower-index vector u."""
        out = self.zero
        for g, ui, op in zip(self.signs, u, ops):
            if ui != 0:
                out = out + op * (g * to_exact(ui))
        return out

    def dot(self, left: Sequence[WeylOp], right: Sequence[WeylOp]) -> WeylOp:
        """left^alpha right_alpha for operator-valued vectors (left factor first)."""
        out = self.zero
        for g, l, r in zip(self.signs, left, right):
            out = out + (l * r) * g
        return out

    def box0(self) -> WeylOp:
        """The undeformed d'Alembertian D^alpha D_alpha."""
        return self.dot(self.D, self.D)
