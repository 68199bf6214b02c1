"""Scalars, Minkowski vectors and graded truncated power series.

Exact arithmetic uses :class:`gmpy2.mpq` for real rationals and
:class:`GaussianRational` for complex ones; :func:`qqi` returns whichever
is appropriate so that purely real values stay on the fast path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import gmpy2
import numpy as np
from numpy.polynomial import polynomial as P
from gmpy2 import mpq

__all__ = [
    "GaussianRational", "qqi", "to_exact", "is_exact", "I",
    "metric", "mink_dot", "mink_square", "lorentz_boost",
    "EpsSeries", "series_apply_analytic",
    "taylor_sqrt_one_minus", "taylor_geometric", "taylor_inverse_sqrt_one_minus",
    "taylor_cosh_sqrt", "taylor_sinhc_sqrt", "taylor_coshm1_sqrt",
    "DeformParams", "RealizationSpec",
]

_MPQ = type(mpq(0))


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        if isinstance(other, (int, _MPQ, Fraction)):
            return mpq(other), mpq(0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qqi(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qqi(self.re - o[0], self.im - o[1])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qqi(o[0] - self.re, o[1] - self.im)

    def __mul__(self, other):
        if isinstance(other, (int, _MPQ)):
            return qqi(self.re * other, self.im * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qqi(self.re * o[0] - self.im * o[1], self.re * o[1] + self.im * o[0])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o[0] * o[0] + o[1] * o[1]
        if den == 0:
            raise ZeroDivisionError("division by zero")
        return qqi((self.re * o[0] + self.im * o[1]) / den,
                   (self.im * o[0] - self.re * o[1]) / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(*o) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return qqi(self.re, -self.im)

    def __repr__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def qqi(re, im=0):
    """Exact scalar ``re + i*im``; an :class:`mpq` when the imaginary part is zero."""
    if im == 0:
        return mpq(re)
    return GaussianRational(re, im)


I = GaussianRational(0, 1)


def to_exact(x):
    """Convert ints, Fractions, decimal strings or ``(re, im)`` pairs to an exact scalar."""
    if isinstance(x, (GaussianRational, _MPQ)):
        return x
    if isinstance(x, tuple):
        return qqi(to_exact(x[0]), to_exact(x[1]))
    if isinstance(x, float):
        return mpq(Fraction(x))
    if isinstance(x, str):
        return mpq(Fraction(x))
    return mpq(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, _MPQ, Fraction, GaussianRational))


# -- Minkowski vectors -----------------------------------------------------

def metric(n: int) -> tuple:
    """Diagonal of the metric diag(-1, 1, ..., 1); index 0 is time."""
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    return (-1,) + (1,) * (n - 1)


def mink_dot(u, v):
    """Minkowski product -u0 v0 + sum_i ui vi.

    Works on numpy arrays as well as sequences of exact scalars.
    """
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    if isinstance(u, np.ndarray) or isinstance(v, np.ndarray):
        u = np.asarray(u)
        v = np.asarray(v)
        return -u[0] * v[0] + np.dot(u[1:], v[1:])
    out = -(u[0] * v[0])
    for x, y in zip(u[1:], v[1:]):
        out = out + x * y
    return out


def mink_square(u):
    return mink_dot(u, u)


def lorentz_boost(v, rapidity: float, plane: tuple[int, int]) -> np.ndarray:
    """Boost in a (0, i) plane or rotation in an (i, j) plane with i, j >= 1."""
    v = np.asarray(v, dtype=float)
    n = len(v)
    i, j = plane
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"invalid plane {plane} for dimension {n}")
    out = v.copy()
    c, s = math.cos(rapidity), math.sin(rapidity)
    if i == 0 or j == 0:
        sp = j if i == 0 else i
        c, s = math.cosh(rapidity), math.sinh(rapidity)
        out[0] = c * v[0] + s * v[sp]
        out[sp] = s * v[0] + c * v[sp]
    else:
        out[i] = c * v[i] - s * v[j]
        out[j] = s * v[i] + c * v[j]
    return out


# -- truncated power series -----------------------------------------------

class EpsSeries:
    """Power series in a formal parameter truncated after ``order``.

    ``coeffs[m]`` is the coefficient of the m-th power. The same class is used
    for the deformation parameter eps and for Taylor series in B.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = max(len(coeffs) - 1, 0)
        if order < 0:
            raise ValueError("order must be non-negative")
        zero = _zero_like(coeffs)
        coeffs = coeffs[: order + 1] + [zero] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def constant(cls, c, order: int) -> "EpsSeries":
        return cls([c], order)

    @classmethod
    def monomial(cls, c, power: int, order: int) -> "EpsSeries":
        zero = 0.0 if isinstance(c, (float, complex)) else mpq(0)
        coeffs = [zero] * (order + 1)
        if power <= order:
            coeffs[power] = c
        return cls(coeffs, order)

    @property
    def kind(self) -> str:
        return "exact" if all(is_exact(c) for c in self.coeffs) else "floating"

    def _check(self, other: "EpsSeries"):
        if self.order != other.order:
            raise ValueError(f"truncation order mismatch: {self.order} vs {other.order}")

    def _lift(self, other):
        if isinstance(other, EpsSeries):
            self._check(other)
            return other
        return EpsSeries([other], self.order)

    def __getitem__(self, m):
        return self.coeffs[m]

    def __len__(self):
        return self.order + 1

    def __add__(self, other):
        other = self._lift(other)
        return EpsSeries([x + y for x, y in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self):
        return EpsSeries([-x for x in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, EpsSeries):
            return EpsSeries([x * other for x in self.coeffs], self.order)
        self._check(other)
        N = self.order
        a, b = self.coeffs, other.coeffs
        out = []
        for m in range(N + 1):
            acc = a[0] * b[m]
            for j in range(1, m + 1):
                acc = acc + a[j] * b[m - j]
            out.append(acc)
        return EpsSeries(out, N)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, EpsSeries):
            return self * other.reciprocal()
        return EpsSeries([x / other for x in self.coeffs], self.order)

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = EpsSeries.constant(_one_like(self.coeffs), self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, EpsSeries):
            return self.order == other.order and all(
                x == y for x, y in zip(self.coeffs, other.coeffs))
        return NotImplemented

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def __repr__(self):
        terms = [f"{c}*e^{m}" for m, c in enumerate(self.coeffs) if c != 0]
        return f"EpsSeries({' + '.join(terms) or '0'}; O(e^{self.order + 1}))"

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        for m, c in enumerate(self.coeffs):
            if c != 0:
                return m
        return None

    def truncate(self, order: int) -> "EpsSeries":
        return EpsSeries(self.coeffs[: order + 1], order)

    def reciprocal(self) -> "EpsSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        N = self.order
        out = [_inv(c0)]
        for m in range(1, N + 1):
            acc = self.coeffs[1] * out[m - 1]
            for j in range(2, m + 1):
                acc = acc + self.coeffs[j] * out[m - j]
            out.append(-acc * out[0])
        return EpsSeries(out, N)

    def derivative(self) -> "EpsSeries":
        """Formal derivative; the top coefficient becomes zero."""
        c = [m * self.coeffs[m] for m in range(1, self.order + 1)]
        return EpsSeries(c, self.order)

    def antiderivative(self) -> "EpsSeries":
        """Formal integral from 0, truncated at the same order."""
        zero = _zero_like(self.coeffs)
        c = [zero] + [self.coeffs[m - 1] / _as_scalar(m, self.coeffs) for m in range(1, self.order + 1)]
        return EpsSeries(c, self.order)

    def shift(self, k: int = 1) -> "EpsSeries":
        """Multiply by the k-th power of the formal variable."""
        zero = _zero_like(self.coeffs)
        return EpsSeries([zero] * k + self.coeffs, self.order)

    def __call__(self, x):
        """Evaluate the truncated polynomial at ``x`` (Horner)."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def to_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs])


def _zero_like(coeffs):
    if any(isinstance(c, (float, complex)) for c in coeffs):
        return 0.0
    return mpq(0)


def _one_like(coeffs):
    if any(isinstance(c, (float, complex)) for c in coeffs):
        return 1.0
    return mpq(1)


def _as_scalar(m, coeffs):
    if any(isinstance(c, (float, complex)) for c in coeffs):
        return float(m)
    return mpq(m)


def _inv(c):
    if isinstance(c, (float, complex)):
        return 1 / c
    if isinstance(c, GaussianRational):
        return mpq(1) / c
    return mpq(1) / mpq(c)


TaylorLike = Union[Sequence, Callable[[int], object]]


def series_apply_analytic(taylor: TaylorLike, S: EpsSeries) -> EpsSeries:
    """Compose a Taylor series with ``S``: sum_m taylor[m] * S**m, truncated.

    ``taylor`` is either a finite sequence (a polynomial, applied exactly to any
    ``S``) or a callable ``m -> coefficient`` describing an infinite series, in
    which case ``S`` must have zero constant term.
    """
    N = S.order
    if callable(taylor):
        if S.coeffs[0] != 0:
            raise ValueError("infinite Taylor series needs a series with zero constant term")
        coeffs = [taylor(m) for m in range(N + 1)]
    else:
        coeffs = list(taylor)
        if not coeffs:
            return EpsSeries([], N)
        if S.coeffs[0] == 0:
            coeffs = coeffs[: N + 1]
    acc = EpsSeries.constant(coeffs[-1], N)
    for c in reversed(coeffs[:-1]):
        acc = acc * S + c
    return acc


# Taylor coefficient generators (exact); each maps m -> coefficient of t**m.

def taylor_sqrt_one_minus(m: int) -> mpq:
    """sqrt(1 - t)."""
    return mpq(gmpy2.bincoef(2 * m, m)) / ((1 - 2 * m) * 4 ** m)


def taylor_inverse_sqrt_one_minus(m: int) -> mpq:
    """1/sqrt(1 - t)."""
    return mpq(gmpy2.bincoef(2 * m, m)) / 4 ** m


def taylor_geometric(m: int) -> mpq:
    """1/(1 - t)."""
    return mpq(1)


def taylor_cosh_sqrt(m: int) -> mpq:
    """cosh(sqrt(w)) as a series in w."""
    return mpq(1) / math.factorial(2 * m)


def taylor_sinhc_sqrt(m: int) -> mpq:
    """sinh(sqrt(w))/sqrt(w) as a series in w."""
    return mpq(1) / math.factorial(2 * m + 1)


def taylor_coshm1_sqrt(m: int) -> mpq:
    """(cosh(sqrt(w)) - 1)/w as a series in w."""
    return mpq(1) / math.factorial(2 * m + 2)


# -- deformation data --------------------------------------------------------

@dataclass(frozen=True)
class DeformParams:
    """Deformation vector ``a`` (lower index components) and Snyder parameter ``s``.

    Components are stored exactly when given as ints/Fractions/strings, so the
    same object serves the symbolic and the numeric layers.
    """

    a: tuple
    s: object

    def __init__(self, a, s):
        object.__setattr__(self, "a", tuple(to_exact(x) for x in a))
        object.__setattr__(self, "s", to_exact(s))
        metric(len(self.a))

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def a2(self):
        return mink_dot(self.a, self.a)

    @property
    def a_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.a])

    @property
    def s_float(self) -> float:
        return float(self.s)

    def a_upper(self) -> tuple:
        return tuple(g * x for g, x in zip(metric(self.n), self.a))

    def scaled(self, eps) -> "DeformParams":
        """Parameters at (eps*a, eps**2*s)."""
        eps = to_exact(eps)
        return DeformParams([eps * x for x in self.a], eps * eps * self.s)


_SPEC_KINDS = ("maggiore", "unit", "general-u", "custom-taylor")


@dataclass(frozen=True)
class RealizationSpec:
    """Choice of the function f(B) with f(0) = 1 fixing a realization.

    ``maggiore`` is f = sqrt(1 - B), ``unit`` is f = 1, ``general-u`` is
    f = 1 - u B and ``custom-taylor`` takes explicit Taylor coefficients.
    """

    kind: str
    u: Fraction | None = None
    coefficients: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in _SPEC_KINDS:
            raise ValueError(f"unknown realization kind {self.kind!r}")
        if self.kind == "general-u":
            if self.u is None:
                raise ValueError("general-u realization needs u")
            object.__setattr__(self, "u", Fraction(self.u))
        if self.kind == "custom-taylor":
            coeffs = tuple(to_exact(c) for c in self.coefficients)
            if not coeffs or coeffs[0] != 1:
                raise ValueError("custom Taylor coefficients must start with f(0) = 1")
            object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def maggiore(cls):
        return cls("maggiore")

    @classmethod
    def unit(cls):
        return cls("unit")

    @classmethod
    def general_u(cls, u):
        return cls("general-u", u=Fraction(u))

    @classmethod
    def custom(cls, coefficients):
        return cls("custom-taylor", coefficients=tuple(coefficients))

    @classmethod
    def parse(cls, text: str) -> "RealizationSpec":
        """Parse ``maggiore``, ``unit`` or ``u=<value>``."""
        text = text.strip()
        if text == "maggiore":
            return cls.maggiore()
        if text == "unit":
            return cls.unit()
        if text.startswith("u="):
            return cls.general_u(Fraction(text[2:]))
        raise ValueError(f"unknown realization {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "general-u":
            return f"u={self.u}"
        return self.kind

    def f_taylor(self, order: int) -> EpsSeries:
        """Taylor coefficients of f(t) up to t**order."""
        if self.kind == "maggiore":
            c = [taylor_sqrt_one_minus(m) for m in range(order + 1)]
        elif self.kind == "unit":
            c = [mpq(1)]
        elif self.kind == "general-u":
            c = [mpq(1), -mpq(self.u)]
        else:
            c = list(self.coefficients)
        return EpsSeries(c, order)

    def f(self, B):
        """Numeric f(B); accepts floats or numpy arrays."""
        if self.kind == "maggiore":
            if np.any(np.asarray(B) > 1):
                raise ValueError("sqrt(1 - B) is undefined for B > 1")
            return np.sqrt(1.0 - B)
        if self.kind == "unit":
            return np.ones_like(B, dtype=float) if np.ndim(B) else 1.0
        if self.kind == "general-u":
            return 1.0 - float(self.u) * B
        return P.polyval(B, [float(c) for c in self.coefficients])

    def f_prime(self, B):
        if self.kind == "maggiore":
            return -0.5 / np.sqrt(1.0 - B)
        if self.kind == "unit":
            return np.zeros_like(B, dtype=float) if np.ndim(B) else 0.0
        if self.kind == "general-u":
            return np.full_like(B, -float(self.u), dtype=float) if np.ndim(B) else -float(self.u)
        return P.polyval(B, P.polyder([float(c) for c in self.coefficients]))

    def gamma2(self, B):
        """Numeric value of -(1 + 2 f f')/(f - 2 B f')."""
        if self.kind == "maggiore":
            return np.zeros_like(B, dtype=float) if np.ndim(B) else 0.0
        if self.kind == "unit":
            return -np.ones_like(B, dtype=float) if np.ndim(B) else -1.0
        if self.kind == "general-u":
            u = float(self.u)
            return -(1.0 - 2.0 * u + 2.0 * u * u * B) / (1.0 + u * B)
        f, fp = self.f(B), self.f_prime(B)
        return -(1.0 + 2.0 * f * fp) / (f - 2.0 * B * fp)
