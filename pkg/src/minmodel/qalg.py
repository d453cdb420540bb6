"""Exact arithmetic for q-polynomials and truncated q-series.

QPoly exponents live on a quarter-integer lattice: the stored integer key e
represents q^(e/4). All quadratic-form and gamma bookkeeping stays exact on
that lattice; integrality is asserted only at finalize_integral.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import FractionalExponent, NonIntegralArgument, OutOfRange

INFINITY = math.inf

_SCALE = 4  # quarter-units per integer q-power


class QPoly:
    """Sparse Laurent polynomial in q with quarter-unit exponents."""

    __slots__ = ("terms", "integral")

    def __init__(self, terms: dict[int, int] | None = None, integral: bool = False):
        t = {}
        if terms:
            for e, c in terms.items():
                if c:
                    t[e] = c
        self.terms = t
        self.integral = integral

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "QPoly":
        return cls()

    @classmethod
    def one(cls) -> "QPoly":
        return cls({0: 1})

    @classmethod
    def q_power(cls, e: int, coeff: int = 1) -> "QPoly":
        """coeff * q^e with e in integer q-units."""
        return cls({_SCALE * e: coeff})

    @classmethod
    def q_quarter(cls, e4: int, coeff: int = 1) -> "QPoly":
        """coeff * q^(e4/4) with e4 in quarter-units."""
        return cls({e4: coeff})

    @classmethod
    def from_int_coeffs(cls, coeffs, shift4: int = 0) -> "QPoly":
        """Polynomial sum coeffs[k] q^k, then shifted by q^(shift4/4)."""
        return cls({shift4 + _SCALE * k: c for k, c in enumerate(coeffs) if c})

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, QPoly):
            return self.terms == other.terms
        if isinstance(other, int):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def items(self):
        """(quarter-exponent, coefficient) pairs in exponent order."""
        return sorted(self.terms.items())

    def coeff_q(self, k: int) -> int:
        """Coefficient of q^k (integer q-units)."""
        return self.terms.get(_SCALE * k, 0)

    def min_exp4(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self.terms)

    def max_exp4(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self.terms)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "QPoly") -> "QPoly":
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            elif e in t:
                del t[e]
        return QPoly(t)

    def __sub__(self, other: "QPoly") -> "QPoly":
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) - c
            if v:
                t[e] = v
            elif e in t:
                del t[e]
        return QPoly(t)

    def __neg__(self) -> "QPoly":
        return QPoly({e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return QPoly()
            return QPoly({e: c * other for e, c in self.terms.items()})
        if not isinstance(other, QPoly):
            return NotImplemented
        acc: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                v = acc.get(e, 0) + c1 * c2
                if v:
                    acc[e] = v
                elif e in acc:
                    del acc[e]
        return QPoly(acc)

    __rmul__ = __mul__

    def shifted4(self, e4: int) -> "QPoly":
        """Multiply by q^(e4/4)."""
        if not e4:
            return self
        return QPoly({e + e4: c for e, c in self.terms.items()})

    def subs_inverse_q(self) -> "QPoly":
        """q -> 1/q."""
        return QPoly({-e: c for e, c in self.terms.items()})

    # -- exits ---------------------------------------------------------------

    def as_pairs(self) -> list[list]:
        """External form: [exponent in integer q-units, coeff as decimal string]."""
        out = []
        for e, c in self.items():
            if e % _SCALE:
                raise FractionalExponent(f"exponent {e}/4 is not an integer")
            out.append([e // _SCALE, str(c)])
        return out

    def to_series(self, order: int) -> "QSeries":
        if order < 1:
            raise OutOfRange("series order must be >= 1")
        coeffs = [0] * order
        for e, c in self.terms.items():
            if e % _SCALE:
                raise FractionalExponent(f"exponent {e}/4 is not an integer")
            k = e // _SCALE
            if k < 0:
                raise FractionalExponent(f"negative exponent q^{k} cannot enter a series")
            if k < order:
                coeffs[k] = c
        return QSeries(order, coeffs)

    def __repr__(self):
        if not self.terms:
            return "QPoly(0)"
        bits = []
        for e, c in self.items():
            q, r = divmod(e, _SCALE)
            ex = str(q) if not r else f"{e}/4"
            bits.append(f"{c}*q^{ex}")
        return "QPoly(" + " + ".join(bits) + ")"


def finalize_integral(p: QPoly) -> QPoly:
    """Assert every exponent is a whole q-power and return the flagged polynomial."""
    for e in p.terms:
        if e % _SCALE:
            raise FractionalExponent(f"exponent {e}/4 is not an integer q-power")
    return QPoly(p.terms, integral=True)


class QSeries:
    """Dense truncated power series: coefficients of q^0 .. q^(order-1)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs=None):
        if order < 1:
            raise OutOfRange("series order must be >= 1")
        self.order = order
        if coeffs is None:
            self.coeffs = [0] * order
        else:
            if len(coeffs) != order:
                raise ValueError("coefficient list length must equal order")
            self.coeffs = list(coeffs)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        s = cls(order)
        s.coeffs[0] = 1
        return s

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __add__(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        return QSeries(n, [self.coeffs[k] + other.coeffs[k] for k in range(n)])

    def __sub__(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        return QSeries(n, [self.coeffs[k] - other.coeffs[k] for k in range(n)])

    def __mul__(self, other):
        if isinstance(other, int):
            return QSeries(self.order, [c * other for c in self.coeffs])
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        out = [0] * n
        for i, ci in enumerate(self.coeffs[:n]):
            if ci:
                for j in range(n - i):
                    cj = other.coeffs[j]
                    if cj:
                        out[i + j] += ci * cj
        return QSeries(n, out)

    __rmul__ = __mul__

    def shifted(self, k: int) -> "QSeries":
        """Multiply by q^k, k >= 0."""
        if k < 0:
            raise OutOfRange("series shift must be nonnegative")
        return QSeries(self.order, [0] * min(k, self.order) + self.coeffs[: max(self.order - k, 0)])

    def truncated(self, order: int) -> "QSeries":
        if order > self.order:
            raise OutOfRange("cannot extend a truncated series")
        return QSeries(order, self.coeffs[:order])

    def as_record(self) -> dict:
        return {"order": self.order, "coeffs": list(self.coeffs)}

    def __repr__(self):
        return f"QSeries(order={self.order}, coeffs={self.coeffs})"


@lru_cache(maxsize=200000)
def gaussian_coeffs(A: int, B: int) -> tuple[int, ...]:
    """Raw coefficient tuple of the Gaussian polynomial [A; B], () if zero."""
    if B < 0 or B > A:
        return ()
    B = min(B, A - B)
    coeffs = [1]
    for i in range(1, B + 1):
        m = A - B + i
        coeffs = coeffs + [0] * m
        for k in range(len(coeffs) - 1, m - 1, -1):
            coeffs[k] -= coeffs[k - m]
        for k in range(i, len(coeffs)):
            coeffs[k] += coeffs[k - i]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
    return tuple(coeffs)


def gaussian_binomial(A: int, B: int) -> QPoly:
    """The Gaussian polynomial [A; B]; zero outside 0 <= B <= A."""
    return QPoly.from_int_coeffs(gaussian_coeffs(A, B), 0)


def gaussian_half_args(A2, B: int) -> QPoly:
    """Gaussian polynomial whose top argument may arrive as a Fraction.

    Raises NonIntegralArgument when the top is not a whole number; this is the
    integrality gate for binomial tops assembled from the half-unit linear
    system.
    """
    if isinstance(A2, Fraction):
        if A2.denominator != 1:
            raise NonIntegralArgument(f"binomial top {A2} is not an integer")
        A = int(A2)
    elif isinstance(A2, int):
        A = A2
    elif isinstance(A2, float):
        if not A2.is_integer():
            raise NonIntegralArgument(f"binomial top {A2} is not an integer")
        A = int(A2)
    else:
        raise NonIntegralArgument(f"unsupported binomial top {A2!r}")
    return gaussian_binomial(A, B)


def pochhammer_series(n, order: int) -> list[int]:
    """Coefficient list of 1/(q)_n to the given order; n may be INFINITY."""
    if order < 1:
        raise OutOfRange("series order must be >= 1")
    coeffs = [0] * order
    coeffs[0] = 1
    top = order - 1 if n == INFINITY else int(n)
    if top < 0:
        raise OutOfRange("pochhammer index must be nonnegative")
    for i in range(1, min(top, order - 1) + 1):
        for k in range(i, order):
            coeffs[k] += coeffs[k - i]
    return coeffs


def pochhammer_inverse(n, order: int) -> QSeries:
    """1/(q)_n as a truncated series; pass INFINITY (or math.inf) for 1/(q)_oo."""
    return QSeries(order, pochhammer_series(n, order))
