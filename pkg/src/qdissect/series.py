"""Truncated Laurent series in q with exact rational coefficients.

A :class:`QSeries` stores the coefficients of q^valuation, ..., q^(prec-1).
Everything at or above ``prec`` is unknown, and every operation propagates
``prec`` pessimistically so that a reported coefficient is never wrong.

Coefficients are kept as integer numerators over one shared positive
denominator; that keeps convolutions in machine-friendly ``int`` arithmetic
(numpy object arrays) while remaining exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import PrecisionExceeded, ZeroLeadingCoefficient

__all__ = [
    "QSeries",
    "add",
    "sub",
    "mul",
    "scalar_mul",
    "invert",
    "substitute_power",
    "negate_q",
    "dissect",
    "q_shift",
    "truncate",
    "coeff_at",
    "equal_to_order",
]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def _obj_array(values: Iterable[int]) -> np.ndarray:
    values = list(values)
    arr = np.empty(len(values), dtype=object)
    arr[:] = values
    return arr


def _zeros(n: int) -> np.ndarray:
    arr = np.empty(n, dtype=object)
    arr.fill(0)
    return arr


class QSeries:
    """Immutable truncated Laurent series ``sum c_n q^n + O(q^prec)``."""

    __slots__ = ("_val", "_prec", "_num", "_den")

    def __init__(self, valuation: int, num: np.ndarray, den: int, prec: int):
        # internal constructor: callers go through the from_* helpers
        if den <= 0:
            raise ValueError("denominator must be positive")
        if len(num) != prec - valuation:
            raise ValueError("coefficient count must equal prec - valuation")
        if prec < valuation:
            raise ValueError("prec must be at least the valuation")
        g = den
        if g != 1:
            for x in num:
                if x:
                    g = math.gcd(g, x)
                    if g == 1:
                        break
        if g != 1:
            num = _obj_array(x // g for x in num)
            den //= g
        num.flags.writeable = False
        self._val = int(valuation)
        self._prec = int(prec)
        self._num = num
        self._den = int(den)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_coeffs(cls, valuation: int, coeffs: Sequence, prec: int | None = None) -> "QSeries":
        fr = [_as_fraction(c) for c in coeffs]
        if prec is None:
            prec = valuation + len(fr)
        length = prec - valuation
        if length < 0:
            raise ValueError("prec below valuation")
        fr = (fr + [Fraction(0)] * length)[:length]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        num = _obj_array(c.numerator * (den // c.denominator) for c in fr)
        return cls(valuation, num, den, prec)

    @classmethod
    def from_ints(cls, valuation: int, ints: Sequence[int], prec: int | None = None, den: int = 1) -> "QSeries":
        if prec is None:
            prec = valuation + len(ints)
        length = prec - valuation
        arr = _zeros(length)
        m = min(length, len(ints))
        arr[:m] = list(ints[:m]) if not isinstance(ints, np.ndarray) else ints[:m]
        return cls(valuation, arr, den, prec)

    @classmethod
    def from_dict(cls, terms: dict, prec: int) -> "QSeries":
        """Build from a sparse ``{exponent: coefficient}`` mapping."""
        terms = {int(k): _as_fraction(v) for k, v in terms.items() if k < prec}
        val = min(terms) if terms else prec - 1
        val = min(val, prec - 1)
        coeffs = [terms.get(n, Fraction(0)) for n in range(val, prec)]
        return cls.from_coeffs(val, coeffs, prec)

    @classmethod
    def zero(cls, prec: int) -> "QSeries":
        return cls(prec - 1, _zeros(1), 1, prec)

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls.monomial(0, prec)

    @classmethod
    def monomial(cls, k: int, prec: int, coeff=1) -> "QSeries":
        """``coeff * q^k + O(q^prec)``."""
        c = _as_fraction(coeff)
        if k >= prec:
            return cls.zero(prec)
        arr = _zeros(prec - k)
        arr[0] = c.numerator
        return cls(k, arr, c.denominator, prec)

    # -- accessors --------------------------------------------------------

    @property
    def valuation(self) -> int:
        return self._val

    @property
    def prec(self) -> int:
        return self._prec

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def numerators(self) -> np.ndarray:
        return self._num

    @property
    def coeffs(self) -> list[Fraction]:
        return [Fraction(x, self._den) for x in self._num]

    def __getitem__(self, n: int) -> Fraction:
        return coeff_at(self, n)

    def coeff_list(self, start: int, stop: int) -> list[Fraction]:
        return [coeff_at(self, n) for n in range(start, stop)]

    def is_integral(self) -> bool:
        return self._den == 1

    def first_nonzero(self) -> int | None:
        """Exponent of the lowest nonzero tracked coefficient, if any."""
        for i, x in enumerate(self._num):
            if x:
                return self._val + i
        return None

    def terms(self) -> list[tuple[int, Fraction]]:
        return [(self._val + i, Fraction(x, self._den)) for i, x in enumerate(self._num) if x]

    # -- python protocol --------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = _coerce_scalar(other, self._prec)
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = _coerce_scalar(other, self._prec)
        return sub(self, other)

    def __rsub__(self, other):
        return sub(_coerce_scalar(other, self._prec), self)

    def __neg__(self):
        return QSeries(self._val, -self._num, self._den, self._prec)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        return scalar_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return mul(self, invert(other))
        return scalar_mul(self, 1 / _as_fraction(other))

    def __pow__(self, k: int):
        if k < 0:
            return invert(self) ** (-k)
        result = QSeries.one(self._prec - self._val) if k == 0 else self
        for _ in range(k - 1):
            result = mul(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        if self._prec != other._prec:
            return False
        lo = min(self._val, other._val)
        return all(coeff_at(self, n) == coeff_at(other, n) for n in range(lo, self._prec))

    def __hash__(self):
        return hash((self._prec, tuple(self.terms())))

    def __repr__(self):
        shown = self.terms()[:8]
        body = " + ".join(f"{c}*q^{n}" for n, c in shown) or "0"
        if len(self.terms()) > 8:
            body += " + ..."
        return f"QSeries({body} + O(q^{self._prec}))"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "valuation": self._val,
            "prec": self._prec,
            "coeffs": [_frac_str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QSeries":
        return cls.from_coeffs(obj["valuation"], [Fraction(s) for s in obj["coeffs"]], obj["prec"])


def _frac_str(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _coerce_scalar(c, prec: int) -> QSeries:
    return QSeries.monomial(0, prec, c) if prec > 0 else QSeries.zero(prec)


def _window(s: QSeries, lo: int, hi: int) -> np.ndarray:
    """Numerators of ``s`` for exponents lo..hi-1 (zeros below valuation)."""
    out = _zeros(hi - lo)
    a = max(lo, s._val)
    b = min(hi, s._prec)
    if b > a:
        out[a - lo:b - lo] = s._num[a - s._val:b - s._val]
    return out


# -- operations -------------------------------------------------------------


def add(a: QSeries, b: QSeries) -> QSeries:
    prec = min(a._prec, b._prec)
    val = min(a._val, b._val, prec - 1)
    den = a._den * b._den // math.gcd(a._den, b._den)
    num = _window(a, val, prec) * (den // a._den) + _window(b, val, prec) * (den // b._den)
    return QSeries(val, num, den, prec)


def sub(a: QSeries, b: QSeries) -> QSeries:
    return add(a, -b)


def scalar_mul(a: QSeries, c) -> QSeries:
    c = _as_fraction(c)
    return QSeries(a._val, a._num * c.numerator, a._den * c.denominator, a._prec)


def mul(a: QSeries, b: QSeries) -> QSeries:
    val = a._val + b._val
    prec = min(a._prec + b._val, b._prec + a._val)
    length = prec - val
    if length <= 0:
        return QSeries.zero(prec)
    x = a._num[:length]
    y = b._num[:length]
    num = np.convolve(x, y)[:length]
    if len(num) < length:
        num = np.concatenate([num, _zeros(length - len(num))])
    return QSeries(val, _obj_array(num), a._den * b._den, prec)


def invert(a: QSeries) -> QSeries:
    lead = a.first_nonzero()
    if lead is None:
        raise ZeroLeadingCoefficient("every tracked coefficient vanishes; cannot invert")
    u = a._num[lead - a._val:]
    length = len(u)
    u0 = u[0]
    if u0 in (1, -1):
        w = _zeros(length)
        w[0] = u0
        for n in range(1, length):
            w[n] = -u0 * np.dot(u[1:n + 1], w[n - 1::-1])
        # 1/a = den * w * q^-lead
        return QSeries(-lead, w * a._den, 1, -lead + length)
    inv0 = Fraction(1, u0)
    w = [inv0]
    for n in range(1, length):
        acc = sum((u[k] * w[n - k] for k in range(1, n + 1)), Fraction(0))
        w.append(-acc * inv0)
    return QSeries.from_coeffs(-lead, [c * a._den for c in w], -lead + length)


def substitute_power(a: QSeries, k: int) -> QSeries:
    if k < 1:
        raise ValueError("substitution power must be positive")
    if k == 1:
        return a
    val = k * a._val
    prec = k * a._prec
    num = _zeros(prec - val)
    num[::k] = a._num
    return QSeries(val, num, a._den, prec)


def negate_q(a: QSeries) -> QSeries:
    num = a._num.copy()
    start = 1 if a._val % 2 == 0 else 0
    num[start::2] = -num[start::2]
    return QSeries(a._val, num, a._den, a._prec)


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def dissect(a: QSeries, m: int, r: int) -> QSeries:
    """Series whose q^n coefficient is the q^(m n + r) coefficient of ``a``."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if not 0 <= r < m:
        raise ValueError(f"residue {r} is outside [0, {m})")
    prec = _ceil_div(a._prec - r, m)
    val = min(_ceil_div(a._val - r, m), prec - 1)
    idx = [m * n + r - a._val for n in range(val, prec)]
    num = _obj_array(a._num[i] if i >= 0 else 0 for i in idx)
    return QSeries(val, num, a._den, prec)


def q_shift(a: QSeries, k: int) -> QSeries:
    return QSeries(a._val + k, a._num, a._den, a._prec + k)


def truncate(a: QSeries, n: int) -> QSeries:
    if n >= a._prec:
        return a
    if n <= a._val:
        return QSeries.zero(n)
    return QSeries(a._val, a._num[:n - a._val].copy(), a._den, n)


def coeff_at(a: QSeries, n: int) -> Fraction:
    if n >= a._prec:
        raise PrecisionExceeded(f"coefficient of q^{n} requested but series is only known below q^{a._prec}")
    if n < a._val:
        return Fraction(0)
    return Fraction(a._num[n - a._val], a._den)


def equal_to_order(a: QSeries, b: QSeries, n: int) -> bool:
    """True when a and b agree on every exponent up to and including n."""
    if n >= a._prec or n >= b._prec:
        raise PrecisionExceeded(f"comparison through q^{n} exceeds known precision")
    lo = min(a._val, b._val)
    return all(coeff_at(a, k) == coeff_at(b, k) for k in range(lo, n + 1))
