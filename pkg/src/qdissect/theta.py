"""Theta functions and eta-type products as canonical product forms.

Every theta symbol the identities use -- Theta_m, Theta_{a,m}, the barred
Theta-bar_{a,m}, Theta(x; -q^m) -- is a monomial

    c * q^k * prod (q^g; q^delta)_inf ^ e

over blocks ``(delta, g)`` with ``0 <= g < delta``; ``g == 0`` denotes the
full factor ``(q^delta; q^delta)_inf``.  A block is really the set of
positive integers n = g (mod delta), so the product is determined by the
periodic exponent function n -> sum of e over blocks containing n.
:class:`ProductForm` stores the coarsest block decomposition of that
function, which makes equal products compare equal and lets
Theta(q^36; q^108) collapse to Theta_36.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from .errors import DivergentProduct, ZeroTheta
from .series import QSeries, _zeros

__all__ = [
    "ProductForm",
    "theta",
    "theta_general",
    "eta",
    "expand",
    "triple_product_series",
    "pochhammer",
    "pochhammer_form",
    "pf_mul",
    "pf_div",
    "pf_pow",
]


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _canonical_factors(factors: Iterable[tuple[tuple[int, int], int]]) -> tuple:
    items = [((int(d), int(g) % int(d)), int(e)) for (d, g), e in factors if e]
    if not items:
        return ()
    period = reduce(lambda x, y: x * y // math.gcd(x, y), (d for (d, _), _ in items))
    expo = np.zeros(period, dtype=np.int64)
    for (d, g), e in items:
        expo[g::d] += e
    out = {}
    for d in _divisors(period):
        for r in range(d):
            cls = expo[r::d]
            c = int(cls[0])
            if c and (cls == c).all():
                out[(d, r)] = c
                expo[r::d] = 0
        if not expo.any():
            break
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class ProductForm:
    """``coefficient * q^qpow * prod (q^g; q^delta)_inf ^ e`` in canonical form."""

    coefficient: Fraction = Fraction(1)
    qpow: int = 0
    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "qpow", int(self.qpow))
        object.__setattr__(self, "factors", _canonical_factors(self.factors))

    @classmethod
    def make(cls, coefficient=1, qpow: int = 0, factors: Mapping | Iterable = ()) -> "ProductForm":
        if isinstance(factors, Mapping):
            factors = factors.items()
        return cls(Fraction(coefficient), qpow, tuple(factors))

    @property
    def factor_map(self) -> dict:
        return dict(self.factors)

    @property
    def is_constant(self) -> bool:
        return self.qpow == 0 and not self.factors

    def monomial(self) -> "ProductForm":
        """The same product with coefficient 1."""
        return ProductForm(Fraction(1), self.qpow, self.factors)

    def scaled(self, c) -> "ProductForm":
        return ProductForm(self.coefficient * Fraction(c), self.qpow, self.factors)

    def shifted(self, k: int) -> "ProductForm":
        return ProductForm(self.coefficient, self.qpow + k, self.factors)

    def substitute_power(self, k: int) -> "ProductForm":
        """The product with q replaced by q^k."""
        return ProductForm(
            self.coefficient, self.qpow * k, tuple(((d * k, g * k), e) for (d, g), e in self.factors)
        )

    def moduli(self) -> set[int]:
        return {d for (d, _), _ in self.factors}

    def __mul__(self, other):
        if isinstance(other, ProductForm):
            return pf_mul(self, other)
        return self.scaled(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ProductForm):
            return pf_div(self, other)
        return self.scaled(1 / Fraction(other))

    def __pow__(self, k: int):
        return pf_pow(self, k)

    def __neg__(self):
        return self.scaled(-1)

    def render(self) -> str:
        """Text form ``c * q^k * (delta:g)^e * ...``, parseable by the DSL."""
        c = self.coefficient
        parts = [str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"]
        if self.qpow:
            parts.append(f"q^{self.qpow}")
        for (d, g), e in self.factors:
            parts.append(f"({d}:{g})^{e}")
        return " * ".join(parts)

    def __str__(self):
        return self.render()


def pf_mul(a: ProductForm, b: ProductForm) -> ProductForm:
    return ProductForm(a.coefficient * b.coefficient, a.qpow + b.qpow, a.factors + b.factors)


def pf_pow(a: ProductForm, k: int) -> ProductForm:
    if k == 0:
        return ProductForm()
    if a.coefficient == 0 and k < 0:
        raise ZeroDivisionError("negative power of a zero product")
    return ProductForm(a.coefficient ** k, a.qpow * k, tuple((key, e * k) for key, e in a.factors))


def pf_div(a: ProductForm, b: ProductForm) -> ProductForm:
    return pf_mul(a, pf_pow(b, -1))


# -- building blocks ----------------------------------------------------------


def _poch_inf(sign: int, k: int, modulus: int) -> ProductForm:
    """``(sign q^k; q^modulus)_inf`` for ``0 <= k <= modulus``."""
    if not 0 <= k <= modulus:
        raise ValueError("block start must lie in [0, modulus]")
    if sign == 1:
        if k == 0:
            raise ZeroTheta(f"(1; q^{modulus}) vanishes")
        return ProductForm.make(1, 0, {(modulus, k % modulus): 1})
    if k == 0:
        # (-1; Q) = 2 (-Q; Q) = 2 (Q^2; Q^2) / (Q; Q)
        return ProductForm.make(2, 0, [((2 * modulus, 0), 1), ((modulus, 0), -1)])
    # (-x; Q) = (x^2; Q^2) / (x; Q)
    return ProductForm.make(1, 0, [((2 * modulus, (2 * k) % (2 * modulus)), 1), ((modulus, k % modulus), -1)])


def eta(m: int) -> ProductForm:
    """Theta_m = (q^m; q^m)_inf."""
    if m < 1:
        raise ValueError("modulus must be positive")
    return ProductForm.make(1, 0, {(m, 0): 1})


def theta(a: int, m: int, barred: bool = False) -> ProductForm:
    """Theta_{a,m} = Theta(q^a; q^m), or Theta(-q^a; q^m) when ``barred``."""
    return theta_general(-1 if barred else 1, a, 1, m)


def theta_general(sign_x: int, a: int, sign_base: int, m: int) -> ProductForm:
    """Theta(sign_x q^a; sign_base q^m) reduced to a product form."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if sign_x not in (1, -1) or sign_base not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    coeff = Fraction(1)
    qpow = 0
    s, e = sign_x, a
    # quasi-periodicity Theta(p x; p) = -x^{-1} Theta(x; p) with p = sign_base q^m
    while e >= m:
        s, e = s * sign_base, e - m
        coeff *= -s
        qpow -= e
    while e < 0:
        coeff *= -s
        qpow += e
        s, e = s * sign_base, e + m
    if s == 1 and e == 0:
        raise ZeroTheta(f"Theta(q^{a}; {'-' if sign_base < 0 else ''}q^{m}) vanishes identically")
    head = ProductForm(coeff, qpow)
    if sign_base == 1:
        # (x; Q)(Q/x; Q)(Q; Q)
        blocks = [(s, e, m), (s, m - e, m), (1, m, m)]
    else:
        # (x; -Q)_inf = (x; Q^2)(-xQ; Q^2), applied to each triple-product block
        blocks = [
            (s, e, 2 * m), (-s, e + m, 2 * m),
            (-s, m - e, 2 * m), (s, 2 * m - e, 2 * m),
            (-1, m, 2 * m), (1, 2 * m, 2 * m),
        ]
    out = head
    for sg, k, mod in blocks:
        out = pf_mul(out, _poch_inf(sg, k, mod))
    return out


def pochhammer_form(sign: int, a: int, m: int) -> ProductForm:
    """The infinite product (sign q^a; q^m)_inf as a product form (0 <= a <= m)."""
    if sign == 1 and a == 0:
        raise DivergentProduct("(1; q^m)_inf contains the factor 1 - 1")
    if a > m:
        raise ValueError("use pochhammer() for starts beyond the modulus")
    return _poch_inf(sign, a, m)


# -- expansion ----------------------------------------------------------------


def _block_exponents(p: ProductForm, length: int) -> np.ndarray:
    expo = np.zeros(max(length, 1), dtype=object)
    expo.fill(0)
    for (d, g), e in p.factors:
        start = g if g else d
        expo[start:length:d] += e
    return expo


def expand_unit(p: ProductForm, length: int) -> np.ndarray:
    """Integer coefficients of the bare product prod (1-q^n)^{a_n}, ``length`` terms.

    Uses the logarithmic-derivative recurrence n f_n = sum_k s_k f_{n-k} with
    s_k = -sum_{d | k} d a_d, which costs O(length^2) no matter how many
    blocks the product has.
    """
    f = _zeros(length)
    if length == 0:
        return f
    f[0] = 1
    if not p.factors or length == 1:
        return f
    a = _block_exponents(p, length)
    s = np.zeros(length, dtype=object)
    s.fill(0)
    for d in range(1, length):
        if a[d]:
            s[d::d] -= d * a[d]
    for n in range(1, length):
        t = np.dot(s[1:n + 1], f[n - 1::-1])
        q, r = divmod(t, n)
        if r:
            raise ArithmeticError("non-integral coefficient in eta-product recurrence")
        f[n] = q
    return f


def expand(p: ProductForm, order: int) -> QSeries:
    """Exact expansion of ``p`` with precision ``order``."""
    if order <= p.qpow:
        raise ValueError(f"order {order} must exceed the leading exponent {p.qpow}")
    if p.coefficient == 0:
        return QSeries.zero(order)
    f = expand_unit(p, order - p.qpow)
    c = p.coefficient
    return QSeries(p.qpow, f * c.numerator, c.denominator, order)


def triple_product_series(a: int, m: int, sign: int, order: int) -> QSeries:
    """Bilateral sum  sum_n (-1)^n q^{m C(n,2)} (sign q^a)^n  up to ``order``."""
    if m < 1:
        raise ValueError("modulus must be positive")

    def expo(n):
        return m * n * (n - 1) // 2 + a * n

    center = math.floor(Fraction(1, 2) - Fraction(a, m))
    terms: dict[int, int] = {}
    for step in (1, -1):
        n = center if step == 1 else center - 1
        while True:
            k = expo(n)
            if k >= order and expo(n + step) > k:
                break
            if k < order:
                c = (-1) ** (n % 2) * sign ** (n % 2)
                terms[k] = terms.get(k, 0) + c
            n += step
    val = min([k for k, c in terms.items() if c] + [order - 1])
    coeffs = [terms.get(k, 0) for k in range(val, order)]
    return QSeries.from_ints(val, coeffs, order)


def pochhammer(sign: int, a: int, m: int, n, order: int) -> QSeries:
    """(sign q^a; q^m)_n to precision ``order``; ``n`` may be ``math.inf``."""
    if m < 1:
        raise ValueError("modulus must be positive")
    infinite = n == math.inf or n is None
    if infinite and a <= 0 and not (a == 0 and sign == -1):
        raise DivergentProduct(f"({'-' if sign < 0 else ''}q^{a}; q^{m})_inf does not converge")
    if order <= 0:
        return QSeries.zero(order)
    coeffs = _zeros(order)
    coeffs[0] = 1
    i = 0
    while infinite or i < n:
        e = a + i * m
        if e >= order:
            break
        if e < 0:
            raise ValueError("finite Pochhammer with negative exponents is not supported")
        # multiply by (1 - sign q^e)
        if e == 0:
            coeffs = coeffs * (1 - sign)
        else:
            coeffs[e:] = coeffs[e:] - sign * coeffs[:order - e]
        i += 1
    return QSeries(0, coeffs, 1, order)
