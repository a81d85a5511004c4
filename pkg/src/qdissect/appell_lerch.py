"""Appell-Lerch sums m(x, q^period, z) with monomial arguments.

Arguments are restricted to signed monomials ``sign * q^exp``; this covers
every sum appearing in the dissection identities and keeps both evaluation
and the genericity test exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import NonGenericParameters, RuleNotApplicable, ZeroTheta
from .series import QSeries, mul, q_shift
from .theta import ProductForm, eta, expand, pf_mul, pf_pow, theta_general

__all__ = [
    "SignedMonomial",
    "ALParams",
    "ALTerm",
    "Expression",
    "al_series",
    "al_rewrite",
    "rewrite_term",
    "difference_term",
    "cor36_expand",
    "expression_series",
    "RULES",
]

RULES = ("shift_z", "inversion", "qx_relation", "q_inverse_relation", "alternative_form")


@dataclass(frozen=True, order=True)
class SignedMonomial:
    """``sign * q^exp``."""

    sign: int = 1
    exp: int = 0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __mul__(self, other: "SignedMonomial") -> "SignedMonomial":
        return SignedMonomial(self.sign * other.sign, self.exp + other.exp)

    def __truediv__(self, other: "SignedMonomial") -> "SignedMonomial":
        return SignedMonomial(self.sign * other.sign, self.exp - other.exp)

    def __pow__(self, k: int) -> "SignedMonomial":
        return SignedMonomial(self.sign ** (k % 2), self.exp * k)

    def __neg__(self) -> "SignedMonomial":
        return SignedMonomial(-self.sign, self.exp)

    def inverse(self) -> "SignedMonomial":
        return SignedMonomial(self.sign, -self.exp)

    def qshift(self, k: int) -> "SignedMonomial":
        return SignedMonomial(self.sign, self.exp + k)

    def as_product(self) -> ProductForm:
        return ProductForm(Fraction(self.sign), self.exp)

    def render(self) -> str:
        body = "1" if self.exp == 0 else ("q" if self.exp == 1 else f"q^{self.exp}")
        return ("-" if self.sign < 0 else "") + body


def _is_base_power(y: SignedMonomial, period: int) -> bool:
    return y.sign == 1 and y.exp % period == 0


@dataclass(frozen=True, order=True)
class ALParams:
    """m(x, q^period, z); construction fails for non-generic arguments."""

    x: SignedMonomial
    period: int
    z: SignedMonomial

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be positive")
        if _is_base_power(self.z, self.period):
            raise NonGenericParameters(f"z = {self.z.render()} is a power of q^{self.period}")
        if _is_base_power(self.x * self.z, self.period):
            raise NonGenericParameters(f"xz = {(self.x * self.z).render()} is a power of q^{self.period}")

    def with_x(self, x: SignedMonomial) -> "ALParams":
        return ALParams(x, self.period, self.z)

    def with_z(self, z: SignedMonomial) -> "ALParams":
        return ALParams(self.x, self.period, z)

    def render(self) -> str:
        return f"AL({self.x.render()},{SignedMonomial(1, self.period).render()},{self.z.render()})"


def al_series(p: ALParams, order: int) -> QSeries:
    """Expansion of m(x, q^period, z) with precision ``order``."""
    period = p.period
    th = theta_general(p.z.sign, p.z.exp, 1, period)
    v_th = th.qpow
    num_prec = order + v_th
    sz, kz = p.z.sign, p.z.exp
    s, e = (p.x * p.z).sign, (p.x * p.z).exp
    terms: dict[int, Fraction] = {}

    def contribute(r: int) -> int:
        """Add the r-th summand; return its valuation."""
        c = (-sz) ** (r % 2)  # (-1)^r z-sign^r
        base = period * r * (r - 1) // 2 + kz * r
        t = period * (r - 1) + e
        if t == 0:
            if s == 1:
                raise NonGenericParameters("pole in the Appell-Lerch summand")
            if base < num_prec:
                terms[base] = terms.get(base, 0) + Fraction(c, 2)
            return base
        if t < 0:
            # 1/(1 - s q^t) = -s q^{-t} / (1 - s q^{-t})
            c, base, t = -s * c, base - t, -t
        k, j = base, 0
        while k < num_prec:
            terms[k] = terms.get(k, 0) + c * (s ** (j % 2))
            k += t
            j += 1
        return base

    # the summand valuation is a convex function of r; walk out from its minimum
    center = round(Fraction(1, 2) - Fraction(kz, period))
    for step in (1, -1):
        r = center if step == 1 else center - 1
        run, last = 0, None
        while run < 3:
            v = contribute(r)
            if v >= num_prec:
                if last is not None and num_prec <= last and v < last:
                    raise AssertionError("Appell-Lerch tail valuations are not increasing")
                run += 1
            else:
                run = 0
            last = v
            r += step
    numerator = QSeries.from_dict(terms, num_prec)
    inv = expand(pf_pow(th, -1), max(order - numerator.valuation, -v_th + 1))
    out = mul(numerator, inv)
    if out.prec != order:
        raise AssertionError("precision bookkeeping error in al_series")
    return out


# -- expressions --------------------------------------------------------------


@dataclass(frozen=True)
class ALTerm:
    """``coeff * q^qpow * m(params)``."""

    coeff: Fraction
    qpow: int
    params: ALParams

    def scaled(self, c, k: int = 0) -> "ALTerm":
        return ALTerm(self.coeff * Fraction(c), self.qpow + k, self.params)


@dataclass(frozen=True)
class Expression:
    """Linear combination of Appell-Lerch sums, theta products and a constant."""

    al_terms: tuple = ()
    theta_terms: tuple = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(
            self,
            "al_terms",
            tuple(t if isinstance(t, ALTerm) else ALTerm(Fraction(t[0]), int(t[1]), t[2]) for t in self.al_terms),
        )
        object.__setattr__(self, "theta_terms", tuple(self.theta_terms))
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def of_al(cls, params: ALParams, coeff=1, qpow: int = 0) -> "Expression":
        return cls((ALTerm(Fraction(coeff), qpow, params),))

    @classmethod
    def of_theta(cls, p: ProductForm) -> "Expression":
        return cls((), (p,))

    def __add__(self, other: "Expression") -> "Expression":
        return Expression(
            self.al_terms + other.al_terms,
            self.theta_terms + other.theta_terms,
            self.constant + other.constant,
        )

    def __neg__(self) -> "Expression":
        return self.scaled(-1)

    def __sub__(self, other: "Expression") -> "Expression":
        return self + (-other)

    def scaled(self, c, k: int = 0) -> "Expression":
        """Multiply by ``c * q^k``."""
        c = Fraction(c)
        if k and self.constant:
            thetas = self.theta_terms + (ProductForm(self.constant, 0),)
            const = Fraction(0)
        else:
            thetas, const = self.theta_terms, self.constant
        return Expression(
            tuple(t.scaled(c, k) for t in self.al_terms),
            tuple(p.scaled(c).shifted(k) for p in thetas),
            const * c,
        )

    def simplify(self) -> "Expression":
        """Merge like terms and drop zero ones."""
        al: dict = {}
        for t in self.al_terms:
            key = (t.qpow, t.params)
            al[key] = al.get(key, 0) + t.coeff
        th: dict = {}
        const = self.constant
        for p in self.theta_terms:
            if p.is_constant:
                const += p.coefficient
                continue
            key = p.monomial()
            th[key] = th.get(key, 0) + p.coefficient
        return Expression(
            tuple(ALTerm(c, k, prm) for (k, prm), c in al.items() if c),
            tuple(m.scaled(c) for m, c in th.items() if c),
            const,
        )

    def series(self, order: int) -> QSeries:
        return expression_series(self, order)

    def render(self) -> str:
        from .dsl import render_expression

        return render_expression(self)


def expression_series(e: Expression, order: int) -> QSeries:
    total = QSeries.monomial(0, order, e.constant) if order > 0 else QSeries.zero(order)
    for t in e.al_terms:
        if t.qpow >= order:
            continue
        s = al_series(t.params, order - t.qpow)
        total = total + q_shift(s, t.qpow) * t.coeff
    for p in e.theta_terms:
        if p.qpow >= order:
            continue
        total = total + expand(p, order)
    return total


# -- transformation rules ------------------------------------------------------


def al_rewrite(p: ALParams, rule: str, steps: int = 1) -> Expression:
    """Rewrite m(p) by one of the five elementary rules, returning an equal expression.

    ``steps`` only matters for ``shift_z``: z is multiplied by (q^period)^steps.
    """
    Q = SignedMonomial(1, p.period)
    x = p.x
    try:
        if rule == "shift_z":
            return Expression.of_al(p.with_z(p.z.qshift(p.period * steps)))
        if rule == "inversion":
            # m(x,Q,z) = x^{-1} m(x^{-1},Q,z^{-1})
            return Expression.of_al(ALParams(x.inverse(), p.period, p.z.inverse()), x.sign, -x.exp)
        if rule == "qx_relation":
            # m(Q y,Q,z) = 1 - y m(y,Q,z)
            y = x / Q
            return Expression((ALTerm(Fraction(-y.sign), y.exp, p.with_x(y)),), (), 1)
        if rule == "q_inverse_relation":
            # m(x,Q,z) = 1 - Q^{-1} x m(Q^{-1} x,Q,z)
            y = x / Q
            return Expression((ALTerm(Fraction(-y.sign), y.exp, p.with_x(y)),), (), 1)
        if rule == "alternative_form":
            # m(x,Q,z) = x^{-1} - x^{-1} m(Q x,Q,z)
            return Expression(
                (ALTerm(Fraction(-x.sign), -x.exp, p.with_x(x * Q)),),
                (x.inverse().as_product(),),
            )
    except NonGenericParameters as exc:
        raise RuleNotApplicable(f"{rule} leads to non-generic parameters: {exc}") from exc
    raise RuleNotApplicable(f"unknown rule {rule!r}; expected one of {', '.join(RULES)}")


def rewrite_term(e: Expression, index: int, rule: str, steps: int = 1) -> Expression:
    """Apply ``rule`` to the ``index``-th Appell-Lerch term of ``e``."""
    t = e.al_terms[index]
    rest = Expression(e.al_terms[:index] + e.al_terms[index + 1:], e.theta_terms, e.constant)
    return rest + al_rewrite(t.params, rule, steps).scaled(t.coeff, t.qpow)


def _th(y: SignedMonomial, period: int) -> ProductForm:
    return theta_general(y.sign, y.exp, 1, period)


def difference_term(x: SignedMonomial, period: int, z1: SignedMonomial, z0: SignedMonomial) -> ProductForm:
    """m(x,Q,z1) - m(x,Q,z0) as a single theta quotient, Q = q^period."""
    num = [_th(z1 / z0, period), _th(x * z0 * z1, period)]
    den = [_th(z0, period), _th(z1, period), _th(x * z0, period), _th(x * z1, period)]
    out = pf_mul(z0.as_product(), pf_pow(eta(period), 3))
    for f in num:
        out = pf_mul(out, f)
    for f in den:
        out = pf_mul(out, pf_pow(f, -1))
    return out


def _quotient(num: Iterable[tuple[SignedMonomial, int]], den: Iterable[tuple[SignedMonomial, int]]) -> ProductForm | None:
    """Product of numerator thetas over denominator thetas; None if a numerator vanishes."""
    out = ProductForm()
    for y, per in num:
        try:
            out = pf_mul(out, _th(y, per))
        except ZeroTheta:
            return None
    for y, per in den:
        try:
            out = pf_mul(out, pf_pow(_th(y, per), -1))
        except ZeroTheta as exc:
            raise NonGenericParameters(f"vanishing theta in a denominator: {exc}") from exc
    return out


def cor36_expand(p: ALParams, n: int, z_prime: SignedMonomial) -> Expression:
    """Split m(x, Q, z) into n sums at base Q^(n^2) plus theta corrections."""
    if n < 1:
        raise ValueError("n must be positive")
    D = p.period
    x, z, zp = p.x, p.z, z_prime
    Qn, Qnn = D * n, D * n * n
    odd = n % 2 == 1
    al_terms = []
    for r in range(n):
        xr = SignedMonomial(x.sign ** n, D * (n * (n - 1) // 2 - n * r) + n * x.exp)
        if not odd:
            xr = -xr
        coeff = (-x.sign) ** (r % 2)
        qpow = -D * r * (r + 1) // 2 + x.exp * r
        al_terms.append(ALTerm(Fraction(coeff), qpow, ALParams(xr, Qnn, zp)))

    prefactor = _quotient([], [(x * z, D), (zp, Qnn)])
    prefactor = pf_mul(pf_mul(zp.as_product(), pf_pow(eta(Qn), 3)), prefactor)
    thetas = []
    xn = x ** n
    for r in range(n):
        if odd:
            mono = SignedMonomial((-x.sign) ** (r % 2), D * r * (r - n) // 2 + x.exp * r) * z ** (r - (n - 1) // 2)
            top = [((xn * z * zp).qshift(D * r), Qn)]
            bottom = [((xn * zp), Qn)]
        else:
            mono = SignedMonomial((-x.sign) ** (r % 2), D * r * (r - n + 1) // 2 + x.exp * r) * z ** (r + 1 - n // 2)
            top = [(-(xn * z * zp).qshift(D * (r + n // 2)), Qn)]
            bottom = [(-(xn * zp).qshift(D * n // 2), Qn)]
        top.append(((z ** n / zp).qshift(D * n * r), Qnn))
        bottom.append((z.qshift(D * r), Qn))
        q = _quotient(top, bottom)
        if q is None:
            continue
        thetas.append(pf_mul(pf_mul(prefactor, mono.as_product()), q))
    return Expression(tuple(al_terms), tuple(thetas))
