"""Valence-formula prover for identities among generalized eta quotients.

An identity sum_j c_j M_j = 0 between theta monomials is divided through by
one of its terms, giving g = sum_j alpha_j F_j + C0 with every F_j a
weight-zero modular function on Gamma_1(N).  If the q-expansion of g vanishes
beyond the bound -B assembled from the orders of the F_j at the cusps, then g
is identically zero.

The textbook bound sums the per-cusp minima over the cusps other than
infinity.  By default the minimum at infinity is added as well; this only
raises -B (so every proof remains valid) and it is the convention under which
the published verification tables are reproduced.

Orders use the generalized eta function eta_{delta,g}: at the cusp a/c its
order is gcd(c,delta)^2 / (2 delta) * P2(a g / gcd(c,delta)) with
P2(t) = {t}^2 - {t} + 1/6.  A single block (q^g; q^delta)_inf with
0 < g < delta is assigned half of that (blocks occur in pairs g, delta-g),
and the full block (q^delta; q^delta)_inf gets gcd(c,delta)^2 / (24 delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import LevelMismatch, NotModular, UnsupportedLevel, ZeroTheta
from .series import QSeries
from .theta import ProductForm, expand, pf_div

__all__ = [
    "Cusp",
    "CuspDatum",
    "IdentityInstance",
    "ProofCertificate",
    "P2",
    "cusps_gamma1",
    "cusp_count",
    "ord_at_cusp",
    "ORD",
    "valence_bound",
    "normalize_identity",
    "check_modular",
    "prove",
    "residue_series",
]


@dataclass(frozen=True, order=True)
class Cusp:
    a: int
    c: int

    def __str__(self):
        return "oo" if self.c == 0 else f"{self.a}/{self.c}"


@dataclass(frozen=True)
class CuspDatum:
    cusp: Cusp
    width: int

    @property
    def is_infinity(self) -> bool:
        return self.cusp.c == 0


def P2(t: Fraction) -> Fraction:
    """Second periodic Bernoulli polynomial {t}^2 - {t} + 1/6."""
    t = Fraction(t)
    f = t - math.floor(t)
    return f * f - f + Fraction(1, 6)


def _phi(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def cusp_count(N: int) -> int:
    """Number of cusps of Gamma_1(N) for N >= 5."""
    return sum(_phi(d) * _phi(N // d) for d in range(1, N + 1) if N % d == 0) // 2


@lru_cache(maxsize=None)
def _cusps(N: int) -> tuple[CuspDatum, ...]:
    # A cusp a/c of Gamma_1(N) is determined by +-(c mod N, a mod gcd(c,N)).
    seen = set()
    out = [CuspDatum(Cusp(1, 0), 1)]
    seen.add((0, 1 % N))
    seen.add((0, (-1) % N))
    for c in range(0, N):
        g = math.gcd(c, N)
        for a0 in range(g):
            if math.gcd(a0, g) != 1:
                continue
            key = (c, a0)
            if key in seen:
                continue
            seen.add(key)
            neg = ((-c) % N, (-a0) % g)
            seen.add(neg)
            if c == 0:
                rep = Cusp(a0, N)
            else:
                a = a0 if a0 else g
                while math.gcd(a, c) != 1:
                    a += g
                rep = Cusp(a, c)
            out.append(CuspDatum(rep, N // math.gcd(rep.c, N)))
    return tuple(out)


def cusps_gamma1(N: int) -> list[CuspDatum]:
    """Inequivalent cusps of Gamma_1(N) with widths N / gcd(c, N); infinity first."""
    if N <= 4:
        raise UnsupportedLevel(f"level {N} has irregular cusps; only N >= 5 is supported")
    return list(_cusps(N))


def _check_level(p: ProductForm, N: int) -> None:
    bad = sorted(d for d in p.moduli() if N % d)
    if bad:
        raise LevelMismatch(f"moduli {bad} do not divide the level {N}")


def ord_at_cusp(p: ProductForm, cusp: Cusp, N: int) -> Fraction:
    """Invariant order of the monomial ``p`` at ``cusp`` (before multiplying by the width)."""
    _check_level(p, N)
    a, c = cusp.a, cusp.c
    total = Fraction(0)
    for (d, g), e in p.factors:
        gc = math.gcd(c, d)
        if g == 0:
            total += e * Fraction(gc * gc, 24 * d)
        else:
            total += e * Fraction(gc * gc, 4 * d) * P2(Fraction(a * g, gc))
    return total


def ORD(p: ProductForm, datum: CuspDatum, N: int) -> Fraction:
    return datum.width * ord_at_cusp(p, datum.cusp, N)


def check_modular(p: ProductForm, N: int) -> None:
    """Raise NotModular unless ``p`` looks like a weight-zero eta quotient of level N."""
    _check_level(p, N)
    fm = p.factor_map
    weight = sum(e for (d, g), e in p.factors if g == 0)
    if weight:
        raise NotModular(f"{p.render()} has nonzero weight {Fraction(weight, 2)}")
    for (d, g), e in p.factors:
        if g and fm.get((d, d - g)) != e:
            raise NotModular(f"block ({d}:{g}) of {p.render()} is not paired with ({d}:{d - g})")
    at_inf = ord_at_cusp(p, Cusp(1, 0), N)
    if at_inf != p.qpow:
        raise NotModular(
            f"{p.render()}: q-power {p.qpow} differs from the eta-quotient order {at_inf} at infinity"
        )


@dataclass(frozen=True)
class IdentityInstance:
    """g = sum alpha_j F_j + constant, each F_j a monomial with coefficient 1."""

    terms: tuple  # of (Fraction, ProductForm)
    constant: Fraction
    level: int
    label: str = ""

    @property
    def monomials(self) -> list[ProductForm]:
        return [m for _, m in self.terms]


def normalize_identity(
    lhs: Sequence[tuple], rhs: Sequence[tuple], level: int, normalizer: int | None = None, label: str = ""
) -> IdentityInstance:
    """Turn ``sum lhs = sum rhs`` into g = sum alpha_j F_j + C0.

    Each side is a list of (coefficient, ProductForm).  Everything is divided
    by the term at position ``normalizer`` in the concatenated list
    lhs + rhs, which then becomes the constant.  The default is the last
    right-hand term.  Any choice gives a sound bound.
    """
    raw = [(Fraction(c) * p.coefficient, p.monomial()) for c, p in lhs]
    raw += [(-Fraction(c) * p.coefficient, p.monomial()) for c, p in rhs]
    if not raw:
        raise ValueError("an identity needs at least one term")
    idx = -1 if normalizer is None else normalizer
    if idx < 0:
        idx += len(raw)
    nc, nm = raw[idx]
    if nc == 0:
        raise ZeroTheta("normalizing term has zero coefficient")
    merged: dict = {}
    constant = Fraction(0)
    for c, m in raw:
        q = pf_div(m, nm)
        alpha = c / nc
        if q.is_constant:
            constant += alpha * q.coefficient
            continue
        key = q.monomial()
        merged[key] = merged.get(key, 0) + alpha * q.coefficient
    terms = tuple((a, m) for m, a in merged.items() if a)
    return IdentityInstance(terms, constant, level, label)


def valence_bound(
    inst: IdentityInstance, cusps: Sequence[CuspDatum] | None = None, include_infinity: bool = True
) -> Fraction:
    """Sum over cusps of min({ORD(F_j)} + {0}); ``include_infinity=False`` gives the textbook bound."""
    cusps = cusps_gamma1(inst.level) if cusps is None else cusps
    B = Fraction(0)
    for datum in cusps:
        if datum.is_infinity and not include_infinity:
            continue
        B += min([ORD(m, datum, inst.level) for m in inst.monomials] + [Fraction(0)])
    return B


def residue_series(inst: IdentityInstance, order: int) -> QSeries:
    total = QSeries.monomial(0, order, inst.constant) if order > 0 else QSeries.zero(order)
    for alpha, m in inst.terms:
        if m.qpow >= order:
            continue
        total = total + expand(m, order) * alpha
    return total


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class ProofCertificate:
    label: str
    level: int
    cusps: list
    ord_table: list  # rows: monomials, columns: cusps
    B: Fraction
    required_order: int
    verified_order: int
    status: str
    first_failure: int | None = None
    monomials: list = field(default_factory=list)

    @property
    def minus_B(self) -> Fraction:
        return -self.B

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "cusps": [{"a": d.cusp.a, "c": d.cusp.c, "width": d.width} for d in self.cusps],
            "ord_table": [[_frac(x) for x in row] for row in self.ord_table],
            "B": _frac(self.B),
            "required_order": self.required_order,
            "verified_order": self.verified_order,
            "status": self.status,
        }


def prove(
    inst: IdentityInstance,
    extra_order_margin: int = 10,
    check_through: int | None = None,
    include_infinity: bool = True,
) -> ProofCertificate:
    """Run the valence-formula proof; expand through max(required, check_through) + margin."""
    N = inst.level
    cusps = cusps_gamma1(N)
    for m in inst.monomials:
        check_modular(m, N)
    table = [[ORD(m, d, N) for d in cusps] for m in inst.monomials]
    B = valence_bound(inst, cusps, include_infinity)
    required = math.floor(-B) + 1
    target = max(required, check_through or 0) + extra_order_margin
    res = residue_series(inst, target + 1)
    first = next((n for n, c in res.terms()), None)
    verified = target if first is None else first - 1
    status = "proved" if first is None or first > required else "expansion_failed"
    return ProofCertificate(
        label=inst.label,
        level=N,
        cusps=cusps,
        ord_table=table,
        B=B,
        required_order=required,
        verified_order=verified,
        status=status,
        first_failure=first,
        monomials=inst.monomials,
    )
