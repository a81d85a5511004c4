"""Step-by-step 3-dissection of B_2(q) through Appell-Lerch sums.

The pipeline is generic: write a function as Appell-Lerch sums, split each
sum with :func:`cor36_expand`, tidy the pieces with the elementary rewrite
rules, and match what is left against catalog entries evaluated at q^k.
Matching is a finite lookup; anything that cannot be matched is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .appell_lerch import (
    ALParams,
    ALTerm,
    Expression,
    SignedMonomial,
    cor36_expand,
    difference_term,
    rewrite_term,
)
from .catalog import CATALOG, catalog_series
from .dsl import (
    CatalogCall,
    Node,
    _qpow_ast,
    _sum_ast,
    _summands,
    _term_ast,
    eval_series,
    expression_ast,
    parse,
    render,
)
from .errors import QDissectError

__all__ = ["CatalogTerm", "Match", "Step", "Walkthrough", "catalog_at", "match_catalog", "b2_walkthrough"]

B2_THETA_PART = (
    "q^-5*(T36^3*Tg(12,36)^2/(Tb(0,36)^2*Tb(12,36)^2)"
    " - T12^3*Tb(5,12)*Tb(15,36)/(Tg(1,4)*Tg(5,12)*Tb(0,36)*Tb(0,12)))"
    " + T12^3*Tb(3,12)*Tb(9,36)/(q^4*Tg(1,4)*Tg(3,12)*Tb(0,36)*Tb(0,12))"
    " + T12^3*Tb(1,12)*Tb(3,36)/(q^2*Tg(1,4)*Tg(1,12)*Tb(0,36)*Tb(0,12))"
)
B2_THETA_DISSECTED = (
    "1/4*q^-5*(T24^2*T36^9/(T12^4*T72^6) - T9*T12^9*T18^3/(T3^3*T6*T24^5*T36^2*T72))"
    " + 3/4*q^-2*T6^7*T9^2*T36^4/(T3^6*T12*T18*T24^2*T72^2)"
    " + q^-1*T12^8*T18^2/(T3^4*T24^4*T36)"
    " + T6^7*T9^2/(T3^6*T12*T18)"
    " - 2*q^7*T72^3/(T12*T24)"
)


@dataclass(frozen=True)
class CatalogTerm:
    """``coeff * q^qpow * name(sign * q^k)``."""

    coeff: Fraction
    qpow: int
    name: str
    k: int
    negate: bool = False

    def ast(self) -> tuple[int, Node]:
        factors = [_qpow_ast(self.qpow)] if self.qpow else []
        factors.append(CatalogCall(self.name, SignedMonomial(-1 if self.negate else 1, self.k)))
        return _term_ast(self.coeff, factors)


def _sub(m: SignedMonomial, k: int, negate: bool) -> SignedMonomial:
    sign = m.sign * (-1 if negate and m.exp % 2 else 1)
    return SignedMonomial(sign, m.exp * k)


def catalog_at(name: str, k: int, negate: bool = False) -> Expression:
    """The working Appell-Lerch form of ``name`` with q replaced by q^k, or by -q^k when ``negate``."""
    rep = CATALOG[name].working_rep
    al = []
    for t in rep.al_terms:
        p = t.params
        if negate and p.period % 2:
            raise QDissectError(f"{name}(-q^{k}) has a negative Appell-Lerch base")
        c = t.coeff * (-1 if negate and t.qpow % 2 else 1)
        al.append(ALTerm(c, t.qpow * k, ALParams(_sub(p.x, k, negate), p.period * k, _sub(p.z, k, negate))))
    if rep.theta_terms and negate:
        raise QDissectError(f"{name}(-q^{k}) has a theta part; only q^k substitutions are supported")
    thetas = tuple(p.substitute_power(k) for p in rep.theta_terms)
    return Expression(tuple(al), thetas, rep.constant)


_RULES = ("inversion", "qx_relation", "alternative_form")


def _align_x(term: ALTerm, x: SignedMonomial, depth: int) -> Expression | None:
    """Rewrite ``term`` with the elementary rules until its x equals ``x``."""
    frontier = [Expression((term,))]
    for _ in range(depth + 1):
        nxt = []
        for e in frontier:
            if e.al_terms[0].params.x == x:
                return e
            for rule in _RULES:
                try:
                    nxt.append(rewrite_term(e, 0, rule))
                except QDissectError:
                    pass
        frontier = nxt
    return None


@dataclass
class Match:
    terms: list  # of CatalogTerm
    remainder: Expression  # theta terms and constant, plus unmatched Appell-Lerch terms

    @property
    def unmatched(self) -> tuple:
        return self.remainder.al_terms


def match_catalog(e: Expression, targets: Sequence[tuple[str, int, bool]], depth: int = 2) -> Match:
    """Express the Appell-Lerch part of ``e`` through catalog functions at q^k.

    Each target is (name, k, negate) and must have a single Appell-Lerch
    term.  A term of ``e`` matches when elementary rewrites bring its x to the
    target's x on the same period; a differing z is then moved with
    :func:`difference_term`.  The theta part of each matched catalog entry is
    subtracted from the remainder.
    """
    forms = []
    for name, k, neg in targets:
        rep = catalog_at(name, k, neg)
        if len(rep.al_terms) != 1:
            raise QDissectError(f"catalog target {name} must have exactly one Appell-Lerch term")
        forms.append(((name, k, neg), rep))
    rest = Expression((), e.theta_terms, e.constant)
    found: dict = {}
    for term in e.al_terms:
        for key, rep in forms:
            t = rep.al_terms[0]
            if t.params.period != term.params.period:
                continue
            aligned = _align_x(term, t.params.x, depth)
            if aligned is None:
                continue
            a = aligned.al_terms[0]
            extra = Expression((), aligned.theta_terms, aligned.constant)
            if a.params.z != t.params.z:
                d = difference_term(a.params.x, a.params.period, a.params.z, t.params.z)
                extra = extra + Expression.of_theta(d.scaled(a.coeff).shifted(a.qpow))
            # a.coeff q^a.qpow m(P) = (a.coeff / t.coeff) q^(a.qpow - t.qpow) * (target - target thetas)
            c = a.coeff / t.coeff
            shift = a.qpow - t.qpow
            found[(key, shift)] = found.get((key, shift), 0) + c
            rest = rest + extra - Expression((), rep.theta_terms, rep.constant).scaled(c, shift)
            break
        else:
            rest = rest + Expression((term,))
    cats = [CatalogTerm(Fraction(c), shift, name, k, neg) for ((name, k, neg), shift), c in found.items() if c]
    return Match(cats, rest.simplify())


@dataclass
class Step:
    number: int
    title: str
    text: str
    checked_order: int
    ok: bool

    def to_json(self) -> dict:
        return {"step": self.number, "title": self.title, "expression": self.text,
                "checked_order": self.checked_order, "ok": self.ok}


@dataclass
class Walkthrough:
    steps: list = field(default_factory=list)
    final_rhs: str = ""

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def to_json(self) -> dict:
        return {"ok": self.ok, "final_rhs": self.final_rhs, "steps": [s.to_json() for s in self.steps]}


def _mixed_text(cats: Sequence[CatalogTerm], rest: Expression) -> str:
    terms = [c.ast() for c in cats]
    if rest.al_terms or rest.theta_terms or rest.constant:
        terms += list(_summands(expression_ast(rest)))
    return render(_sum_ast(terms))


def b2_walkthrough(order: int = 150) -> Walkthrough:
    """Derive the 3-dissection of B_2, checking every stage against B_2 itself."""
    target = catalog_series("B2", order)
    out = Walkthrough()

    def record(title: str, text: str) -> None:
        ok = (eval_series(text, order) - target).first_nonzero() is None
        out.steps.append(Step(len(out.steps) + 1, title, text, order, ok))

    q3 = SignedMonomial(1, 3)
    start = CATALOG["B2"].working_rep
    record("Appell-Lerch form m(1,q^4,q^3)", _mixed_text([], start))

    t = start.al_terms[0]
    assert t.params == ALParams(SignedMonomial(1, 0), 4, q3)
    split = cor36_expand(t.params, 3, SignedMonomial(-1, 0)).scaled(t.coeff, t.qpow)
    record("split with n = 3, z' = -1", _mixed_text([], split))

    idx = next(i for i, a in enumerate(split.al_terms) if a.params.x.exp < 0)
    inverted = rewrite_term(split, idx, "inversion").simplify()
    record("inversion of m(q^-12,q^36,-1)", _mixed_text([], inverted))

    idx = next(i for i, a in enumerate(inverted.al_terms) if a.params.x.exp == 0)
    a = inverted.al_terms[idx]
    z0 = SignedMonomial(-1, 12)
    moved = Expression(
        inverted.al_terms[:idx] + (ALTerm(a.coeff, a.qpow, a.params.with_z(z0)),) + inverted.al_terms[idx + 1:],
        inverted.theta_terms
        + (difference_term(a.params.x, a.params.period, a.params.z, z0).scaled(a.coeff).shifted(a.qpow),),
        inverted.constant,
    )
    record("difference formula with z1 = -1, z0 = -q^12", _mixed_text([], moved))

    match = match_catalog(moved, [("psi6", 12, False), ("phi6", 12, False)])
    if match.unmatched:
        raise QDissectError(f"unmatched Appell-Lerch terms: {match.unmatched}")
    order_key = {"psi6": 0, "phi6": 1}
    cats = sorted(match.terms, key=lambda c: order_key.get(c.name, 2))
    record("match against psi6(q^12) and phi6(q^12)", _mixed_text(cats, match.remainder))

    theta_ok = (match.remainder.series(order) - eval_series(B2_THETA_PART, order)).first_nonzero() is None
    dissected_ok = (eval_series(B2_THETA_PART, order) - eval_series(B2_THETA_DISSECTED, order)).first_nonzero() is None
    out.steps.append(Step(len(out.steps) + 1, "3-dissect the theta part", B2_THETA_DISSECTED, order,
                          theta_ok and dissected_ok))

    final = render(_sum_ast([c.ast() for c in cats] + list(_summands(parse(B2_THETA_DISSECTED)))))
    out.final_rhs = final
    record("assemble", final)
    return out
