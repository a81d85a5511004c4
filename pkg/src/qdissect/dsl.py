"""Expression language for theta quotients, Appell-Lerch sums and catalog calls.

Grammar (whitespace is insignificant)::

    expr     := term { ("+" | "-") term }
    term     := power { ("*" | "/") power }
    power    := "-" power | atom [ "^" sint ]
    atom     := rational | "q" | "T" uint | "Tg(" sint "," uint ")"
              | "Tb(" sint "," uint ")" | "Th(" mono ";" mono ")"
              | "AL(" mono "," mono "," mono ")" | name "(" mono ")"
              | "(" uint ":" uint ")" | "(" expr ")"
    mono     := [ "-" ] ( "1" | "q" [ "^" sint ] )
    rational := uint [ "/" uint ]

``(d:g)`` is the single block (q^g; q^d)_inf, which lets rendered product
forms be read back.  A literal ``a/b`` is only read as one rational when the
``a`` does not itself follow a division sign, so ``x/2/3`` is ``(x/2)/3``.
Unary minus binds looser than ``^``: ``-T1^2`` is ``-(T1^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .appell_lerch import ALParams, ALTerm, Expression, SignedMonomial, al_series
from .catalog import ALIASES, NAMES, canonical_name, transformed_series
from .errors import (
    DslSyntaxError,
    EvaluationError,
    NonGenericParameters,
    NotAThetaCombination,
    QDissectError,
    UnknownName,
    ZeroTheta,
)
from .series import QSeries, mul
from .theta import ProductForm, eta, expand, pf_mul, pf_pow, theta, theta_general

__all__ = [
    "Span",
    "parse",
    "render",
    "render_expression",
    "eval_series",
    "eval_monomials",
    "eval_expression",
    "eval_text",
    "Number", "QPower", "Theta", "ThetaG", "ThetaB", "ThetaGen", "Block", "AL", "CatalogCall",
    "Neg", "Add", "Sub", "Mul", "Div", "Pow",
]


@dataclass(frozen=True)
class Span:
    start: int
    end: int


# -- AST -----------------------------------------------------------------------

_NOSPAN = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Number:
    value: Fraction
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class QPower:
    k: int
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Theta:
    m: int
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class ThetaG:
    a: int
    m: int
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class ThetaB:
    a: int
    m: int
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class ThetaGen:
    x: SignedMonomial
    base: SignedMonomial
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Block:
    delta: int
    g: int
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class AL:
    x: SignedMonomial
    base: SignedMonomial
    z: SignedMonomial
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class CatalogCall:
    name: str
    arg: SignedMonomial
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"
    span: Span | None = _NOSPAN


@dataclass(frozen=True)
class Pow:
    base: "Node"
    k: int
    span: Span | None = _NOSPAN


Node = Union[Number, QPower, Theta, ThetaG, ThetaB, ThetaGen, Block, AL, CatalogCall, Neg, Add, Sub, Mul, Div, Pow]
_ATOMS = (Number, QPower, Theta, ThetaG, ThetaB, ThetaGen, Block, AL, CatalogCall)


# -- lexer ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),;:]))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # int, name, op, eof
    text: str
    start: int
    end: int


def _lex(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise DslSyntaxError(f"unexpected character {src[pos]!r}", Span(pos, pos + 1))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind), m.end()))
        pos = m.end()
    toks.append(_Tok("eof", "", n, n))
    return toks


# -- parser --------------------------------------------------------------------

_THETA_NAME = re.compile(r"T(\d+)$")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _lex(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}", [repr(text)])
        return self.advance()

    def fail(self, message: str, expected=()):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DslSyntaxError(f"{message}, found {found}", Span(t.start, t.end), expected)

    def span_from(self, start: int) -> Span:
        return Span(start, self.toks[self.i - 1].end)

    # grammar rules

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input", ["'+'", "'-'", "'*'", "'/'", "end of input"])
        return node

    def expr(self) -> Node:
        start = self.tok.start
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            right = self.term()
            cls = Add if op == "+" else Sub
            node = cls(node, right, self.span_from(start))
        return node

    def term(self) -> Node:
        start = self.tok.start
        node = self.power()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            right = self.power(after_slash=op == "/")
            cls = Mul if op == "*" else Div
            node = cls(node, right, self.span_from(start))
        return node

    def power(self, after_slash: bool = False) -> Node:
        start = self.tok.start
        if self.at("-"):
            self.advance()
            operand = self.power()
            return Neg(operand, self.span_from(start))
        node = self.atom(after_slash)
        if self.at("^"):
            self.advance()
            k = self.sint()
            node = Pow(node, k, self.span_from(start))
        return node

    def uint(self) -> int:
        if self.tok.kind != "int":
            self.fail("expected an unsigned integer", ["integer"])
        return int(self.advance().text)

    def sint(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        elif self.at("+"):
            self.advance()
        return sign * self.uint()

    def mono(self) -> SignedMonomial:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        t = self.tok
        if t.kind == "int" and t.text == "1":
            self.advance()
            return SignedMonomial(sign, 0)
        if t.kind == "name" and t.text == "q":
            self.advance()
            k = 1
            if self.at("^"):
                self.advance()
                k = self.sint()
            return SignedMonomial(sign, k)
        self.fail("expected a monomial", ["'1'", "'q'", "'q^k'", "'-q^k'"])

    def atom(self, after_slash: bool = False) -> Node:
        t = self.tok
        start = t.start
        if t.kind == "int":
            self.advance()
            value = Fraction(int(t.text))
            if not after_slash and self.at("/") and self.peek().kind == "int":
                self.advance()
                den = self.uint()
                if den == 0:
                    raise DslSyntaxError("zero denominator", self.span_from(start))
                value = Fraction(int(t.text), den)
            return Number(value, self.span_from(start))
        if t.kind == "op" and t.text == "(":
            if self.peek().kind == "int" and self.peek(2).kind == "op" and self.peek(2).text == ":":
                self.advance()
                d = self.uint()
                self.expect(":")
                g = self.uint()
                self.expect(")")
                if d < 1 or not 0 <= g < d:
                    raise DslSyntaxError("block needs 0 <= g < delta", self.span_from(start))
                return Block(d, g, self.span_from(start))
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            name = t.text
            if name == "q":
                self.advance()
                return QPower(1, self.span_from(start))
            m = _THETA_NAME.match(name)
            if m:
                self.advance()
                k = int(m.group(1))
                if k < 1:
                    raise DslSyntaxError("theta modulus must be positive", self.span_from(start))
                return Theta(k, self.span_from(start))
            if name in ("Tg", "Tb"):
                self.advance()
                self.expect("(")
                a = self.sint()
                self.expect(",")
                mm = self.uint()
                self.expect(")")
                if mm < 1:
                    raise DslSyntaxError("theta modulus must be positive", self.span_from(start))
                cls = ThetaG if name == "Tg" else ThetaB
                return cls(a, mm, self.span_from(start))
            if name == "Th":
                self.advance()
                self.expect("(")
                x = self.mono()
                self.expect(";")
                base = self.mono()
                self.expect(")")
                if base.exp < 1:
                    raise DslSyntaxError("theta base must be +-q^m with m >= 1", self.span_from(start))
                return ThetaGen(x, base, self.span_from(start))
            if name == "AL":
                self.advance()
                self.expect("(")
                x = self.mono()
                self.expect(",")
                base = self.mono()
                self.expect(",")
                z = self.mono()
                self.expect(")")
                if base.sign != 1 or base.exp < 1:
                    raise DslSyntaxError("Appell-Lerch base must be q^k with k >= 1", self.span_from(start))
                return AL(x, base, z, self.span_from(start))
            if self.peek().kind == "op" and self.peek().text == "(":
                if name not in NAMES and name not in ALIASES:
                    raise UnknownName(
                        f"unknown function {name!r}", Span(t.start, t.end), tuple(NAMES)
                    )
                self.advance()
                self.expect("(")
                arg = self.mono()
                self.expect(")")
                if arg.exp < 1:
                    raise DslSyntaxError("catalog argument must be +-q^k with k >= 1", self.span_from(start))
                return CatalogCall(canonical_name(name), arg, self.span_from(start))
            raise UnknownName(f"unknown name {name!r}", Span(t.start, t.end), ("q", "T<m>", "Tg", "Tb", "Th", "AL") + NAMES)
        self.fail(
            "expected an atom",
            ["number", "'q'", "'T<m>'", "'Tg('", "'Tb('", "'Th('", "'AL('", "catalog name", "'('", "'-'"],
        )


def parse(text: str) -> Node:
    """Parse DSL text into an AST; raises DslSyntaxError with a span on failure."""
    return _Parser(text).parse()


# -- rendering -----------------------------------------------------------------


def _mono(m: SignedMonomial) -> str:
    return m.render()


def _num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator) if v >= 0 else f"({v.numerator})"
    return f"({v.numerator}/{v.denominator})"


def _prec(node: Node) -> int:
    if isinstance(node, (Add, Sub)):
        return 1
    if isinstance(node, (Mul, Div)):
        return 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _wrap(node: Node, minimum: int) -> str:
    s = render(node)
    return f"({s})" if _prec(node) < minimum else s


def render(node: Node) -> str:
    """Canonical text for an AST; parse(render(n)) == n."""
    if isinstance(node, Number):
        return _num(node.value)
    if isinstance(node, QPower):
        return "q" if node.k == 1 else f"q^{node.k}"
    if isinstance(node, Theta):
        return f"T{node.m}"
    if isinstance(node, ThetaG):
        return f"Tg({node.a},{node.m})"
    if isinstance(node, ThetaB):
        return f"Tb({node.a},{node.m})"
    if isinstance(node, ThetaGen):
        return f"Th({_mono(node.x)};{_mono(node.base)})"
    if isinstance(node, Block):
        return f"({node.delta}:{node.g})"
    if isinstance(node, AL):
        return f"AL({_mono(node.x)},{_mono(node.base)},{_mono(node.z)})"
    if isinstance(node, CatalogCall):
        return f"{node.name}({_mono(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, 3)
    if isinstance(node, Add):
        return f"{_wrap(node.left, 1)} + {_wrap(node.right, 2)}"
    if isinstance(node, Sub):
        return f"{_wrap(node.left, 1)} - {_wrap(node.right, 2)}"
    if isinstance(node, Mul):
        return f"{_wrap(node.left, 2)}*{_wrap(node.right, 3)}"
    if isinstance(node, Div):
        return f"{_wrap(node.left, 2)}/{_wrap(node.right, 3)}"
    if isinstance(node, Pow):
        return f"{_wrap(node.base, 5)}^{node.k}"
    raise TypeError(f"not an AST node: {node!r}")


# -- evaluation ----------------------------------------------------------------
#
# Every expression evaluates to a finite linear combination of terms
# coefficient * monomial * atom, where the monomial is a ProductForm with
# coefficient 1 and the atom is None, an ALParams or a catalog key
# (name, k, negate).


def _pf_of(node: Node) -> ProductForm:
    if isinstance(node, QPower):
        return ProductForm(1, node.k)
    if isinstance(node, Theta):
        return eta(node.m)
    if isinstance(node, ThetaG):
        return theta(node.a, node.m)
    if isinstance(node, ThetaB):
        return theta(node.a, node.m, barred=True)
    if isinstance(node, ThetaGen):
        return theta_general(node.x.sign, node.x.exp, node.base.sign, node.base.exp)
    if isinstance(node, Block):
        return ProductForm.make(1, 0, {(node.delta, node.g): 1})
    raise TypeError(node)


Combo = dict  # (ProductForm monomial, atom) -> Fraction


def _add_to(out: Combo, key, c) -> None:
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _scale(a: Combo, c) -> Combo:
    return {k: v * c for k, v in a.items()} if c else {}


def _mul(a: Combo, b: Combo, node: Node) -> Combo:
    out: Combo = {}
    for (ma, xa), ca in a.items():
        for (mb, xb), cb in b.items():
            if xa is not None and xb is not None:
                raise EvaluationError("product of two series-valued terms is not supported", node.span)
            prod = pf_mul(ma, mb)
            _add_to(out, (prod.monomial(), xa if xa is not None else xb), ca * cb * prod.coefficient)
    return out


def _single(a: Combo, node: Node, what: str):
    if len(a) != 1:
        raise EvaluationError(f"{what} must be a single monomial term", node.span)
    (m, x), c = next(iter(a.items()))
    return m, x, c


def _combo(node: Node) -> Combo:
    try:
        return _combo_inner(node)
    except (EvaluationError, NotAThetaCombination):
        raise
    except ZeroDivisionError as exc:
        raise EvaluationError(f"division by zero: {exc}", node.span) from exc
    except QDissectError as exc:
        raise EvaluationError(f"{type(exc).__name__}: {exc}", node.span) from exc


def _combo_inner(node: Node) -> Combo:
    unit = ProductForm()
    if isinstance(node, Number):
        return {(unit, None): node.value} if node.value else {}
    if isinstance(node, (QPower, Theta, ThetaG, ThetaB, ThetaGen, Block)):
        p = _pf_of(node)
        return {(p.monomial(), None): p.coefficient}
    if isinstance(node, AL):
        return {(unit, ALParams(node.x, node.base.exp, node.z)): Fraction(1)}
    if isinstance(node, CatalogCall):
        return {(unit, (node.name, node.arg.exp, node.arg.sign < 0)): Fraction(1)}
    if isinstance(node, Neg):
        return _scale(_combo(node.operand), -1)
    if isinstance(node, (Add, Sub)):
        out = dict(_combo(node.left))
        sign = 1 if isinstance(node, Add) else -1
        for k, v in _combo(node.right).items():
            _add_to(out, k, sign * v)
        return out
    if isinstance(node, Mul):
        return _mul(_combo(node.left), _combo(node.right), node)
    if isinstance(node, Div):
        m, x, c = _single(_combo(node.right), node.right, "a divisor")
        if x is not None:
            raise EvaluationError("cannot divide by a series-valued term", node.right.span)
        inv = {(pf_pow(m, -1), None): 1 / c}
        return _mul(_combo(node.left), inv, node)
    if isinstance(node, Pow):
        base = _combo(node.base)
        if node.k == 1:
            return base
        if node.k == 0:
            return {(unit, None): Fraction(1)}
        m, x, c = _single(base, node.base, "a base raised to a power")
        if x is not None:
            raise EvaluationError("cannot raise a series-valued term to a power", node.span)
        if c == 0 and node.k < 0:
            raise EvaluationError("zero raised to a negative power", node.span)
        return {(pf_pow(m, node.k), None): c ** node.k}
    raise TypeError(f"not an AST node: {node!r}")


def _atom_series(atom, order: int) -> QSeries:
    if isinstance(atom, ALParams):
        return al_series(atom, order)
    name, k, negate = atom
    return transformed_series(name, k, negate, order)


def eval_series(node: Node | str, order: int) -> QSeries:
    """Exact q-expansion of an expression with precision ``order``."""
    if isinstance(node, str):
        node = parse(node)
    total = QSeries.zero(order)
    for (m, atom), c in _combo(node).items():
        if atom is None:
            if m.qpow < order:
                total = total + expand(m, order) * c
            continue
        try:
            s = _atom_series(atom, order - m.qpow)
        except QDissectError as exc:
            raise EvaluationError(f"{type(exc).__name__}: {exc}", node.span) from exc
        if m.qpow + s.valuation >= order:
            continue
        total = total + mul(expand(m, order - s.valuation), s) * c
    return total


def _first_series_node(node: Node):
    if isinstance(node, (AL, CatalogCall)):
        return node
    for child in ("operand", "left", "right", "base"):
        sub = getattr(node, child, None)
        if sub is not None and not isinstance(sub, SignedMonomial):
            found = _first_series_node(sub)
            if found is not None:
                return found
    return None


def eval_monomials(node: Node | str) -> list[tuple[Fraction, ProductForm]]:
    """The expression as (coefficient, monomial) pairs; only theta quotients are allowed."""
    if isinstance(node, str):
        node = parse(node)
    bad = _first_series_node(node)
    if bad is not None:
        raise NotAThetaCombination(f"{render(bad)} is not a theta quotient", bad.span)
    out = []
    for sign, summand in _summands(node):
        for (m, _), c in _combo(summand).items():
            out.append((sign * c, m))
    return out


def _summands(node: Node, sign: int = 1):
    """Top-level signed summands; like terms in different summands stay separate."""
    if isinstance(node, Add):
        yield from _summands(node.left, sign)
        yield from _summands(node.right, sign)
    elif isinstance(node, Sub):
        yield from _summands(node.left, sign)
        yield from _summands(node.right, -sign)
    elif isinstance(node, Neg):
        yield from _summands(node.operand, -sign)
    else:
        yield sign, node


def eval_expression(node: Node | str) -> Expression:
    """The expression as Appell-Lerch terms plus theta terms (no catalog calls)."""
    if isinstance(node, str):
        node = parse(node)
    al, thetas = [], []
    const = Fraction(0)
    for (m, atom), c in _combo(node).items():
        if atom is None:
            if m.is_constant:
                const += c
            else:
                thetas.append(m.scaled(c))
        elif isinstance(atom, ALParams):
            if m.factors:
                raise EvaluationError("Appell-Lerch terms may only carry rational and q-power factors", node.span)
            al.append(ALTerm(c, m.qpow, atom))
        else:
            raise EvaluationError("catalog calls cannot be turned into an Appell-Lerch expression", node.span)
    return Expression(tuple(al), tuple(thetas), const)


def eval_text(text: str, order: int) -> QSeries:
    return eval_series(parse(text), order)


# -- rendering Appell-Lerch expressions ---------------------------------------


def _qpow_ast(k: int) -> Node:
    return QPower(k) if k > 0 else Pow(QPower(1), k)


def _monomial_factors(p: ProductForm) -> list[Node]:
    parts: list[Node] = [_qpow_ast(p.qpow)] if p.qpow else []
    for (d, g), e in p.factors:
        atom = Block(d, g) if g else Theta(d)
        parts.append(atom if e == 1 else Pow(atom, e))
    return parts


def _term_ast(c: Fraction, factors: list[Node]) -> tuple[int, Node]:
    """(sign, node) with the sign pulled out so sums render with ' - '."""
    sign = -1 if c < 0 else 1
    c = abs(c)
    if c != 1 or not factors:
        factors = [Number(c)] + factors
    node = factors[0]
    for f in factors[1:]:
        node = Mul(node, f)
    return sign, node


def _sum_ast(terms: list[tuple[int, Node]]) -> Node:
    if not terms:
        return Number(Fraction(0))
    sign, node = terms[0]
    if sign < 0:
        node = Neg(node)
    for sign, t in terms[1:]:
        node = Add(node, t) if sign > 0 else Sub(node, t)
    return node


def expression_ast(e: Expression) -> Node:
    terms = []
    for t in e.al_terms:
        factors = [_qpow_ast(t.qpow)] if t.qpow else []
        factors.append(AL(t.params.x, SignedMonomial(1, t.params.period), t.params.z))
        terms.append(_term_ast(t.coeff, factors))
    for p in e.theta_terms:
        terms.append(_term_ast(p.coefficient, _monomial_factors(p.monomial())))
    if e.constant:
        terms.append(_term_ast(e.constant, []))
    return _sum_ast(terms)


def render_expression(e: Expression) -> str:
    return render(expression_ast(e))
