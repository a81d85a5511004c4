"""The sixteen second-, sixth- and eighth-order mock theta functions.

Each entry carries two independent descriptions: the q-hypergeometric sum
that defines it and an Appell-Lerch representation.  The sums are evaluated
by updating the n-th summand from the (n-1)-th through a short list of
binomial factors, so every summand costs O(order) operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .appell_lerch import ALParams, ALTerm, Expression, SignedMonomial, expression_series
from .series import QSeries, _zeros, equal_to_order, negate_q, substitute_power, truncate
from .theta import ProductForm, eta, pf_mul, pf_pow, theta

__all__ = [
    "CatalogEntry",
    "CATALOG",
    "NAMES",
    "ALIASES",
    "entry",
    "eulerian_series",
    "al_rep_series",
    "catalog_series",
    "verify_entry",
    "first_mismatch",
    "canonical_name",
    "transformed_series",
    "coeffs",
]

# A summand update is (q-shift, sign, factors) where each factor (c, k, power)
# multiplies by (1 + c q^k)^power.
Update = tuple[int, int, Sequence[tuple[int, int, int]]]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    order_class: int
    first: Update
    step: Callable[[int], Update]
    start: int = 0
    scale: Fraction = Fraction(1)
    constant: Fraction = Fraction(0)
    extra: Callable[[int], Sequence[tuple[int, int, int]]] | None = None
    al_text: str = ""
    al_rep: Expression = Expression()
    # set only when the representation as usually stated fails against the sum
    corrected_text: str | None = None
    corrected_rep: Expression | None = None

    @property
    def working_rep(self) -> Expression:
        return self.corrected_rep if self.corrected_rep is not None else self.al_rep


def _apply(arr: np.ndarray, c: int, k: int, power: int) -> np.ndarray:
    """Multiply a truncated coefficient array by (1 + c q^k)^power."""
    n = len(arr)
    if k == 0:
        factor = (1 + c) ** power if power > 0 else None
        if factor is None:
            d = (1 + c) ** (-power)
            if any(x % d for x in arr):
                raise ArithmeticError("non-integral division")
            return arr // d
        return arr * factor
    if k >= n:
        return arr
    for _ in range(abs(power)):
        if power > 0:
            arr = arr.copy()
            arr[k:] = arr[k:] + c * arr[:n - k]
        else:
            arr = arr.copy()
            for i in range(k, n, k):
                j = min(i + k, n)
                arr[i:j] = arr[i:j] - c * arr[i - k:j - k]
    return arr


def _summands(e: CatalogEntry, order: int):
    """Yield (valuation, integer array of length order - valuation) per summand."""
    shift, sign, factors = e.first
    val = shift
    if val >= order:
        return
    arr = _zeros(order - val)
    arr[0] = sign
    for c, k, p in factors:
        arr = _apply(arr, c, k, p)
    n = e.start
    while True:
        yield n, val, arr
        n += 1
        shift, sign, factors = e.step(n)
        val += shift
        if val >= order:
            return
        arr = arr[: order - val] * sign
        for c, k, p in factors:
            arr = _apply(arr, c, k, p)


def eulerian_series(name: str, order: int) -> QSeries:
    """The defining q-hypergeometric sum, exact below ``order``."""
    e = entry(name)
    if order < 1:
        return QSeries.zero(order)
    total = _zeros(order)
    for n, val, arr in _summands(e, order):
        if e.extra is not None:
            for c, k, p in e.extra(n):
                arr = _apply(arr, c, k, p)
        total[val:] = total[val:] + arr
    s = QSeries(0, total, 1, order) * e.scale
    if e.constant:
        s = s + e.constant
    return s


def al_rep_series(name: str, order: int, corrected: bool = False) -> QSeries:
    """The Appell-Lerch representation; ``corrected`` selects the verified variant."""
    e = entry(name)
    return expression_series(e.working_rep if corrected else e.al_rep, order)


@lru_cache(maxsize=64)
def _cached(name: str, order: int, method: str) -> QSeries:
    if method == "eulerian":
        return eulerian_series(name, order)
    return al_rep_series(name, order, corrected=True)


def catalog_series(name: str, order: int, method: str = "eulerian") -> QSeries:
    """Coefficient stream P_f(0), P_f(1), ... of a catalog function.

    ``method`` picks the route: ``"eulerian"`` (the defining sum) or ``"al"``
    (the Appell-Lerch form, using the corrected variant where one exists).
    """
    name = canonical_name(name)
    if method not in ("al", "eulerian"):
        raise ValueError("method must be 'al' or 'eulerian'")
    return _cached(name, int(order), method)


def first_mismatch(name: str, order: int, corrected: bool = False) -> int | None:
    """Lowest exponent below ``order`` where the two descriptions differ."""
    a = eulerian_series(name, order)
    b = al_rep_series(name, order, corrected)
    for n in range(min(a.valuation, b.valuation), order):
        if a[n] != b[n]:
            return n
    return None


def verify_entry(name: str, order: int, corrected: bool = False) -> bool:
    a = eulerian_series(name, order + 1)
    b = al_rep_series(name, order + 1, corrected)
    return equal_to_order(a, b, order)


def transformed_series(name: str, k: int, negate: bool, order: int, method: str = "eulerian") -> QSeries:
    """f(q^k), or f(-q^k) when ``negate``, with precision ``order``."""
    if k < 1:
        raise ValueError("k must be positive")
    inner = max(1, -(-order // k) + 2)
    s = catalog_series(name, inner, method)
    if negate:
        s = negate_q(s)
    return truncate(substitute_power(s, k), order)


def coeffs(name: str, count: int, method: str = "eulerian") -> list[Fraction]:
    if count <= 0:
        return []
    return catalog_series(name, count, method).coeff_list(0, count)


# -- entries -------------------------------------------------------------------

M = SignedMonomial


def _al(coeff, qpow, x, period, z) -> ALTerm:
    return ALTerm(Fraction(coeff), qpow, ALParams(x, period, z))


def _pf(coeff, qpow, *parts) -> ProductForm:
    out = ProductForm(Fraction(coeff), qpow)
    for p, e in parts:
        out = pf_mul(out, pf_pow(p, e))
    return out


T = eta


def _tb(a, m):
    return theta(a, m, barred=True)


def _tg(a, m):
    return theta(a, m)


_ENTRIES = [
    CatalogEntry(
        "A2", 2,
        first=(1, 1, [(-1, 1, -1)]),
        step=lambda n: (1, 1, [(1, 2 * n, 1), (-1, 2 * n + 1, -1)]),
        al_text="-AL(q,q^4,q^2)",
        al_rep=Expression((_al(-1, 0, M(1, 1), 4, M(1, 2)),)),
    ),
    CatalogEntry(
        "B2", 2,
        first=(0, 1, [(-1, 1, -1)]),
        step=lambda n: (1, 1, [(1, 2 * n - 1, 1), (-1, 2 * n + 1, -1)]),
        al_text="-AL(1,q^4,q^3)/q",
        al_rep=Expression((_al(-1, -1, M(1, 0), 4, M(1, 3)),)),
    ),
    CatalogEntry(
        "mu2", 2,
        first=(0, 1, []),
        step=lambda n: (2 * n - 1, -1, [(-1, 2 * n - 1, 1), (1, 2 * n, -2)]),
        al_text="4*AL(-q,q^4,-1) - T2^8/(T1^3*T4^4)",
        al_rep=Expression(
            (_al(4, 0, M(-1, 1), 4, M(-1, 0)),),
            (_pf(-1, 0, (T(2), 8), (T(1), -3), (T(4), -4)),),
        ),
    ),
    CatalogEntry(
        "phi6", 6,
        first=(0, 1, []),
        step=lambda n: (2 * n - 1, -1, [(-1, 2 * n - 1, 1), (1, 2 * n - 1, -1), (1, 2 * n, -1)]),
        al_text="2*AL(q,q^3,-1)",
        al_rep=Expression((_al(2, 0, M(1, 1), 3, M(-1, 0)),)),
    ),
    CatalogEntry(
        "psi6", 6,
        first=(1, 1, [(1, 1, -1)]),
        step=lambda n: (2 * n + 1, -1, [(-1, 2 * n - 1, 1), (1, 2 * n, -1), (1, 2 * n + 1, -1)]),
        al_text="AL(1,q^3,-q)",
        al_rep=Expression((_al(1, 0, M(1, 0), 3, M(-1, 1)),)),
    ),
    CatalogEntry(
        "rho6", 6,
        first=(0, 1, [(-1, 1, -1)]),
        step=lambda n: (n, 1, [(1, n, 1), (-1, 2 * n + 1, -1)]),
        al_text="-AL(1,q^6,q)/q",
        al_rep=Expression((_al(-1, -1, M(1, 0), 6, M(1, 1)),)),
    ),
    CatalogEntry(
        "sigma6", 6,
        first=(1, 1, [(-1, 1, -1)]),
        step=lambda n: (n + 1, 1, [(1, n, 1), (-1, 2 * n + 1, -1)]),
        al_text="-AL(q^2,q^6,q)",
        al_rep=Expression((_al(-1, 0, M(1, 2), 6, M(1, 1)),)),
    ),
    CatalogEntry(
        "lambda6", 6,
        first=(0, 1, []),
        step=lambda n: (1, -1, [(-1, 2 * n - 1, 1), (1, n, -1)]),
        al_text="2*AL(1,q^6,-q^2)/q + T1*T3*T12/(T4*T6)",
        al_rep=Expression(
            (_al(2, -1, M(1, 0), 6, M(-1, 2)),),
            (_pf(1, 0, (T(1), 1), (T(3), 1), (T(12), 1), (T(4), -1), (T(6), -1)),),
        ),
        corrected_text="2*AL(1,q^6,-q^2)/q + T1^3*T6^2/(T2^3*T3)",
        corrected_rep=Expression(
            (_al(2, -1, M(1, 0), 6, M(-1, 2)),),
            (_pf(1, 0, (T(1), 3), (T(6), 2), (T(2), -3), (T(3), -1)),),
        ),
    ),
    CatalogEntry(
        "mu6", 6,
        first=(1, 1, [(1, 1, -1)]),
        step=lambda n: (1, -1, [(-1, 2 * n - 1, 1), (1, n + 1, -1)]),
        scale=Fraction(1, 2),
        constant=Fraction(1, 2),
        extra=lambda n: [(1, n, 1)],
        al_text="2*AL(q^2,q^6,-1) - T1^2*T3^2/(2*T2^2*T6)",
        al_rep=Expression(
            (_al(2, 0, M(1, 2), 6, M(-1, 0)),),
            (_pf(Fraction(-1, 2), 0, (T(1), 2), (T(3), 2), (T(2), -2), (T(6), -1)),),
        ),
    ),
    CatalogEntry(
        "psim6", 6,
        first=(1, 1, [(-1, 1, -1)]),
        step=lambda n: (1, 1, [(1, 2 * n - 3, 1), (1, 2 * n - 2, 1), (-1, 2 * n - 1, -1)]),
        start=1,
        al_text="-(1/2)*AL(1,q^3,q) + (1/2)*q*T6^3/(T1*T2)",
        al_rep=Expression(
            (_al(Fraction(-1, 2), 0, M(1, 0), 3, M(1, 1)),),
            (_pf(Fraction(1, 2), 1, (T(6), 3), (T(1), -1), (T(2), -1)),),
        ),
    ),
    CatalogEntry(
        "S08", 8,
        first=(0, 1, []),
        step=lambda n: (2 * n - 1, 1, [(1, 2 * n - 1, 1), (1, 2 * n, -1)]),
        al_text="2*AL(-q^3,q^8,-1) + q*Tb(1,8)*Tg(2,8)^2/Tg(3,8)^2",
        al_rep=Expression(
            (_al(2, 0, M(-1, 3), 8, M(-1, 0)),),
            (_pf(1, 1, (_tb(1, 8), 1), (_tg(2, 8), 2), (_tg(3, 8), -2)),),
        ),
    ),
    CatalogEntry(
        "S18", 8,
        first=(0, 1, []),
        step=lambda n: (2 * n + 1, 1, [(1, 2 * n - 1, 1), (1, 2 * n, -1)]),
        al_text="-2*AL(-q,q^8,-1)/q + Tb(3,8)*Tg(2,8)^2/(q*Tg(1,8)^2)",
        al_rep=Expression(
            (_al(-2, -1, M(-1, 1), 8, M(-1, 0)),),
            (_pf(1, -1, (_tb(3, 8), 1), (_tg(2, 8), 2), (_tg(1, 8), -2)),),
        ),
    ),
    CatalogEntry(
        "U08", 8,
        first=(0, 1, []),
        step=lambda n: (2 * n - 1, 1, [(1, 2 * n - 1, 1), (1, 4 * n, -1)]),
        al_text="2*AL(-q,q^4,-1)",
        al_rep=Expression((_al(2, 0, M(-1, 1), 4, M(-1, 0)),)),
    ),
    CatalogEntry(
        "U18", 8,
        first=(1, 1, [(1, 2, -1)]),
        step=lambda n: (2 * n + 1, 1, [(1, 2 * n - 1, 1), (1, 4 * n + 2, -1)]),
        al_text="-AL(-q,q^4,-q^2)",
        al_rep=Expression((_al(-1, 0, M(-1, 1), 4, M(-1, 2)),)),
    ),
    CatalogEntry(
        "V08", 8,
        first=(0, 1, []),
        step=lambda n: (2 * n - 1, 1, [(1, 2 * n - 1, 1), (-1, 2 * n - 1, -1)]),
        scale=Fraction(2),
        constant=Fraction(-1),
        al_text="-2*AL(1,q^8,q)/q - T2^3*T4/(T1^2*T8)",
        al_rep=Expression(
            (_al(-2, -1, M(1, 0), 8, M(1, 1)),),
            (_pf(-1, 0, (T(2), 3), (T(4), 1), (T(1), -2), (T(8), -1)),),
        ),
    ),
    CatalogEntry(
        "V18", 8,
        first=(1, 1, [(-1, 1, -1)]),
        step=lambda n: (2 * n + 1, 1, [(1, 2 * n - 1, 1), (-1, 2 * n + 1, -1)]),
        al_text="-AL(q^2,q^8,q)",
        al_rep=Expression((_al(-1, 0, M(1, 2), 8, M(1, 1)),)),
    ),
]

CATALOG: dict[str, CatalogEntry] = {e.name: e for e in _ENTRIES}
NAMES: tuple[str, ...] = tuple(CATALOG)
ALIASES = {"psiminus6": "psim6", "U0_8": "U08", "U1_8": "U18", "V0_8": "V08", "V1_8": "V18", "S0_8": "S08", "S1_8": "S18"}


def canonical_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in CATALOG:
        raise KeyError(f"unknown catalog function {name!r}; known: {', '.join(NAMES)}")
    return name


def entry(name: str) -> CatalogEntry:
    return CATALOG[canonical_name(name)]
