import random
from fractions import Fraction

import pytest

from qdissect.errors import PrecisionExceeded, ZeroLeadingCoefficient
from qdissect.series import (
    QSeries,
    add,
    coeff_at,
    dissect,
    equal_to_order,
    invert,
    mul,
    negate_q,
    q_shift,
    substitute_power,
    truncate,
)


def S(terms, prec):
    return QSeries.from_dict(terms, prec)


def random_series(rng, prec=30, val_range=(-3, 3), density=0.5, unit=False):
    val = 0 if unit else rng.randint(*val_range)
    terms = {n: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for n in range(val, prec) if rng.random() < density}
    if unit:
        terms[0] = Fraction(rng.choice([1, -1, 2, 3]), rng.randint(1, 3))
    return S(terms, prec)


def test_add_cancellation_and_laurent_merge():
    assert (S({0: 1, 1: 1}, 10) + S({0: 1, 1: -1}, 10)).terms() == [(0, 2)]
    a = S({-1: 1, 0: 1}, 10) + S({0: 1}, 10)
    assert a.valuation == -1 and a.terms() == [(-1, 1), (0, 2)]
    r = random_series(random.Random(0))
    z = QSeries.zero(r.prec)
    assert r + z == r


def test_add_precision_is_the_minimum():
    assert add(QSeries.one(5), QSeries.one(9)).prec == 5


def test_mul_examples_and_precision():
    a = S({0: 1, 1: -1}, 20)
    b = S({0: 1, 1: 1, 2: 1}, 20)
    assert (a * b).terms() == [(0, 1), (3, -1)]
    x = S({-2: 1, 3: 1}, 10)
    y = S({1: 2}, 8)
    p = mul(x, y)
    assert p.valuation == -1
    assert p.prec == min(10 + 1, 8 - 2)


def test_mul_commutes_on_random_inputs():
    rng = random.Random(1)
    for _ in range(50):
        a = random_series(rng, density=0.2)
        b = random_series(rng, density=0.2)
        assert mul(a, b) == mul(b, a)


def test_ring_laws():
    rng = random.Random(2)
    for _ in range(20):
        a, b, c = (random_series(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_invert_examples():
    geo = invert(S({0: 1, 1: -1}, 10))
    assert geo.coeff_list(0, 10) == [1] * 10
    assert invert(S({1: 1}, 10)).terms() == [(-1, 1)]
    half = invert(S({0: 2, 1: -2}, 10))
    assert half.coeff_list(0, 5) == [Fraction(1, 2)] * 5


def test_invert_round_trip():
    rng = random.Random(3)
    for _ in range(100):
        a = random_series(rng, unit=True)
        prod = a * invert(a)
        assert prod.first_nonzero() == 0
        assert (prod - QSeries.one(prod.prec)).first_nonzero() is None


def test_invert_skips_leading_zeros_and_rejects_zero():
    a = S({0: 0, 2: 3, 3: 1}, 12)
    assert invert(a).valuation == -2
    with pytest.raises(ZeroLeadingCoefficient):
        invert(QSeries.zero(10))


def test_substitute_power():
    assert substitute_power(S({0: 1, 1: 1}, 10), 2).terms() == [(0, 1), (2, 1)]
    r = random_series(random.Random(4))
    assert substitute_power(r, 1) == r
    s = substitute_power(S({-1: 1, 1: 1}, 5), 3)
    assert s.terms() == [(-3, 1), (3, 1)] and s.prec == 15


def test_substitute_then_dissect_returns_original():
    rng = random.Random(5)
    for k in (2, 3, 5):
        a = random_series(rng)
        back = dissect(substitute_power(a, k), k, 0)
        assert equal_to_order(back, a, a.prec - 1)
        assert dissect(substitute_power(a, k), k, 1).first_nonzero() is None


def test_negate_q():
    assert negate_q(S({0: 1, 1: 1, 2: 1}, 5)).terms() == [(0, 1), (1, -1), (2, 1)]
    rng = random.Random(6)
    a, b = random_series(rng), random_series(rng)
    assert negate_q(negate_q(a)) == a
    even = S({0: 1, 2: 5, 4: -1}, 8)
    assert negate_q(even) == even
    assert negate_q(a + b) == negate_q(a) + negate_q(b)
    assert negate_q(a * b) == negate_q(a) * negate_q(b)


def test_dissect():
    a = S({0: 1, 1: 2, 2: 3, 3: 4, 4: 5}, 5)
    assert dissect(a, 2, 1).terms() == [(0, 2), (1, 4)]
    assert dissect(a, 1, 0) == a
    with pytest.raises(ValueError):
        dissect(a, 2, 2)


def test_accessors():
    assert equal_to_order(S({0: 1, 1: 1}, 10), S({0: 1, 1: 1, 3: 1}, 10), 2)
    assert not equal_to_order(S({0: 1, 1: 1}, 10), S({0: 1, 1: 1, 3: 1}, 10), 4)
    assert coeff_at(S({-2: 1, 1: 5}, 10), -2) == 1
    assert coeff_at(S({-2: 1, 1: 5}, 10), -7) == 0
    assert q_shift(S({0: 1, 1: 1}, 10), -1).terms() == [(-1, 1), (0, 1)]
    t = truncate(S({0: 1, 5: 1}, 10), 3)
    assert t.prec == 3 and t.terms() == [(0, 1)]


def test_precision_is_never_overstated():
    with pytest.raises(PrecisionExceeded):
        coeff_at(S({0: 1}, 4), 4)
    rng = random.Random(7)
    a = random_series(rng, prec=60, unit=True)
    b = random_series(rng, prec=60)
    lo = truncate(a, 30) * invert(truncate(a, 30)) + truncate(b, 30) * truncate(b, 30)
    hi = a * invert(a) + b * b
    assert lo.prec <= hi.prec
    assert equal_to_order(lo, hi, lo.prec - 1)


def test_json_round_trip():
    a = random_series(random.Random(8))
    assert QSeries.from_json(a.to_json()) == a
