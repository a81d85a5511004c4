import random
from fractions import Fraction

import pytest

from qdissect.appell_lerch import (
    RULES,
    ALParams,
    Expression,
    SignedMonomial as M,
    al_rewrite,
    al_series,
    cor36_expand,
    difference_term,
    expression_series,
)
from qdissect.catalog import CATALOG, eulerian_series
from qdissect.errors import NonGenericParameters, QDissectError, ZeroTheta
from qdissect.series import QSeries, q_shift
from qdissect.theta import expand

# generic parameter sets on the periods that occur in the catalog and the worked derivation
BATTERY = [
    ALParams(M(1, 1), 4, M(1, 2)),
    ALParams(M(1, 0), 4, M(1, 3)),
    ALParams(M(-1, 1), 4, M(-1, 0)),
    ALParams(M(1, 1), 3, M(-1, 0)),
    ALParams(M(1, 0), 3, M(-1, 1)),
    ALParams(M(1, 0), 6, M(1, 1)),
    ALParams(M(1, 2), 6, M(-1, 0)),
    ALParams(M(-1, 3), 8, M(-1, 0)),
    ALParams(M(1, 2), 8, M(1, 1)),
    ALParams(M(1, 12), 36, M(-1, 0)),
    ALParams(M(1, 0), 36, M(-1, 12)),
    ALParams(M(1, -12), 36, M(-1, 0)),
]


def same(a: QSeries, b: QSeries) -> bool:
    return (a - b).first_nonzero() is None


def test_eulerian_oracles():
    assert same(al_series(ALParams(M(1, 1), 4, M(1, 2)), 100), -eulerian_series("A2", 100))
    b2 = eulerian_series("B2", 101)
    assert same(al_series(ALParams(M(1, 0), 4, M(1, 3)), 100), -q_shift(b2, 1))


def test_shift_z_invariance():
    a = al_series(ALParams(M(1, 1), 3, M(-1, 0)), 80)
    b = al_series(ALParams(M(1, 1), 3, M(-1, 3)), 80)
    assert same(a, b)


@pytest.mark.parametrize("rule", RULES)
def test_rules_on_battery(rule):
    checked = 0
    for p in BATTERY:
        try:
            e = al_rewrite(p, rule)
        except QDissectError:
            continue
        assert same(al_series(p, 60), expression_series(e, 60)), p
        checked += 1
    assert checked >= 8


def test_inversion_step_of_the_derivation():
    e = al_rewrite(ALParams(M(1, -12), 36, M(-1, 0)), "inversion")
    (t,) = e.al_terms
    assert t.params == ALParams(M(1, 12), 36, M(-1, 0))
    assert t.coeff == 1 and t.qpow == 12


def test_shift_z_periodic():
    p = ALParams(M(1, 1), 4, M(1, 2))
    e = al_rewrite(p, "shift_z", steps=-1)
    assert e.al_terms[0].params.z == M(1, -2)
    back = al_rewrite(e.al_terms[0].params, "shift_z", steps=1)
    assert back.al_terms[0].params == p


def test_alternative_form_then_qx_relation_is_identity():
    p = BATTERY[0]
    e = al_rewrite(p, "alternative_form")
    t = e.al_terms[0]
    inner = al_rewrite(t.params, "qx_relation").scaled(t.coeff, t.qpow)
    total = Expression((), e.theta_terms, e.constant) + inner
    assert total.simplify() == Expression.of_al(p).simplify()


def test_difference_of_equal_z_is_zero_theta():
    with pytest.raises(ZeroTheta):
        difference_term(M(1, 0), 36, M(-1, 0), M(-1, 0))


def test_difference_step_of_the_derivation():
    d = difference_term(M(1, 0), 36, M(-1, 0), M(-1, 12))
    lhs = al_series(ALParams(M(1, 0), 36, M(-1, 0)), 150) - al_series(ALParams(M(1, 0), 36, M(-1, 12)), 150)
    assert same(lhs, expand(d, 150))


def random_generic_triple(rng):
    while True:
        period = rng.randint(1, 9)
        x, z1, z0 = (M(rng.choice((1, -1)), rng.randint(-7, 7)) for _ in range(3))
        try:
            ALParams(x, period, z1), ALParams(x, period, z0)
            return x, period, z1, z0, difference_term(x, period, z1, z0)
        except QDissectError:
            continue


def test_difference_formula_random():
    rng = random.Random(33)
    for _ in range(10):
        x, period, z1, z0, d = random_generic_triple(rng)
        lhs = al_series(ALParams(x, period, z1), 80) - al_series(ALParams(x, period, z0), 80)
        assert same(lhs, expand(d, 80))


def test_split_of_the_derivation():
    p = ALParams(M(1, 0), 4, M(1, 3))
    e = cor36_expand(p, 3, M(-1, 0))
    assert len(e.al_terms) == 3 and len(e.theta_terms) == 3
    assert {t.params.period for t in e.al_terms} == {36}
    assert same(al_series(p, 120), expression_series(e, 120))


def test_split_n1_is_identity():
    p = BATTERY[3]
    e = cor36_expand(p, 1, M(-1, 0))
    assert len(e.al_terms) == 1
    assert same(al_series(p, 60), expression_series(e, 60))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_split_on_catalog_parameters(n):
    order = 120 if n < 5 else 60
    for name, entry in CATALOG.items():
        for t in entry.working_rep.al_terms:
            for zp in (M(-1, 0), M(-1, 1), M(1, 1)):
                try:
                    e = cor36_expand(t.params, n, zp)
                except NonGenericParameters:
                    continue
                assert same(al_series(t.params, order), expression_series(e, order)), (name, n, zp)
                break
            else:
                pytest.fail(f"no generic z' for {name}")


def test_genericity():
    ALParams(M(1, 0), 4, M(1, 3))
    with pytest.raises(NonGenericParameters):
        ALParams(M(1, 1), 2, M(1, 1))
    with pytest.raises(NonGenericParameters):
        ALParams(M(1, 0), 4, M(1, 4))


def test_expression_series_basics():
    assert expression_series(Expression(), 10).first_nonzero() is None
    assert expression_series(Expression((), (), Fraction(1)), 10) == QSeries.one(10)
    mu2 = CATALOG["mu2"].al_rep
    assert same(expression_series(mu2, 100), eulerian_series("mu2", 100))
