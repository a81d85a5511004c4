import math
import random

import pytest

from qdissect.errors import DivergentProduct, ZeroTheta
from qdissect.series import QSeries, negate_q, q_shift, substitute_power, truncate
from qdissect.theta import (
    ProductForm,
    eta,
    expand,
    pf_div,
    pf_mul,
    pf_pow,
    pochhammer,
    theta,
    theta_general,
    triple_product_series,
)

GAUSS = [1, 2, 0, 0, 2, 0, 0, 0, 0, 2]


def test_theta_1_3_is_euler_product():
    assert theta(1, 3) == eta(1)
    assert expand(theta(1, 3), 60) == expand(eta(1), 60)


def test_quasi_periodicity_step():
    assert theta(4, 3) == theta(1, 3).scaled(-1).shifted(-1)


def test_gauss_series():
    assert expand(theta(1, 2, barred=True), 10).coeff_list(0, 10) == GAUSS
    assert triple_product_series(1, 2, -1, 10).coeff_list(0, 10) == GAUSS


def test_barred_zero_carries_factor_two():
    p = theta(0, 36, barred=True)
    assert p.coefficient == 2
    assert expand(p, 40)[0] == 2


def test_theta_general_consistency():
    for a, m in [(1, 5), (3, 8), (7, 12)]:
        assert theta_general(1, a, 1, m) == theta(a, m)
        assert theta_general(-1, a, 1, m) == theta(a, m, barred=True)


def test_negative_base_against_bilateral_sum():
    # Theta(x; p) = sum (-1)^n p^C(n,2) x^n with p = -q^9, x = q^3
    order = 60
    direct = QSeries.from_dict(
        {9 * n * (n - 1) // 2 + 3 * n: (-1) ** (n % 2 + n * (n - 1) // 2 % 2) for n in range(-6, 7)}, order
    )
    assert expand(theta_general(1, 3, -1, 9), order) == truncate(direct, order)


def test_pentagonal_numbers():
    assert expand(eta(1), 12).terms() == [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)]


def test_minus_q_product():
    # (-q;-q)_inf = T2^3/(T1*T4)
    lhs = expand(pf_div(pf_pow(eta(2), 3), pf_mul(eta(1), eta(4))), 20)
    rhs = negate_q(expand(eta(1), 20))
    assert lhs == rhs


def test_unit_product_expands_to_one():
    assert expand(ProductForm(), 5) == QSeries.one(5)


def test_triple_product_routes_agree():
    rng = random.Random(11)
    for _ in range(50):
        m = rng.randint(2, 24)
        a = rng.randint(1, m - 1)
        sign = rng.choice((1, -1))
        p = theta(a, m, barred=sign == -1)
        assert expand(p, 80) == triple_product_series(a, m, sign, 80)
    assert triple_product_series(0, 1, 1, 10).first_nonzero() is None


def test_quasi_periodicity_series():
    rng = random.Random(12)
    for _ in range(10):
        m = rng.randint(2, 12)
        a = rng.randint(1, m - 1)
        lhs = expand(theta(a + m, m), 40)
        rhs = -q_shift(expand(theta(a, m), 40 + a), -a)
        assert lhs == rhs


def test_bar_square_law():
    for a, m in [(1, 4), (2, 5), (3, 8)]:
        lhs = pf_mul(theta(a, m, barred=True), theta(a, m))
        rhs = pf_div(pf_mul(theta(2 * a, 2 * m), pf_pow(eta(m), 2)), eta(2 * m))
        assert expand(lhs, 60) == expand(rhs, 60)


def test_pochhammer():
    assert pochhammer(-1, 1, 2, 2, 10).terms() == [(0, 1), (1, 1), (3, 1), (4, 1)]
    assert pochhammer(1, 1, 1, math.inf, 12) == expand(eta(1), 12)
    assert pochhammer(1, 3, 2, 0, 8) == QSeries.one(8)
    with pytest.raises(DivergentProduct):
        pochhammer(1, 0, 1, math.inf, 8)


def test_algebra():
    p = pf_div(pf_pow(eta(2), 5), pf_pow(eta(1), 4))
    assert pf_div(p, p) == ProductForm()
    assert pf_pow(eta(2), 3).factor_map == {(2, 0): 3}
    a, b = theta(1, 5), theta(2, 7, barred=True)
    assert expand(pf_mul(a, b), 50) == truncate(expand(a, 60) * expand(b, 60), 50)


def test_zero_theta():
    with pytest.raises(ZeroTheta):
        theta(0, 4)
    with pytest.raises(ZeroTheta):
        theta(8, 4)


def test_substitute_power_matches_series():
    p = pf_div(theta(1, 5, barred=True), eta(3))
    s = expand(p, 30)
    assert expand(p.substitute_power(3), 90) == substitute_power(s, 3)
