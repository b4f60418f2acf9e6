from fractions import Fraction
from math import comb

import pytest

from src.asymptotics.coeffgen import (
    ONE,
    Q,
    ZERO,
    FormalSeries,
    QPolynomial,
    coefficients,
    coefficients_by_reversion,
    compose,
    eval_coefficient,
    format_qpolynomial,
    forward_series,
    parse_qpolynomial,
    qpolynomial_from_json,
    qpolynomial_to_json,
    reciprocal,
    revert_series,
)
from src.asymptotics.errors import SeriesReversionError
from src.reference import TABLE1


@pytest.mark.parametrize("k", range(11))
def test_table1_polynomials_exact(k):
    c = coefficients(10)[k]
    assert c == parse_qpolynomial(TABLE1[k])
    assert format_qpolynomial(c, k) == TABLE1[k]


def test_reversion_route_agrees():
    assert coefficients_by_reversion(12) == coefficients(12)


def test_prefix_stable_across_kmax():
    assert coefficients(20)[:9] == coefficients(8)


def test_degree_parity_and_leading_coefficient():
    for k, c in enumerate(coefficients(24)):
        assert c.degree == k
        assert c[k] == comb(2 * k, k)
        assert all(c[j] == 0 for j in range(k + 1) if (k - j) % 2)


def test_values_at_q_zero_match_inverse_sqrt():
    for n, c in enumerate(coefficients(16)[::2]):
        assert c[0] == Fraction((-1) ** n * comb(2 * n, n), 4**n)


def test_reversion_inverts_forward_series():
    t = forward_series(9)
    u = revert_series(t)
    ident = compose(t, u)
    assert ident.terms == FormalSeries.identity(9).terms


def test_reversion_round_trip_to_order_24():
    t = forward_series(25)
    assert compose(t, revert_series(t)).terms == FormalSeries.identity(25).terms


def test_reversion_of_quadratic():
    # t = u - q u^2  ->  u = t + q t^2 + 2 q^2 t^3 + ...
    u = revert_series(FormalSeries((ZERO, ONE, -Q), 4))
    assert u.terms == (ZERO, ONE, Q, Q * Q * 2)


def test_reversion_rejects_vanishing_linear_term():
    s = FormalSeries((ZERO, ZERO, ONE), 5)
    with pytest.raises(SeriesReversionError):
        revert_series(s)


def test_reversion_rejects_constant_term():
    s = FormalSeries((ONE, ONE), 5)
    with pytest.raises(SeriesReversionError):
        revert_series(s)


def test_reciprocal_needs_rational_constant():
    q = QPolynomial((Fraction(0), Fraction(1)))
    with pytest.raises(SeriesReversionError):
        reciprocal(FormalSeries((q, ONE), 4))


def test_negative_kmax_rejected():
    with pytest.raises(ValueError):
        coefficients(-1)


def test_eval_coefficient():
    c2 = coefficients(2)[2]
    assert eval_coefficient(c2, 0.5) == pytest.approx(1.0)
    assert c2(1j) == pytest.approx(-6.5)


def test_json_form():
    c4 = coefficients(4)[4]
    assert qpolynomial_to_json(c4) == ["3/8", "0/1", "-45/2", "0/1", "70/1"]
    assert qpolynomial_from_json(qpolynomial_to_json(c4)) == c4


def test_zero_polynomial_formats_as_zero():
    assert format_qpolynomial(ZERO) == "0"
    assert ZERO.degree == -1
