import cmath
import math

import pytest

from src.asymptotics.errors import DomainError, InadmissibleParameters, PoleAtNonpositiveInteger
from src.asymptotics.evaluate import (
    OracleMethod,
    Variant,
    asymptotic_sum,
    continue_argument,
    error_report,
    error_report_at,
    integral_12,
    integral_13,
    log_gamma,
    optimal_truncation,
    reduce_argument,
    struve_maclaurin,
)
from src.asymptotics.landscape import DomainLabel
from src.reference import TABLE3, TABLE3_FACTOR

Z_HALF = [2.0, 10.0, 40 * cmath.exp(0.1j * math.pi)]


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / abs(b)


def test_log_gamma_values():
    assert complex(log_gamma(5).value) == pytest.approx(math.log(24), abs=1e-14)
    assert complex(log_gamma(0.5).value) == pytest.approx(0.5 * math.log(math.pi), abs=1e-14)
    # continuous branch: imaginary part grows past pi
    assert complex(log_gamma(3 + 10j).value).imag > math.pi


def test_log_gamma_recurrence():
    w = 21.3 + 4.7j
    step = complex(log_gamma(w + 1).value) - complex(log_gamma(w).value)
    assert step == pytest.approx(cmath.log(w), abs=1e-11)


@pytest.mark.parametrize("w", [0, -1, -7])
def test_log_gamma_poles(w):
    with pytest.raises(PoleAtNonpositiveInteger):
        log_gamma(w)


@pytest.mark.parametrize("z", Z_HALF)
def test_half_order_closed_forms(z):
    base = cmath.sqrt(2 / (math.pi * z))
    assert _rel(integral_13(0.5, z).value, base) < 1e-10
    assert _rel(integral_12(0.5, z, 1).value, base * (1 - cmath.exp(-1j * z))) < 1e-10
    assert _rel(integral_12(0.5, z, -1).value, base * (1 - cmath.exp(1j * z))) < 1e-10
    assert _rel(struve_maclaurin(0.5, z).value, base * (1 - cmath.cos(z))) < 1e-12


@pytest.mark.parametrize("nu", [1, 3, 10 + 2j])
@pytest.mark.parametrize("z", [5.0, 10 * cmath.exp(0.1j * math.pi)])
def test_finite_contour_pair_averages_to_struve(nu, z):
    plus = integral_12(nu, z, 1).value
    minus = integral_12(nu, z, -1).value
    h = struve_maclaurin(nu, z).value
    assert _rel(plus + minus, 2 * h) < 1e-9


def test_maclaurin_self_consistent_at_large_argument():
    r = struve_maclaurin(24, 40, target_digits=50)
    assert r.method is OracleMethod.MACLAURIN
    assert r.est_error <= 1e-30 * abs(r.value)


def test_maclaurin_at_origin():
    assert struve_maclaurin(0, 0).value == 0
    with pytest.raises(DomainError):
        struve_maclaurin(-2, 0)


def test_quadrature_domains():
    with pytest.raises(DomainError):
        integral_12(-0.7, 5.0, 1)
    with pytest.raises(DomainError):
        integral_13(1.0, -5.0)
    with pytest.raises(ValueError):
        integral_12(1.0, 5.0, 0)


def test_optimal_truncation_least_term():
    assert optimal_truncation([3, 1, 2, 5]) == 1
    # a later isolated dip is not taken
    assert optimal_truncation([5, 3, 1, 2, 4, 0.5]) == 2
    assert optimal_truncation([1, 1, 2, 3]) == 0
    assert optimal_truncation([4, 3, 2, 1]) == 3
    assert optimal_truncation([7]) == 0
    with pytest.raises(ValueError):
        optimal_truncation([])


def test_optimal_truncation_flat_minimum_steps_back():
    assert optimal_truncation([1.0, 0.5, 0.499, 0.6]) == 1
    assert optimal_truncation([1.0, 0.5, 0.3, 0.6]) == 2


def test_optimal_truncation_stops_before_coefficient_dip():
    # shaped like |t_k| for q = 0.6, |z| = 40 from k = 10, where c_18(0.6) nearly vanishes
    sizes = [5.1e-9, 3.72e-9, 2.36e-9, 3.53e-9, 2.9e-9, 1.9e-9, 1.1e-9, 6.44e-10, 1.12e-10, 2.65e-10]
    assert optimal_truncation(sizes) == 2


def test_asymptotic_sum_truncates_at_least_term():
    s = asymptotic_sum(24, 40, Variant.MINUS_Y)
    sizes = [abs(t) for t in s.terms]
    assert sizes[s.k_star] == min(sizes[: s.k_star + 1])
    assert s.terms[0] == pytest.approx(1.0)
    assert s.k_star == 12
    assert s.terms[1] == pytest.approx(2 * 0.6 / 40)


def test_asymptotic_sum_matches_semi_infinite_integral():
    s = asymptotic_sum(24, 40, Variant.MINUS_Y)
    oracle = integral_13(24, 40)
    assert _rel(s.total, oracle.value) < 1e-7


@pytest.mark.parametrize(
    "q, theta_over_pi, k_star",
    [(1.00 - 0.30j, 0.0, 10), (1.00 + 0.60j, 0.1, 9), (1.25, 0.0, 9)],
)
def test_truncation_index_of_reference_rows(q, theta_over_pi, k_star):
    z = 40 * cmath.exp(1j * math.pi * theta_over_pi)
    variant = Variant.MINUS_I if complex(q).imag < 0 else Variant.PLUS_I
    assert asymptotic_sum(q * z, z, variant).k_star == k_star


def test_error_decays_with_modulus():
    errors = []
    for modulus in (20.0, 40.0):
        s = asymptotic_sum(0.6 * modulus, modulus, Variant.MINUS_Y)
        errors.append(_rel(s.total, integral_13(0.6 * modulus, modulus).value))
    assert errors[1] < 1e-2 * errors[0]


def test_real_axis_variants_are_conjugate():
    plus = asymptotic_sum(50, 40, Variant.PLUS_I)
    minus = asymptotic_sum(50, 40, Variant.MINUS_I)
    assert plus.total == pytest.approx(minus.total.conjugate())


def test_argument_helpers():
    assert continue_argument(0.5, 2.0, 1) == pytest.approx(cmath.exp(1.5j * math.pi))
    assert continue_argument(2, 1.0, 0) == 1
    z0, m = reduce_argument(-3 + 1j)
    assert z0 == 3 - 1j and m == 1
    z0, m = reduce_argument(-3 - 1j)
    assert z0 == 3 + 1j and m == -1
    assert reduce_argument(2j) == (2j, 0)
    with pytest.raises(DomainError):
        reduce_argument(0)


def test_continuation_reproduces_negative_argument():
    z0, m = reduce_argument(-2.0)
    assert z0 == 2 and m == 1
    multiplier = continue_argument(0.5, z0, m)
    assert multiplier == pytest.approx(-1j)
    h_neg = struve_maclaurin(0.5, -2.0).value
    assert _rel(multiplier * struve_maclaurin(0.5, z0).value, h_neg) < 1e-12


@pytest.mark.parametrize("z", [2j, -2j])
def test_error_report_at_rejects_imaginary_axis(z):
    with pytest.raises(InadmissibleParameters):
        error_report_at(1.0, z)


def test_error_report_requires_sector():
    with pytest.raises(InadmissibleParameters):
        error_report(-1 + 0.1j, 0.0)


def test_error_report_degenerate_real_row():
    r = error_report(1.25, 0.0)
    assert r.endpoint is DomainLabel.ON_TRANSITION
    assert r.endpoint_symbol == "+-i"
    assert r.oracle_method is OracleMethod.QUADRATURE_12_PLUS
    # H + iJ, with J_50(40) about 1e-3 of H
    assert 1e-4 < _rel(r.oracle, r.h_value) < 1e-2
    assert 8.835e-4 / TABLE3_FACTOR <= r.relative_error_H <= 8.835e-4 * TABLE3_FACTOR


@pytest.mark.slow
@pytest.mark.parametrize("row", TABLE3, ids=lambda r: f"q={r.q}-theta={r.theta_over_pi}")
def test_table3_rows(row):
    r = error_report(row.q, row.theta_over_pi * math.pi, 40.0)
    assert r.endpoint_symbol == row.endpoint
    assert 1 / TABLE3_FACTOR <= r.relative_error_H / row.rel_err_H <= TABLE3_FACTOR
    keys = r.to_row()
    assert set(keys) == {"q_re", "q_im", "theta_over_pi", "endpoint", "rel_err_H", "rel_err_combo", "k_star"}


@pytest.mark.slow
def test_error_report_at_continues_from_left_half_plane():
    rot = cmath.exp(0.1j * math.pi)
    nu, z = 24 * rot, -40 * rot
    r = error_report_at(nu, z)
    assert r.continuation == -1
    assert r.q == pytest.approx(0.6)
    assert r.theta == pytest.approx(0.1 * math.pi)
    assert r.multiplier == pytest.approx(cmath.exp(-1j * math.pi * (nu + 1)))
    assert _rel(r.continued_h, struve_maclaurin(nu, z).value) < 1e-12
    assert 9.556e-9 / TABLE3_FACTOR <= r.relative_error_H <= 9.556e-9 * TABLE3_FACTOR
