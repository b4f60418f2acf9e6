import cmath
import math

import pytest

from src.asymptotics.errors import ContinuationAmbiguous, DomainError, InadmissibleParameters
from src.asymptotics.landscape import (
    DomainLabel,
    Parameters,
    PhasePoint,
    TraceOptions,
    capture_radius,
    classify_endpoint,
    continue_log,
    export_path,
    phase,
    phase_derivative,
    saddle_points,
    spiral_radius,
    trace_steepest,
)
from src.config import EngineConfig


def test_saddles_are_reciprocal_roots(rng):
    qs = rng.uniform(-3, 3, 1000) + 1j * rng.uniform(-3, 3, 1000)
    for q in qs:
        s = saddle_points(q)
        assert abs(s.u_plus * s.u_minus - 1) < 1e-14 * max(1.0, abs(s.u_plus))
        assert s.u_plus + s.u_minus == pytest.approx(2 * q, abs=1e-12)


def test_saddle_branch_and_double_point():
    s = saddle_points(2.0)
    assert s.u_plus == pytest.approx(2 + math.sqrt(3))
    assert s.u_minus == pytest.approx(2 - math.sqrt(3))
    assert saddle_points(1.0).is_double
    assert saddle_points(0).u_plus == 1j
    # real q in (0, 1): u_plus above the axis
    assert saddle_points(0.5).u_plus.imag > 0


@pytest.mark.parametrize(
    "q, u_plus, u_minus",
    [
        (1.25, 2.0, 0.5),
        (1j, (1 + math.sqrt(2)) * 1j, (1 - math.sqrt(2)) * 1j),
    ],
)
def test_saddle_examples(q, u_plus, u_minus):
    s = saddle_points(q)
    assert s.u_plus == pytest.approx(u_plus, abs=1e-14)
    assert s.u_minus == pytest.approx(u_minus, abs=1e-14)
    assert not s.is_double


def test_phase_derivative_vanishes_at_saddles():
    params = Parameters(0.7 + 0.2j, 0.3)
    for u in (saddle_points(params.q).u_plus, saddle_points(params.q).u_minus):
        assert abs(phase_derivative(PhasePoint.principal(u), params)) < 1e-12


def test_phase_derivative_rejects_branch_points():
    with pytest.raises(DomainError):
        phase_derivative(PhasePoint(1j, 0j), Parameters(0.5, 0.0))


def test_theta_outside_half_plane_rejected():
    with pytest.raises(InadmissibleParameters):
        Parameters(0.5, 0.5 * math.pi)


def test_sector_membership():
    assert Parameters(1 + 0.6j, 0.1 * math.pi).in_sector()
    assert not Parameters(-1 + 0.1j, 0.0).in_sector()


def test_continue_log_winds_once_around_plus_i():
    p = PhasePoint.principal(1 + 1j)
    for u in (1j + cmath.exp(1j * math.pi * k / 8) * 0.5 for k in range(1, 17)):
        p = continue_log(p, u)
    p = continue_log(p, 1 + 1j)
    assert abs(p.winding) == 1
    assert abs(p.logval - PhasePoint.principal(1 + 1j).logval) == pytest.approx(2 * math.pi)


def test_continue_log_rejects_segment_through_branch_point():
    with pytest.raises(ContinuationAmbiguous):
        continue_log(PhasePoint.principal(0j), 2j)


@pytest.mark.parametrize(
    "q, theta_over_pi, label",
    [
        (0.60, 0.0, DomainLabel.TO_INFINITY),
        (0.60 + 0.40j, 0.0, DomainLabel.TO_INFINITY),
        (1.00 + 0.60j, 0.0, DomainLabel.TO_PLUS_I),
        (1.00 - 0.30j, 0.0, DomainLabel.TO_MINUS_I),
        (0.60, 0.1, DomainLabel.TO_INFINITY),
        (1.00, 0.1, DomainLabel.TO_MINUS_I),
        (1.25, 0.1, DomainLabel.TO_MINUS_I),
        (0.60 + 0.40j, 0.1, DomainLabel.TO_INFINITY),
        (1.00 + 0.60j, 0.1, DomainLabel.TO_PLUS_I),
        (1.00 - 0.30j, 0.1, DomainLabel.TO_MINUS_I),
    ],
)
def test_reference_endpoints(q, theta_over_pi, label):
    assert classify_endpoint(Parameters(q, theta_over_pi * math.pi)) is label


@pytest.mark.parametrize("q", [1.0, 1.25, 2.0])
def test_real_q_beyond_one_runs_into_saddle(q):
    assert classify_endpoint(Parameters(q, 0.0)) is DomainLabel.ON_TRANSITION


def _admissible(rng, arg_nu_max: float = 0.3) -> Parameters:
    theta = rng.uniform(-0.45, 0.45) * math.pi
    omega = rng.uniform(-arg_nu_max, arg_nu_max) * math.pi - theta
    return Parameters(cmath.rect(rng.uniform(0.1, 2.0), omega), theta)


def _assert_on_descent_path(t, opts: TraceOptions) -> None:
    re_tau = [v.real for v in t.tau_values]
    assert all(b > a for a, b in zip(re_tau, re_tau[1:]))
    assert max(abs(v.imag) for v in t.tau_values) <= 10 * opts.rtol


def test_terminal_monotone_and_on_level_curve(rng, opts):
    for _ in range(200):
        t = trace_steepest(_admissible(rng), opts)
        _assert_on_descent_path(t, opts)


def test_full_sector_traces_terminate(rng, opts):
    # |arg nu| up to 0.49 pi: paths spiral many turns into +-i
    for _ in range(60):
        params = _admissible(rng, arg_nu_max=0.49)
        t = trace_steepest(params, opts)
        _assert_on_descent_path(t, opts)
        if t.terminal in (DomainLabel.TO_PLUS_I, DomainLabel.TO_MINUS_I):
            branch = 1j if t.terminal is DomainLabel.TO_PLUS_I else -1j
            assert abs(t.points[-1].u - branch) < max(opts.eps_branch, capture_radius(params))
            full = trace_steepest(params, opts, full_path=True)
            assert full.terminal is t.terminal
            assert abs(full.points[-1].u - branch) < opts.eps_branch
            _assert_on_descent_path(full, opts)


@pytest.mark.parametrize("q", [0.3, 0.6, 1.0, 0.6 - 0.3j])
def test_steep_theta_traces_terminate(q, opts):
    t = trace_steepest(Parameters(q, 0.45 * math.pi), opts)
    assert t.terminal in DomainLabel
    _assert_on_descent_path(t, opts)


def test_capture_disc_fixes_the_label():
    params = Parameters(1.00 + 0.60j, 0.0)
    r = capture_radius(params)
    assert 0 < r <= 0.5
    short = trace_steepest(params)
    full = trace_steepest(params, full_path=True)
    assert short.terminal is full.terminal is DomainLabel.TO_PLUS_I
    assert abs(short.points[-1].u - 1j) < r
    assert len(full.points) > len(short.points)
    assert full.points[: len(short.points)] == short.points


def test_capture_disc_empty_on_sector_edge():
    # Re nu = 0: no inward flow is guaranteed near +-i
    assert capture_radius(Parameters(1j, 0.0)) == 0.0
    assert capture_radius(Parameters(0.6, 0.0)) > 0
    assert spiral_radius(0) == 0.0
    assert spiral_radius(100.0) == 0.5


def test_real_q_below_one_path_stays_on_real_axis(opts):
    t = trace_steepest(Parameters(0.5, 0.0), opts)
    assert t.terminal is DomainLabel.TO_INFINITY
    assert all(abs(p.u.imag) <= 1e-12 * max(1.0, abs(p.u)) for p in t.points)
    assert all(p.u.real >= 0 for p in t.points)


def test_conjugate_symmetry(rng):
    for _ in range(100):
        params = _admissible(rng)
        assert classify_endpoint(params.conjugate()) is classify_endpoint(params).conjugate()


def test_phase_carried_matches_principal_off_cut():
    params = Parameters(0.6 + 0.4j, 0.0)
    p = continue_log(PhasePoint.principal(0j), 0.5 + 0.1j)
    assert phase(p, params) == pytest.approx(phase(PhasePoint.principal(0.5 + 0.1j), params))


def test_export_path_columns():
    t = trace_steepest(Parameters(0.6, 0.0))
    df = export_path(t)
    assert list(df.columns) == ["re_u", "im_u", "re_tau", "winding"]
    assert len(df) == len(t.points)
    assert df["re_tau"].is_monotonic_increasing


def test_options_from_config():
    cfg = EngineConfig(r_max=500.0, winding_cap=3)
    o = TraceOptions.from_config(cfg)
    assert o.r_max == 500.0 and o.winding_cap == 3
