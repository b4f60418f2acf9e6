import math

import numpy as np
import pytest

from src.asymptotics import transitions
from src.asymptotics.errors import BracketInvalid, ContinuationAmbiguous, InadmissibleParameters, StepTooLarge
from src.asymptotics.landscape import (
    DomainLabel,
    Parameters,
    PathTrace,
    PhasePoint,
    classify_endpoint,
    phase,
    saddle_points,
)
from src.asymptotics.transitions import (
    BRANCH_LABELS,
    Branch,
    Saddle,
    connection_residual,
    critical_beta,
    curve_real_crossing,
    intercept_Q,
    on_transition,
    saddle_state_from_path,
    segment_crosses_path,
    side_labels,
    trace_transition_curve,
    triple_point,
)
from src.reference import CRITICAL_BETA_08, FIGURE_POINTS, Q_TOL, TABLE2

THETA_FIG = 0.1 * math.pi


def test_theta_zero_geometry():
    tp = triple_point(0.0)
    assert tp.q_P == 1 and tp.verified
    assert intercept_Q(0.0).q_Q == 1.0


def test_triple_point_rejects_theta_out_of_range():
    with pytest.raises(InadmissibleParameters):
        triple_point(0.5 * math.pi)


def test_bracket_without_flip_rejected():
    with pytest.raises(BracketInvalid):
        critical_beta(0.8, 0.0, (0.5, 0.6))
    with pytest.raises(BracketInvalid):
        critical_beta(0.8, 0.0, (0.6, 0.5))


def test_curve_step_validation():
    with pytest.raises(StepTooLarge):
        trace_transition_curve(THETA_FIG, Branch.PA, arc_length=0.1, step=0.2)
    with pytest.raises(StepTooLarge):
        trace_transition_curve(THETA_FIG, Branch.PA, arc_length=1.0, step=0.0)


def test_real_segment_at_theta_zero():
    curve = trace_transition_curve(0.0, Branch.PB, arc_length=0.5, step=0.1)
    assert curve.samples[0] == 1
    assert all(q.imag == 0 and q.real >= 1 for q in curve.samples)
    assert curve.arc_lengths[-1] == pytest.approx(0.5)
    assert classify_endpoint(Parameters(1.3, 0.0)) is DomainLabel.ON_TRANSITION


def test_residual_sign_change_across_critical_value():
    # q = 0.8 + i beta crosses the curve at beta ~ 0.1439
    flips = [
        connection_residual(0.8 + 0.13j, 0.0, s) * connection_residual(0.8 + 0.16j, 0.0, s) < 0
        for s in Saddle
    ]
    assert any(flips)


def _fixed_trace(us):
    def fake(params, opts=None):
        points = [PhasePoint.principal(u) for u in us]
        return PathTrace(
            params, points, [phase(p, params) for p in points], DomainLabel.TO_INFINITY, 0, saddle_points(params.q)
        )

    return fake


# S1 of q = 1.25 sits at u = 2; the last vertex is closest, behind the segment at Im u = 0.05
_DETOUR = [0, 1, 1.5 + 0.05j, 2.5 + 0.05j, 2.5 + 0.3j, 2.05 + 0.3j]


def test_segment_crossing_the_path_is_ambiguous(monkeypatch):
    monkeypatch.setattr(transitions, "trace_steepest", _fixed_trace(_DETOUR))
    with pytest.raises(ContinuationAmbiguous):
        saddle_state_from_path(1.25, 0.0, Saddle.S1)


def test_segment_clear_of_the_path_continues(monkeypatch):
    monkeypatch.setattr(transitions, "trace_steepest", _fixed_trace([0, 1, 1.5 + 0.3j, 2.05 + 0.3j]))
    p = saddle_state_from_path(1.25, 0.0, Saddle.S1)
    assert p.u == pytest.approx(2)
    assert p.logval == pytest.approx(math.log(5.0))


def test_segment_crosses_path_skips_adjacent_segments():
    u = np.array(_DETOUR, dtype=complex)
    assert segment_crosses_path(u, 5, 2.0)
    assert not segment_crosses_path(u, 5, 2.2 + 0.2j)
    # from the vertex itself along its own segments
    assert not segment_crosses_path(u, 3, 2.0 + 0.05j)


@pytest.mark.slow
def test_critical_beta_reference():
    beta = critical_beta(0.8, 0.0)
    assert beta == pytest.approx(CRITICAL_BETA_08, abs=1e-5)
    eps = 1e-4
    below = classify_endpoint(Parameters(complex(0.8, beta - eps), 0.0))
    above = classify_endpoint(Parameters(complex(0.8, beta + eps), 0.0))
    assert below is DomainLabel.TO_INFINITY
    assert above is DomainLabel.TO_PLUS_I


@pytest.mark.slow
@pytest.mark.parametrize("row", TABLE2[1:], ids=lambda r: f"theta={r.theta_over_pi}")
def test_table2_rows(row):
    theta = row.theta_over_pi * math.pi
    tp = triple_point(theta)
    assert abs(tp.q_P.real - row.p.real) <= row.p_tol
    assert abs(tp.q_P.imag - row.p.imag) <= row.p_tol
    assert tp.verified
    assert intercept_Q(theta).q_Q == pytest.approx(row.q_Q, abs=Q_TOL)


@pytest.mark.slow
def test_negative_theta_is_conjugate():
    tp = triple_point(-THETA_FIG)
    assert tp.q_P == pytest.approx(triple_point(THETA_FIG).q_P.conjugate())
    assert intercept_Q(-THETA_FIG).q_Q == intercept_Q(THETA_FIG).q_Q


@pytest.mark.slow
@pytest.mark.parametrize("branch", ["PA", "PB", "PC"])
def test_figure_points_lie_on_transition_curves(branch):
    q = FIGURE_POINTS[branch]
    assert on_transition(q, THETA_FIG, tol=1e-4)
    assert not on_transition(q + 0.05j, THETA_FIG, tol=1e-4)


@pytest.mark.slow
@pytest.mark.parametrize("branch", list(Branch))
def test_curves_separate_the_expected_domains(branch):
    curve = trace_transition_curve(THETA_FIG, branch, arc_length=0.4, step=0.05)
    q = curve.samples
    assert q[0] == pytest.approx(triple_point(THETA_FIG).q_P)
    for k in range(2, len(q) - 1):
        normal = 1j * (q[k + 1] - q[k - 1])
        assert side_labels(q[k], normal, THETA_FIG, eps=1e-3) == BRANCH_LABELS[branch]


@pytest.mark.slow
def test_lower_curve_crosses_real_axis_at_intercept():
    curve = trace_transition_curve(THETA_FIG, Branch.PC, arc_length=0.6, step=0.02)
    assert curve_real_crossing(curve) == pytest.approx(0.70952, abs=Q_TOL)


@pytest.mark.slow
def test_conjugate_curves_below_axis():
    upper = trace_transition_curve(THETA_FIG, Branch.PA, arc_length=0.2, step=0.05)
    mirrored = trace_transition_curve(-THETA_FIG, Branch.PC, arc_length=0.2, step=0.05)
    assert mirrored.branch is Branch.PC
    assert [z.conjugate() for z in mirrored.samples] == pytest.approx(upper.samples)
