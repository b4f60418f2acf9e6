"""Stokes geometry in the q-plane: critical values, triple point, intercept, curves."""

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketInvalid,
    ContinuationAmbiguous,
    InadmissibleParameters,
    NoConvergence,
    StepTooLarge,
    StruveAsymptoticsError,
)
from .landscape import (
    DomainLabel,
    Parameters,
    PhasePoint,
    TraceOptions,
    classify_endpoint,
    continue_log,
    phase,
    saddle_points,
    trace_steepest,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
PARAM_TOL = 1e-8
FD_STEP = 1e-6
COARSE_WIDTH = 1e-4

# log 2 and 1 - log 2: the double saddle at q = 1
_LOG2 = math.log(2.0)
_TAU_DOUBLE = 1.0 - _LOG2
_DOUBLE_SADDLE = PhasePoint(1 + 0j, complex(_LOG2, 0.0))


class Saddle(str, Enum):
    S1 = "S1"
    S2 = "S2"


class Branch(str, Enum):
    PA = "PA"
    PB = "PB"
    PC = "PC"


# domains on the two sides of each curve
BRANCH_LABELS: Dict[Branch, FrozenSet[DomainLabel]] = {
    Branch.PA: frozenset({DomainLabel.TO_INFINITY, DomainLabel.TO_PLUS_I}),
    Branch.PB: frozenset({DomainLabel.TO_PLUS_I, DomainLabel.TO_MINUS_I}),
    Branch.PC: frozenset({DomainLabel.TO_INFINITY, DomainLabel.TO_MINUS_I}),
}

# rough leaving direction from P, used only when the side labels do not decide
_BRANCH_HINT = {Branch.PA: 0.6 * math.pi, Branch.PB: 0.0, Branch.PC: -0.7 * math.pi}

_CONJUGATE_BRANCH = {Branch.PA: Branch.PC, Branch.PB: Branch.PB, Branch.PC: Branch.PA}


@dataclass(frozen=True)
class TriplePoint:
    theta: float
    q_P: complex
    # both saddles at q_P with log(1+u^2) carried from the double saddle at q = 1
    saddle_states: Tuple[PhasePoint, PhasePoint]
    verified: bool = False


@dataclass(frozen=True)
class InterceptQ:
    theta: float
    q_Q: float


@dataclass
class TransitionCurve:
    branch: Branch
    theta: float
    samples: List[complex]
    # connecting saddle per sample, log(1+u^2) carried along the curve
    saddle_states: List[PhasePoint] = field(default_factory=list)

    @property
    def arc_lengths(self) -> np.ndarray:
        q = np.asarray(self.samples, dtype=complex)
        return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(q)))])


# -----------------------
# Residuals
# -----------------------
def _saddle_of(q: complex, which: Saddle) -> complex:
    pair = saddle_points(q)
    return pair.u_plus if which is Saddle.S1 else pair.u_minus


def segment_crosses_path(u: np.ndarray, idx: int, target: complex) -> bool:
    """Whether the segment u[idx] -> target meets the polyline u away from u[idx]."""
    u = np.asarray(u, dtype=complex)
    a = u[idx]
    d = complex(target) - a
    if len(u) < 2 or d == 0:
        return False
    keep = np.ones(len(u) - 1, dtype=bool)
    keep[max(idx - 1, 0) : idx + 1] = False
    p0 = u[:-1][keep]
    e = (u[1:] - u[:-1])[keep]
    w = p0 - a
    denom = (np.conj(d) * e).imag
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (np.conj(w) * e).imag / denom
        s = (np.conj(w) * d).imag / denom
    hit = (denom != 0) & (t > 1e-12) & (t <= 1) & (s >= 0) & (s <= 1)
    return bool(np.any(hit))


def saddle_state_from_path(
    q: complex, theta: float, which: Saddle, opts: Optional[TraceOptions] = None
) -> PhasePoint:
    """The saddle with log(1+u^2) continued from the origin path.

    The continuation runs along the traced path to its closest approach and
    then along a straight segment to the saddle. A segment that crosses the
    path leaves the sheet undetermined and raises ContinuationAmbiguous.
    """
    s = _saddle_of(q, which)
    trace = trace_steepest(Parameters(q, theta), opts)
    u = trace.u_values
    idx = int(np.argmin(np.abs(u - s)))
    if segment_crosses_path(u, idx, s):
        raise ContinuationAmbiguous(f"segment {u[idx]} -> saddle {s} crosses the origin path (q={q})")
    return continue_log(trace.points[idx], s)


def connection_residual(
    q: complex, theta: float, which: Saddle, opts: Optional[TraceOptions] = None
) -> float:
    """Im tau at the saddle; zero iff the origin path runs through it."""
    p = saddle_state_from_path(q, theta, which, opts)
    return phase(p, Parameters(q, theta)).imag


def _nearest_saddle(q: complex, anchor: complex) -> complex:
    pair = saddle_points(q)
    if abs(pair.u_plus - anchor) <= abs(pair.u_minus - anchor):
        return pair.u_plus
    return pair.u_minus


def _carried_residual(q: complex, theta: float, anchor: PhasePoint) -> Tuple[float, PhasePoint]:
    """Residual at the saddle of q nearest the anchor, log carried from the anchor."""
    p = continue_log(anchor, _nearest_saddle(q, anchor.u))
    return phase(p, Parameters(q, theta)).imag, p


def _residual_scale(q: complex, theta: float, p: PhasePoint) -> float:
    return max(1.0, abs(phase(p, Parameters(q, theta))))


# -----------------------
# Critical beta / intercept
# -----------------------
def _bisect_labels(
    label_at: Callable[[float], DomainLabel], lo: float, hi: float, label_lo: DomainLabel, width: float
) -> Tuple[float, float]:
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        lab = label_at(mid)
        if lab is DomainLabel.ON_TRANSITION:
            return mid, mid
        if lab is label_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _locate_transition(
    point_at: Callable[[float], complex],
    theta: float,
    lo: float,
    hi: float,
    opts: Optional[TraceOptions],
) -> float:
    """Parameter in [lo, hi] where the classification of point_at flips."""

    def label_at(x: float) -> DomainLabel:
        return classify_endpoint(Parameters(point_at(x), theta), opts)

    label_lo, label_hi = label_at(lo), label_at(hi)
    if label_lo is label_hi or DomainLabel.ON_TRANSITION in (label_lo, label_hi):
        raise BracketInvalid(
            f"bracket [{lo}, {hi}] does not straddle a transition ({label_lo.value}, {label_hi.value})"
        )
    lo, hi = _bisect_labels(label_at, lo, hi, label_lo, COARSE_WIDTH)
    if lo == hi:
        return lo

    best = None
    for which in (Saddle.S1, Saddle.S2):
        try:
            r_lo = connection_residual(point_at(lo), theta, which, opts)
            r_hi = connection_residual(point_at(hi), theta, which, opts)
        except ContinuationAmbiguous:
            continue
        if r_lo * r_hi < 0:
            size = max(abs(r_lo), abs(r_hi))
            if best is None or size < best[1]:
                best = (which, size)

    if best is not None:
        which = best[0]
        try:
            x = brentq(
                lambda t: connection_residual(point_at(t), theta, which, opts),
                lo,
                hi,
                xtol=1e-12,
                maxiter=100,
            )
            logger.debug("refined transition on saddle %s to %.12f", which.value, x)
            return float(x)
        except (ValueError, RuntimeError, StruveAsymptoticsError) as exc:
            logger.debug("residual refinement failed (%s); bisecting labels", exc)

    lo, hi = _bisect_labels(label_at, lo, hi, label_lo, 1e-9)
    return 0.5 * (lo + hi)


def critical_beta(
    alpha: float,
    theta: float,
    bracket: Tuple[float, float] = (0.0, 1.0),
    opts: Optional[TraceOptions] = None,
) -> float:
    """beta* such that the origin path at q = alpha + i beta* meets a saddle."""
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketInvalid(f"empty bracket [{lo}, {hi}]")
    return _locate_transition(lambda b: complex(alpha, b), theta, lo, hi, opts)


def intercept_Q(
    theta: float,
    bracket: Tuple[float, float] = (0.005, 1.0),
    opts: Optional[TraceOptions] = None,
) -> InterceptQ:
    """Where the lower transition curve crosses the positive real q-axis."""
    if theta == 0:
        return InterceptQ(0.0, 1.0)
    if theta < 0:
        return InterceptQ(theta, intercept_Q(-theta, bracket, opts).q_Q)
    lo, hi = float(bracket[0]), float(bracket[1])
    q = _locate_transition(lambda x: complex(x, 0.0), theta, lo, hi, opts)
    logger.info("intercept Q(theta=%.6f) = %.8f", theta, q)
    return InterceptQ(theta, q)


# -----------------------
# Triple point
# -----------------------
def _newton2(
    func: Callable[[complex], np.ndarray],
    x: complex,
    tol: float,
    max_iter: int = 60,
) -> complex:
    """Damped Newton for two real equations in a complex unknown."""
    f = func(x)
    for it in range(max_iter):
        norm = float(np.linalg.norm(f))
        if norm < tol:
            return x
        h = FD_STEP * max(1.0, abs(x))
        jac = np.column_stack([(func(x + h) - f) / h, (func(x + 1j * h) - f) / h])
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at {x}") from exc
        step = complex(dx[0], dx[1])
        lam = 1.0
        while lam > 1e-4:
            x_new = x + lam * step
            try:
                f_new = func(x_new)
            except ContinuationAmbiguous:
                f_new = None
            if f_new is not None and float(np.linalg.norm(f_new)) < norm:
                break
            lam *= 0.5
        else:
            raise NoConvergence(f"damped Newton stalled at {x} (|F|={norm:.3e})")
        x, f = x_new, f_new
        logger.debug("newton it=%d x=%s |F|=%.3e", it, x, float(np.linalg.norm(f)))
        if abs(lam * step) < PARAM_TOL * 1e-2 * max(1.0, abs(x)) and float(np.linalg.norm(f)) < 1e3 * tol:
            return x
    raise NoConvergence(f"Newton did not converge in {max_iter} iterations")


def _triple_system(theta: float, anchors: Tuple[PhasePoint, PhasePoint]):
    """Residuals of both saddles as a function of w, where the saddles are e^{+-w}.

    With u = e^w the saddle pair is (u, 1/u) and q = cosh w, so the unknown
    never meets the square-root branch of the saddle formula.
    """

    def states(w: complex) -> Tuple[PhasePoint, PhasePoint]:
        u = cmath.exp(w)
        return continue_log(anchors[0], u), continue_log(anchors[1], 1 / u)

    def func(w: complex) -> np.ndarray:
        params = Parameters(cmath.cosh(w), theta)
        pa, pb = states(w)
        scale = max(1.0, abs(phase(pa, params)), abs(phase(pb, params)))
        return np.array([phase(pa, params).imag, phase(pb, params).imag]) / scale

    return func, states


def _small_theta_guess(theta: float) -> complex:
    """Leading-order w at small theta from the cubic unfolding of the double saddle."""
    s = math.sqrt(2.0 * _TAU_DOUBLE * theta / (_LOG2 * math.sin(theta / 3 + 2 * math.pi / 3)))
    eps = s * cmath.exp(1j * (math.pi / 3 - theta / 3))
    return cmath.log(1 + eps)


@lru_cache(maxsize=64)
def _triple_point_positive(
    theta: float, max_dtheta: float, opts: Optional[TraceOptions], verify: bool
) -> TriplePoint:
    th = min(theta, 0.01 * math.pi)
    w = _small_theta_guess(th)
    u = cmath.exp(w)
    anchors = (PhasePoint.principal(u), PhasePoint.principal(1 / u))

    history: List[Tuple[float, complex]] = []
    dth = th
    while True:
        func, states = _triple_system(th, anchors)
        try:
            w_new = _newton2(func, w, RESIDUAL_TOL)
        except NoConvergence:
            if not history:
                raise
            dth *= 0.5
            if dth < 1e-9:
                raise NoConvergence(f"homotopy in theta stalled at theta={history[-1][0]:.6f}")
            th_prev, w_prev = history[-1]
            th = th_prev + dth
            w = w_prev if len(history) < 2 else _extrapolate(history, th)
            continue
        w = w_new
        anchors = states(w)
        history.append((th, w))
        if th >= theta:
            break
        dth = min(1.5 * dth, max_dtheta)
        th = min(theta, th + dth)
        w = _extrapolate(history, th) if len(history) >= 2 else w

    q_P = cmath.cosh(w)
    logger.info("triple point theta=%.6f q_P=%s", theta, q_P)
    verified = _verify_triple_point(q_P, theta, opts) if verify else False
    return TriplePoint(theta, q_P, anchors, verified)


def _extrapolate(history: List[Tuple[float, complex]], th: float) -> complex:
    (t0, w0), (t1, w1) = history[-2], history[-1]
    return w1 + (w1 - w0) * (th - t1) / (t1 - t0)


def _verify_triple_point(q: complex, theta: float, opts: Optional[TraceOptions]) -> bool:
    try:
        params = Parameters(q, theta)
        for which in (Saddle.S1, Saddle.S2):
            p = saddle_state_from_path(q, theta, which, opts)
            if abs(phase(p, params).imag) > 1e-6 * _residual_scale(q, theta, p):
                return False
        return True
    except StruveAsymptoticsError as exc:
        logger.debug("triple point verification failed: %s", exc)
        return False


def triple_point(
    theta: float,
    opts: Optional[TraceOptions] = None,
    max_dtheta: float = 0.01 * math.pi,
    verify: bool = True,
) -> TriplePoint:
    """q where the origin path connects with both saddles."""
    theta = float(theta)
    if not abs(theta) < 0.5 * math.pi:
        raise InadmissibleParameters(f"|theta| must be < pi/2, got {theta}")
    if theta == 0:
        return TriplePoint(0.0, 1 + 0j, (_DOUBLE_SADDLE, _DOUBLE_SADDLE), True)
    if theta < 0:
        tp = _triple_point_positive(-theta, max_dtheta, opts, verify)
        states = (tp.saddle_states[0].conjugate(), tp.saddle_states[1].conjugate())
        return TriplePoint(theta, tp.q_P.conjugate(), states, tp.verified)
    return _triple_point_positive(theta, max_dtheta, opts, verify)


# -----------------------
# Curve continuation
# -----------------------
def _gradient(q: complex, theta: float, anchor: PhasePoint) -> complex:
    """d(residual)/d(Re q) + i d(residual)/d(Im q)."""
    h = 1e-7 * max(1.0, abs(q))
    r0, _ = _carried_residual(q, theta, anchor)
    rx, _ = _carried_residual(q + h, theta, anchor)
    ry, _ = _carried_residual(q + 1j * h, theta, anchor)
    return complex((rx - r0) / h, (ry - r0) / h)


def _correct_on_curve(
    q_pred: complex, tangent: complex, theta: float, anchor: PhasePoint, max_iter: int = 12
) -> Optional[Tuple[complex, PhasePoint]]:
    """Newton on residual = 0 within the hyperplane normal to the tangent."""
    q = q_pred
    for _ in range(max_iter):
        try:
            r, state = _carried_residual(q, theta, anchor)
            if abs(r) < RESIDUAL_TOL * _residual_scale(q, theta, state):
                return q, state
            g = _gradient(q, theta, anchor)
        except ContinuationAmbiguous:
            return None
        a = np.array([[g.real, g.imag], [tangent.real, tangent.imag]])
        off = q - q_pred
        b = -np.array([r, tangent.real * off.real + tangent.imag * off.imag])
        try:
            dx = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            return None
        q += complex(dx[0], dx[1])
    return None


def _tangent(q: complex, theta: float, anchor: PhasePoint, orient: complex) -> complex:
    g = _gradient(q, theta, anchor)
    if g == 0:
        raise NoConvergence(f"residual gradient vanishes at q={q}")
    t = 1j * g / abs(g)
    return t if (t * orient.conjugate()).real >= 0 else -t


def _continuation_step(
    q: complex, t: complex, theta: float, anchor: PhasePoint, h: float, halvings: int = 8
) -> Tuple[complex, PhasePoint]:
    for _ in range(halvings + 1):
        q_pred = q + h * t
        res = _correct_on_curve(q_pred, t, theta, anchor)
        if res is not None:
            q_new, state = res
            hop = abs(state.u - anchor.u)
            if abs(q_new - q_pred) < 0.5 * h and hop < 0.5 * max(abs(anchor.u), 1e-3) + 2 * h:
                return q_new, state
        h *= 0.5
    raise StepTooLarge(f"corrector failed after {halvings} step halvings at q={q}")


def side_labels(
    q: complex, normal: complex, theta: float, eps: float = 1e-3, opts: Optional[TraceOptions] = None
) -> FrozenSet[DomainLabel]:
    """Classifications a distance eps either side of q along the normal."""
    n = normal / abs(normal)
    return frozenset(
        classify_endpoint(Parameters(q + s * eps * n, theta), opts) for s in (1.0, -1.0)
    )


def _start_from_triple_point(
    theta: float, branch: Branch, step: float, opts: Optional[TraceOptions]
) -> Tuple[complex, PhasePoint, complex]:
    tp = triple_point(theta, opts, verify=False)
    target = BRANCH_LABELS[branch]
    hint = cmath.exp(1j * _BRANCH_HINT[branch])
    candidates = []
    for anchor in tp.saddle_states:
        g = _gradient(tp.q_P, theta, anchor)
        if g == 0:
            continue
        t = 1j * g / abs(g)
        candidates.extend((anchor, sign * t) for sign in (1.0, -1.0))
    candidates.sort(key=lambda c: -(c[1] * hint.conjugate()).real)

    for anchor, t in candidates:
        try:
            q1, state = _continuation_step(tp.q_P, t, theta, anchor, step)
            labels = side_labels(q1, 1j * t, theta, min(1e-3, 0.1 * step), opts)
        except StruveAsymptoticsError:
            continue
        if labels == target:
            return tp.q_P, anchor, t
    logger.warning(
        "no candidate separates %s at theta=%.6f; following the hinted direction", branch.value, theta
    )
    if not candidates:
        raise NoConvergence(f"no transition branches leave P at theta={theta}")
    anchor, t = candidates[0]
    return tp.q_P, anchor, t


def _degenerate_real_segment(arc_length: float, step: float) -> TransitionCurve:
    n = max(1, int(math.ceil(arc_length / step)))
    samples = [complex(1.0 + arc_length * k / n, 0.0) for k in range(n + 1)]
    states = [PhasePoint.principal(saddle_points(q).u_minus) for q in samples]
    return TransitionCurve(Branch.PB, 0.0, samples, states)


def _continue_curve(
    branch: Branch,
    theta: float,
    q: complex,
    anchor: PhasePoint,
    t: complex,
    arc_length: float,
    step: float,
    head: Optional[List[Tuple[complex, PhasePoint]]] = None,
) -> TransitionCurve:
    head = head or []
    samples = [h[0] for h in head] + [q]
    states = [h[1] for h in head] + [anchor]
    s = 0.0
    while s < arc_length - 1e-12:
        h = min(step, arc_length - s)
        q_new, state = _continuation_step(q, t, theta, anchor, h)
        t = _tangent(q_new, theta, state, t)
        s += abs(q_new - q)
        q, anchor = q_new, state
        samples.append(q)
        states.append(state)
    return TransitionCurve(branch, theta, samples, states)


def _conjugate_curve(curve: TransitionCurve, branch: Branch, theta: float) -> TransitionCurve:
    return TransitionCurve(
        branch,
        theta,
        [q.conjugate() for q in curve.samples],
        [p.conjugate() for p in curve.saddle_states],
    )


def trace_transition_curve(
    theta: float,
    branch: Branch,
    arc_length: float = 1.0,
    step: float = 0.02,
    opts: Optional[TraceOptions] = None,
) -> TransitionCurve:
    """Pseudo-arclength continuation of one transition curve leaving P."""
    branch = Branch(branch)
    if step <= 0 or arc_length <= 0:
        raise StepTooLarge(f"step and arc_length must be positive (step={step}, arc_length={arc_length})")
    if step > arc_length:
        raise StepTooLarge(f"step {step} exceeds arc_length {arc_length}")
    theta = float(theta)

    if theta < 0:
        mirror = trace_transition_curve(-theta, _CONJUGATE_BRANCH[branch], arc_length, step, opts)
        return _conjugate_curve(mirror, branch, theta)

    if theta == 0:
        if branch is Branch.PB:
            return _degenerate_real_segment(arc_length, step)
        if branch is Branch.PC:
            upper = trace_transition_curve(0.0, Branch.PA, arc_length, step, opts)
            return _conjugate_curve(upper, Branch.PC, 0.0)
        # upper curve: start one step left of the double saddle
        alpha = 1.0 - step
        q0 = complex(alpha, critical_beta(alpha, 0.0, (0.0, 1.5), opts))
        anchor = saddle_state_from_path(q0, 0.0, Saddle.S1, opts)
        t = _tangent(q0, 0.0, anchor, q0 - 1)
        head = [(1 + 0j, _DOUBLE_SADDLE)]
        return _continue_curve(Branch.PA, 0.0, q0, anchor, t, arc_length - abs(q0 - 1), step, head)

    q_P, anchor, t = _start_from_triple_point(theta, branch, step, opts)
    return _continue_curve(branch, theta, q_P, anchor, t, arc_length, step)


def curve_real_crossing(curve: TransitionCurve) -> float:
    """Real q where the curve crosses the real axis, refined on the residual."""
    q = curve.samples
    for k in range(1, len(q)):
        a, b = q[k - 1], q[k]
        if a.imag == 0 and b.imag == 0:
            continue
        if a.imag * b.imag <= 0:
            anchor = curve.saddle_states[k - 1]
            # refine along the chord's real projection
            lo, hi = sorted((a.real, b.real))
            pad = 0.5 * abs(b - a) + 1e-9
            lo, hi = lo - pad, hi + pad

            def r(x: float) -> float:
                return _carried_residual(complex(x, 0.0), curve.theta, anchor)[0]

            try:
                return float(brentq(r, lo, hi, xtol=1e-13))
            except ValueError as exc:
                raise NoConvergence(f"no sign change of the residual on [{lo}, {hi}]") from exc
    raise NoConvergence("curve does not cross the real axis")


def on_transition(
    q: complex, theta: float, tol: float = 1e-8, opts: Optional[TraceOptions] = None
) -> bool:
    """True when the origin path passes through one of the saddles to within tol."""
    for which in (Saddle.S1, Saddle.S2):
        try:
            p = saddle_state_from_path(q, theta, which, opts)
        except ContinuationAmbiguous:
            continue
        if abs(phase(p, Parameters(q, theta)).imag) <= tol * _residual_scale(q, theta, p):
            return True
    return classify_endpoint(Parameters(q, theta), opts) is DomainLabel.ON_TRANSITION
