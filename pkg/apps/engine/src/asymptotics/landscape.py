"""Phase function, saddles and steepest-descent paths on the sheeted u-plane.

tau(u) = e^{i theta} (u - q log(1+u^2)). The logarithm is never taken on a
fixed branch: every PhasePoint carries the value of log(1+u^2) obtained by
continuity along the path that produced it.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import RK45

from ..config import EngineConfig
from .errors import ContinuationAmbiguous, DomainError, InadmissibleParameters, MaxStepsExceeded

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


class DomainLabel(str, Enum):
    TO_INFINITY = "ToInfinity"
    TO_PLUS_I = "ToPlusI"
    TO_MINUS_I = "ToMinusI"
    ON_TRANSITION = "OnTransition"

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    def conjugate(self) -> "DomainLabel":
        if self is DomainLabel.TO_PLUS_I:
            return DomainLabel.TO_MINUS_I
        if self is DomainLabel.TO_MINUS_I:
            return DomainLabel.TO_PLUS_I
        return self


_SYMBOLS = {
    DomainLabel.TO_INFINITY: "inf",
    DomainLabel.TO_PLUS_I: "+i",
    DomainLabel.TO_MINUS_I: "-i",
    DomainLabel.ON_TRANSITION: "transition",
}


@dataclass(frozen=True)
class Parameters:
    """q = nu/z and theta = arg z."""

    q: complex
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "theta", float(self.theta))
        if not abs(self.theta) < HALF_PI:
            raise InadmissibleParameters(f"|theta| must be < pi/2, got {self.theta}")

    @property
    def omega(self) -> float:
        return cmath.phase(self.q)

    @property
    def rotation(self) -> complex:
        return cmath.exp(1j * self.theta)

    def in_sector(self) -> bool:
        """|arg nu| <= pi/2, i.e. |omega + theta| <= pi/2."""
        return self.q == 0 or abs(self.omega + self.theta) <= HALF_PI + 1e-12

    def conjugate(self) -> "Parameters":
        return Parameters(self.q.conjugate(), -self.theta)


@dataclass(frozen=True)
class PhasePoint:
    u: complex
    logval: complex

    @classmethod
    def principal(cls, u: complex) -> "PhasePoint":
        u = complex(u)
        return cls(u, cmath.log(1 + u * u))

    @property
    def winding(self) -> int:
        """Net turns of 1+u^2 about 0 relative to the principal branch."""
        w = 1 + self.u * self.u
        return int(round((self.logval.imag - cmath.phase(w)) / TWO_PI))

    def conjugate(self) -> "PhasePoint":
        return PhasePoint(self.u.conjugate(), self.logval.conjugate())


@dataclass(frozen=True)
class SaddlePair:
    u_plus: complex
    u_minus: complex
    is_double: bool


@dataclass(frozen=True)
class TraceOptions:
    r_max: float = 1e4
    eps_branch: float = 1e-6
    saddle_tol: float = 1e-9
    start_offset: float = 1e-8
    # absolute bound on |Im tau| per accepted point; RK45 atol is rtol times the local scale
    rtol: float = 1e-10
    max_steps: int = 200_000
    winding_cap: int = 8
    # step never exceeds step_cap * distance to the nearest saddle or branch point
    step_cap: float = 0.25
    h_init: float = 1e-3
    h_min: float = 1e-15

    @classmethod
    def from_config(cls, cfg: EngineConfig) -> "TraceOptions":
        return cls(
            r_max=cfg.r_max,
            eps_branch=cfg.eps_branch,
            saddle_tol=cfg.saddle_tol,
            start_offset=cfg.start_offset,
            rtol=cfg.rtol,
            max_steps=cfg.max_steps,
            winding_cap=cfg.winding_cap,
        )


@dataclass
class PathTrace:
    params: Parameters
    points: List[PhasePoint]
    tau_values: List[complex]
    terminal: DomainLabel
    sheet_winding: int
    saddles: SaddlePair
    rejected_steps: int = 0

    @property
    def u_values(self) -> np.ndarray:
        return np.array([p.u for p in self.points], dtype=complex)


# -----------------------
# Phase function
# -----------------------
def phase(p: PhasePoint, params: Parameters) -> complex:
    return params.rotation * (p.u - params.q * p.logval)


def _dtau(u: complex, q: complex, rotation: complex) -> complex:
    w = 1 + u * u
    if w == 0:
        raise DomainError("dtau/du is singular at u = +-i")
    return rotation * (1 - 2 * q * u / w)


def phase_derivative(p: PhasePoint, params: Parameters) -> complex:
    return _dtau(p.u, params.q, params.rotation)


def saddle_points(q: complex) -> SaddlePair:
    """Roots of u^2 - 2qu + 1, with u_plus the distal one (u_plus ~ 2q as q -> inf)."""
    q = complex(q)
    if q == 0:
        return SaddlePair(1j, -1j, False)
    w = 1 - 1 / (q * q)
    if w.imag == 0:
        # -0.0 would flip the principal root on the cut
        w = complex(w.real, 0.0)
    root = q * cmath.sqrt(w)
    return SaddlePair(q + root, q - root, abs(q * q - 1) <= 1e-12)


# -----------------------
# Branch tracking
# -----------------------
def _segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - p)


def continue_log(p: PhasePoint, u_to: complex, max_pieces: int = 100_000) -> PhasePoint:
    """Carry log(1+u^2) from p to u_to along the straight segment."""
    u0, u_to = p.u, complex(u_to)
    length = abs(u_to - u0)
    if length == 0:
        return p
    clearance = min(_segment_distance(u0, u_to, 1j), _segment_distance(u0, u_to, -1j))
    if clearance <= 1e-14 * max(1.0, length):
        raise ContinuationAmbiguous(f"segment {u0} -> {u_to} passes through a branch point")
    pieces = max(1, math.ceil(length / (0.25 * clearance)))
    if pieces > max_pieces:
        raise ContinuationAmbiguous(
            f"segment {u0} -> {u_to} grazes a branch point (clearance {clearance:.3e})"
        )
    logval = p.logval
    w_prev = 1 + u0 * u0
    for k in range(1, pieces + 1):
        u = u0 + (u_to - u0) * (k / pieces)
        w = 1 + u * u
        logval += cmath.log(w / w_prev)
        w_prev = w
    return PhasePoint(u_to, logval)


# -----------------------
# Steepest-descent tracer
# -----------------------
# RK45 works to its own rtol; the absolute tolerance is rescaled every step
_RK45_RTOL = 1e-13


def _direction(u: complex, q: complex, rotation: complex) -> Optional[complex]:
    """Unit du/ds along which tau grows with real increments."""
    w = 1 + u * u
    if w == 0:
        return None
    d = rotation * (1 - 2 * q * u / w)
    m = abs(d)
    if m == 0:
        return None
    return d.conjugate() / m


def _local_scale(u: complex, saddles: SaddlePair) -> float:
    return min(
        abs(u - 1j),
        abs(u + 1j),
        abs(u - saddles.u_plus),
        abs(u - saddles.u_minus),
        max(1.0, abs(u)),
    )


def spiral_radius(q: complex) -> float:
    """Distance from +-i within which the q log(1+u^2) term can dominate tau'."""
    m = abs(complex(q))
    return min(0.5, m / (1 + m / 1.5))


def capture_radius(params: Parameters) -> float:
    """Radius of the discs about +-i from which every descent path runs into the branch point.

    Near u = i, tau' = -e^{i theta} q / (u - i) + R with |R| <= 1 + |q| / 1.5 for
    |u - i| <= 0.5. The flow points strictly inward wherever |R| |u - i| stays
    below half of Re(e^{i theta} q), so the disc is empty when Re nu <= 0.
    """
    c = 0.5 * (params.rotation * params.q).real
    if c <= 0:
        return 0.0
    return min(0.5, c / (1 + abs(params.q) / 1.5))


def _correct(
    p_old: PhasePoint, u: complex, params: Parameters, h: float, tol: float
) -> Optional[Tuple[PhasePoint, complex]]:
    """Newton on Im tau = 0 across the level curves of Re tau, to |Im tau| <= tol."""
    q, rot = params.q, params.rotation
    w_old = 1 + p_old.u * p_old.u
    for _ in range(6):
        ratio = (1 + u * u) / w_old
        if ratio.real <= 0:
            return None
        logval = p_old.logval + cmath.log(ratio)
        tau = rot * (u - q * logval)
        if abs(tau.imag) <= tol:
            return PhasePoint(u, logval), tau
        d = _dtau(u, q, rot)
        if d == 0:
            return None
        delta = -1j * tau.imag / d
        if abs(delta) > 0.5 * h:
            return None
        u += delta
    return None


def trace_steepest(
    params: Parameters, opts: Optional[TraceOptions] = None, full_path: bool = False
) -> PathTrace:
    """Follow Im tau = 0 from the origin with Re tau increasing until a stop rule fires.

    A path that enters the capture disc about +i or -i is labelled there. With
    full_path it is followed on to within eps_branch of the branch point, for export.
    The winding cap applies only outside the spiral zones about +-i.
    """
    opts = opts or TraceOptions()
    q, rot = params.q, params.rotation
    saddles = saddle_points(q)
    r_capture = capture_radius(params)
    r_spiral = spiral_radius(q)

    origin = PhasePoint(0j, 0j)
    p = PhasePoint.principal(opts.start_offset * rot.conjugate())
    tau = phase(p, params)
    points = [origin, p]
    taus = [0j, tau]
    rejected = 0
    captured: Optional[DomainLabel] = None

    def finish(label: DomainLabel) -> PathTrace:
        logger.debug(
            "trace q=%s theta=%.6f -> %s after %d points (%d rejected)",
            q, params.theta, label.value, len(points), rejected,
        )
        return PathTrace(params, points, taus, label, p.winding, saddles, rejected)

    def stalled() -> PathTrace:
        near = min(abs(p.u - saddles.u_plus), abs(p.u - saddles.u_minus))
        if near < 1e-4 * max(1.0, abs(p.u)):
            return finish(DomainLabel.ON_TRANSITION)
        if captured is not None:
            return finish(captured)
        raise MaxStepsExceeded(f"step size underflow at u={p.u} (q={q}, theta={params.theta})")

    def rhs(_s: float, y: np.ndarray) -> np.ndarray:
        d = _direction(complex(y[0]), q, rot)
        if d is None:
            raise DomainError(f"no descent direction at u={y[0]}")
        return np.array([d])

    if _direction(p.u, q, rot) is None:
        return finish(DomainLabel.ON_TRANSITION)
    scale = _local_scale(p.u, saddles)
    solver = RK45(
        rhs,
        0.0,
        np.array([p.u], dtype=complex),
        np.inf,
        first_step=min(opts.h_init, opts.step_cap * scale),
        max_step=opts.step_cap * scale,
        rtol=_RK45_RTOL,
        atol=opts.rtol * scale,
    )

    for _ in range(opts.max_steps):
        scale = _local_scale(p.u, saddles)
        solver.max_step = opts.step_cap * scale
        solver.atol = opts.rtol * scale
        if solver.h_abs < opts.h_min * max(1.0, abs(p.u)):
            return stalled()

        saved = (solver.t, solver.y.copy(), solver.f.copy())
        try:
            solver.step()
        except DomainError:
            solver.h_abs *= 0.5
            rejected += 1
            continue
        if solver.status == "failed":
            return stalled()

        h = solver.step_size
        corrected = _correct(p, complex(solver.y[0]), params, h, opts.rtol)
        if corrected is None or corrected[1].real <= tau.real:
            solver.t, solver.y, solver.f = saved
            solver.h_abs = 0.5 * h
            rejected += 1
            continue

        p, tau = corrected
        points.append(p)
        taus.append(tau)

        if abs(p.u) > opts.r_max:
            return finish(DomainLabel.TO_INFINITY)
        for label, branch in ((DomainLabel.TO_PLUS_I, 1j), (DomainLabel.TO_MINUS_I, -1j)):
            dist = abs(p.u - branch)
            if dist < opts.eps_branch:
                return finish(label)
            if dist < r_capture and captured is None:
                captured = label
                if not full_path:
                    return finish(label)
        if abs(_dtau(p.u, q, rot)) < opts.saddle_tol:
            return finish(DomainLabel.ON_TRANSITION)
        outside = min(abs(p.u - 1j), abs(p.u + 1j)) >= r_spiral
        if captured is None and outside and abs(p.winding) > opts.winding_cap:
            raise MaxStepsExceeded(
                f"path wound {p.winding} times about a branch point (cap {opts.winding_cap})"
            )

        solver.y = np.array([p.u], dtype=complex)
        try:
            solver.f = rhs(solver.t, solver.y)
        except DomainError:
            return finish(DomainLabel.ON_TRANSITION)

    if captured is not None:
        return finish(captured)
    raise MaxStepsExceeded(f"no terminal reached in {opts.max_steps} steps (q={q})")


def classify_endpoint(params: Parameters, opts: Optional[TraceOptions] = None) -> DomainLabel:
    return trace_steepest(params, opts).terminal


def export_path(trace: PathTrace) -> pd.DataFrame:
    """Rows (re_u, im_u, re_tau, winding) in path order."""
    return pd.DataFrame(
        {
            "re_u": [p.u.real for p in trace.points],
            "im_u": [p.u.imag for p in trace.points],
            "re_tau": [t.real for t in trace.tau_values],
            "winding": [p.winding for p in trace.points],
        }
    )
