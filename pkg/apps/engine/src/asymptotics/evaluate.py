"""Optimally truncated expansions of H_nu(z) and the oracles that check them.

All multiprecision work runs in a fresh ``MPContext`` per computation, so
callers on different threads or processes never share a precision setting.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, List, NamedTuple, Optional, Sequence

from mpmath.ctx_mp import MPContext

from .coeffgen import QPolynomial, coefficients
from .errors import DomainError, InadmissibleParameters, OnTransitionUnsupported, PoleAtNonpositiveInteger
from .landscape import DomainLabel, Parameters, TraceOptions, classify_endpoint

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 50
QUAD_DIGITS = 30
DEFAULT_K_MAX = 60
GUARD_DIGITS = 10
TAIL_DIGITS = 25
# |t_m| above this fraction of |t_{m-1}| counts as a flat minimum
FLAT_MINIMUM = 0.99


class Variant(str, Enum):
    PLUS_I = "PlusI"
    MINUS_I = "MinusI"
    MINUS_Y = "MinusY"


class OracleMethod(str, Enum):
    QUADRATURE_12_PLUS = "Quadrature12Plus"
    QUADRATURE_12_MINUS = "Quadrature12Minus"
    QUADRATURE_13 = "Quadrature13"
    MACLAURIN = "Maclaurin"


class BigComplex(NamedTuple):
    value: Any  # mpmath mpc
    digits: int

    def __complex__(self) -> complex:
        return complex(self.value)


@dataclass(frozen=True)
class OracleResult:
    value: complex
    est_error: float
    method: OracleMethod
    big: Optional[BigComplex] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class AsymptoticSum:
    nu: complex
    z: complex
    variant: Variant
    terms: List[complex]
    k_star: int
    prefactor: complex
    total: complex


@dataclass(frozen=True)
class EvalReport:
    q: complex
    theta: float
    modulus_z: float
    endpoint: DomainLabel
    endpoint_symbol: str
    variant: Variant
    k_star: int
    asymptotic: complex
    oracle: complex
    oracle_method: OracleMethod
    h_value: complex
    relative_error_H: float
    relative_error_combination: float
    # z = z0 e^{pi m i} with the report computed at z0; H_nu(z) = multiplier * H_nu(z0)
    continuation: int = 0
    multiplier: complex = 1 + 0j

    @property
    def continued_asymptotic(self) -> complex:
        return self.multiplier * self.asymptotic

    @property
    def continued_h(self) -> complex:
        return self.multiplier * self.h_value

    def to_row(self) -> dict:
        return {
            "q_re": self.q.real,
            "q_im": self.q.imag,
            "theta_over_pi": self.theta / math.pi,
            "endpoint": self.endpoint_symbol,
            "rel_err_H": self.relative_error_H,
            "rel_err_combo": self.relative_error_combination,
            "k_star": self.k_star,
        }


def _context(digits: int) -> MPContext:
    ctx = MPContext()
    ctx.dps = int(digits)
    return ctx


def _is_nonpositive_integer(w: complex) -> bool:
    w = complex(w)
    return w.imag == 0 and w.real <= 0 and w.real == math.floor(w.real)


def _log_prefactor(ctx: MPContext, nu, z, shift: int):
    """log of (z/2)^(nu+shift) / (sqrt(pi) Gamma(nu+1/2))."""
    if _is_nonpositive_integer(complex(nu) + 0.5):
        raise PoleAtNonpositiveInteger(f"Gamma(nu+1/2) has a pole at nu={nu}")
    return (nu + shift) * ctx.log(z / 2) - ctx.log(ctx.pi) / 2 - ctx.loggamma(nu + ctx.mpf(1) / 2)


# -----------------------
# Special functions
# -----------------------
def log_gamma(w: complex, digits: int = DEFAULT_DIGITS) -> BigComplex:
    """Continuous branch of log Gamma (principal on the positive axis)."""
    if _is_nonpositive_integer(w):
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at {w}")
    ctx = _context(digits)
    return BigComplex(ctx.loggamma(ctx.mpc(w)), digits)


def _maclaurin_sum(ctx: MPContext, nu, z):
    """(sum, largest |term|) of the series in (z/2)^2 without the (z/2)^(nu+1) factor."""
    h2 = -(z / 2) ** 2
    three_halves = ctx.mpf(3) / 2
    direct = _is_nonpositive_integer(complex(nu) + 1.5)
    total = ctx.mpc(0)
    biggest = ctx.mpf(0)
    term = ctx.rgamma(three_halves) * ctx.rgamma(nu + three_halves)
    n = 0
    while True:
        if direct:
            term = h2**n * ctx.rgamma(n + three_halves) * ctx.rgamma(n + nu + three_halves)
        total += term
        size = abs(term)
        if size > biggest:
            biggest = size
        shrink = abs(h2) / (abs(n + three_halves) * max(abs(n + nu + three_halves), 1))
        if n > 2 and biggest > 0 and shrink < 0.5 and size <= ctx.eps * biggest:
            break
        if not direct:
            term = term * h2 / ((n + three_halves) * (n + nu + three_halves))
        n += 1
    return total, biggest


def _maclaurin_at(nu: complex, z: complex, digits: int):
    ctx = _context(digits)
    nu_m, z_m = ctx.mpc(nu), ctx.mpc(z)
    total, biggest = _maclaurin_sum(ctx, nu_m, z_m)
    lost = 0.0
    if total != 0:
        lost = max(0.0, float(ctx.log10(biggest / abs(total))))
    else:
        lost = float(digits)
    return ctx.power(z_m / 2, nu_m + 1) * total, lost


def struve_maclaurin(nu: complex, z: complex, target_digits: int = DEFAULT_DIGITS) -> OracleResult:
    """H_nu(z) from its power series, precision raised to absorb cancellation."""
    nu, z = complex(nu), complex(z)
    if z == 0:
        if (nu + 1).real > 0:
            return OracleResult(0j, 0.0, OracleMethod.MACLAURIN, BigComplex(0, target_digits))
        raise DomainError(f"H_nu(0) is not finite for Re(nu) <= -1 (nu={nu})")

    digits = target_digits + GUARD_DIGITS
    for _ in range(6):
        value, lost = _maclaurin_at(nu, z, digits)
        if digits - lost >= target_digits + GUARD_DIGITS // 2:
            break
        digits = int(math.ceil(target_digits + lost + GUARD_DIGITS))
        logger.debug("maclaurin cancellation %.1f digits; raising precision to %d", lost, digits)
    check, _ = _maclaurin_at(nu, z, 2 * digits)
    ctx = _context(2 * digits)
    est = float(abs(ctx.mpc(check) - ctx.mpc(value)))
    return OracleResult(complex(check), est, OracleMethod.MACLAURIN, BigComplex(check, 2 * digits))


# -----------------------
# Quadrature oracles
# -----------------------
def _panels(ctx: MPContext, a, b, count: int) -> list:
    return [a + (b - a) * ctx.mpf(k) / count for k in range(count + 1)]


def integral_12(nu: complex, z: complex, sign: int, digits: int = QUAD_DIGITS) -> OracleResult:
    """H_nu(z) + sign*i J_nu(z) from the finite contour integral to u = sign*i."""
    nu, z = complex(nu), complex(z)
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if nu.real <= -0.5:
        raise DomainError(f"finite-contour integral needs Re(nu) > -1/2 (nu={nu})")
    if z == 0 or abs(cmath.phase(z)) >= 0.5 * math.pi:
        raise DomainError(f"need |arg z| < pi/2 (z={z})")

    ctx = _context(digits + GUARD_DIGITS)
    nu_m, z_m = ctx.mpc(nu), ctx.mpc(z)
    half = ctx.mpf(1) / 2
    rot = ctx.mpc(0, sign)

    if nu.real < 1.5:
        # u = sign*i (1 - s^2) removes the endpoint singularity at s = 0
        def f(s):
            if s == 0:
                return ctx.mpc(0)
            return 2 * ctx.exp(
                2 * nu_m * ctx.log(s) + (nu_m - half) * ctx.log(2 - s * s) - rot * z_m * (1 - s * s)
            )
    else:
        def f(x):
            if x == 1:
                return ctx.mpc(0)
            return ctx.exp(-rot * z_m * x + (nu_m - half) * ctx.log(1 - x * x))

    # s^(2 nu) is analytic at 0 only for integer 2 nu; endpoint singularities go to tanh-sinh
    analytic = nu.real < 1.5 and _is_nonpositive_integer(-2 * nu)
    rule = "gauss-legendre" if analytic else "tanh-sinh"
    count = max(8, int(math.ceil(2 * abs(z) / math.pi)))
    integral, err = ctx.quad(f, _panels(ctx, ctx.mpf(0), ctx.mpf(1), count), error=True, method=rule)
    pref = 2 * ctx.exp(_log_prefactor(ctx, nu_m, z_m, 0))
    value = pref * rot * integral
    method = OracleMethod.QUADRATURE_12_PLUS if sign > 0 else OracleMethod.QUADRATURE_12_MINUS
    return OracleResult(complex(value), float(abs(pref) * err), method, BigComplex(value, digits))


def _tail_cut(re_z: float, r: float) -> float:
    """u beyond which exp(-Re z u)(1+u^2)^r has dropped TAIL_DIGITS decades below its peak."""

    def env(u: float) -> float:
        return -re_z * u + r * math.log1p(u * u)

    peak_u = 0.0
    if r > re_z:
        peak_u = (r + math.sqrt(r * r - re_z * re_z)) / re_z
    peak = max(env(0.0), env(peak_u))
    drop = TAIL_DIGITS * math.log(10.0)
    hi = max(1.0, 2 * peak_u)
    while env(hi) > peak - drop:
        hi *= 2
    lo = peak_u
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if env(mid) > peak - drop:
            lo = mid
        else:
            hi = mid
    return hi


def integral_13(nu: complex, z: complex, digits: int = QUAD_DIGITS) -> OracleResult:
    """H_nu(z) - Y_nu(z) from the integral along the positive real axis."""
    nu, z = complex(nu), complex(z)
    if z.real <= 0:
        raise DomainError(f"semi-infinite integral needs Re(z) > 0 (z={z})")

    ctx = _context(digits + GUARD_DIGITS)
    nu_m, z_m = ctx.mpc(nu), ctx.mpc(z)
    half = ctx.mpf(1) / 2

    def f(u):
        return ctx.exp(-z_m * u + (nu_m - half) * ctx.log(1 + u * u))

    cut = _tail_cut(z.real, nu.real - 0.5)
    count = max(8, int(math.ceil(cut * (abs(z.imag) / math.pi + 1) * 2)))
    integral, err = ctx.quad(f, _panels(ctx, ctx.mpf(0), ctx.mpf(cut), count), error=True, method="gauss-legendre")
    pref = 2 * ctx.exp(_log_prefactor(ctx, nu_m, z_m, 0))
    value = pref * integral
    logger.debug("integral_13 nu=%s z=%s tail cut at %.3f with %d panels", nu, z, cut, count)
    return OracleResult(complex(value), float(abs(pref) * err), OracleMethod.QUADRATURE_13, BigComplex(value, digits))


# -----------------------
# Asymptotic expansion
# -----------------------
def _coefficient_mp(ctx: MPContext, c: QPolynomial, q):
    acc = ctx.mpc(0)
    for a in reversed(c.coeffs):
        acc = acc * q + ctx.mpf(a.numerator) / a.denominator
    return acc


def optimal_truncation(terms: Sequence[Any]) -> int:
    """Index at or just before the least term of the leading decreasing run.

    The scan stops at the first term followed by a larger one, so a later isolated
    dip is never taken. When that term is within FLAT_MINIMUM of its predecessor
    the minimum is flat and the earlier index is returned.
    """
    if not terms:
        raise ValueError("optimal_truncation needs at least one term")
    sizes = [abs(t) for t in terms]
    for m in range(len(sizes) - 1):
        if sizes[m + 1] > sizes[m]:
            break
    else:
        return len(sizes) - 1
    if m > 0 and sizes[m] > FLAT_MINIMUM * sizes[m - 1]:
        return m - 1
    return m


def asymptotic_sum(
    nu: complex,
    z: complex,
    variant: Variant,
    k_max: Optional[int] = None,
    digits: int = DEFAULT_DIGITS,
) -> AsymptoticSum:
    """(z/2)^(nu-1)/(sqrt(pi) Gamma(nu+1/2)) * sum c_k(q) k!/z^k, truncated at the least term.

    ``k_max`` bounds the computed range (default DEFAULT_K_MAX); the sum always
    stops at the least term within it.
    """
    nu, z = complex(nu), complex(z)
    if z == 0:
        raise DomainError("asymptotic expansion needs z != 0")
    n_max = DEFAULT_K_MAX if k_max is None else int(k_max)
    if n_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")

    ctx = _context(digits + 2 * GUARD_DIGITS)
    nu_m, z_m = ctx.mpc(nu), ctx.mpc(z)
    q = nu_m / z_m
    terms = []
    scale = ctx.mpf(1)
    for k, c in enumerate(coefficients(n_max)):
        if k:
            scale = scale * k / z_m
        terms.append(_coefficient_mp(ctx, c, q) * scale)
    k_star = optimal_truncation(terms)
    prefactor = ctx.exp(_log_prefactor(ctx, nu_m, z_m, -1))
    total = prefactor * ctx.fsum(terms[: k_star + 1])
    logger.debug("asymptotic sum nu=%s z=%s k*=%d |t_k*|=%s", nu, z, k_star, ctx.nstr(abs(terms[k_star]), 5))
    return AsymptoticSum(
        nu=nu,
        z=z,
        variant=Variant(variant),
        terms=[complex(t) for t in terms],
        k_star=k_star,
        prefactor=complex(prefactor),
        total=complex(total),
    )


# -----------------------
# Argument continuation
# -----------------------
def continue_argument(nu: complex, z: complex, m: int) -> complex:
    """Multiplier e^{pi m i (nu+1)} in H_nu(z e^{pi m i}) = multiplier * H_nu(z)."""
    if int(m) != m:
        raise ValueError(f"m must be an integer, got {m}")
    if z == 0:
        raise DomainError("continuation needs z != 0")
    return cmath.exp(1j * math.pi * int(m) * (complex(nu) + 1))


def reduce_argument(z: complex):
    """(z0, m) with arg z0 in (-pi/2, pi/2] and z = z0 e^{pi m i}."""
    z = complex(z)
    if z == 0:
        raise DomainError("cannot reduce the argument of 0")
    a = cmath.phase(z)
    if -0.5 * math.pi < a <= 0.5 * math.pi:
        return z, 0
    return -z, (1 if a > 0 else -1)


# -----------------------
# Error report
# -----------------------
def _select_variant(params: Parameters, label: DomainLabel):
    if label is DomainLabel.TO_INFINITY:
        return Variant.MINUS_Y, label.symbol
    if label is DomainLabel.TO_PLUS_I:
        return Variant.PLUS_I, label.symbol
    if label is DomainLabel.TO_MINUS_I:
        return Variant.MINUS_I, label.symbol
    if params.theta == 0 and params.q.imag == 0 and params.q.real >= 1:
        # the path meets S2 on the real axis and continues to both +i and -i;
        # the PlusI expansion is checked against the +i contour
        return Variant.PLUS_I, "+-i"
    raise OnTransitionUnsupported(
        f"q={params.q} theta={params.theta} lies on a transition curve"
    )


def error_report(
    q: complex,
    theta: float,
    modulus_z: float = 40.0,
    k_max: Optional[int] = None,
    digits: int = DEFAULT_DIGITS,
    opts: Optional[TraceOptions] = None,
) -> EvalReport:
    """Relative error of the optimally truncated expansion at z = |z| e^{i theta}, nu = q z."""
    params = Parameters(q, theta)
    if not params.in_sector():
        raise InadmissibleParameters(f"|arg nu| exceeds pi/2 for q={q}, theta={theta}")
    if modulus_z <= 0:
        raise DomainError(f"|z| must be positive, got {modulus_z}")
    label = classify_endpoint(params, opts)
    variant, symbol = _select_variant(params, label)

    z = modulus_z * params.rotation
    nu = params.q * z
    asym = asymptotic_sum(nu, z, variant, k_max, digits)

    if variant is Variant.MINUS_Y:
        oracle = integral_13(nu, z)
    else:
        oracle = integral_12(nu, z, 1 if variant is Variant.PLUS_I else -1)

    h = struve_maclaurin(nu, z, max(digits, DEFAULT_DIGITS))
    diff = abs(asym.total - oracle.value)
    report = EvalReport(
        q=params.q,
        theta=params.theta,
        modulus_z=float(modulus_z),
        endpoint=label,
        endpoint_symbol=symbol,
        variant=variant,
        k_star=asym.k_star,
        asymptotic=asym.total,
        oracle=oracle.value,
        oracle_method=oracle.method,
        h_value=h.value,
        relative_error_H=diff / abs(h.value),
        relative_error_combination=diff / abs(oracle.value),
    )
    logger.info(
        "q=%s theta/pi=%.3f endpoint=%s k*=%d rel_err_H=%.3e",
        params.q, params.theta / math.pi, symbol, asym.k_star, report.relative_error_H,
    )
    return report


def error_report_at(
    nu: complex,
    z: complex,
    k_max: Optional[int] = None,
    digits: int = DEFAULT_DIGITS,
    opts: Optional[TraceOptions] = None,
) -> EvalReport:
    """error_report at any (nu, z) with z != 0.

    z is reduced to z0 with arg z0 in (-pi/2, pi/2], the report is computed at
    (nu, z0) and carries the multiplier that continues H_nu back to z. Relative
    errors are unchanged by the continuation. arg z0 = pi/2 is inadmissible.
    """
    nu = complex(nu)
    z0, m = reduce_argument(z)
    report = error_report(nu / z0, cmath.phase(z0), abs(z0), k_max, digits, opts)
    if m == 0:
        return report
    multiplier = continue_argument(nu, z0, m)
    logger.info("z=%s continued from z0=%s (m=%d, multiplier=%s)", complex(z), z0, m, multiplier)
    return replace(report, continuation=m, multiplier=multiplier)
