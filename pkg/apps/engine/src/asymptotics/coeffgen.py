"""Exact expansion coefficients c_k(q) by formal power-series arithmetic.

The coefficients are defined by

    (1+u^2)^(-1/2) du/dt = sum_k c_k(q) t^k,   t = u - q log(1+u^2),

where u(t) is the reversion of t(u). Everything here is exact over
``fractions.Fraction``; floating point only enters in ``eval_coefficient``.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import SeriesReversionError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class QPolynomial:
    """Polynomial in q with rational coefficients, index = power of q."""

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        c = [Fraction(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def constant(cls, value: Scalar) -> "QPolynomial":
        return cls((Fraction(value),))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __getitem__(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return QPolynomial(tuple(self[i] + other[i] for i in range(n)))

    def __neg__(self) -> "QPolynomial":
        return QPolynomial(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other: Union["QPolynomial", Scalar]) -> "QPolynomial":
        if not isinstance(other, QPolynomial):
            f = Fraction(other)
            return QPolynomial(tuple(a * f for a in self.coeffs))
        if self.is_zero or other.is_zero:
            return ZERO
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return QPolynomial(tuple(out))

    __rmul__ = __mul__

    def __call__(self, q: complex) -> complex:
        return eval_coefficient(self, q)


ZERO = QPolynomial()
ONE = QPolynomial.constant(1)
Q = QPolynomial((Fraction(0), Fraction(1)))


@dataclass(frozen=True)
class FormalSeries:
    """Truncated power series with QPolynomial coefficients.

    ``order`` is the number of retained powers; coefficients of powers
    >= order are dropped by every operation.
    """

    terms: Tuple[QPolynomial, ...]
    order: int

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"series order must be >= 1, got {self.order}")
        t = tuple(self.terms)[: self.order]
        t = t + (ZERO,) * (self.order - len(t))
        object.__setattr__(self, "terms", t)

    @classmethod
    def identity(cls, order: int) -> "FormalSeries":
        return cls((ZERO, ONE), order)

    @classmethod
    def constant(cls, value: QPolynomial, order: int) -> "FormalSeries":
        return cls((value,), order)

    def coefficient(self, n: int) -> QPolynomial:
        return self.terms[n] if 0 <= n < self.order else ZERO

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(self.order, other.order)
        return FormalSeries(tuple(self.terms[i] + other.terms[i] for i in range(n)), n)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(self.order, other.order)
        out = [ZERO] * n
        for i in range(n):
            a = self.terms[i]
            if a.is_zero:
                continue
            for j in range(n - i):
                b = other.terms[j]
                if not b.is_zero:
                    out[i + j] = out[i + j] + a * b
        return FormalSeries(tuple(out), n)

    def derivative(self) -> "FormalSeries":
        if self.order == 1:
            return FormalSeries((), 1)
        return FormalSeries(
            tuple(self.terms[n] * n for n in range(1, self.order)), self.order - 1
        )


def forward_series(order: int) -> FormalSeries:
    """t(u) = u - q log(1+u^2) as a series in u."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    terms: List[QPolynomial] = [ZERO] * order
    if order > 1:
        terms[1] = ONE
    # log(1+u^2) = sum (-1)^(j+1) u^(2j) / j
    for j in range(1, (order - 1) // 2 + 1):
        terms[2 * j] = Q * Fraction((-1) ** j, j)
    return FormalSeries(tuple(terms), order)


def reciprocal(s: FormalSeries) -> FormalSeries:
    """1/s for a series whose constant term is a nonzero rational."""
    c0 = s.coefficient(0)
    if c0.is_zero or not c0.is_constant:
        raise SeriesReversionError("reciprocal needs a nonzero rational constant term")
    inv = Fraction(1) / c0[0]
    out: List[QPolynomial] = [QPolynomial.constant(inv)]
    for n in range(1, s.order):
        acc = ZERO
        for k in range(1, n + 1):
            h = s.terms[k]
            if not h.is_zero:
                acc = acc + h * out[n - k]
        out.append(acc * (-inv))
    return FormalSeries(tuple(out), s.order)


def revert_series(s: FormalSeries) -> FormalSeries:
    """Compositional inverse by Lagrange inversion.

    With s(u) = u h(u), the reversion has a_n = (1/n) [u^(n-1)] h(u)^(-n).
    """
    if not s.coefficient(0).is_zero:
        raise SeriesReversionError("series to revert must have zero constant term")
    lin = s.coefficient(1)
    if lin.is_zero:
        raise SeriesReversionError("series to revert has a vanishing linear coefficient")
    if not lin.is_constant:
        raise SeriesReversionError("linear coefficient must not depend on q")
    n = s.order
    if n <= 2:
        return FormalSeries((ZERO, QPolynomial.constant(1 / lin[0])), n)

    w = reciprocal(FormalSeries(s.terms[1:], n - 1))
    out: List[QPolynomial] = [ZERO] * n
    power = FormalSeries.constant(ONE, n - 1)
    for k in range(1, n):
        power = power * w
        out[k] = power.coefficient(k - 1) * Fraction(1, k)
    return FormalSeries(tuple(out), n)


def compose(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """f(g(t)) by Horner's rule; g must have zero constant term."""
    if not g.coefficient(0).is_zero:
        raise ValueError("inner series of a composition must have zero constant term")
    n = min(f.order, g.order)
    acc = FormalSeries.constant(f.coefficient(n - 1), n)
    for i in range(n - 2, -1, -1):
        acc = acc * g + FormalSeries.constant(f.coefficient(i), n)
    return acc


def inverse_sqrt_series(order: int) -> List[Fraction]:
    """Coefficients of (1+u^2)^(-1/2) in powers of u."""
    out = [Fraction(0)] * order
    for n in range((order + 1) // 2):
        out[2 * n] = Fraction((-1) ** n * comb(2 * n, n), 4**n)
    return out


def _truncated_product(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> List[Fraction]:
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j in range(n - i):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _coefficient_table(k_max: int) -> Tuple[QPolynomial, ...]:
    # Residue form of the reversion:
    #   c_k = [u^k] f(u) (1 - q L(u))^-(k+1),  L(u) = log(1+u^2)/u,
    # so c_k = sum_m C(k+m, m) q^m [u^k] f(u) L(u)^m.
    n = k_max + 1
    f = inverse_sqrt_series(n)
    log_over_u = [Fraction(0)] * n
    for j in range(1, n // 2 + 1):
        log_over_u[2 * j - 1] = Fraction((-1) ** (j + 1), j)

    rows = [[Fraction(0)] * n for _ in range(n)]
    b = f
    for m in range(n):
        if m:
            b = _truncated_product(b, log_over_u, n)
        for k in range(m, n):
            if b[k]:
                rows[k][m] = comb(k + m, m) * b[k]
    logger.debug("built coefficient table up to k=%d", k_max)
    return tuple(QPolynomial(tuple(r)) for r in rows)


def coefficients(k_max: int) -> Tuple[QPolynomial, ...]:
    """c_0 .. c_{k_max} as exact polynomials in q (memoized per k_max)."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    return _coefficient_table(k_max)


def coefficients_by_reversion(k_max: int) -> Tuple[QPolynomial, ...]:
    """Same coefficients via explicit reversion and composition.

    Much slower than ``coefficients``; used to cross-check it.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    order = k_max + 2
    u_of_t = revert_series(forward_series(order))
    f = FormalSeries(tuple(QPolynomial.constant(a) for a in inverse_sqrt_series(order)), order)
    integrand = compose(f, u_of_t) * u_of_t.derivative()
    return tuple(integrand.coefficient(k) for k in range(k_max + 1))


def eval_coefficient(c: QPolynomial, q: complex) -> complex:
    acc = 0j
    q = complex(q)
    for a in reversed(c.coeffs):
        acc = acc * q + float(a)
    return acc


# -----------------------
# Text and JSON forms
# -----------------------
def _monomial(coef: Fraction, power: int) -> str:
    if power == 0:
        return str(coef)
    var = "q" if power == 1 else f"q^{power}"
    if coef == 1:
        return var
    if coef.denominator == 1:
        return f"{coef.numerator}{var}"
    return f"({coef}){var}"


def format_qpolynomial(c: QPolynomial, k: Optional[int] = None) -> str:
    """Descending powers, e.g. ``c2 = 6q^2 - 1/2``."""
    parts: List[str] = []
    for power in range(c.degree, -1, -1):
        a = c[power]
        if a == 0:
            continue
        mono = _monomial(abs(a), power)
        if not parts:
            parts.append(mono if a > 0 else f"-{mono}")
        else:
            parts.append(f"{'+' if a > 0 else '-'} {mono}")
    body = " ".join(parts) if parts else "0"
    return body if k is None else f"c{k} = {body}"


def parse_qpolynomial(text: str) -> QPolynomial:
    """Inverse of ``format_qpolynomial`` (the ``cK =`` prefix is optional)."""
    if "=" in text:
        text = text.split("=", 1)[1]
    text = text.strip().replace(" - ", " + -")
    coeffs: dict = {}
    for part in text.split(" + "):
        part = part.strip()
        sign = -1 if part.startswith("-") else 1
        part = part.lstrip("-")
        if "q" in part:
            coef_txt, _, tail = part.partition("q")
            power = int(tail[1:]) if tail.startswith("^") else 1
            coef_txt = coef_txt.strip("()")
            coef = Fraction(coef_txt) if coef_txt else Fraction(1)
        else:
            power, coef = 0, Fraction(part)
        coeffs[power] = coeffs.get(power, Fraction(0)) + sign * coef
    size = max(coeffs) + 1 if coeffs else 0
    return QPolynomial(tuple(coeffs.get(i, Fraction(0)) for i in range(size)))


def qpolynomial_to_json(c: QPolynomial) -> List[str]:
    return [f"{a.numerator}/{a.denominator}" for a in c.coeffs]


def qpolynomial_from_json(items: Iterable[str]) -> QPolynomial:
    return QPolynomial(tuple(Fraction(s) for s in items))
