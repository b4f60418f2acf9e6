"""Pydantic request/response models for the asymptotics API."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class ComplexValue(BaseModel):
    re: float = 0.0
    im: float = 0.0

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        return cls(re=z.real, im=z.imag)

    def value(self) -> complex:
        return complex(self.re, self.im)


# -----------------------
# Coefficients
# -----------------------
class CoefficientOut(BaseModel):
    k: int
    text: str
    # rational coefficients of q^0, q^1, ... as "num/den"
    coeffs: List[str]


class CoefficientsResponse(BaseModel):
    """Response body for GET /coeffs."""

    k_max: int
    coefficients: List[CoefficientOut]


# -----------------------
# Landscape
# -----------------------
class PointRequest(BaseModel):
    """Request body for POST /classify and POST /trace."""

    q: ComplexValue
    theta_over_pi: float = 0.0


class ClassifyResponse(BaseModel):
    q: ComplexValue
    theta_over_pi: float
    label: str
    endpoint: str


class TraceResponse(BaseModel):
    """Response body for POST /trace."""

    label: str
    sheet_winding: int
    rejected_steps: int
    points: List[Tuple[float, float]]
    re_tau: List[float]


# -----------------------
# Transitions
# -----------------------
class CriticalBetaRequest(BaseModel):
    """Request body for POST /critical-beta."""

    alpha: float
    theta_over_pi: float = 0.0
    bracket: Tuple[float, float] = (0.0, 1.0)


class CriticalBetaResponse(BaseModel):
    alpha: float
    theta_over_pi: float
    beta: float


class TriplePointResponse(BaseModel):
    theta_over_pi: float
    q_P: ComplexValue
    verified: bool


class InterceptResponse(BaseModel):
    theta_over_pi: float
    q_Q: float


# -----------------------
# Evaluation
# -----------------------
class EvalRequest(BaseModel):
    """Request body for POST /eval."""

    q: ComplexValue
    theta_over_pi: float = 0.0
    modulus_z: float = Field(default=40.0, gt=0)
    k_max: Optional[int] = Field(default=None, ge=0)
    digits: int = Field(default=50, ge=15, le=500)


class EvalResponse(BaseModel):
    """Response body for POST /eval."""

    q: ComplexValue
    theta_over_pi: float
    endpoint: str
    variant: str
    k_star: int
    asymptotic: ComplexValue
    oracle: ComplexValue
    oracle_method: str
    rel_err_H: float
    rel_err_combo: float


class EvalAtRequest(BaseModel):
    """Request body for POST /eval-at; any z != 0."""

    nu: ComplexValue
    z: ComplexValue
    k_max: Optional[int] = Field(default=None, ge=0)
    digits: int = Field(default=50, ge=15, le=500)


class EvalAtResponse(BaseModel):
    q: ComplexValue
    theta_over_pi: float
    # m in z = z0 e^{pi m i}
    continuation: int
    endpoint: str
    variant: str
    k_star: int
    # asymptotic value continued back to z
    value: ComplexValue
    rel_err_H: float


# -----------------------
# Errors
# -----------------------
class ErrorResponse(BaseModel):
    """Body of every 422 raised by the engine."""

    error: str
    detail: str
