from .coeffgen import QPolynomial, coefficients, coefficients_by_reversion, format_qpolynomial, eval_coefficient
from .landscape import DomainLabel, Parameters, PhasePoint, TraceOptions, classify_endpoint, trace_steepest, saddle_points
from .transitions import Branch, critical_beta, intercept_Q, triple_point, trace_transition_curve
from .evaluate import Variant, asymptotic_sum, error_report, integral_12, integral_13, struve_maclaurin
from .errors import StruveAsymptoticsError
