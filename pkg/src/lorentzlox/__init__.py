"""Spacelike loxodromes on helicoidal surfaces in Lorentzian n-space."""

__version__ = "0.1.0"

from .lorentz import (AngleError, AngleKind, CausalCharacter, LorentzAngle, angle_between,
                      causal_character, lorentz_inner, lorentz_norm, pseudo_inner,
                      pseudo_to_standard, standard_to_pseudo)
from .expr import DomainError, ExprSyntaxError, UnknownIdentifierError, eval_dual, parse
from .profile import ProfileCurve, SurfaceKind, check_unit_speed
from .surfaces import HelicoidalSurface, MetricSample, SurfaceCausal
from .loxodrome import (AngleSpec, InadmissibleError, LoxodromeProblem, SampledCurve, arc_length,
                        dvdu_roots, loxodrome_curve, solve_v, theta_constant)
from .oracle import VerificationReport, angle_along_curve, rk4_v, verify

__all__ = [
    "AngleError", "AngleKind", "CausalCharacter", "LorentzAngle", "angle_between",
    "causal_character", "lorentz_inner", "lorentz_norm", "pseudo_inner", "pseudo_to_standard",
    "standard_to_pseudo", "DomainError", "ExprSyntaxError", "UnknownIdentifierError",
    "eval_dual", "parse", "ProfileCurve", "SurfaceKind", "check_unit_speed",
    "HelicoidalSurface", "MetricSample", "SurfaceCausal", "AngleSpec", "InadmissibleError",
    "LoxodromeProblem", "SampledCurve", "arc_length", "dvdu_roots", "loxodrome_curve",
    "solve_v", "theta_constant", "VerificationReport", "angle_along_curve", "rk4_v", "verify",
]
