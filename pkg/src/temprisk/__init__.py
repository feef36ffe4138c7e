"""Temporal robustness of discrete-time signals and its risk under random
time shifts."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    GenerationError, InsufficientSamplesError, ResourceError, ShapeError, SpecificationError,
    SpecSyntaxError, TempriskError, ValidationError,
)
from .lang import ConstraintSpec, parse_constraint, parse_formula, parse_predicate  # noqa: E402
from .risk import (  # noqa: E402
    RiskReport, SampleSet, cvar_estimate, expectation, risk_report, var_bounds, var_exact,
)
from .robustness import (  # noqa: E402
    RobustnessValue, eta, eta_stl, theta, theta_bruteforce, theta_stl,
)
from .semantics import beta_c, beta_phi, spatial_robustness  # noqa: E402
from .signal import (  # noqa: E402
    GroupPartition, Signal, sample, shift_async, shift_grouped, shift_sync,
)
from .stochastic import McConfig, McResult, ProcessModel, ShiftDistribution, mc_risk, realize  # noqa: E402

__all__ = [
    "ConstraintSpec", "GenerationError", "GroupPartition", "InsufficientSamplesError", "McConfig",
    "McResult", "ProcessModel", "ResourceError", "RiskReport", "RobustnessValue", "SampleSet",
    "ShapeError", "ShiftDistribution", "Signal", "SpecSyntaxError", "SpecificationError",
    "TempriskError", "ValidationError", "beta_c", "beta_phi", "cvar_estimate", "eta", "eta_stl",
    "expectation", "mc_risk", "parse_constraint", "parse_formula", "parse_predicate", "realize",
    "risk_report", "sample", "shift_async", "shift_grouped", "shift_sync", "spatial_robustness",
    "theta", "theta_bruteforce", "theta_stl", "var_bounds", "var_exact",
]
