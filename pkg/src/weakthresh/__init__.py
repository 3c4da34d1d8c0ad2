"""Weak-threshold curves and Monte Carlo phase transitions for standard,
partial and hidden-partial l1 recovery."""

from .lp import LinearProgram, LpSolution, LpStatus, lp_solve
from .montecarlo import (
    InstanceSpec,
    PhaseMap,
    PhaseMapSpec,
    ProblemInstance,
    empirical_transition,
    gen_instance,
    phase_map,
    run_trial,
)
from .recovery import (
    CertificateOutcome,
    RecoveryProblem,
    RecoveryResult,
    SupportInfo,
    Verdict,
    build_weights,
    certify_condition,
    recover,
)
from .special import erf, erfc, erfcinv, erfinv
from .thresholds import (
    CurvePoint,
    Mode,
    alpha_from_theta,
    alpha_threshold,
    beta_threshold,
    informal_residual,
    solve_theta,
    theta_residual,
    threshold_curve,
)

__version__ = "0.1.0"
