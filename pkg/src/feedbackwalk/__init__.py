"""Random walk on the integers whose sites remember recent departures."""

from .analytic import (
    Classification,
    SpeedResult,
    Verdict,
    alpha,
    ballistic_speed,
    classify,
    critical_p0,
    speed_L1,
    speed_R1,
)
from .environment import Constant, EnvironmentSpec, Mode, P, Params, Periodic, Q, SiteConfig
from .montecarlo import Estimate, estimate_direction, estimate_E_Nx, estimate_speed
from .walk import OutcomeKind, RunOutcome, WalkState, run_until

__all__ = [
    "Classification",
    "Constant",
    "EnvironmentSpec",
    "Estimate",
    "Mode",
    "OutcomeKind",
    "P",
    "Params",
    "Periodic",
    "Q",
    "RunOutcome",
    "SiteConfig",
    "SpeedResult",
    "Verdict",
    "WalkState",
    "alpha",
    "ballistic_speed",
    "classify",
    "critical_p0",
    "estimate_E_Nx",
    "estimate_direction",
    "estimate_speed",
    "run_until",
    "speed_L1",
    "speed_R1",
]
