"""Covering-functional bounds and homothetic covering certificates for polytopes with few vertices."""

__version__ = "0.1.0"

from .combinatorics import (
    LatticeVector,
    binom_upper,
    binomial,
    card_M1,
    card_M2,
    enumerate_M1,
    enumerate_M2,
    robbins_bracket,
)
from .covering import (
    BoundReport,
    CoveringCertificate,
    NoShrinkingCertificate,
    PolytopeV,
    VerificationReport,
    bound_report,
    lift_map,
    lp_ball_bound,
    make_certificate,
    q_cover_cross,
    q_cover_simplex,
    verify_certificate,
)
from .geometry import (
    BallSpec,
    DecompositionResult,
    OrthantBallSpec,
    PreconditionError,
    decompose_ball,
    decompose_orthant,
    member_ball,
    member_orthant,
    sample_scaled_ball,
    sample_scaled_orthant,
)
from .scalars import SolverConfig, TwoPowerRational, eval_f, eval_g, k_of, l_of, p_of, solve_a, solve_b

__all__ = [
    "LatticeVector",
    "binom_upper",
    "binomial",
    "card_M1",
    "card_M2",
    "enumerate_M1",
    "enumerate_M2",
    "robbins_bracket",
    "BoundReport",
    "CoveringCertificate",
    "NoShrinkingCertificate",
    "PolytopeV",
    "VerificationReport",
    "bound_report",
    "lift_map",
    "lp_ball_bound",
    "make_certificate",
    "q_cover_cross",
    "q_cover_simplex",
    "verify_certificate",
    "BallSpec",
    "DecompositionResult",
    "OrthantBallSpec",
    "PreconditionError",
    "decompose_ball",
    "decompose_orthant",
    "member_ball",
    "member_orthant",
    "sample_scaled_ball",
    "sample_scaled_orthant",
    "SolverConfig",
    "TwoPowerRational",
    "eval_f",
    "eval_g",
    "k_of",
    "l_of",
    "p_of",
    "solve_a",
    "solve_b",
]
