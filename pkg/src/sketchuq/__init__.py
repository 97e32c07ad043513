"""Projector-based sketched least squares with uncertainty quantification."""

from .diagnostics import DiagnosticRecord, diagnose, rank_preservation_probability
from .errors import (
    AllDrawsRankDeficient,
    BoundUndefined,
    DimensionMismatch,
    InsufficientDraws,
    InvalidConfig,
    InvalidInput,
    InvalidSketchDim,
    NumericalFailure,
    ParseError,
    RankDeficientDesign,
    SketchUQError,
)
from .experiment import ExperimentConfig, generate_synthetic_design, run_sweep
from .linalg import cond2, leverage_scores, numerical_rank, pinv
from .model import DesignData, ExactFit, ModelSpec, exact_solve, model_variance, simulate_response
from .projector import ProjectorSet, SketchedFit, build_projectors, null_space_check, sketched_solve
from .sketch import SchemeKind, SketchDraw, SketchScheme, apply_sketch, draw_sketch
from .uq import (
    ConditionalMoments,
    DecompositionReport,
    TotalMoments,
    agreement_z,
    conditional_moments,
    decompose,
    empirical_oracle,
    structural_bounds,
    total_moments,
)

__version__ = "0.1.0"
