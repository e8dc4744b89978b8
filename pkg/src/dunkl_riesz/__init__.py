"""Dunkl heat and Riesz kernels, weighted BMO oscillation and commutator norms on desk-scale grids."""

from .errors import (
    AccuracyNotReached,
    ConfigError,
    DunklError,
    GridMismatch,
    GroupTooLarge,
    InsufficientResolution,
    InvalidArgument,
    SingularPair,
    UnsupportedGroup,
)
from .reflection import (
    ReflectionGroup,
    RootSystemSpec,
    dihedral,
    generate_group,
    orbit,
    orbit_distance,
    product,
    reflect,
    trivial,
    z2n,
)
from .measure import Ball, Measured, OrbitBall, WeightedMeasure, ball_measure, orbit_ball_measure, weight_density
from .kernels import (
    IntertwiningMeasure,
    KernelEvaluator,
    KernelValue,
    SubordinationConfig,
    classical_riesz,
    heat_kernel,
    radial_translate,
    riesz_kernel_explicit,
    riesz_kernel_subordination,
)
from .spaces import (
    BallFamily,
    Grid,
    GridFunction,
    OscillationReport,
    bmo_norm,
    maximal_fn,
    median_split,
    sharp_fn,
    symbol_preset,
    translation_modulus,
    vmo_profile,
)
from .operators import (
    DiscretizedOperator,
    NormEstimate,
    apply,
    assemble_riesz,
    commutator_apply,
    commutator_matrix,
    maximal_truncated,
    op_norm_estimate,
)
from .config import RunConfig, Thresholds

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
