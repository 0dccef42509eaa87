"""Self-similar shrinking profiles of the equivariant harmonic-map and Yang-Mills heat flows."""
from .diagnostics import (
    CoefficientPair,
    HProfile,
    MonotonicityReport,
    SpectrumReport,
    coefficients,
    energy,
    equator_discriminant,
    h_profile,
    monotonicity_certificate,
    morse_index,
)
from .models import (
    ModelKind,
    ModelParams,
    OriginData,
    TailData,
    rhs,
    series_origin,
    tail_state,
    type1_quantity,
    ym_explicit_g1,
)
from .ode import EventSpec, IntegratorConfig, SystemState, Trajectory, integrate, step
from .shooting import (
    ShootConfig,
    ShootOutcome,
    ShrinkerSolution,
    SweepTable,
    bracket_sweep,
    find_shrinkers,
    refine,
    shoot,
)

__version__ = "0.1.0"
