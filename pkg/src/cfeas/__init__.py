"""Circumcentered-reflection solvers for two-set convex feasibility problems."""

from .circumcentering import CircumcenterResult, circumcenter, pcrm
from .geometry import (
    Ball,
    Box,
    Ellipsoid,
    EntryMask,
    Halfspace,
    ProblemPair,
    PsdCone,
    contains,
    distance,
    gap,
    project,
    project_ellipsoid_multiplier,
    project_psd,
    reflect,
)
from .operators import (
    KERNEL_BASIC,
    KERNEL_DEEP,
    KERNEL_STANDARD,
    KernelSpec,
    apply_kernel,
    centralize,
    circumcentered_step,
    is_strictly_centralized,
)
from .problems import (
    gen_ellipsoids,
    gen_halfspace_wedge,
    gen_matrix_completion,
    generate,
    load_pair,
    pair_from_json,
    pair_to_json,
    save_pair,
)
from .solver import (
    Constant,
    RateEstimate,
    SolveTrace,
    SolverConfig,
    Table,
    Vanishing,
    ccrm_config,
    estimate_rate,
    estimate_rate_from_merits,
    schedule_value,
    solve,
    solve_map,
    write_trace_csv,
)

__version__ = "0.1.0"
