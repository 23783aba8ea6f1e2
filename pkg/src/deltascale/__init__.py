"""Riemann delta-calculus on time scales.

Core objects: TimeScale (jump operators, decomposition), Partition
(delta-qualified meshes), delta and improper integrals, limit/membership
diagnostics, kernel transforms with regularity evidence, and dual-space
tools for isolated scales.  A FastAPI service and a CLI sit on top.
"""

from .timescale import (
    ArithmeticTail,
    Block,
    ClosedInterval,
    DenseRun,
    DenseRunError,
    DescriptorError,
    GeneratedTail,
    GeometricTail,
    HalfLine,
    IsolatedPoint,
    Jump,
    NotInScaleError,
    PointClass,
    TimeScale,
    classify,
    contains,
    decompose,
    enumerate_points,
    graininess,
    next_point_at_or_after,
    parse_descriptor,
    prev_point_at_or_before,
    rho,
    sigma,
    to_descriptor,
)
from .partition import Partition, make_delta_partition, refine, verify_delta_property
from .integrate import (
    Checkpoint,
    IntegralResult,
    ScaleFunction,
    SegmentTrace,
    TruncationPolicy,
    delta_integral,
    improper_integral,
    riemann_sum,
    single_step_integral,
)
from .spaces import (
    CONVERGED,
    DIVERGED,
    UNKNOWN,
    LimitDiagnosis,
    MembershipConfig,
    MembershipReport,
    SamplerSpec,
    Verdict,
    limit_at_infinity,
    membership_report,
    sup_norm,
)
from .kernels import (
    ConditionResult,
    Kernel,
    ProbeConfig,
    RegularityReport,
    RegularityVerdict,
    apply_transform,
    check_condition_i,
    check_condition_ii,
    check_condition_iii,
    check_condition_iv,
    estimate_M,
    extremal_function,
    operator_norm_lower_bound,
    regularity_report,
)
from .dual import (
    DualRep,
    IsolatedScale,
    ReconstructionReport,
    apply_functional,
    basis_element,
    ell1_norm,
    extract_kernel,
    extracted_row_mass,
    from_ell1,
    functional_norm,
    norm_witness,
    operator_registry,
    schauder_expand,
    to_ell1,
    unit_element,
    verify_reconstruction,
)
from . import expr

__version__ = "0.1.0"
