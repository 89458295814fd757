"""beltflow: finite-volume solver for 2D non-local conservation laws.

Models heterogeneous material flow on a conveyor belt with obstacles: each
material class is transported by a static belt field plus a non-local
collision velocity driven by convolution of the PCE-weighted total density
with Gaussian kernels.  The Roe scheme with dimensional splitting is paired
with runtime monitors for every a-priori stability estimate.
"""

from .errors import ConfigError, DiagnosticFailure, StepRejected
from .grid import Field2D, Grid, InterfaceField, cell_center, l1_norm
from .kernels import (
    KernelStencil,
    SmoothedHeaviside,
    build_stencils,
    gaussian_value,
    heaviside,
    kernel_norms,
    lipschitz_constant,
)
from .scenario import (
    MaterialClass,
    ObstacleSet,
    RectRegion,
    Scenario,
    StripRegion,
    init_from_particles,
    split_classes,
    static_velocity,
    validate_assumptions,
)
from .convolution import InterfaceConvolver, convolve_at_interfaces
from .velocity import (
    AugmentedDensity,
    DynamicVelocity,
    augmented_density,
    dynamic_velocity,
    verify_kernel_bounds,
)
from .scheme import (
    CflPolicy,
    SchemeState,
    Simulator,
    cfl_dt,
    cfl_dt_from_speeds,
    flux_nonlocal,
    flux_static,
    step,
    sweep_x,
    sweep_y,
)
from .diagnostics import (
    BoundConstants,
    DiagnosticsRecord,
    boundary_invariance_check,
    bv_check,
    bv_seminorm,
    compute_constants,
    entropy_residual,
    linf_check,
    lipschitz_experiment,
    outflow_series,
)
from .config import RunConfig, build_scenario, initial_fields, parse_config
from .run import SnapshotArchive, run

__version__ = "0.1.0"
