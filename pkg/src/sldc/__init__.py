"""Semi-Lagrangian transport solver with deferred-correction time stepping.

High-order-in-space conservative semi-Lagrangian advection with dimensional
splitting for kinetic (Vlasov-Poisson) and drift-transport (guiding-center /
incompressible-flow) models, integral deferred correction to lift the
temporal order of the splitting, and a Fourier stability analyzer for the
composed linear schemes.
"""

from .advect1d import AdvectionProblem, TraceError, sl_step, sweep, trace_feet
from .diagnostics import (
    DiagnosticsRecord,
    gc_diagnostics,
    l1_error,
    observed_order,
    vp_diagnostics,
)
from .grid import PhaseGrid, ScalarField, build_grid, line_view, read_snapshot, write_snapshot
from .idc import IdcNodes, idc_interval, idc_ode_solve, quadrature_matrix
from .idc_split import (
    GuidingCenterIdc,
    IdcPdeConfig,
    VlasovPoissonIdc,
    gc_idc_step,
    idc_step,
    make_stepper,
)
from .poisson import Field1D, Field2D, poisson_1d, poisson_2d
from .reconstruct import (
    FootPoint,
    decompose_shift,
    r1_foot_integral,
    r2_interface_from_averages,
    weno5_weights,
)
from .splitting import split_step, step_lie, step_strang
from .stability import (
    LinearStencil,
    amplification,
    amplification_profile,
    extract_stencil,
    make_idc_advection_step,
    max_cfl,
)

__version__ = "0.1.0"
