"""Steady water waves with vorticity, and their flow-force diagnostics.

Numerical toolkit for unidirectional gravity water waves over a flat
bed: laminar background shear flows, the dispersion Sturm-Liouville
problem, nonlinear periodic and solitary waves via Newton continuation
on the height-function formulation, and a verification suite for the
flow-force flux function including its elliptic equation, boundary
identities, positivity, and exponential tail asymptotics.
"""

__version__ = "0.1.0"

from .asymptotics import (
    DecayFit,
    classical_decay_crosscheck,
    decay_rate_fit,
    flux_tail_expansion,
)
from .background import (
    ShearFlow,
    VorticityProfile,
    build_primitive,
    critical_parameter,
    froude,
    parameter_for_froude,
    solve_background,
)
from .dispersion import (
    SLSpectrum,
    criticality_check,
    pruefer_lowest,
    sl_integral_identity,
    sl_spectrum,
)
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    InputError,
    InvariantViolation,
    SolverError,
    TailNotResolved,
    UnidirectionalityViolation,
    WaveforceError,
)
from .flowforce import (
    EllipticCoefficients,
    FluxDiagnostics,
    background_flow_force,
    boundary_identity,
    diagnostics,
    elliptic_coefficients,
    elliptic_residuals,
    flow_force,
    flux_function,
    flux_q_identity,
    positivity_scan,
    wp_identities,
)
from .physical import (
    PhysicalField,
    euler_residuals,
    flow_force_consistency,
    physical_flow_force,
    physical_laplacian_sup,
    reconstruct,
)
from .solver import (
    BoundaryCondition,
    NewtonReport,
    ProbeReport,
    StripGrid,
    WaveField,
    residual,
    residual_divergence,
    solve_periodic,
    solve_solitary,
    subcritical_probe,
)
