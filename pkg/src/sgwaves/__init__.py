"""Travelling-wave solutions of the damped, driven sine-Gordon equation.

Closed-form evaluation of every unit-velocity branch, independent numerical
oracles (ODE integration, adaptive quadrature, finite-difference residuals)
and a leapfrog PDE simulator for empirical stability probes.
"""

from .closed_form import (
    F_map,
    FixedPoints,
    TravellingWave,
    WaveBranch,
    branch_compatible,
    g_eval,
    g_limits,
    g_slope,
    phi_eval,
    phi_limits,
    subcritical_rate,
    theta,
    xi_period,
    y_eval,
    y_fixed_points,
)
from .errors import BlowUp, DomainError, NoConvergence, PoleProximity, SGWaveError
from .model import (
    ConstantSolutions,
    ModelParams,
    Regime,
    RegimeKind,
    classify,
    constant_solutions,
    energy_density,
    wrap_to,
)
from .oracles import (
    IdentityReport,
    OdeSolution,
    adaptive_quadrature,
    identities_check,
    implicit_xi_of_g,
    ode_solve_g,
    ode_solve_y,
    pde_residual,
    quad_period,
)
from .pde_sim import (
    BoundaryMode,
    Circle,
    DeviationReport,
    FieldState,
    Perturbation,
    Segment,
    SimConfig,
    comoving_deviation,
    evolve,
    init_from_wave,
    step,
    total_energy,
    winding_number,
    write_deviation_csv,
    write_snapshot_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BlowUp",
    "BoundaryMode",
    "Circle",
    "ConstantSolutions",
    "DeviationReport",
    "DomainError",
    "F_map",
    "FieldState",
    "FixedPoints",
    "IdentityReport",
    "ModelParams",
    "NoConvergence",
    "OdeSolution",
    "Perturbation",
    "PoleProximity",
    "Regime",
    "RegimeKind",
    "SGWaveError",
    "Segment",
    "SimConfig",
    "TravellingWave",
    "WaveBranch",
    "adaptive_quadrature",
    "branch_compatible",
    "classify",
    "comoving_deviation",
    "constant_solutions",
    "energy_density",
    "evolve",
    "g_eval",
    "g_limits",
    "g_slope",
    "identities_check",
    "implicit_xi_of_g",
    "init_from_wave",
    "ode_solve_g",
    "ode_solve_y",
    "pde_residual",
    "phi_eval",
    "phi_limits",
    "quad_period",
    "step",
    "subcritical_rate",
    "theta",
    "total_energy",
    "winding_number",
    "wrap_to",
    "write_deviation_csv",
    "write_snapshot_csv",
    "xi_period",
    "y_eval",
    "y_fixed_points",
]
