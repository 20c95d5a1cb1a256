"""First-quantised grid simulation of relativistic kinetic energies."""

from .circuits import Estimate, ShotPlan, Variant
from .coefficients import CoefficientSet, alpha, beta, gamma, validity_ratio
from .estimators import EnergyBreakdown, PotentialSpec, kinetic_dbc, kinetic_pbc, potential_energy, total_energy
from .grid import (
    PhysicsConfig,
    WaveFunction,
    basis_state,
    dirichlet_sine,
    make_state,
    plane_wave,
    probability,
    sample_function,
    uniform_state,
)
from .operators import BoundaryCondition, build_kinetic_matrix, build_p2_matrix
from .oracle import exact_ground
from .vqe import AnsatzSpec, Objective, minimize

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec",
    "BoundaryCondition",
    "CoefficientSet",
    "EnergyBreakdown",
    "Estimate",
    "Objective",
    "PhysicsConfig",
    "PotentialSpec",
    "ShotPlan",
    "Variant",
    "WaveFunction",
    "alpha",
    "basis_state",
    "beta",
    "build_kinetic_matrix",
    "build_p2_matrix",
    "dirichlet_sine",
    "exact_ground",
    "gamma",
    "kinetic_dbc",
    "kinetic_pbc",
    "make_state",
    "minimize",
    "plane_wave",
    "potential_energy",
    "probability",
    "sample_function",
    "total_energy",
    "uniform_state",
    "validity_ratio",
]
