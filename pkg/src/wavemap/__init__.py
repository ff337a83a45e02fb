"""Finite-difference simulator for the 2+1 equivariant wave map into S^2.

Free RK4 evolution of the multiplier-eliminated system versus
constraint-enforcing Rattle integration, with constraint, energy and
blow-up-scaling diagnostics.
"""
from .config import ConfigError, RunConfig, parse_config
from .grid import Axis, DerivOrder, Domain, Grid2D, Parity, ScalarField, build_grid
from .integrate import Method, RunRecord, Status, StepperConfig, evolve
from .model import FieldState, InitialDataParams, initial_state, static_solution

__all__ = [
    "Axis", "ConfigError", "DerivOrder", "Domain", "FieldState", "Grid2D",
    "InitialDataParams", "Method", "Parity", "RunConfig", "RunRecord",
    "ScalarField", "Status", "StepperConfig", "build_grid", "evolve",
    "initial_state", "parse_config", "static_solution",
]
