"""Finite-element solver for a coupled Cahn-Hilliard / Cahn-Hilliard-Ono system.

Two order parameters on a rectangle: u tracks copolymer/homopolymer macrophase
separation, v tracks the microphase separation inside the copolymer. Both
evolve by H^-1 gradient-flow dynamics discretized with P1 triangles and a
semi-implicit monolithic step; the v equation carries a nonlocal reaction term
sigma*(v - v_bar) penalizing deviation from a prescribed mean.
"""

from .mesh import Domain, Mesh, build_structured, element_geometry
from .schemes import SchemeKind, LinearizedPotential, GradientSplit, linearize, gradient_split
from .stepper import (
    Params,
    State,
    LinearSolveFailure,
    NonFiniteState,
    initialize,
    step,
    run,
)
from .diagnostics import TimeSeriesRecord, mass, local_potential, energy

__all__ = [
    "Domain",
    "Mesh",
    "build_structured",
    "element_geometry",
    "SchemeKind",
    "LinearizedPotential",
    "GradientSplit",
    "linearize",
    "gradient_split",
    "Params",
    "State",
    "LinearSolveFailure",
    "NonFiniteState",
    "initialize",
    "step",
    "run",
    "TimeSeriesRecord",
    "mass",
    "local_potential",
    "energy",
]

__version__ = "0.1.0"
