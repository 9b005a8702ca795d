"""Desk-scale DG spectral element semidiscretizations."""

from .advection import (AdvectionDG1D, AdvectionDG2D, BlendedAdvection,
                        SubcellFV1D, SubcellFV2D, blended_advection_1d,
                        blended_advection_2d)
from .elements import ReferenceElement, differentiation_matrix, lgl_nodes_weights
from .euler import EulerDG1D, InvalidStateError
from .mesh import Mesh1D, Mesh2D, curved_mapping_2d
from .problems import PROBLEM_KINDS, Problem, build_problem

__all__ = [
    "AdvectionDG1D", "AdvectionDG2D", "BlendedAdvection", "SubcellFV1D",
    "SubcellFV2D", "blended_advection_1d", "blended_advection_2d",
    "ReferenceElement", "differentiation_matrix", "lgl_nodes_weights",
    "EulerDG1D", "InvalidStateError", "Mesh1D", "Mesh2D", "curved_mapping_2d",
    "PROBLEM_KINDS", "Problem", "build_problem",
]
