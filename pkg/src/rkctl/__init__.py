"""Error-based and CFL-based step size control for explicit RK methods
applied to DG semidiscretizations of hyperbolic PDEs."""

from ._kernels import BACKEND
from . import cfl, controller, dgsem, exner, integrator, spectra, tableaux

__version__ = "0.1.0"

__all__ = ["BACKEND", "cfl", "controller", "dgsem", "exner", "integrator",
           "spectra", "tableaux", "__version__"]
