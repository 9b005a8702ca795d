"""1D compressible Euler DGSEM with local Lax-Friedrichs interface flux."""

from __future__ import annotations

import numpy as np

from .. import _kernels as K
from ..integrator import BlowUpError
from .mesh import Mesh1D


class InvalidStateError(BlowUpError):
    """Density or pressure lost positivity."""


class EulerDG1D:
    """Weak-form DGSEM for the 1D Euler equations, periodic boundaries.

    State layout: u[element, node, (rho, rho*v, rho*e)]. Pressure follows
    the ideal-gas law p = (gamma - 1)(rho e - rho v^2 / 2).
    """

    def __init__(self, mesh: Mesh1D, gamma: float = 1.4):
        self.mesh = mesh
        self.gamma = float(gamma)
        el = mesh.element
        self._weak = np.ascontiguousarray(el.diff_weak)
        self._winv0 = 1.0 / el.weights[0]
        self._winv1 = 1.0 / el.weights[-1]
        self._jinv = np.ascontiguousarray(1.0 / mesh.jacobian)
        self._right = np.ascontiguousarray(mesh.right, dtype=np.int32)

    def __call__(self, t, u):
        out = np.empty_like(u)
        status = K.euler_rhs_1d(u, self.gamma, self._weak, self._winv0,
                                self._winv1, self._jinv, self._right, out)
        if status:
            raise InvalidStateError(f"non-positive density or pressure at t={t!r}", t=t)
        return out

    def primitives(self, u):
        rho = u[..., 0]
        v = u[..., 1] / rho
        p = (self.gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] * v)
        return rho, v, p

    def wavespeed(self, u):
        """Per-node |v| + c estimates for CFL control, shape (n_nodes, 1)."""
        rho, v, p = self.primitives(u)
        if np.any(rho <= 0.0) or np.any(p <= 0.0):
            raise InvalidStateError("non-positive density or pressure in wave speed")
        lam = np.abs(v) + np.sqrt(self.gamma * p / rho)
        return lam.reshape(-1, 1)

    def conserved_totals(self, u):
        """Domain integrals of (mass, momentum, energy)."""
        wq = self.mesh.quadrature_weights()
        return np.array([float(np.sum(wq * u[..., k])) for k in range(3)])
