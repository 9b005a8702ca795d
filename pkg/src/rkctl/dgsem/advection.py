"""Linear advection semidiscretizations: DGSEM and DG/FV-blended operators."""

from __future__ import annotations

import numpy as np

from .. import _kernels as K
from .mesh import Mesh1D, Mesh2D


class AdvectionDG1D:
    """Weak-form DGSEM for u_t + a u_x = 0, periodic, local Lax-Friedrichs."""

    def __init__(self, mesh: Mesh1D, velocity: float):
        self.mesh = mesh
        self.velocity = float(velocity)
        el = mesh.element
        self._weak = np.ascontiguousarray(el.diff_weak)
        self._winv0 = 1.0 / el.weights[0]
        self._winv1 = 1.0 / el.weights[-1]
        self._jinv = np.ascontiguousarray(1.0 / mesh.jacobian)
        self._right = np.ascontiguousarray(mesh.right, dtype=np.int32)

    def __call__(self, t, u):
        out = np.empty_like(u)
        K.advection_rhs_1d(u, self.velocity, self._weak, self._winv0,
                           self._winv1, self._jinv, self._right, out)
        return out


class AdvectionDG2D:
    """Weak-form DGSEM for u_t + a . grad(u) = 0 on (possibly warped) meshes.

    Contravariant flux speeds are precomputed per node; face fluxes use the
    owner element's metric, which equals the neighbor's bitwise after edge
    stitching.
    """

    def __init__(self, mesh: Mesh2D, velocity):
        self.mesh = mesh
        self.velocity = np.asarray(velocity, dtype=float)
        el = mesh.element
        self._weak = np.ascontiguousarray(el.diff_weak)
        self._winv0 = 1.0 / el.weights[0]
        self._winv1 = 1.0 / el.weights[-1]
        self._jinv = np.ascontiguousarray(1.0 / mesh.jacobian)
        self._at1 = np.ascontiguousarray(mesh.ja1 @ self.velocity)
        self._at2 = np.ascontiguousarray(mesh.ja2 @ self.velocity)
        self._bxi = np.ascontiguousarray(self._at1[:, :, -1])
        self._beta = np.ascontiguousarray(self._at2[:, -1, :])
        self._right = np.ascontiguousarray(mesh.right, dtype=np.int32)
        self._top = np.ascontiguousarray(mesh.top, dtype=np.int32)

    def __call__(self, t, u):
        out = np.empty_like(u)
        K.advection_rhs_2d(u, self._at1, self._at2, self._bxi, self._beta,
                           self._jinv, self._weak, self._winv0, self._winv1,
                           self._right, self._top, out)
        return out


class SubcellFV1D:
    """First-order finite-volume operator on LGL-weight subcells."""

    def __init__(self, mesh: Mesh1D, velocity: float):
        self.mesh = mesh
        self.velocity = float(velocity)
        self._weights = np.ascontiguousarray(mesh.element.weights)
        self._jconst = float(mesh.jacobian[0, 0])
        if not np.allclose(mesh.jacobian, self._jconst):
            raise ValueError("subcell FV requires a uniform mesh")
        self._left = np.ascontiguousarray(mesh.left, dtype=np.int32)
        self._right = np.ascontiguousarray(mesh.right, dtype=np.int32)

    def __call__(self, t, u):
        out = np.empty_like(u)
        K.fv_rhs_1d(u, self.velocity, self._weights, self._jconst,
                    self._left, self._right, out)
        return out


class SubcellFV2D:
    """Tensor-product subcell FV operator; uniform Cartesian meshes only."""

    def __init__(self, mesh: Mesh2D, velocity):
        if mesh.uniform_spacing is None:
            raise ValueError("subcell FV requires a uniform Cartesian mesh")
        self.mesh = mesh
        a = np.asarray(velocity, dtype=float)
        hx, hy = mesh.uniform_spacing
        # contravariant flux speeds on a Cartesian mesh are constants
        self._s1 = 0.5 * hy * a[0]
        self._s2 = 0.5 * hx * a[1]
        self._jconst = 0.25 * hx * hy
        self._weights = np.ascontiguousarray(mesh.element.weights)
        self._left = np.ascontiguousarray(mesh.left, dtype=np.int32)
        self._right = np.ascontiguousarray(mesh.right, dtype=np.int32)
        self._bottom = np.ascontiguousarray(mesh.bottom, dtype=np.int32)
        self._top = np.ascontiguousarray(mesh.top, dtype=np.int32)

    def __call__(self, t, u):
        out = np.empty_like(u)
        K.fv_rhs_2d(u, self._s1, self._s2, self._weights, self._jconst,
                    self._left, self._right, self._bottom, self._top, out)
        return out


class BlendedAdvection:
    """Convex blend (1-alpha) DG + alpha FV, bitwise pure at the endpoints."""

    def __init__(self, dg, fv, alpha: float):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        self.dg = dg
        self.fv = fv
        self.alpha = float(alpha)

    def __call__(self, t, u):
        if self.alpha == 0.0:
            return self.dg(t, u)
        if self.alpha == 1.0:
            return self.fv(t, u)
        return (1.0 - self.alpha) * self.dg(t, u) + self.alpha * self.fv(t, u)


def blended_advection_1d(mesh: Mesh1D, velocity: float, alpha: float) -> BlendedAdvection:
    return BlendedAdvection(AdvectionDG1D(mesh, velocity),
                            SubcellFV1D(mesh, velocity), alpha)


def blended_advection_2d(mesh: Mesh2D, velocity, alpha: float) -> BlendedAdvection:
    return BlendedAdvection(AdvectionDG2D(mesh, velocity),
                            SubcellFV2D(mesh, velocity), alpha)
