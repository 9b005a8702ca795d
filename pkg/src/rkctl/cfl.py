"""CFL-based step selection from mesh metric terms and local wave speeds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class ZeroWaveSpeedError(ValueError):
    """All metric-weighted wave speeds vanish at some node."""


class BracketError(ValueError):
    """Bisection bracket precondition violated."""


@dataclass(frozen=True)
class MeshLimitProvider:
    """Per-node metric data entering the CFL length scale.

    ``jacobian`` holds the Jacobian determinant J_i per node and
    ``contravariant[j]`` the vector (J grad xi^j)_i per node, for each
    reference direction j < dim.
    """

    jacobian: np.ndarray            # (n_nodes,)
    contravariant: np.ndarray       # (dim, n_nodes, dim)
    degree: int
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only 1D and 2D metric terms are supported")
        if self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")
        if np.any(self.jacobian <= 0.0):
            raise ValueError("Jacobian determinant must be positive everywhere")
        if self.contravariant.shape != (self.dim, len(self.jacobian), self.dim):
            raise ValueError("contravariant array has inconsistent shape")

    @property
    def n_nodes(self) -> int:
        return len(self.jacobian)


def _metric_speeds(a: np.ndarray, mlp: MeshLimitProvider) -> np.ndarray:
    """Sum over directions of |(J grad xi^j) . a| per node; a is (n, d) or (d,)."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = np.broadcast_to(a, (mlp.n_nodes, mlp.dim))
    total = np.zeros(mlp.n_nodes)
    for j in range(mlp.dim):
        total += np.abs(np.einsum("nc,nc->n", mlp.contravariant[j], a))
    return total


def local_dx_over_lambda(node: int, a, mlp: MeshLimitProvider) -> float:
    """Reference-element crossing time scale (2/(p+1)) J_i / sum_j |Ja^j . a|."""
    a = np.asarray(a, dtype=float)
    denom = sum(abs(float(mlp.contravariant[j, node] @ a)) for j in range(mlp.dim))
    if denom <= 0.0:
        raise ZeroWaveSpeedError(f"stationary wave speed at node {node}")
    return (2.0 / (mlp.degree + 1)) * float(mlp.jacobian[node]) / denom


def mesh_limit(state, mlp: MeshLimitProvider,
               wavespeed: Callable[[np.ndarray], np.ndarray]) -> float:
    """min_i dx_i / lambda_max(u_i) over all nodes.

    ``wavespeed(state)`` returns per-node velocity-like vectors of shape
    (n_nodes, dim): the advection velocity itself for linear problems,
    nonnegative wave-speed estimates for nonlinear systems.
    """
    speeds = np.asarray(wavespeed(state), dtype=float)
    if not np.all(np.isfinite(speeds)):
        raise ValueError("non-finite wave speed")
    denom = _metric_speeds(speeds, mlp)
    if np.any(denom <= 0.0):
        raise ZeroWaveSpeedError("stationary wave speed")
    limits = (2.0 / (mlp.degree + 1)) * mlp.jacobian / denom
    return float(limits.min())


def cfl_dt(nu: float, state, mlp: MeshLimitProvider,
           wavespeed: Callable[[np.ndarray], np.ndarray]) -> float:
    """Eq-style step selection dt = nu * min_i dx_i / lambda_max(u_i)."""
    if nu <= 0.0:
        raise ValueError("CFL number nu must be positive")
    return nu * mesh_limit(state, mlp, wavespeed)


def bisect_max_cfl(runner: Callable[[float], bool], lo: float, hi: float,
                   rel_tol: float = 5e-3) -> float:
    """Largest verified-stable CFL number, to three significant digits.

    ``runner(nu)`` returns True when the simulation survives. Bisects the
    crash/no-crash boundary until hi/lo < 1 + rel_tol and returns lo.
    """
    if not lo < hi:
        raise BracketError(f"need lo < hi, got [{lo}, {hi}]")
    if not runner(lo):
        raise BracketError(f"runner crashes at lo={lo}; no stable bracket end")
    if runner(hi):
        raise BracketError(f"runner succeeds at hi={hi}; no unstable bracket end")
    while hi / lo >= 1.0 + rel_tol:
        mid = 0.5 * (lo + hi)
        if runner(mid):
            lo = mid
        else:
            hi = mid
    return lo
