"""Config-driven problem setups shared by tests, CLI, and experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..cfl import MeshLimitProvider, mesh_limit
from .advection import (AdvectionDG1D, AdvectionDG2D, blended_advection_1d,
                        blended_advection_2d)
from .euler import EulerDG1D
from .mesh import TWO_PI, Mesh1D, Mesh2D, curved_mapping_2d

PROBLEM_KINDS = ("advection1d", "advection2d", "advection2d_curved",
                 "blended_advection", "euler1d")

SQRT2_INV = 1.0 / math.sqrt(2.0)


@dataclass
class Problem:
    name: str
    rhs: Callable[[float, np.ndarray], np.ndarray]
    u0: np.ndarray
    mlp: Optional[MeshLimitProvider]
    wavespeed: Optional[Callable[[np.ndarray], np.ndarray]]
    linear: bool
    mesh: object

    def mesh_limit(self, u) -> float:
        return mesh_limit(u, self.mlp, self.wavespeed)


def _sine_ic_1d(mesh: Mesh1D, background: float, amplitude: float, wavenumber: float):
    return background + amplitude * np.sin(wavenumber * mesh.x)


def _sine_ic_2d(mesh: Mesh2D, background, amplitude, wavenumber):
    kx, ky = wavenumber
    return background + amplitude * np.sin(kx * mesh.x + ky * mesh.y)


def advection_1d(elements: int = 16, degree: int = 3, velocity: float = 1.0,
                 domain=(-1.0, 1.0), background: float = 0.0,
                 amplitude: float = 1.0, wavenumber: float = math.pi) -> Problem:
    mesh = Mesh1D.periodic(elements, degree, domain)
    op = AdvectionDG1D(mesh, velocity)
    a = np.array([velocity])

    def wavespeed(u):
        return np.broadcast_to(a, (mesh.x.size, 1))

    return Problem("advection1d", op, _sine_ic_1d(mesh, background, amplitude, wavenumber),
                   mesh.mesh_limit_provider(), wavespeed, True, mesh)


def _advection_2d_common(name, mesh, velocity, background, amplitude, wavenumber,
                         alpha=None) -> Problem:
    if alpha is None:
        op = AdvectionDG2D(mesh, velocity)
    else:
        op = blended_advection_2d(mesh, velocity, alpha)
    a = np.asarray(velocity, dtype=float)

    def wavespeed(u):
        return np.broadcast_to(a, (mesh.jacobian.size, 2))

    return Problem(name, op, _sine_ic_2d(mesh, background, amplitude, wavenumber),
                   mesh.mesh_limit_provider(), wavespeed, True, mesh)


def advection_2d(elements=(8, 8), degree: int = 3,
                 velocity=(SQRT2_INV, SQRT2_INV),
                 domain=(-1.0, 1.0, -1.0, 1.0), background: float = 0.0,
                 amplitude: float = 1.0, wavenumber=(math.pi, math.pi)) -> Problem:
    nex, ney = elements
    mesh = Mesh2D.periodic(nex, ney, degree, domain)
    return _advection_2d_common("advection2d", mesh, velocity, background,
                                amplitude, wavenumber)


def advection_2d_curved(elements=(8, 8), degree: int = 3,
                        velocity=(SQRT2_INV, SQRT2_INV),
                        warp_amplitude: float = 1.0, background: float = 0.0,
                        amplitude: float = 1.0, wavenumber=(1.0, 0.0)) -> Problem:
    """Advection on the warped [-pi, pi]^2 mesh."""
    nex, ney = elements
    half = 0.5 * TWO_PI

    def mapping(xc, yc):
        return curved_mapping_2d(xc, yc, amplitude=warp_amplitude)

    mesh = Mesh2D.periodic(nex, ney, degree, (-half, half, -half, half), mapping)
    return _advection_2d_common("advection2d_curved", mesh, velocity, background,
                                amplitude, wavenumber)


def blended_advection(elements=(8, 8), degree: int = 3, alpha: float = 0.5,
                      velocity=None, domain=None, background: float = 0.0,
                      amplitude: float = 1.0, wavenumber=None) -> Problem:
    """DG/FV blend with fixed alpha; 1D when ``elements`` is an int."""
    if isinstance(elements, int):
        mesh = Mesh1D.periodic(elements, degree, domain or (-1.0, 1.0))
        vel = 1.0 if velocity is None else float(velocity)
        op = blended_advection_1d(mesh, vel, alpha)
        a = np.array([vel])

        def wavespeed(u):
            return np.broadcast_to(a, (mesh.x.size, 1))

        u0 = _sine_ic_1d(mesh, background, amplitude, wavenumber or math.pi)
        return Problem("blended_advection", op, u0, mesh.mesh_limit_provider(),
                       wavespeed, True, mesh)
    nex, ney = elements
    mesh = Mesh2D.periodic(nex, ney, degree, domain or (-1.0, 1.0, -1.0, 1.0))
    vel = (SQRT2_INV, SQRT2_INV) if velocity is None else velocity
    return _advection_2d_common("blended_advection", mesh, vel, background,
                                amplitude, wavenumber or (math.pi, math.pi),
                                alpha=alpha)


def euler_1d(elements: int = 64, degree: int = 3, gamma: float = 1.4,
             domain=(0.0, 1.0), ic: str = "density_wave",
             jump_rho: float = 2.0, jump_p: float = 10.0,
             jump_width: float = 0.02) -> Problem:
    """1D Euler setups: smooth density wave, smoothed jump, or free stream."""
    mesh = Mesh1D.periodic(elements, degree, domain)
    op = EulerDG1D(mesh, gamma)
    x = mesh.x
    u0 = np.empty(x.shape + (3,))
    if ic == "density_wave":
        rho = 1.0 + 0.5 * np.sin(2.0 * math.pi * x)
        v = np.ones_like(x)
        p = np.ones_like(x)
    elif ic == "smoothed_jump":
        x0, x1 = domain
        xa = x0 + 0.35 * (x1 - x0)
        xb = x0 + 0.65 * (x1 - x0)
        pulse = 0.5 * (np.tanh((x - xa) / jump_width) - np.tanh((x - xb) / jump_width))
        rho = 1.0 + (jump_rho - 1.0) * pulse
        v = np.zeros_like(x)
        p = 1.0 + (jump_p - 1.0) * pulse
    elif ic == "free_stream":
        rho = np.ones_like(x)
        v = np.zeros_like(x)
        p = np.ones_like(x)
    else:
        raise ValueError(f"unknown euler ic {ic!r}")
    u0[..., 0] = rho
    u0[..., 1] = rho * v
    u0[..., 2] = p / (gamma - 1.0) + 0.5 * rho * v * v
    return Problem("euler1d", op, u0, mesh.mesh_limit_provider(), op.wavespeed,
                   False, mesh)


def euler_density_wave_exact(mesh: Mesh1D, t: float, gamma: float = 1.4):
    """Exact conserved state of the traveling density wave at time t."""
    rho = 1.0 + 0.5 * np.sin(2.0 * math.pi * (mesh.x - t))
    u = np.empty(mesh.x.shape + (3,))
    u[..., 0] = rho
    u[..., 1] = rho
    u[..., 2] = 1.0 / (gamma - 1.0) + 0.5 * rho
    return u


def build_problem(kind: str, **params) -> Problem:
    builders = {
        "advection1d": advection_1d,
        "advection2d": advection_2d,
        "advection2d_curved": advection_2d_curved,
        "blended_advection": blended_advection,
        "euler1d": euler_1d,
    }
    if kind not in builders:
        raise ValueError(f"unknown problem kind {kind!r}; expected one of {PROBLEM_KINDS}")
    return builders[kind](**params)
