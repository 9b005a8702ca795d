"""Shallow-water-Exner algebra: Grass closure, flux Jacobian, wave speeds.

All routines are pure and stateless. The characteristic cubic is solved in
trigonometric form, which stays in real arithmetic throughout the hyperbolic
regime (three real roots).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

JACOBIAN_42_CHOICES = ("squared", "as_printed")


class HyperbolicityLossError(ValueError):
    """Characteristic cubic has complex roots for this state."""


@dataclass(frozen=True)
class SweExnerParams:
    """Gravity, porosity, and Grass-closure constants (exponent fixed at 3)."""

    g: float
    sigma: float
    a_g: float
    xi: float
    m_exp: int = 3

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("porosity sigma must be in (0, 1)")
        if not 0.0 <= self.a_g <= 1.0:
            raise ValueError("Grass constant a_g must be in [0, 1]")
        if self.m_exp != 3:
            raise ValueError("only the cubic Grass exponent m = 3 is supported")
        if abs(self.xi * (1.0 - self.sigma) - 1.0) > 1e-14:
            raise ValueError("xi must equal 1 / (1 - sigma)")

    @classmethod
    def make(cls, g: float = 9.8, sigma: float = 0.4, a_g: float = 0.001) -> "SweExnerParams":
        return cls(g=g, sigma=sigma, a_g=a_g, xi=1.0 / (1.0 - sigma))


@dataclass(frozen=True)
class SweExnerState:
    """Conserved state (h, h v1, h v2, b); water height must be positive."""

    h: float
    hv1: float
    hv2: float
    b: float = 0.0

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("water height h must be positive")

    @property
    def v1(self) -> float:
        return self.hv1 / self.h

    @property
    def v2(self) -> float:
        return self.hv2 / self.h

    def swapped(self) -> "SweExnerState":
        """State with the velocity components exchanged (y-direction analysis)."""
        return SweExnerState(h=self.h, hv1=self.hv2, hv2=self.hv1, b=self.b)


def grass_discharge(v, params: SweExnerParams) -> np.ndarray:
    """Solid transport discharge q = A_g v (v1^2 + v2^2) for exponent 3."""
    v = np.asarray(v, dtype=float)
    return params.a_g * v * float(v @ v)


def flux_jacobian_x(state: SweExnerState, params: SweExnerParams,
                    jacobian_42: str = "squared") -> np.ndarray:
    """x-direction flux Jacobian including the non-conservative bed terms.

    The (4,2) entry is xi A_g (3 v1^2 + v2^2) / h by default ("squared"),
    the variant consistent with the characteristic cubic; "as_printed"
    selects (3 v1^2 + v2) / h instead.
    """
    if jacobian_42 not in JACOBIAN_42_CHOICES:
        raise ValueError(f"jacobian_42 must be one of {JACOBIAN_42_CHOICES}")
    h, v1, v2 = state.h, state.v1, state.v2
    g, coeff = params.g, params.xi * params.a_g / state.h
    entry_42 = 3.0 * v1 * v1 + (v2 * v2 if jacobian_42 == "squared" else v2)
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [g * h - v1 * v1, 2.0 * v1, 0.0, g * h],
        [-v1 * v2, v2, v1, 0.0],
        [-3.0 * coeff * v1 * (v1 * v1 + v2 * v2), coeff * entry_42,
         2.0 * coeff * v1 * v2, 0.0],
    ])


def characteristic_coefficients(state: SweExnerState, params: SweExnerParams):
    """Coefficients (c2, c1, c0) of lam^3 + c2 lam^2 + c1 lam + c0."""
    h, v1, v2 = state.h, state.v1, state.v2
    gxa = params.g * params.xi * params.a_g
    speed_sq = 3.0 * v1 * v1 + v2 * v2
    c2 = -2.0 * v1
    c1 = v1 * v1 - params.g * h - gxa * speed_sq
    c0 = gxa * v1 * speed_sq
    return c2, c1, c0


def _cubic_roots_real(c2, c1, c0):
    """Ascending real roots of lam^3 + c2 lam^2 + c1 lam + c0 (vectorized).

    Returns (roots, ok) where ok flags states whose depressed cubic has a
    nonnegative discriminant (three real roots).
    """
    c2 = np.asarray(c2, dtype=float)
    c1 = np.asarray(c1, dtype=float)
    c0 = np.asarray(c0, dtype=float)
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = -4.0 * p**3 - 27.0 * q * q
    scale = np.maximum(1.0, np.maximum(np.abs(p), np.abs(q))) ** 2
    ok = disc >= -1e-12 * scale
    p_safe = np.where(p < 0.0, p, -1e-300)
    r = 2.0 * np.sqrt(-p_safe / 3.0)
    arg = np.clip(3.0 * q / (p_safe * r), -1.0, 1.0)
    phi = np.arccos(arg)
    shift = c2 / 3.0
    roots = np.stack([
        r * np.cos((phi - 2.0 * math.pi * k) / 3.0) - shift for k in range(3)
    ], axis=-1)
    # p ~ 0 collapses all roots onto -c2/3
    tiny_p = np.abs(p) <= 1e-300
    if np.any(tiny_p):
        triple = np.where(tiny_p[..., None], np.cbrt(-q)[..., None] - shift[..., None], roots)
        roots = triple
    return np.sort(roots, axis=-1), ok


def characteristic_roots(state: SweExnerState, params: SweExnerParams) -> np.ndarray:
    """Ascending roots of the characteristic cubic; hyperbolic regime only."""
    c2, c1, c0 = characteristic_coefficients(state, params)
    roots, ok = _cubic_roots_real(c2, c1, c0)
    if not ok:
        raise HyperbolicityLossError(
            f"negative cubic discriminant for state {state} (complex wave speeds)"
        )
    return roots


def characteristic_roots_batch(h, hv1, hv2, params: SweExnerParams):
    """Vectorized roots for arrays of states; returns (roots, hyperbolic_mask)."""
    h = np.asarray(h, dtype=float)
    v1 = np.asarray(hv1, dtype=float) / h
    v2 = np.asarray(hv2, dtype=float) / h
    gxa = params.g * params.xi * params.a_g
    speed_sq = 3.0 * v1 * v1 + v2 * v2
    c2 = -2.0 * v1
    c1 = v1 * v1 - params.g * h - gxa * speed_sq
    c0 = gxa * v1 * speed_sq
    return _cubic_roots_real(c2, c1, c0)


def cubic_residual(roots, state: SweExnerState, params: SweExnerParams) -> float:
    """max |poly(root)| scaled by max(1, |coefficients|_inf)."""
    c2, c1, c0 = characteristic_coefficients(state, params)
    roots = np.asarray(roots, dtype=float)
    vals = ((roots + c2) * roots + c1) * roots + c0
    scale = max(1.0, abs(c2), abs(c1), abs(c0))
    return float(np.max(np.abs(vals)) / scale)


def max_wave_speed(state: SweExnerState, params: SweExnerParams) -> float:
    """Fastest characteristic speed: max(|v1|, |cubic roots|)."""
    roots = characteristic_roots(state, params)
    return max(abs(state.v1), float(np.max(np.abs(roots))))


def froude(state: SweExnerState, params: SweExnerParams) -> float:
    """Flow speed over surface gravity-wave speed."""
    speed = math.hypot(state.v1, state.v2)
    return speed / math.sqrt(params.g * state.h)


def loose_bound_ratio(state: SweExnerState, params: SweExnerParams) -> float:
    """max_wave_speed relative to the surface-wave bound |v1| + sqrt(g h)."""
    return max_wave_speed(state, params) / (abs(state.v1) + math.sqrt(params.g * state.h))
