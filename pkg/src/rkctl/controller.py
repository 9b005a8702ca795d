"""PID step-size control: weighted error norm, limiter, accept/reject, startup.

The controller keeps the two most recent inverse error estimates. Both are
initialized to one, and the memory advances on every proposal, accepted or
not, matching the loop structure of the reference solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Machine-epsilon floor for the error norm (first reference implementation);
#: the alternative convention uses 1e-10.
W_MIN_DEFAULT = 2.220446049250313e-16

REF_CHOICES = ("previous_state", "embedded_solution")


class NormContractError(ValueError):
    """Error-norm inputs violate the length/positivity contract."""


class InitialDtError(RuntimeError):
    """RHS returned non-finite values while probing the initial step size."""


@dataclass(frozen=True)
class ControllerConfig:
    beta: tuple[float, float, float]
    k: int
    tol_abs: float
    tol_rel: float
    accept_safety: float = 0.81
    w_min: float = W_MIN_DEFAULT
    ref_choice: str = "previous_state"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 < self.accept_safety < 1.0:
            raise ValueError("accept_safety must be in (0, 1)")
        if self.w_min <= 0.0:
            raise ValueError("w_min must be positive")
        if self.tol_abs <= 0.0 or self.tol_rel < 0.0:
            raise ValueError("tolerances must satisfy tol_abs > 0, tol_rel >= 0")
        if self.ref_choice not in REF_CHOICES:
            raise ValueError(f"ref_choice must be one of {REF_CHOICES}")

    @classmethod
    def from_tol(cls, tol: float, beta: tuple[float, float, float], k: int,
                 **kwargs) -> "ControllerConfig":
        """Equal absolute and relative tolerances from a single tol."""
        return cls(beta=tuple(beta), k=k, tol_abs=tol, tol_rel=tol, **kwargs)


@dataclass(frozen=True)
class ControllerState:
    """PID memory; fresh state has both inverse estimates set to one."""

    dt: float
    eps_n: float = 1.0
    eps_nm1: float = 1.0


@dataclass(frozen=True)
class Decision:
    dt_factor: float
    accept: bool
    dt_next: float
    new_state: ControllerState


def error_weight_norm(u_new, u_hat, u_ref, cfg: ControllerConfig) -> float:
    """Weighted RMS norm of the local error estimate u_new - u_hat.

    Each component is scaled by tol_abs + tol_rel * max(|u_new_i|, |u_ref_i|),
    and the result is the root mean square over all m scalar degrees of
    freedom jointly.
    """
    u_new = np.asarray(u_new, dtype=float).ravel()
    u_hat = np.asarray(u_hat, dtype=float).ravel()
    u_ref = np.asarray(u_ref, dtype=float).ravel()
    m = u_new.size
    if m == 0:
        raise NormContractError("empty state vector")
    if u_hat.size != m or u_ref.size != m:
        raise NormContractError(
            f"length mismatch: u_new has {m}, u_hat {u_hat.size}, u_ref {u_ref.size}"
        )
    scale = cfg.tol_abs + cfg.tol_rel * np.maximum(np.abs(u_new), np.abs(u_ref))
    ratios = (u_new - u_hat) / scale
    return float(np.sqrt(np.mean(ratios * ratios)))


def limiter(a: float) -> float:
    """Default step size limiter 1 + arctan(a - 1); fixes a = 1."""
    return 1.0 + math.atan(a - 1.0)


def propose(state: ControllerState, w_new: float, cfg: ControllerConfig) -> Decision:
    """One PID update: new step factor, accept flag, and shifted memory.

    The proposed step dt_next applies both on acceptance (as the next step)
    and on rejection (as the retry step). Memory shifts unconditionally.
    """
    w = max(w_new, cfg.w_min)
    eps_np1 = 1.0 / w
    b1, b2, b3 = cfg.beta
    raw = (eps_np1 ** (b1 / cfg.k)
           * state.eps_n ** (b2 / cfg.k)
           * state.eps_nm1 ** (b3 / cfg.k))
    dt_factor = limiter(raw)
    dt_next = dt_factor * state.dt
    new_state = ControllerState(dt=dt_next, eps_n=eps_np1, eps_nm1=state.eps_n)
    return Decision(
        dt_factor=dt_factor,
        accept=dt_factor >= cfg.accept_safety,
        dt_next=dt_next,
        new_state=new_state,
    )


def initial_dt(f, u0, t0: float, q: int, cfg: ControllerConfig) -> tuple[float, int]:
    """Automatic initial step size (textbook starting-step recipe).

    Costs exactly two RHS evaluations; the caller must charge them to the
    evaluation counter. All norms are weighted with u0 as the reference.
    """
    u0 = np.asarray(u0, dtype=float)
    zero = np.zeros_like(u0)

    def norm(x):
        return error_weight_norm(x, zero, u0, cfg)

    f0 = np.asarray(f(t0, u0), dtype=float)
    if not np.all(np.isfinite(f0)):
        raise InitialDtError(f"non-finite RHS at t0={t0}")
    d0 = norm(u0)
    d1 = norm(f0)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    u1 = u0 + h0 * f0
    f1 = np.asarray(f(t0 + h0, u1), dtype=float)
    if not np.all(np.isfinite(f1)):
        raise InitialDtError(f"non-finite RHS during probe step at t0+{h0}")
    d2 = norm(f1 - f0) / h0
    d_max = max(d1, d2)
    if d_max <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / d_max) ** (1.0 / (q + 1))
    return min(100.0 * h0, h1), 2
