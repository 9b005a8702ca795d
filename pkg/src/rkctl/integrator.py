"""Adaptive RK integration loop with exact function-evaluation accounting.

The loop mirrors the reference solver: a preliminary step with the embedded
estimate, a PID proposal, rejection retries with the proposed step size, and
callbacks fired only after accepted steps. Every RHS call is counted and the
final statistics are checked against the closed-form accounting identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional

import numpy as np

from .controller import ControllerConfig, ControllerState, error_weight_norm, initial_dt, propose
from .tableaux import ButcherTableau


class BlowUpError(RuntimeError):
    """Non-finite values encountered; carries the last good state."""

    def __init__(self, message, t=None, stage=None, last_t=None, last_u=None,
                 trace=None, stats=None):
        super().__init__(message)
        self.t = t
        self.stage = stage
        self.last_t = last_t
        self.last_u = last_u
        self.trace = trace
        self.stats = stats


class StagnationError(RuntimeError):
    """Step size collapsed below the resolvable scale."""


@dataclass
class StepStatistics:
    n_fe: int = 0
    n_accepted: int = 0
    n_rejected: int = 0


@dataclass(frozen=True)
class StepRecord:
    step: int
    t: float
    dt: float
    accepted: bool
    w: float
    dt_factor: float
    effective_cfl: Optional[float] = None


@dataclass
class StepTrace:
    records: list[StepRecord] = field(default_factory=list)

    def accepted(self) -> list[StepRecord]:
        return [r for r in self.records if r.accepted]

    def rejected(self) -> list[StepRecord]:
        return [r for r in self.records if not r.accepted]

    def to_csv(self, path) -> None:
        lines = ["step,t,dt,accepted,w,dt_factor,effective_cfl"]
        for r in self.records:
            cfl = "" if r.effective_cfl is None else format(r.effective_cfl, ".17g")
            lines.append(
                f"{r.step},{r.t:.17g},{r.dt:.17g},{int(r.accepted)},"
                f"{r.w:.17g},{r.dt_factor:.17g},{cfl}"
            )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ErrorControl:
    """Embedded-estimate control with a PID controller."""

    cfg: ControllerConfig


@dataclass(frozen=True)
class CflControl:
    """Wave-speed based control: dt = nu * mesh_limit(u) after every step.

    ``mesh_limit`` returns min_i dx_i / lambda_max(u_i) for the current state.
    """

    nu: float
    mesh_limit: Callable[[np.ndarray], float]

    def __post_init__(self):
        if self.nu <= 0.0:
            raise ValueError("CFL number nu must be positive")


@dataclass
class RKStepResult:
    u_next: np.ndarray
    u_hat: np.ndarray
    k_first: Optional[np.ndarray]
    k_last: Optional[np.ndarray]
    f_evals: int


@dataclass
class IntegrationResult:
    t: float
    u: np.ndarray
    trace: StepTrace
    stats: StepStatistics


def expected_function_evaluations(stages: int, fsal: bool, n_accepted: int,
                                  n_rejected: int, error_control: bool = True,
                                  init_estimate: bool = True) -> int:
    """Closed-form RHS evaluation count for a completed run.

    Under error control each attempted step costs s evaluations (FSAL pairs
    replace the first stage with the cached step-end derivative but pay for
    the estimator's extra evaluation), plus a one-off first stage for FSAL
    pairs and two evaluations for the automatic initial step size. Under CFL
    control there is no estimator and no startup probe.
    """
    if error_control:
        return (stages * (n_accepted + n_rejected)
                + (1 if fsal else 0)
                + (2 if init_estimate else 0))
    return stages * n_accepted + (1 if fsal else 0)


def _check_finite(arr: np.ndarray, what: str, t: float, stage: int | None = None):
    if not np.all(np.isfinite(arr)):
        raise BlowUpError(f"non-finite {what} at t={t!r}", t=t, stage=stage)


def rk_step(tab: ButcherTableau, f, t: float, u: np.ndarray, dt: float,
            fsal_cache: Optional[np.ndarray] = None) -> RKStepResult:
    """One explicit RK step with the embedded solution.

    For FSAL pairs, ``fsal_cache`` must equal f(t, u) if supplied; the
    derivative at the step end is always computed (it feeds the estimator and
    becomes the next step's cache), so a cached step costs s evaluations and
    an uncached one s+1. Non-FSAL pairs always cost s.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    s = tab.s
    a, b, b_hat, c = tab.a, tab.b, tab.b_hat, tab.c
    k = [None] * s
    f_evals = 0
    if tab.fsal and fsal_cache is not None:
        k[0] = fsal_cache
    else:
        k[0] = np.asarray(f(t, u))
        f_evals += 1
        _check_finite(k[0], "stage derivative", t, stage=0)
    for i in range(1, s):
        y = u.copy()
        for j in range(i):
            aij = a[i, j]
            if aij != 0.0:
                y += (dt * aij) * k[j]
        _check_finite(y, "stage value", t, stage=i)
        k[i] = np.asarray(f(t + c[i] * dt, y))
        f_evals += 1
        _check_finite(k[i], "stage derivative", t, stage=i)
    u_next = u.copy()
    for i in range(s):
        if b[i] != 0.0:
            u_next += (dt * b[i]) * k[i]
    _check_finite(u_next, "step update", t)
    acc_hat = u.copy()
    for i in range(s):
        if b_hat[i] != 0.0:
            acc_hat += (dt * b_hat[i]) * k[i]
    k_last = None
    if tab.fsal:
        k_last = np.asarray(f(t + dt, u_next))
        f_evals += 1
        _check_finite(k_last, "step-end derivative", t)
        acc_hat += (dt * b_hat[s]) * k_last
    _check_finite(acc_hat, "embedded update", t)
    return RKStepResult(u_next=u_next, u_hat=acc_hat,
                        k_first=k[0] if tab.fsal else None,
                        k_last=k_last, f_evals=f_evals)


def _snap(t_new: float, t_end: float) -> float:
    # snap to the final time when within 100 units in the last place
    if abs(t_end - t_new) <= 100.0 * np.spacing(max(abs(t_new), abs(t_end))):
        return t_end
    return t_new


def effective_cfl(dt: float, mesh_limit: float) -> float:
    """A-posteriori CFL number implied by a step size."""
    if mesh_limit <= 0.0:
        raise ValueError("mesh limit must be positive")
    return dt / mesh_limit


def integrate(tab: ButcherTableau, f, u0, t_span: tuple[float, float],
              mode: ErrorControl | CflControl,
              callbacks: Iterable[Callable] = (),
              dt_init: Optional[float] = None,
              mesh_limit: Optional[Callable[[np.ndarray], float]] = None,
              max_steps: int = 1_000_000) -> IntegrationResult:
    """Run the adaptive loop from t_span[0] to t_span[1].

    ``mesh_limit``, if given (or implied by CFL mode), adds the effective CFL
    number to the trace. Callbacks fire after accepted steps only, receiving
    (t, u, record). Raises BlowUpError with diagnostics on non-finite values
    and StagnationError when dt underflows.
    """
    t0, t_end = t_span
    if not t_end > t0:
        raise ValueError("t_span must satisfy t_end > t_start")
    u = np.array(u0, dtype=float)
    t = t0
    stats = StepStatistics()
    trace = StepTrace()
    callbacks = list(callbacks)

    error_mode = isinstance(mode, ErrorControl)
    if error_mode:
        cfg = mode.cfg
        used_init_estimate = dt_init is None
        if dt_init is None:
            dt0, charged = initial_dt(f, u, t, cfg.k, cfg)
            stats.n_fe += charged
        else:
            dt0 = dt_init
        ctrl = ControllerState(dt=dt0)
        limit_fn = mesh_limit
    else:
        limit_fn = mode.mesh_limit
        dt0 = dt_init if dt_init is not None else mode.nu * limit_fn(u)
        ctrl = None

    fsal_cache = None
    dt = dt0
    attempt = 0
    horizon = t_end - t0
    try:
        while t < t_end:
            attempt += 1
            if attempt > max_steps:
                raise StagnationError(f"exceeded {max_steps} step attempts")
            if error_mode:
                dt = ctrl.dt
            if t + dt > t_end:
                dt = t_end - t
                if error_mode:
                    ctrl = replace(ctrl, dt=dt)
            if dt < 1e-14 * horizon:
                raise StagnationError(f"dt={dt!r} underflowed at t={t!r}")
            cfl_now = effective_cfl(dt, limit_fn(u)) if limit_fn is not None else None
            result = rk_step(tab, f, t, u, dt, fsal_cache=fsal_cache)
            stats.n_fe += result.f_evals
            if error_mode:
                u_ref = u if cfg.ref_choice == "previous_state" else result.u_hat
                w = error_weight_norm(result.u_next, result.u_hat, u_ref, cfg)
                decision = propose(ctrl, w, cfg)
                ctrl = decision.new_state
                accepted = decision.accept
                w_rec, factor_rec = w, decision.dt_factor
            else:
                accepted = True
                w_rec, factor_rec = 0.0, 1.0
            t_new = _snap(t + dt, t_end) if accepted else t + dt
            record = StepRecord(step=attempt, t=t_new, dt=dt, accepted=accepted,
                                w=w_rec, dt_factor=factor_rec, effective_cfl=cfl_now)
            trace.records.append(record)
            if accepted:
                stats.n_accepted += 1
                t = t_new
                u = result.u_next
                fsal_cache = result.k_last
                if not error_mode and t < t_end:
                    dt = mode.nu * limit_fn(u)
                for cb in callbacks:
                    cb(t, u, record)
            else:
                stats.n_rejected += 1
                # the retry starts from the same (t, u): stage one stays valid
                fsal_cache = result.k_first
    except BlowUpError as exc:
        exc.last_t = t
        exc.last_u = u
        exc.trace = trace
        exc.stats = stats
        raise

    expected = expected_function_evaluations(
        tab.s, tab.fsal, stats.n_accepted, stats.n_rejected,
        error_control=error_mode,
        init_estimate=error_mode and used_init_estimate,
    )
    assert stats.n_fe == expected, (
        f"accounting identity violated: counted {stats.n_fe}, expected {expected}"
    )
    return IntegrationResult(t=t, u=u, trace=trace, stats=stats)


def integrate_fixed(tab: ButcherTableau, f, u0, t_span: tuple[float, float],
                    n_steps: int, advance: str = "main") -> IntegrationResult:
    """Fixed-step integration used by convergence studies.

    ``advance="embedded"`` propagates the embedded solution instead of the
    main one (no FSAL reuse in that case since the cached derivative belongs
    to the main update).
    """
    if advance not in ("main", "embedded"):
        raise ValueError("advance must be 'main' or 'embedded'")
    t0, t_end = t_span
    dt = (t_end - t0) / n_steps
    u = np.array(u0, dtype=float)
    stats = StepStatistics()
    fsal_cache = None
    t = t0
    for n in range(n_steps):
        result = rk_step(tab, f, t, u, dt, fsal_cache=fsal_cache)
        stats.n_fe += result.f_evals
        if advance == "main":
            u = result.u_next
            fsal_cache = result.k_last
        else:
            u = result.u_hat
        stats.n_accepted += 1
        t = t0 + (n + 1) * dt
    return IntegrationResult(t=t_end, u=u, trace=StepTrace(), stats=stats)


def summary_line(name: str, tol_or_nu: str, stats: StepStatistics) -> str:
    """Summary in the table schema name,tol_or_nu,FE,A,R."""
    return f"{name},{tol_or_nu},{stats.n_fe},{stats.n_accepted},{stats.n_rejected}"
