"""Experiment drivers: tolerance plateaus, spectra, cold starts, bisection.

Each driver takes plain keyword parameters, runs deterministically for a
given seed, and returns a result object; file emission is separated into
``write_*`` helpers so the CLI and the tests share one code path.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cfl import bisect_max_cfl
from .controller import ControllerConfig
from .dgsem import build_problem
from .dgsem.problems import Problem
from .integrator import (BlowUpError, CflControl, ErrorControl, IntegrationResult,
                         StagnationError, integrate, integrate_fixed)
from .spectra import SpectrumReport, spectrum_report, stability_region_boundary
from .tableaux import builtin, method_info

G17 = "{:.17g}".format


def controller_config(method: str, tol: float, beta=None, **kwargs) -> ControllerConfig:
    """Config with the method's recommended controller unless overridden."""
    info = method_info(method)
    return ControllerConfig.from_tol(tol, beta=beta or info.beta, k=info.order_q,
                                     **kwargs)


def seeded_noise(u0: np.ndarray, noise: float, seed: int) -> np.ndarray:
    """Broadband perturbation seeding marginal modes for stability probing."""
    if noise == 0.0:
        return u0
    rng = np.random.default_rng(seed)
    return u0 + noise * rng.standard_normal(u0.shape)


def blowup_guard(threshold: float):
    """Callback raising once the solution magnitude exceeds the threshold."""
    def cb(t, u, record):
        m = float(np.max(np.abs(u)))
        if m > threshold:
            raise BlowUpError(f"solution magnitude {m:.3e} exceeded {threshold:.3e}", t=t)
    return cb


def cfl_run_survives(problem: Problem, method: str, nu: float, t_final: float,
                     blowup_factor: float = 1e6, u0=None) -> bool:
    """True when a CFL-controlled run reaches t_final without blowing up."""
    u0 = problem.u0 if u0 is None else u0
    threshold = blowup_factor * max(1.0, float(np.max(np.abs(u0))))
    mode = CflControl(nu=nu, mesh_limit=problem.mesh_limit)
    try:
        integrate(builtin(method), problem.rhs, u0, (0.0, t_final), mode,
                  callbacks=[blowup_guard(threshold)])
    except (BlowUpError, StagnationError):
        return False
    return True


@dataclass
class SweepRow:
    tol: float
    crashed: bool
    n_fe: int = 0
    n_accepted: int = 0
    n_rejected: int = 0
    effective_cfl_median: float = float("nan")


@dataclass
class PlateauResult:
    method: str
    rows: list[SweepRow]
    nu_max: float
    baseline_fe: int
    baseline_steps: int
    t_final: float

    def fe_values(self) -> list[int]:
        return [r.n_fe for r in self.rows if not r.crashed]


def _error_run(problem: Problem, method: str, tol: float, t_final: float,
               u0=None, dt_init=None, ctrl_kwargs=None) -> IntegrationResult:
    cfg = controller_config(method, tol, **(ctrl_kwargs or {}))
    tab = builtin(method)
    return integrate(tab, problem.rhs, problem.u0 if u0 is None else u0,
                     (0.0, t_final), ErrorControl(cfg),
                     mesh_limit=problem.mesh_limit if problem.mlp is not None else None,
                     dt_init=dt_init)


def run_plateau(problem: Problem, method: str, tols, t_final: float,
                seed: int = 0, noise: float = 1e-8,
                bisect_lo: float = 0.05, bisect_hi: float = 4.0,
                bisect_t: float = 400.0, ctrl_kwargs=None) -> PlateauResult:
    """Tolerance sweep plus bisected-CFL baseline on one problem.

    The initial state is seeded with ``noise``-level broadband perturbations
    so that linear instability manifests within the bisection horizon.
    """
    tab = builtin(method)
    u0 = seeded_noise(problem.u0, noise, seed)
    rows = []
    for tol in sorted(tols):
        try:
            res = _error_run(problem, method, tol, t_final, u0=u0,
                             ctrl_kwargs=ctrl_kwargs)
            acc = res.trace.accepted()
            tail = [r.effective_cfl for r in acc[len(acc) // 2:]
                    if r.effective_cfl is not None]
            rows.append(SweepRow(tol=tol, crashed=False, n_fe=res.stats.n_fe,
                                 n_accepted=res.stats.n_accepted,
                                 n_rejected=res.stats.n_rejected,
                                 effective_cfl_median=float(np.median(tail))))
        except (BlowUpError, StagnationError):
            rows.append(SweepRow(tol=tol, crashed=True))

    threshold = 1e6 * max(1.0, float(np.max(np.abs(u0))))

    def runner(nu: float) -> bool:
        mode = CflControl(nu=nu, mesh_limit=problem.mesh_limit)
        try:
            integrate(tab, problem.rhs, u0, (0.0, bisect_t), mode,
                      callbacks=[blowup_guard(threshold)])
        except (BlowUpError, StagnationError):
            return False
        return True

    nu_max = bisect_max_cfl(runner, bisect_lo, bisect_hi)
    base = integrate(tab, problem.rhs, u0, (0.0, t_final),
                     CflControl(nu=nu_max, mesh_limit=problem.mesh_limit))
    return PlateauResult(method=method, rows=rows, nu_max=nu_max,
                         baseline_fe=base.stats.n_fe,
                         baseline_steps=base.stats.n_accepted, t_final=t_final)


def write_plateau(result: PlateauResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv = out_dir / "plateau.csv"
    lines = ["tol,crashed,FE,A,R,effective_cfl_median"]
    for r in result.rows:
        lines.append(f"{G17(r.tol)},{int(r.crashed)},{r.n_fe},{r.n_accepted},"
                     f"{r.n_rejected},{G17(r.effective_cfl_median)}")
    lines.append(f"# baseline nu={G17(result.nu_max)} FE={result.baseline_fe} "
                 f"A={result.baseline_steps}")
    csv.write_text("\n".join(lines) + "\n")
    md = out_dir / "plateau.md"
    info = method_info(result.method)
    beta = "(" + ", ".join(f"{b:.2f}" for b in info.beta) + ")"
    rows_md = [
        "| Scheme | beta | tol/nu | #FE | #A | #R |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for r in result.rows:
        fe = "crash" if r.crashed else str(r.n_fe)
        acc = "" if r.crashed else str(r.n_accepted)
        rej = "" if r.crashed else str(r.n_rejected)
        rows_md.append(f"| {result.method} | {beta} | tol = {r.tol:g} | {fe} | {acc} | {rej} |")
    rows_md.append(f"| {result.method} | {beta} | nu = {result.nu_max:.3g} | "
                   f"{result.baseline_fe} | {result.baseline_steps} | |")
    md.write_text("\n".join(rows_md) + "\n")
    return [csv, md]


@dataclass
class ColdStartResult:
    result: IntegrationResult
    transient_ratio: float
    asymptotic_cfl: float


def transient_ratio(result: IntegrationResult, head: int = 50) -> float:
    """Final-quartile median dt over the minimum accepted dt of the first steps."""
    acc = result.trace.accepted()
    if len(acc) < 8:
        return 1.0
    dt_head = min(r.dt for r in acc[:head])
    tail = [r.dt for r in acc[3 * len(acc) // 4:]]
    return float(np.median(tail) / dt_head)


def run_coldstart(problem: Problem, method: str, tol: float, t_final: float,
                  dt_init=None, ctrl_kwargs=None) -> ColdStartResult:
    res = _error_run(problem, method, tol, t_final, dt_init=dt_init,
                     ctrl_kwargs=ctrl_kwargs)
    acc = res.trace.accepted()
    tail = [r.effective_cfl for r in acc[3 * len(acc) // 4:]
            if r.effective_cfl is not None]
    return ColdStartResult(result=res, transient_ratio=transient_ratio(res),
                           asymptotic_cfl=float(np.median(tail)) if tail else float("nan"))


def run_spectrum(alpha: float, method: str, elements=(8, 8), degree: int = 3,
                 dim: int = 2, seed: int = 0) -> SpectrumReport:
    if dim == 2:
        prob_dg = build_problem("blended_advection", elements=elements, degree=degree, alpha=0.0)
        prob_sc = build_problem("blended_advection", elements=elements, degree=degree, alpha=alpha)
    else:
        ne = elements if isinstance(elements, int) else elements[0]
        prob_dg = build_problem("blended_advection", elements=ne, degree=degree, alpha=0.0)
        prob_sc = build_problem("blended_advection", elements=ne, degree=degree, alpha=alpha)
    n = prob_dg.u0.size
    return spectrum_report(prob_dg.rhs, prob_sc.rhs, n, prob_dg.u0.shape,
                           builtin(method), rng=seed)


def write_spectrum(report: SpectrumReport, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    tab = builtin(report.method)

    def eig_csv(path, lams):
        lines = ["re,im"] + [f"{G17(l.real)},{G17(l.imag)}" for l in lams]
        path.write_text("\n".join(lines) + "\n")

    spectrum_csv = out_dir / "spectrum.csv"
    eig_csv(spectrum_csv, report.eigenvalues_dg)
    spectrum_sc_csv = out_dir / "spectrum_sc.csv"
    eig_csv(spectrum_sc_csv, report.eigenvalues_sc)
    region_csv = out_dir / "region.csv"
    pts = stability_region_boundary(tab, scale=1.0 / report.effective_stages)
    lines = ["re,im"] + [f"{G17(p[0])},{G17(p[1])}" for p in pts]
    region_csv.write_text("\n".join(lines) + "\n")
    report_txt = out_dir / "report.txt"
    report_txt.write_text(report.report_text())
    return [spectrum_csv, spectrum_sc_csv, region_csv, report_txt]


@dataclass
class ConvergenceResult:
    method: str
    n_steps: list[int]
    errors_main: list[float]
    errors_embedded: list[float]

    def observed_order(self, which: str = "main") -> float:
        errs = self.errors_main if which == "main" else self.errors_embedded
        x = np.log(self.n_steps)
        y = np.log(errs)
        slope = np.polyfit(x, y, 1)[0]
        return float(-slope)


def run_convergence(method: str, t_final: float = 2.0, levels: int = 6,
                    base_steps: int = 10) -> ConvergenceResult:
    """Fixed-step study on u' = -u^2, u(0) = 1 (exact solution 1/(1+t))."""
    tab = builtin(method)
    exact = 1.0 / (1.0 + t_final)

    def rhs(t, u):
        return -u * u

    u0 = np.array([1.0])
    steps, e_main, e_emb = [], [], []
    for lev in range(levels):
        n = base_steps * 2**lev
        res = integrate_fixed(tab, rhs, u0, (0.0, t_final), n)
        res_emb = integrate_fixed(tab, rhs, u0, (0.0, t_final), n, advance="embedded")
        steps.append(n)
        e_main.append(abs(float(res.u[0]) - exact))
        e_emb.append(abs(float(res_emb.u[0]) - exact))
    return ConvergenceResult(method=method, n_steps=steps, errors_main=e_main,
                             errors_embedded=e_emb)


def write_convergence(result: ConvergenceResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "convergence.csv"
    lines = ["n_steps,error_main,error_embedded"]
    for n, em, ee in zip(result.n_steps, result.errors_main, result.errors_embedded):
        lines.append(f"{n},{G17(em)},{G17(ee)}")
    lines.append(f"# observed_order_main {result.observed_order('main'):.4f}")
    lines.append(f"# observed_order_embedded {result.observed_order('embedded'):.4f}")
    path.write_text("\n".join(lines) + "\n")
    return [path]


def config_hash(items: dict) -> str:
    canon = "\n".join(f"{k}={items[k]}" for k in sorted(items))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_manifest(out_dir: Path, cfg_items: dict, outputs: list[Path]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = out_dir / "manifest.txt"
    lines = [
        f"config_hash {config_hash(cfg_items)}",
        f"rkctl_version {__version__}",
        f"numpy_version {np.__version__}",
        "outputs:",
    ]
    lines += sorted(f"  {p.name}" for p in outputs)
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
