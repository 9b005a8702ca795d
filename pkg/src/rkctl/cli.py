"""Command line drivers: ``rkctl <experiment> --config <file>`` and
``exner-eigen``.

Config files are flat key=value text with bracketed section headers; the
sections are purely organizational and keys are looked up in a single flat
namespace. Command line ``key=value`` tokens override file values.
Exit codes: 0 success, 2 blow-up, 3 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .dgsem import build_problem
from .exner import (SweExnerParams, SweExnerState, characteristic_roots, froude,
                    loose_bound_ratio, max_wave_speed)
from .integrator import (BlowUpError, CflControl, StagnationError, StepStatistics,
                         integrate, summary_line)
from .tableaux import (METHOD_INFO, TableauIntegrityError, UnknownMethodError,
                       builtin)

EXPERIMENTS = ("plateau", "spectra", "coldstart", "exner_eigen", "cfl_bisect",
               "convergence")

EXIT_OK = 0
EXIT_BLOWUP = 2
EXIT_CONFIG = 3


class ConfigError(ValueError):
    pass


def parse_config(path: Path | None, overrides: list[str]) -> dict[str, str]:
    """Flat key=value parser; ``#`` comments, [section] lines are skipped."""
    items: dict[str, str] = {}
    if path is not None:
        if not path.exists():
            raise ConfigError(f"config file {path} not found")
        for raw in path.read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line or (line.startswith("[") and line.endswith("]")):
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line {raw!r}")
            key, val = line.split("=", 1)
            items[key.strip()] = val.strip()
    for tok in overrides:
        if "=" not in tok:
            raise ConfigError(f"override {tok!r} is not key=value")
        key, val = tok.split("=", 1)
        items[key.strip()] = val.strip()
    return items


def _get(items, key, default=None, cast=str):
    if key not in items:
        if default is None:
            raise ConfigError(f"missing config key {key!r}")
        return default
    try:
        return cast(items[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {items[key]!r}") from exc


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _elements(text: str):
    if "x" in text:
        a, b = text.lower().split("x")
        return (int(a), int(b))
    return int(text)


def build_problem_from_config(items: dict[str, str]):
    kind = _get(items, "problem")
    params: dict = {}
    if "elements" in items:
        params["elements"] = _elements(items["elements"])
    if "degree" in items:
        params["degree"] = int(items["degree"])
    if kind.startswith("advection") or kind == "blended_advection":
        if "velocity" in items:
            vel = _floats(items["velocity"])
            params["velocity"] = vel[0] if kind == "advection1d" else vel
        for key in ("background", "amplitude"):
            if key in items:
                params[key] = float(items[key])
        if "wavenumber" in items:
            wn = _floats(items["wavenumber"])
            params["wavenumber"] = wn[0] if kind == "advection1d" else wn
        if "domain" in items and kind != "advection2d_curved":
            dom = _floats(items["domain"])
            params["domain"] = dom
        if "warp_amplitude" in items and kind == "advection2d_curved":
            params["warp_amplitude"] = float(items["warp_amplitude"])
        if "alpha" in items and kind == "blended_advection":
            params["alpha"] = float(items["alpha"])
    elif kind == "euler1d":
        for key, cast in (("gamma", float), ("ic", str), ("jump_rho", float),
                          ("jump_p", float), ("jump_width", float)):
            if key in items:
                params[key] = cast(items[key])
        if "domain" in items:
            params["domain"] = _floats(items["domain"])
    try:
        return build_problem(kind, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _method(items) -> str:
    method = _get(items, "method", "BS3_3F")
    if method not in METHOD_INFO:
        raise ConfigError(f"unknown method {method!r}")
    return method


def _controller_overrides(items) -> dict:
    """Controller keys: beta1..3, accept_safety, w_min, ref_choice."""
    out: dict = {}
    if any(f"beta{i}" in items for i in (1, 2, 3)):
        method = _method(items)
        base = METHOD_INFO[method].beta
        out["beta"] = tuple(_get(items, f"beta{i}", base[i - 1], float)
                            for i in (1, 2, 3))
    for key, cast in (("accept_safety", float), ("w_min", float),
                      ("ref_choice", str)):
        if key in items:
            out[key] = cast(items[key])
    if out:
        from .controller import ControllerConfig
        try:
            ControllerConfig.from_tol(1e-4, beta=out.get("beta", (0.6, -0.2, 0.0)),
                                      k=3, **{k: v for k, v in out.items()
                                              if k != "beta"})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return out


def _out_dir(items, args) -> Path:
    return Path(args.out or items.get("out", "out"))


def cmd_plateau(items, args) -> int:
    problem = build_problem_from_config(items)
    method = _method(items)
    tols = [float(t) for t in _floats(_get(items, "tols", "1e-7,1e-6,1e-5,1e-4"))]
    if not tols:
        raise ConfigError("plateau requires a non-empty tolerance sweep list")
    result = ex.run_plateau(
        problem, method, tols,
        t_final=_get(items, "t_final", 10.0, float),
        seed=_get(items, "seed", 0, int),
        noise=_get(items, "noise", 1e-8, float),
        bisect_lo=_get(items, "lo", 0.05, float),
        bisect_hi=_get(items, "hi", 4.0, float),
        bisect_t=_get(items, "bisect_t", 200.0, float),
        ctrl_kwargs=_controller_overrides(items),
    )
    out = _out_dir(items, args)
    outputs = ex.write_plateau(result, out)
    summary_path = out / "summary.csv"
    lines = ["name,tol_or_nu,FE,A,R"]
    for row in result.rows:
        if row.crashed:
            lines.append(f"{method},tol={row.tol:g},crash,,")
        else:
            stats = StepStatistics(row.n_fe, row.n_accepted, row.n_rejected)
            lines.append(summary_line(method, f"tol={row.tol:g}", stats))
    lines.append(summary_line(method, f"nu={result.nu_max:.3g}",
                              StepStatistics(result.baseline_fe, result.baseline_steps, 0)))
    summary_path.write_text("\n".join(lines) + "\n")
    outputs.append(summary_path)
    outputs.append(ex.write_manifest(out, items, outputs))
    for row in result.rows:
        tag = "crash" if row.crashed else f"FE={row.n_fe} A={row.n_accepted} R={row.n_rejected}"
        print(f"tol={row.tol:g} {tag}")
    print(f"nu_max={result.nu_max:.6g} baseline FE={result.baseline_fe}")
    return EXIT_OK


def cmd_spectra(items, args) -> int:
    method = _method(items)
    problem = _get(items, "problem", "blended_advection")
    if problem not in ("blended_advection", "advection2d", "advection1d"):
        raise ConfigError(f"spectra supports linear advection problems, got {problem!r}")
    elements = _elements(_get(items, "elements", "8x8"))
    report = ex.run_spectrum(
        alpha=_get(items, "alpha", 0.5, float),
        method=method,
        elements=elements,
        degree=_get(items, "degree", 3, int),
        dim=2 if isinstance(elements, tuple) else 1,
        seed=_get(items, "seed", 0, int),
    )
    out = _out_dir(items, args)
    outputs = ex.write_spectrum(report, out)
    outputs.append(ex.write_manifest(out, items, outputs))
    print(report.report_text(), end="")
    return EXIT_OK


def cmd_coldstart(items, args) -> int:
    items.setdefault("problem", "euler1d")
    items.setdefault("ic", "smoothed_jump")
    problem = build_problem_from_config(items)
    method = _method(items)
    mode = _get(items, "mode", "error")
    if mode not in ("error", "cfl"):
        raise ConfigError(f"mode must be 'error' or 'cfl', got {mode!r}")
    out = _out_dir(items, args)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.csv"
    summary_path = out / "summary.csv"
    t_final = _get(items, "t_final", 0.4, float)
    if mode == "cfl":
        nu = _get(items, "nu", cast=float)
        res = integrate(builtin(method), problem.rhs, problem.u0, (0.0, t_final),
                        CflControl(nu=nu, mesh_limit=problem.mesh_limit))
        res.trace.to_csv(trace_path)
        summary = summary_line(method, f"nu={nu:g}", res.stats)
        summary_path.write_text("name,tol_or_nu,FE,A,R\n" + summary + "\n")
        ex.write_manifest(out, items, [trace_path, summary_path])
        print(summary)
        return EXIT_OK
    tol = _get(items, "tol", 1e-5, float)
    dt_init = float(items["dt_init"]) if "dt_init" in items else None
    result = ex.run_coldstart(problem, method, tol=tol, t_final=t_final,
                              dt_init=dt_init,
                              ctrl_kwargs=_controller_overrides(items))
    result.result.trace.to_csv(trace_path)
    summary = summary_line(method, f"tol={tol:g}", result.result.stats)
    summary_path.write_text("name,tol_or_nu,FE,A,R\n" + summary + "\n")
    ex.write_manifest(out, items, [trace_path, summary_path])
    print(summary)
    print(f"transient_ratio={result.transient_ratio:.3f} "
          f"asymptotic_cfl={result.asymptotic_cfl:.4f}")
    return EXIT_OK


def cmd_cfl_bisect(items, args) -> int:
    problem = build_problem_from_config(items)
    method = _method(items)
    res = ex.run_plateau(problem, method, tols=[],
                         t_final=_get(items, "t_final", 10.0, float),
                         seed=_get(items, "seed", 0, int),
                         noise=_get(items, "noise", 1e-8, float),
                         bisect_lo=_get(items, "lo", 0.05, float),
                         bisect_hi=_get(items, "hi", 4.0, float),
                         bisect_t=_get(items, "bisect_t", 200.0, float))
    print(f"nu_max={res.nu_max:.6g} baseline FE={res.baseline_fe} A={res.baseline_steps}")
    return EXIT_OK


def cmd_convergence(items, args) -> int:
    method = _method(items)
    result = ex.run_convergence(method,
                                t_final=_get(items, "t_final", 2.0, float),
                                levels=_get(items, "levels", 6, int),
                                base_steps=_get(items, "base_steps", 10, int))
    out = _out_dir(items, args)
    outputs = ex.write_convergence(result, out)
    ex.write_manifest(out, items, outputs)
    print(f"method={method} order_main={result.observed_order('main'):.3f} "
          f"order_embedded={result.observed_order('embedded'):.3f}")
    return EXIT_OK


def _exner_params(items) -> SweExnerParams:
    return SweExnerParams.make(g=_get(items, "g", 9.8, float),
                               sigma=_get(items, "sigma", 0.4, float),
                               a_g=_get(items, "ag", 0.001, float))


def _exner_line(state: SweExnerState, params: SweExnerParams) -> str:
    roots = characteristic_roots(state, params)
    cols = [state.h, state.hv1, state.hv2, *roots,
            max_wave_speed(state, params), froude(state, params),
            loose_bound_ratio(state, params)]
    return ",".join(ex.G17(c) for c in cols)


def cmd_exner_eigen(items, args) -> int:
    params = _exner_params(items)
    header = "h,hv1,hv2,root1,root2,root3,max_speed,froude,loose_bound_ratio"
    if _get(items, "sweep", 0, int):
        h_vals = np.geomspace(_get(items, "h_min", 0.5, float),
                              _get(items, "h_max", 50.0, float),
                              _get(items, "h_steps", 12, int))
        q_vals = np.linspace(_get(items, "hv1_min", -50.0, float),
                             _get(items, "hv1_max", 50.0, float),
                             _get(items, "hv1_steps", 11, int))
        lines = [header]
        for h in h_vals:
            for q in q_vals:
                state = SweExnerState(h=float(h), hv1=float(q),
                                      hv2=_get(items, "hv2", 0.0, float))
                lines.append(_exner_line(state, params))
        out = _out_dir(items, args)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "exner_sweep.csv"
        path.write_text("\n".join(lines) + "\n")
        ex.write_manifest(out, items, [path])
        print(f"wrote {path}")
    else:
        state = SweExnerState(h=_get(items, "h", 10.0, float),
                              hv1=_get(items, "hv1", 10.0, float),
                              hv2=_get(items, "hv2", 0.0, float))
        print(header)
        print(_exner_line(state, params))
    return EXIT_OK


def cmd_run_all(items, args) -> int:
    """Run the configured experiment list into per-experiment subdirectories."""
    kinds = [k for k in items.get("experiments", "").replace(",", " ").split() if k]
    for kind in kinds:
        if kind not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {kind!r} in run_all list")
    out = _out_dir(items, args)
    outputs = []

    class SubArgs:
        pass

    for kind in kinds:
        sub = SubArgs()
        sub.out = str(out / kind)
        COMMANDS[kind](dict(items), sub)
        outputs.extend(p for p in (out / kind).iterdir() if p.is_file())
    manifest = ex.write_manifest(out, items, outputs)
    print(f"ran {len(kinds)} experiments; manifest at {manifest}")
    return EXIT_OK


COMMANDS = {
    "plateau": cmd_plateau,
    "spectra": cmd_spectra,
    "coldstart": cmd_coldstart,
    "exner_eigen": cmd_exner_eigen,
    "cfl_bisect": cmd_cfl_bisect,
    "convergence": cmd_convergence,
    "run_all": cmd_run_all,
}

#: optional flags folded into the flat config namespace (file < flag < token)
_FLAG_KEYS = ("problem", "alpha", "method", "mode", "nu", "tol", "lo", "hi")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rkctl",
                                     description="step-size control experiments")
    parser.add_argument("experiment", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--problem")
    parser.add_argument("--alpha")
    parser.add_argument("--method")
    parser.add_argument("--mode", choices=["error", "cfl"])
    parser.add_argument("--nu")
    parser.add_argument("--tol")
    parser.add_argument("--lo")
    parser.add_argument("--hi")
    parser.add_argument("--bisect-cfl", action="store_true",
                        help="bisect the maximal stable CFL number")
    parser.add_argument("overrides", nargs="*", metavar="key=value")
    args = parser.parse_intermixed_args(argv)
    flag_overrides = [f"{key}={getattr(args, key)}" for key in _FLAG_KEYS
                      if getattr(args, key) is not None]
    experiment = "cfl_bisect" if args.bisect_cfl else args.experiment
    try:
        items = parse_config(args.config, flag_overrides + args.overrides)
        code = COMMANDS[experiment](items, args)
    except (ConfigError, UnknownMethodError, TableauIntegrityError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    except (BlowUpError, StagnationError) as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        if isinstance(exc, BlowUpError) and exc.trace is not None:
            print(f"  last good t={exc.last_t!r} after "
                  f"{len(exc.trace.accepted())} accepted steps", file=sys.stderr)
        code = EXIT_BLOWUP
    if argv is None:
        sys.exit(code)
    return code


def exner_eigen_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="exner-eigen",
                                     description="wave speeds of the shallow-water-Exner system")
    parser.add_argument("--h", type=float, default=10.0)
    parser.add_argument("--hv1", type=float, default=10.0)
    parser.add_argument("--hv2", type=float, default=0.0)
    parser.add_argument("--g", type=float, default=9.8)
    parser.add_argument("--sigma", type=float, default=0.4)
    parser.add_argument("--ag", type=float, default=0.001)
    parser.add_argument("--sweep", action="store_true")
    parser.add_argument("--out", default="out")
    args = parser.parse_args(argv)
    items = {"h": str(args.h), "hv1": str(args.hv1), "hv2": str(args.hv2),
             "g": str(args.g), "sigma": str(args.sigma), "ag": str(args.ag),
             "sweep": "1" if args.sweep else "0"}
    try:
        code = cmd_exner_eigen(items, args)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
