"""Operator assembly, dense spectra, and stability-region embedding analysis."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .tableaux import ButcherTableau, effective_stage_count, stability_coefficients

#: Roundoff slack on |R(z)| <= 1 for numerically computed spectra.
_STABLE_SLACK = 1e-8


class NotLinearError(ValueError):
    """RHS failed the linearity probe."""


class EigenConvergenceError(RuntimeError):
    """Dense eigensolver did not converge."""


def assemble_operator(rhs, n: int, rng=None) -> np.ndarray:
    """Dense matrix of a linear RHS acting on flat vectors of length n.

    The RHS is probed for linearity on three random vector pairs (relative
    tolerance 1e-10) before the column-by-column assembly.
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    for _ in range(3):
        u = rng.standard_normal(n)
        v = rng.standard_normal(n)
        au, bv = rng.standard_normal(2)
        lhs = rhs(au * u + bv * v)
        ref = au * rhs(u) + bv * rhs(v)
        scale = max(float(np.max(np.abs(ref))), 1.0)
        if np.max(np.abs(lhs - ref)) > 1e-10 * scale:
            raise NotLinearError("rhs failed the linearity probe")
    matrix = np.empty((n, n))
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        matrix[:, j] = rhs(e)
        e[j] = 0.0
    return matrix


def flat_rhs(problem_rhs, shape):
    """Adapt a shaped RHS to flat vectors for assembly."""
    def rhs(vec):
        return np.asarray(problem_rhs(0.0, vec.reshape(shape))).ravel()
    return rhs


def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Full spectrum of a dense real matrix (Hessenberg + shifted QR via LAPACK)."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > 4096:
        raise ValueError("dense eigensolve limited to n <= 4096")
    try:
        lams = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    return lams


def verify_eigen_residuals(matrix: np.ndarray, lams: np.ndarray,
                           n_checks: int = 10, rng=None) -> float:
    """Largest ||M v - lam v|| / ||M|| over spot checks via inverse iteration.

    Eigenvectors are recomputed independently of the eigensolver: two steps
    of inverse iteration with a slightly shifted eigenvalue.
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    norm = np.linalg.norm(matrix, 2)
    n = matrix.shape[0]
    idx = rng.choice(len(lams), size=min(n_checks, len(lams)), replace=False)
    eye = np.eye(n)
    worst = 0.0
    for i in idx:
        lam = lams[i]
        shift = lam + (1e-8 * max(norm, 1.0)) * (1.0 + 1.0j)
        v = rng.standard_normal(n) + 0j
        for _ in range(2):
            try:
                v = np.linalg.solve(matrix - shift * eye, v)
            except np.linalg.LinAlgError:
                shift = shift * (1.0 + 1e-6) + 1e-12
                continue
            v = v / np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(matrix @ v - lam * v) / norm))
    return worst


def _r_abs(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    result = np.zeros_like(z, dtype=complex)
    for ck in coeffs[::-1]:
        result = result * z + ck
    return np.abs(result)


def _spectrum_stable(coeffs, spectrum, sigma) -> bool:
    return bool(np.all(_r_abs(coeffs, sigma * spectrum) <= 1.0 + _STABLE_SLACK))


def max_embedding_scale(spectrum, tab: ButcherTableau, rel_tol: float = 1e-4) -> float:
    """sup { sigma > 0 : |R(sigma lam)| <= 1 for all lam }, by bisection.

    Eigenvalues below 1e-12 in magnitude are skipped (the origin is always
    stable); returns 0.0 with a warning when no positive scale is stable.
    """
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.size == 0:
        raise ValueError("empty spectrum")
    if np.any(spectrum.real > _STABLE_SLACK):
        raise ValueError("spectrum has eigenvalues with positive real part")
    keep = spectrum[np.abs(spectrum) >= 1e-12]
    if keep.size == 0:
        raise ValueError("spectrum contains only (numerically) zero eigenvalues")
    coeffs = stability_coefficients(tab)
    lo = 1.0
    while not _spectrum_stable(coeffs, keep, lo):
        lo /= 2.0
        if lo < 1e-12:
            warnings.warn("no stable embedding scale found; spectrum unstable")
            return 0.0
    hi = lo * 2.0
    while _spectrum_stable(coeffs, keep, hi):
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("stability region appears unbounded along the spectrum")
    while hi / lo > 1.0 + rel_tol:
        mid = 0.5 * (lo + hi)
        if _spectrum_stable(coeffs, keep, mid):
            lo = mid
        else:
            hi = mid
    return lo


def out_of_region(spectrum, tab: ButcherTableau, sigma: float) -> np.ndarray:
    """Eigenvalues whose scaled image lies outside the stability region."""
    spectrum = np.asarray(spectrum, dtype=complex)
    keep = spectrum[np.abs(spectrum) >= 1e-12]
    coeffs = stability_coefficients(tab)
    mask = _r_abs(coeffs, sigma * keep) > 1.0 + _STABLE_SLACK
    return keep[mask]


def stability_region_boundary(tab: ButcherTableau, scale: float = 1.0,
                              window=(-12.0, 2.0, -10.0, 10.0),
                              resolution: int = 600) -> np.ndarray:
    """Sampled |R(z)| = 1 level-set points, coordinates multiplied by scale.

    Crossings are located by linear interpolation along grid edges of a
    resolution^2 sampling of the window.
    """
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    zz = xs[None, :] + 1j * ys[:, None]
    vals = _r_abs(stability_coefficients(tab), zz) - 1.0
    pts = []
    sgn = vals <= 0.0
    flip_x = sgn[:, :-1] != sgn[:, 1:]
    rows, cols = np.nonzero(flip_x)
    for r, c in zip(rows, cols):
        f0, f1 = vals[r, c], vals[r, c + 1]
        frac = f0 / (f0 - f1)
        pts.append((xs[c] + frac * (xs[c + 1] - xs[c]), ys[r]))
    flip_y = sgn[:-1, :] != sgn[1:, :]
    rows, cols = np.nonzero(flip_y)
    for r, c in zip(rows, cols):
        f0, f1 = vals[r, c], vals[r + 1, c]
        frac = f0 / (f0 - f1)
        pts.append((xs[c], ys[r] + frac * (ys[r + 1] - ys[r])))
    return scale * np.array(pts if pts else np.empty((0, 2)))


@dataclass
class SpectrumReport:
    method: str
    effective_stages: int
    eigenvalues_dg: np.ndarray
    eigenvalues_sc: np.ndarray
    sigma_dg: float
    sigma_sc: float
    outside_at_dg_scale: np.ndarray
    residual_dg: float
    residual_sc: float
    notes: list[str] = field(default_factory=list)

    @property
    def sigma_ratio(self) -> float:
        return self.sigma_dg / self.sigma_sc

    def report_text(self) -> str:
        lines = [
            f"method {self.method}",
            f"effective_stages {self.effective_stages}",
            f"sigma_dgsem {self.sigma_dg:.6g}",
            f"sigma_sc {self.sigma_sc:.6g}",
            f"sigma_ratio {self.sigma_ratio:.6g}",
            f"n_outside_at_dgsem_scale {len(self.outside_at_dg_scale)}",
            f"eig_residual_dgsem {self.residual_dg:.3e}",
            f"eig_residual_sc {self.residual_sc:.3e}",
        ]
        lines += self.notes
        return "\n".join(lines) + "\n"


def pair_conjugates(spectrum, tol: float = 1e-8) -> bool:
    """True when the spectrum is closed under conjugation within tol."""
    spectrum = np.asarray(spectrum, dtype=complex)
    remaining = list(spectrum[spectrum.imag > tol])
    partners = list(spectrum[spectrum.imag < -tol])
    for lam in remaining:
        best = None
        for i, mu in enumerate(partners):
            d = abs(np.conj(lam) - mu)
            if best is None or d < best[1]:
                best = (i, d)
        if best is None or best[1] > tol * max(1.0, abs(lam)):
            return False
        partners.pop(best[0])
    return len(partners) == 0


def spectrum_report(dg_rhs, sc_rhs, n: int, shape, tab: ButcherTableau,
                    rng=None) -> SpectrumReport:
    """Assemble both operators, solve, and embed into the scaled region."""
    m_dg = assemble_operator(flat_rhs(dg_rhs, shape), n, rng=rng)
    m_sc = assemble_operator(flat_rhs(sc_rhs, shape), n, rng=rng)
    lam_dg = eigenvalues(m_dg)
    lam_sc = eigenvalues(m_sc)
    res_dg = verify_eigen_residuals(m_dg, lam_dg, rng=rng)
    res_sc = verify_eigen_residuals(m_sc, lam_sc, rng=rng)
    sigma_dg = max_embedding_scale(lam_dg, tab)
    sigma_sc = max_embedding_scale(lam_sc, tab)
    outside = out_of_region(lam_sc, tab, sigma_dg)
    return SpectrumReport(
        method=tab.name,
        effective_stages=effective_stage_count(tab),
        eigenvalues_dg=lam_dg,
        eigenvalues_sc=lam_sc,
        sigma_dg=sigma_dg,
        sigma_sc=sigma_sc,
        outside_at_dg_scale=outside,
        residual_dg=res_dg,
        residual_sc=res_sc,
    )
