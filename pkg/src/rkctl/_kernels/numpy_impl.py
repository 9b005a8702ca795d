"""Vectorized numpy implementations of the RHS kernels.

These are the reference semantics for the compiled twins and the fallback
backend when the extension is not built. All functions write into ``out``
and neighbor index arrays are permutations (periodic connectivity), so
fancy-index accumulation is safe.
"""

import numpy as np


def advection_rhs_1d(u, a, weak, winv0, winv1, jinv, right, out):
    np.einsum("iq,eq->ei", weak, a * u, out=out)
    ul = u[:, -1]
    ur = u[right, 0]
    fstar = 0.5 * a * (ul + ur) - 0.5 * abs(a) * (ur - ul)
    out[:, -1] -= fstar * winv1
    out[right, 0] += fstar * winv0
    out *= jinv


def advection_rhs_2d(u, at1, at2, bxi, beta, jinv, weak, winv0, winv1,
                     right, top, out):
    np.einsum("iq,ejq->eji", weak, at1 * u, out=out)
    out += np.einsum("jq,eqi->eji", weak, at2 * u)
    ul = u[:, :, -1]
    ur = u[right, :, 0]
    fstar = 0.5 * bxi * (ul + ur) - 0.5 * np.abs(bxi) * (ur - ul)
    out[:, :, -1] -= fstar * winv1
    out[right, :, 0] += fstar * winv0
    ub = u[:, -1, :]
    ut = u[top, 0, :]
    gstar = 0.5 * beta * (ub + ut) - 0.5 * np.abs(beta) * (ut - ub)
    out[:, -1, :] -= gstar * winv1
    out[top, 0, :] += gstar * winv0
    out *= jinv


def fv_rhs_1d(u, a, weights, jconst, left, right, out):
    ne, p1 = u.shape
    flux = np.empty((ne, p1 + 1))
    um = u[:, :-1]
    up = u[:, 1:]
    flux[:, 1:-1] = 0.5 * a * (um + up) - 0.5 * abs(a) * (up - um)
    ul = u[:, -1]
    ur = u[right, 0]
    fb = 0.5 * a * (ul + ur) - 0.5 * abs(a) * (ur - ul)
    flux[:, -1] = fb
    flux[:, 0] = fb[left]
    out[:] = -(flux[:, 1:] - flux[:, :-1]) / (weights[None, :] * jconst)


def fv_rhs_2d(u, s1, s2, weights, jconst, left, right, bottom, top, out):
    ne, p1, _ = u.shape
    flux = np.empty((ne, p1, p1 + 1))
    um = u[:, :, :-1]
    up = u[:, :, 1:]
    flux[:, :, 1:-1] = 0.5 * s1 * (um + up) - 0.5 * abs(s1) * (up - um)
    ul = u[:, :, -1]
    ur = u[right, :, 0]
    fb = 0.5 * s1 * (ul + ur) - 0.5 * abs(s1) * (ur - ul)
    flux[:, :, -1] = fb
    flux[:, :, 0] = fb[left]
    out[:] = -(flux[:, :, 1:] - flux[:, :, :-1]) / (weights[None, None, :] * jconst)

    gflux = np.empty((ne, p1 + 1, p1))
    um = u[:, :-1, :]
    up = u[:, 1:, :]
    gflux[:, 1:-1, :] = 0.5 * s2 * (um + up) - 0.5 * abs(s2) * (up - um)
    ub = u[:, -1, :]
    ut = u[top, 0, :]
    gb = 0.5 * s2 * (ub + ut) - 0.5 * abs(s2) * (ut - ub)
    gflux[:, -1, :] = gb
    gflux[:, 0, :] = gb[bottom]
    out -= (gflux[:, 1:, :] - gflux[:, :-1, :]) / (weights[None, :, None] * jconst)


def euler_rhs_1d(u, gamma, weak, winv0, winv1, jinv, right, out):
    """Returns 0 on success, 1 when density or pressure is non-positive."""
    rho = u[..., 0]
    mom = u[..., 1]
    ener = u[..., 2]
    if np.any(rho <= 0.0):
        return 1
    v = mom / rho
    p = (gamma - 1.0) * (ener - 0.5 * mom * v)
    if np.any(p <= 0.0):
        return 1
    c = np.sqrt(gamma * p / rho)
    f = np.empty_like(u)
    f[..., 0] = mom
    f[..., 1] = mom * v + p
    f[..., 2] = (ener + p) * v
    np.einsum("iq,eqk->eik", weak, f, out=out)
    ul = u[:, -1, :]
    ur = u[right, 0, :]
    lam = np.maximum(np.abs(v[:, -1]) + c[:, -1], np.abs(v[right, 0]) + c[right, 0])
    fstar = 0.5 * (f[:, -1, :] + f[right, 0, :]) - 0.5 * lam[:, None] * (ur - ul)
    out[:, -1, :] -= fstar * winv1
    out[right, 0, :] += fstar * winv0
    out *= jinv[..., None]
    return 0
