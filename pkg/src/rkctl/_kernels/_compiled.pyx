# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled RHS kernels; semantics match numpy_impl exactly."""

from libc.math cimport fabs, sqrt


def advection_rhs_1d(double[:, ::1] u, double a, double[:, ::1] weak,
                     double winv0, double winv1, double[:, ::1] jinv,
                     int[::1] right, double[:, ::1] out):
    cdef Py_ssize_t ne = u.shape[0], p1 = u.shape[1]
    cdef Py_ssize_t e, i, q, r
    cdef double acc, ul, ur, fstar
    cdef double aa = fabs(a)
    for e in range(ne):
        for i in range(p1):
            acc = 0.0
            for q in range(p1):
                acc += weak[i, q] * (a * u[e, q])
            out[e, i] = acc
    for e in range(ne):
        r = right[e]
        ul = u[e, p1 - 1]
        ur = u[r, 0]
        fstar = 0.5 * a * (ul + ur) - 0.5 * aa * (ur - ul)
        out[e, p1 - 1] -= fstar * winv1
        out[r, 0] += fstar * winv0
    for e in range(ne):
        for i in range(p1):
            out[e, i] *= jinv[e, i]


def advection_rhs_2d(double[:, :, ::1] u, double[:, :, ::1] at1,
                     double[:, :, ::1] at2, double[:, ::1] bxi,
                     double[:, ::1] beta, double[:, :, ::1] jinv,
                     double[:, ::1] weak, double winv0, double winv1,
                     int[::1] right, int[::1] top, double[:, :, ::1] out):
    cdef Py_ssize_t ne = u.shape[0], p1 = u.shape[1]
    cdef Py_ssize_t e, i, j, q, r, t
    cdef double acc, ul, ur, s, fstar
    for e in range(ne):
        for j in range(p1):
            for i in range(p1):
                acc = 0.0
                for q in range(p1):
                    acc += weak[i, q] * (at1[e, j, q] * u[e, j, q])
                for q in range(p1):
                    acc += weak[j, q] * (at2[e, q, i] * u[e, q, i])
                out[e, j, i] = acc
    for e in range(ne):
        r = right[e]
        for j in range(p1):
            ul = u[e, j, p1 - 1]
            ur = u[r, j, 0]
            s = bxi[e, j]
            fstar = 0.5 * s * (ul + ur) - 0.5 * fabs(s) * (ur - ul)
            out[e, j, p1 - 1] -= fstar * winv1
            out[r, j, 0] += fstar * winv0
    for e in range(ne):
        t = top[e]
        for i in range(p1):
            ul = u[e, p1 - 1, i]
            ur = u[t, 0, i]
            s = beta[e, i]
            fstar = 0.5 * s * (ul + ur) - 0.5 * fabs(s) * (ur - ul)
            out[e, p1 - 1, i] -= fstar * winv1
            out[t, 0, i] += fstar * winv0
    for e in range(ne):
        for j in range(p1):
            for i in range(p1):
                out[e, j, i] *= jinv[e, j, i]


def fv_rhs_1d(double[:, ::1] u, double a, double[::1] weights, double jconst,
              int[::1] left, int[::1] right, double[:, ::1] out):
    cdef Py_ssize_t ne = u.shape[0], p1 = u.shape[1]
    cdef Py_ssize_t e, i
    cdef double aa = fabs(a)
    cdef double ul, ur, fl, fr
    import numpy as _np
    bflux = _np.empty(ne)
    cdef double[::1] fb = bflux
    for e in range(ne):
        ul = u[e, p1 - 1]
        ur = u[right[e], 0]
        fb[e] = 0.5 * a * (ul + ur) - 0.5 * aa * (ur - ul)
    for e in range(ne):
        for i in range(p1):
            if i == 0:
                fl = fb[left[e]]
            else:
                ul = u[e, i - 1]
                ur = u[e, i]
                fl = 0.5 * a * (ul + ur) - 0.5 * aa * (ur - ul)
            if i == p1 - 1:
                fr = fb[e]
            else:
                ul = u[e, i]
                ur = u[e, i + 1]
                fr = 0.5 * a * (ul + ur) - 0.5 * aa * (ur - ul)
            out[e, i] = -(fr - fl) / (weights[i] * jconst)


def fv_rhs_2d(double[:, :, ::1] u, double s1, double s2, double[::1] weights,
              double jconst, int[::1] left, int[::1] right, int[::1] bottom,
              int[::1] top, double[:, :, ::1] out):
    cdef Py_ssize_t ne = u.shape[0], p1 = u.shape[1]
    cdef Py_ssize_t e, i, j
    cdef double a1 = fabs(s1), a2 = fabs(s2)
    cdef double ul, ur, fl, fr
    import numpy as _np
    bx = _np.empty((ne, p1))
    by = _np.empty((ne, p1))
    cdef double[:, ::1] fbx = bx
    cdef double[:, ::1] fby = by
    for e in range(ne):
        for j in range(p1):
            ul = u[e, j, p1 - 1]
            ur = u[right[e], j, 0]
            fbx[e, j] = 0.5 * s1 * (ul + ur) - 0.5 * a1 * (ur - ul)
        for i in range(p1):
            ul = u[e, p1 - 1, i]
            ur = u[top[e], 0, i]
            fby[e, i] = 0.5 * s2 * (ul + ur) - 0.5 * a2 * (ur - ul)
    for e in range(ne):
        for j in range(p1):
            for i in range(p1):
                if i == 0:
                    fl = fbx[left[e], j]
                else:
                    ul = u[e, j, i - 1]
                    ur = u[e, j, i]
                    fl = 0.5 * s1 * (ul + ur) - 0.5 * a1 * (ur - ul)
                if i == p1 - 1:
                    fr = fbx[e, j]
                else:
                    ul = u[e, j, i]
                    ur = u[e, j, i + 1]
                    fr = 0.5 * s1 * (ul + ur) - 0.5 * a1 * (ur - ul)
                out[e, j, i] = -(fr - fl) / (weights[i] * jconst)
                if j == 0:
                    fl = fby[bottom[e], i]
                else:
                    ul = u[e, j - 1, i]
                    ur = u[e, j, i]
                    fl = 0.5 * s2 * (ul + ur) - 0.5 * a2 * (ur - ul)
                if j == p1 - 1:
                    fr = fby[e, i]
                else:
                    ul = u[e, j, i]
                    ur = u[e, j + 1, i]
                    fr = 0.5 * s2 * (ul + ur) - 0.5 * a2 * (ur - ul)
                out[e, j, i] -= (fr - fl) / (weights[j] * jconst)


def euler_rhs_1d(double[:, :, ::1] u, double gamma, double[:, ::1] weak,
                 double winv0, double winv1, double[:, ::1] jinv,
                 int[::1] right, double[:, :, ::1] out):
    cdef Py_ssize_t ne = u.shape[0], p1 = u.shape[1]
    cdef Py_ssize_t e, i, q, k, r
    cdef double rho, mom, ener, vel, pres, acc
    cdef double lam, ul, ur, fs
    import numpy as _np
    farr = _np.empty((ne, p1, 3))
    varr = _np.empty((ne, p1))
    carr = _np.empty((ne, p1))
    cdef double[:, :, ::1] f = farr
    cdef double[:, ::1] v = varr
    cdef double[:, ::1] c = carr
    for e in range(ne):
        for i in range(p1):
            rho = u[e, i, 0]
            if rho <= 0.0:
                return 1
            mom = u[e, i, 1]
            ener = u[e, i, 2]
            vel = mom / rho
            pres = (gamma - 1.0) * (ener - 0.5 * mom * vel)
            if pres <= 0.0:
                return 1
            v[e, i] = vel
            c[e, i] = sqrt(gamma * pres / rho)
            f[e, i, 0] = mom
            f[e, i, 1] = mom * vel + pres
            f[e, i, 2] = (ener + pres) * vel
    for e in range(ne):
        for i in range(p1):
            for k in range(3):
                acc = 0.0
                for q in range(p1):
                    acc += weak[i, q] * f[e, q, k]
                out[e, i, k] = acc
    for e in range(ne):
        r = right[e]
        lam = fabs(v[e, p1 - 1]) + c[e, p1 - 1]
        if fabs(v[r, 0]) + c[r, 0] > lam:
            lam = fabs(v[r, 0]) + c[r, 0]
        for k in range(3):
            ul = u[e, p1 - 1, k]
            ur = u[r, 0, k]
            fs = 0.5 * (f[e, p1 - 1, k] + f[r, 0, k]) - 0.5 * lam * (ur - ul)
            out[e, p1 - 1, k] -= fs * winv1
            out[r, 0, k] += fs * winv0
    for e in range(ne):
        for i in range(p1):
            for k in range(3):
                out[e, i, k] *= jinv[e, i]
    return 0
