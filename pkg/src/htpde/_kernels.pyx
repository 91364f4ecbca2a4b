# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: mirror-boundary Laplacian, reaction-diffusion RHS,
explicit time stepping, and the scalar bound iteration.

Same API and conventions as the pure-NumPy twin ``htpde._kernels_py``.
"""

import numpy as np

from libc.math cimport fabs

IS_COMPILED = True


def lap1d(const double[::1] w, double h, double[::1] out):
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double ih2 = 1.0 / (h * h)
    out[0] = 2.0 * (w[1] - w[0]) * ih2
    for i in range(1, n - 1):
        out[i] = (w[i - 1] - 2.0 * w[i] + w[i + 1]) * ih2
    out[n - 1] = 2.0 * (w[n - 2] - w[n - 1]) * ih2
    return np.asarray(out)


def lap2d(const double[:, ::1] w, double h0, double h1, double[:, ::1] out):
    cdef Py_ssize_t i, j, n0 = w.shape[0], n1 = w.shape[1]
    cdef double ih0 = 1.0 / (h0 * h0)
    cdef double ih1 = 1.0 / (h1 * h1)
    cdef double acc
    for i in range(n0):
        for j in range(n1):
            if i == 0:
                acc = 2.0 * (w[1, j] - w[0, j]) * ih0
            elif i == n0 - 1:
                acc = 2.0 * (w[n0 - 2, j] - w[n0 - 1, j]) * ih0
            else:
                acc = (w[i - 1, j] - 2.0 * w[i, j] + w[i + 1, j]) * ih0
            if j == 0:
                acc += 2.0 * (w[i, 1] - w[i, 0]) * ih1
            elif j == n1 - 1:
                acc += 2.0 * (w[i, n1 - 2] - w[i, n1 - 1]) * ih1
            else:
                acc += (w[i, j - 1] - 2.0 * w[i, j] + w[i, j + 1]) * ih1
            out[i, j] = acc
    return np.asarray(out)


cdef int _rhs1d(const double[::1] u, const double[::1] v, const double[::1] a,
                const double[::1] d1, const double[::1] d2,
                double b, double r, double mu, double ih2,
                double[::1] du, double[::1] dv) noexcept nogil:
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double lu, lv, ui, vi
    for i in range(n):
        ui = u[i]
        vi = v[i]
        if ui < 0.0 or (ui == 0.0 and vi != 0.0):
            return <int> i
        if i == 0:
            lu = 2.0 * (u[1] - u[0]) * ih2
            lv = 2.0 * (v[1] - v[0]) * ih2
        elif i == n - 1:
            lu = 2.0 * (u[n - 2] - u[n - 1]) * ih2
            lv = 2.0 * (v[n - 2] - v[n - 1]) * ih2
        else:
            lu = (u[i - 1] - 2.0 * ui + u[i + 1]) * ih2
            lv = (v[i - 1] - 2.0 * vi + v[i + 1]) * ih2
        du[i] = d1[i] * lu + ui * (a[i] - ui - b * vi / (1.0 + r * ui))
        if vi == 0.0:
            dv[i] = d2[i] * lv
        else:
            dv[i] = d2[i] * lv + mu * vi * (1.0 - vi / ui)
    return -1


cdef int _rhs2d(const double[:, ::1] u, const double[:, ::1] v, const double[:, ::1] a,
                const double[:, ::1] d1, const double[:, ::1] d2,
                double b, double r, double mu, double ih0, double ih1,
                double[:, ::1] du, double[:, ::1] dv) noexcept nogil:
    cdef Py_ssize_t i, j, n0 = u.shape[0], n1 = u.shape[1]
    cdef double lu, lv, ui, vi
    for i in range(n0):
        for j in range(n1):
            ui = u[i, j]
            vi = v[i, j]
            if ui < 0.0 or (ui == 0.0 and vi != 0.0):
                return <int> (i * n1 + j)
            if i == 0:
                lu = 2.0 * (u[1, j] - ui) * ih0
                lv = 2.0 * (v[1, j] - vi) * ih0
            elif i == n0 - 1:
                lu = 2.0 * (u[n0 - 2, j] - ui) * ih0
                lv = 2.0 * (v[n0 - 2, j] - vi) * ih0
            else:
                lu = (u[i - 1, j] - 2.0 * ui + u[i + 1, j]) * ih0
                lv = (v[i - 1, j] - 2.0 * vi + v[i + 1, j]) * ih0
            if j == 0:
                lu += 2.0 * (u[i, 1] - ui) * ih1
                lv += 2.0 * (v[i, 1] - vi) * ih1
            elif j == n1 - 1:
                lu += 2.0 * (u[i, n1 - 2] - ui) * ih1
                lv += 2.0 * (v[i, n1 - 2] - vi) * ih1
            else:
                lu += (u[i, j - 1] - 2.0 * ui + u[i, j + 1]) * ih1
                lv += (v[i, j - 1] - 2.0 * vi + v[i, j + 1]) * ih1
            du[i, j] = d1[i, j] * lu + ui * (a[i, j] - ui - b * vi / (1.0 + r * ui))
            if vi == 0.0:
                dv[i, j] = d2[i, j] * lv
            else:
                dv[i, j] = d2[i, j] * lv + mu * vi * (1.0 - vi / ui)
    return -1


def rhs1d(const double[::1] u, const double[::1] v, const double[::1] a,
          const double[::1] d1, const double[::1] d2,
          double b, double r, double mu, double h,
          double[::1] du, double[::1] dv):
    return _rhs1d(u, v, a, d1, d2, b, r, mu, 1.0 / (h * h), du, dv)


def rhs2d(const double[:, ::1] u, const double[:, ::1] v, const double[:, ::1] a,
          const double[:, ::1] d1, const double[:, ::1] d2,
          double b, double r, double mu, double h0, double h1,
          double[:, ::1] du, double[:, ::1] dv):
    return _rhs2d(u, v, a, d1, d2, b, r, mu, 1.0 / (h0 * h0), 1.0 / (h1 * h1), du, dv)


def step_many_1d(double[::1] u, double[::1] v, const double[::1] a,
                 const double[::1] d1, const double[::1] d2,
                 double b, double r, double mu, double h,
                 double dt, long nsteps, int scheme):
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double ih2 = 1.0 / (h * h)
    cdef double sixth = dt / 6.0
    cdef long s
    cdef int bad
    cdef double[::1] k1u = np.empty(n), k1v = np.empty(n)
    cdef double[::1] k2u = np.empty(n), k2v = np.empty(n)
    cdef double[::1] k3u = np.empty(n), k3v = np.empty(n)
    cdef double[::1] k4u = np.empty(n), k4v = np.empty(n)
    cdef double[::1] tu = np.empty(n), tv = np.empty(n)
    for s in range(nsteps):
        bad = _rhs1d(u, v, a, d1, d2, b, r, mu, ih2, k1u, k1v)
        if bad >= 0:
            return bad, s
        if scheme == 0:
            for i in range(n):
                u[i] += dt * k1u[i]
                v[i] += dt * k1v[i]
        else:
            for i in range(n):
                tu[i] = u[i] + 0.5 * dt * k1u[i]
                tv[i] = v[i] + 0.5 * dt * k1v[i]
            bad = _rhs1d(tu, tv, a, d1, d2, b, r, mu, ih2, k2u, k2v)
            if bad >= 0:
                return bad, s
            for i in range(n):
                tu[i] = u[i] + 0.5 * dt * k2u[i]
                tv[i] = v[i] + 0.5 * dt * k2v[i]
            bad = _rhs1d(tu, tv, a, d1, d2, b, r, mu, ih2, k3u, k3v)
            if bad >= 0:
                return bad, s
            for i in range(n):
                tu[i] = u[i] + dt * k3u[i]
                tv[i] = v[i] + dt * k3v[i]
            bad = _rhs1d(tu, tv, a, d1, d2, b, r, mu, ih2, k4u, k4v)
            if bad >= 0:
                return bad, s
            for i in range(n):
                u[i] += sixth * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i])
                v[i] += sixth * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
        for i in range(n):
            if u[i] < 0.0 or v[i] < 0.0 or (u[i] == 0.0 and v[i] != 0.0):
                return <int> i, s
    return -1, nsteps


def step_many_2d(double[:, ::1] u, double[:, ::1] v, const double[:, ::1] a,
                 const double[:, ::1] d1, const double[:, ::1] d2,
                 double b, double r, double mu, double h0, double h1,
                 double dt, long nsteps, int scheme):
    cdef Py_ssize_t i, j, n0 = u.shape[0], n1 = u.shape[1]
    cdef double ih0 = 1.0 / (h0 * h0), ih1 = 1.0 / (h1 * h1)
    cdef double sixth = dt / 6.0
    cdef long s
    cdef int bad
    k1u_a = np.empty((n0, n1)); k1v_a = np.empty((n0, n1))
    k2u_a = np.empty((n0, n1)); k2v_a = np.empty((n0, n1))
    k3u_a = np.empty((n0, n1)); k3v_a = np.empty((n0, n1))
    k4u_a = np.empty((n0, n1)); k4v_a = np.empty((n0, n1))
    tu_a = np.empty((n0, n1)); tv_a = np.empty((n0, n1))
    cdef double[:, ::1] k1u = k1u_a, k1v = k1v_a
    cdef double[:, ::1] k2u = k2u_a, k2v = k2v_a
    cdef double[:, ::1] k3u = k3u_a, k3v = k3v_a
    cdef double[:, ::1] k4u = k4u_a, k4v = k4v_a
    cdef double[:, ::1] tu = tu_a, tv = tv_a
    for s in range(nsteps):
        bad = _rhs2d(u, v, a, d1, d2, b, r, mu, ih0, ih1, k1u, k1v)
        if bad >= 0:
            return bad, s
        if scheme == 0:
            for i in range(n0):
                for j in range(n1):
                    u[i, j] += dt * k1u[i, j]
                    v[i, j] += dt * k1v[i, j]
        else:
            for i in range(n0):
                for j in range(n1):
                    tu[i, j] = u[i, j] + 0.5 * dt * k1u[i, j]
                    tv[i, j] = v[i, j] + 0.5 * dt * k1v[i, j]
            bad = _rhs2d(tu, tv, a, d1, d2, b, r, mu, ih0, ih1, k2u, k2v)
            if bad >= 0:
                return bad, s
            for i in range(n0):
                for j in range(n1):
                    tu[i, j] = u[i, j] + 0.5 * dt * k2u[i, j]
                    tv[i, j] = v[i, j] + 0.5 * dt * k2v[i, j]
            bad = _rhs2d(tu, tv, a, d1, d2, b, r, mu, ih0, ih1, k3u, k3v)
            if bad >= 0:
                return bad, s
            for i in range(n0):
                for j in range(n1):
                    tu[i, j] = u[i, j] + dt * k3u[i, j]
                    tv[i, j] = v[i, j] + dt * k3v[i, j]
            bad = _rhs2d(tu, tv, a, d1, d2, b, r, mu, ih0, ih1, k4u, k4v)
            if bad >= 0:
                return bad, s
            for i in range(n0):
                for j in range(n1):
                    u[i, j] += sixth * (k1u[i, j] + 2.0 * k2u[i, j] + 2.0 * k3u[i, j] + k4u[i, j])
                    v[i, j] += sixth * (k1v[i, j] + 2.0 * k2v[i, j] + 2.0 * k3v[i, j] + k4v[i, j])
        for i in range(n0):
            for j in range(n1):
                if u[i, j] < 0.0 or v[i, j] < 0.0 or (u[i, j] == 0.0 and v[i, j] != 0.0):
                    return <int> (i * n1 + j), s
    return -1, nsteps


def monotone_iterate(double a_lo, double a_hi, double b, double r, double mu,
                     double K, double u_hi, double u_lo, double v_hi, double v_lo,
                     double tol, long max_iter, long rec_stride, double[:, ::1] rec):
    """See ``htpde._kernels_py.monotone_iterate``."""
    cdef long it = 0, n_rec = 0, cap = rec.shape[0]
    cdef bint converged = False, ordering_ok = True
    cdef double f_hi, f_lo, g_hi, g_lo, nu_hi, nu_lo, nv_hi, nv_lo, change, resid, c
    rec[0, 0] = u_hi; rec[0, 1] = u_lo; rec[0, 2] = v_hi; rec[0, 3] = v_lo
    n_rec = 1
    while it < max_iter:
        it += 1
        f_hi = u_hi * (a_hi - u_hi - b * v_lo / (1.0 + r * u_hi))
        f_lo = u_lo * (a_lo - u_lo - b * v_hi / (1.0 + r * u_lo))
        g_hi = mu * v_hi * (1.0 - v_hi / u_hi)
        g_lo = mu * v_lo * (1.0 - v_lo / u_lo)
        nu_hi = u_hi + f_hi / K
        nu_lo = u_lo + f_lo / K
        nv_hi = v_hi + g_hi / K
        nv_lo = v_lo + g_lo / K
        if not (nu_hi <= u_hi and nu_lo >= u_lo and nv_hi <= v_hi and nv_lo >= v_lo
                and 0.0 < nu_lo and nu_lo <= nu_hi and 0.0 < nv_lo and nv_lo <= nv_hi):
            ordering_ok = False
            break
        change = fabs(nu_hi - u_hi)
        c = fabs(nu_lo - u_lo)
        if c > change: change = c
        c = fabs(nv_hi - v_hi)
        if c > change: change = c
        c = fabs(nv_lo - v_lo)
        if c > change: change = c
        resid = fabs(f_hi)
        c = fabs(f_lo)
        if c > resid: resid = c
        c = fabs(g_hi)
        if c > resid: resid = c
        c = fabs(g_lo)
        if c > resid: resid = c
        u_hi = nu_hi; u_lo = nu_lo; v_hi = nv_hi; v_lo = nv_lo
        if it % rec_stride == 0 and n_rec < cap - 1:
            rec[n_rec, 0] = u_hi; rec[n_rec, 1] = u_lo
            rec[n_rec, 2] = v_hi; rec[n_rec, 3] = v_lo
            n_rec += 1
        if change < tol and resid < 10.0 * tol:
            converged = True
            break
    rec[n_rec, 0] = u_hi; rec[n_rec, 1] = u_lo
    rec[n_rec, 2] = v_hi; rec[n_rec, 3] = v_lo
    n_rec += 1
    return it, n_rec, converged, ordering_ok
