"""Pure-NumPy reference implementation of the hot kernels.

Mirrors the API of the compiled extension ``htpde._kernels`` exactly; the
active implementation is chosen in :mod:`htpde.backend`.  All stencils use
the mirror (even-reflection) ghost convention for the no-flux boundary.

Conventions shared by both backends:
  * rhs/step functions return the flat index of the first offending node on
    a positivity/singularity violation, -1 when clean;
  * step_many_* advance ``u, v`` in place and return (bad_node, steps_done);
  * scheme code 0 = explicit Euler, 1 = classical RK4.
"""

from __future__ import annotations

import numpy as np

IS_COMPILED = False


def lap1d(w, h, out):
    ih2 = 1.0 / (h * h)
    out[1:-1] = (w[:-2] - 2.0 * w[1:-1] + w[2:]) * ih2
    out[0] = 2.0 * (w[1] - w[0]) * ih2
    out[-1] = 2.0 * (w[-2] - w[-1]) * ih2
    return out


def lap2d(w, h0, h1, out):
    ih0 = 1.0 / (h0 * h0)
    ih1 = 1.0 / (h1 * h1)
    out[1:-1, :] = (w[:-2, :] - 2.0 * w[1:-1, :] + w[2:, :]) * ih0
    out[0, :] = 2.0 * (w[1, :] - w[0, :]) * ih0
    out[-1, :] = 2.0 * (w[-2, :] - w[-1, :]) * ih0
    out[:, 1:-1] += (w[:, :-2] - 2.0 * w[:, 1:-1] + w[:, 2:]) * ih1
    out[:, 0] += 2.0 * (w[:, 1] - w[:, 0]) * ih1
    out[:, -1] += 2.0 * (w[:, -2] - w[:, -1]) * ih1
    return out


def _bad_node(u, v):
    # u < 0 is always fatal; u == 0 is fatal only where v != 0 (v/u singular).
    mask = (u < 0.0) | ((u == 0.0) & (v != 0.0))
    if mask.any():
        return int(np.argmax(mask.ravel()))
    return -1


def _kinetics(u, v, a, b, r, mu, du, dv):
    np.multiply(u, a - u - b * v / (1.0 + r * u), out=du)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(u > 0.0, v / np.where(u > 0.0, u, 1.0), 0.0)
    np.multiply(mu * v, 1.0 - ratio, out=dv)


def rhs1d(u, v, a, d1, d2, b, r, mu, h, du, dv):
    bad = _bad_node(u, v)
    if bad >= 0:
        return bad
    lap1d(u, h, du)
    lap1d(v, h, dv)
    fu = np.empty_like(u)
    gv = np.empty_like(v)
    _kinetics(u, v, a, b, r, mu, fu, gv)
    du *= d1
    du += fu
    dv *= d2
    dv += gv
    return -1


def rhs2d(u, v, a, d1, d2, b, r, mu, h0, h1, du, dv):
    bad = _bad_node(u, v)
    if bad >= 0:
        return bad
    lap2d(u, h0, h1, du)
    lap2d(v, h0, h1, dv)
    fu = np.empty_like(u)
    gv = np.empty_like(v)
    _kinetics(u, v, a, b, r, mu, fu, gv)
    du *= d1
    du += fu
    dv *= d2
    dv += gv
    return -1


def _post_step_bad(u, v):
    mask = (u < 0.0) | (v < 0.0) | ((u == 0.0) & (v != 0.0))
    if mask.any():
        return int(np.argmax(mask.ravel()))
    return -1


def _step_many(rhs, rhs_args, u, v, dt, nsteps, scheme):
    k1u, k1v = np.empty_like(u), np.empty_like(v)
    if scheme == 0:  # Euler
        for s in range(nsteps):
            bad = rhs(u, v, *rhs_args, k1u, k1v)
            if bad >= 0:
                return bad, s
            u += dt * k1u
            v += dt * k1v
            bad = _post_step_bad(u, v)
            if bad >= 0:
                return bad, s
        return -1, nsteps
    k2u, k2v = np.empty_like(u), np.empty_like(v)
    k3u, k3v = np.empty_like(u), np.empty_like(v)
    k4u, k4v = np.empty_like(u), np.empty_like(v)
    tu, tv = np.empty_like(u), np.empty_like(v)
    for s in range(nsteps):
        bad = rhs(u, v, *rhs_args, k1u, k1v)
        if bad >= 0:
            return bad, s
        np.multiply(k1u, 0.5 * dt, out=tu); tu += u
        np.multiply(k1v, 0.5 * dt, out=tv); tv += v
        bad = rhs(tu, tv, *rhs_args, k2u, k2v)
        if bad >= 0:
            return bad, s
        np.multiply(k2u, 0.5 * dt, out=tu); tu += u
        np.multiply(k2v, 0.5 * dt, out=tv); tv += v
        bad = rhs(tu, tv, *rhs_args, k3u, k3v)
        if bad >= 0:
            return bad, s
        np.multiply(k3u, dt, out=tu); tu += u
        np.multiply(k3v, dt, out=tv); tv += v
        bad = rhs(tu, tv, *rhs_args, k4u, k4v)
        if bad >= 0:
            return bad, s
        u += (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        bad = _post_step_bad(u, v)
        if bad >= 0:
            return bad, s
    return -1, nsteps


def step_many_1d(u, v, a, d1, d2, b, r, mu, h, dt, nsteps, scheme):
    return _step_many(rhs1d, (a, d1, d2, b, r, mu, h), u, v, dt, nsteps, scheme)


def step_many_2d(u, v, a, d1, d2, b, r, mu, h0, h1, dt, nsteps, scheme):
    return _step_many(rhs2d, (a, d1, d2, b, r, mu, h0, h1), u, v, dt, nsteps, scheme)


def monotone_iterate(a_lo, a_hi, b, r, mu, K, u_hi, u_lo, v_hi, v_lo,
                     tol, max_iter, rec_stride, rec):
    """Damped fixed-point iteration for the coupled bound quadruple.

    Records every ``rec_stride``-th iterate (seed row included) into ``rec``
    (shape (cap, 4), columns u_hi, u_lo, v_hi, v_lo).  Returns
    (n_iter, n_rec, converged, ordering_ok); ordering_ok reports whether the
    monotone ordering chain held at every single iterate.
    """
    n_rec = 0
    cap = rec.shape[0]
    rec[n_rec, 0] = u_hi; rec[n_rec, 1] = u_lo
    rec[n_rec, 2] = v_hi; rec[n_rec, 3] = v_lo
    n_rec += 1
    converged = False
    ordering_ok = True
    it = 0
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
                and 0.0 < nu_lo <= nu_hi and 0.0 < nv_lo <= nv_hi):
            ordering_ok = False
            break
        change = max(abs(nu_hi - u_hi), abs(nu_lo - u_lo),
                     abs(nv_hi - v_hi), abs(nv_lo - v_lo))
        resid = max(abs(f_hi), abs(f_lo), abs(g_hi), abs(g_lo))
        u_hi, u_lo, v_hi, v_lo = nu_hi, nu_lo, nv_hi, nv_lo
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
