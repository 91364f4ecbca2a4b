"""Attractor bounds and stability conditions for the heterogeneous system.

Everything here is grid-free arithmetic on the kinetic parameters and the
extremes (a_min, a_max) of the prey capacity.  The central object is the
bound quadruple (u_lo, u_hi, v_lo, v_hi): the unique positive solution of the
coupled comparison equations

    f(a_max, u_hi, v_lo) = 0,    f(a_min, u_lo, v_hi) = 0,
    g(u_hi, v_hi) = 0,           g(u_lo, v_lo) = 0,

which forces v_hi = u_hi, v_lo = u_lo and the pair of identities

    (a_max - u_hi) (1 + r u_hi) = b u_lo,
    (a_min - u_lo) (1 + r u_lo) = b u_hi.

Every trajectory with admissible initial data eventually enters the box
[u_lo, u_hi] x [v_lo, v_hi]; the quadruple exists whenever the predation
strength satisfies the standing hypothesis b < a_min / a_max.

Two independent routes compute the quadruple: a scalar polynomial root
(:func:`solve_quadruple`, the source of truth) and a damped monotone
iteration from outer seeds (:func:`monotone_iteration`), kept separate so
they can cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import ConvergenceError, HypothesisError, ValidationError
from .model import KineticParams

__all__ = [
    "BoundQuadruple",
    "IterateTrace",
    "check_b_condition",
    "homogeneous_steady",
    "quadruple_closed_r0",
    "h_eval",
    "h_prime",
    "solve_quadruple",
    "quadruple_residuals",
    "lipschitz_K",
    "default_eps1",
    "monotone_iteration",
    "check_global_stability",
    "check_ratio_condition",
]


@dataclass(frozen=True)
class BoundQuadruple:
    """Asymptotic bounds (u_lo <= u <= u_hi, v_lo <= v <= v_hi)."""

    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        if not (0.0 < self.u_lo <= self.u_hi and 0.0 < self.v_lo <= self.v_hi):
            raise ValidationError(f"BoundQuadruple: bounds out of order: {self}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u_lo, self.u_hi, self.v_lo, self.v_hi)

    def contains(self, u_min: float, u_max: float, v_min: float, v_max: float,
                 slack: float = 0.0) -> bool:
        return (u_min >= self.u_lo - slack and u_max <= self.u_hi + slack
                and v_min >= self.v_lo - slack and v_max <= self.v_hi + slack)


@dataclass(frozen=True)
class IterateTrace:
    """Recorded iterates of :func:`monotone_iteration`.

    ``iterates`` has one row per recorded iterate with columns
    (u_hi, u_lo, v_hi, v_lo); the seed row comes first and the converged
    quadruple last.  ``n_iter`` counts all iterations performed, recorded or
    not; the ordering chain was verified at every one of them.
    """

    iterates: np.ndarray
    K: float
    n_iter: int
    converged: bool
    eps1: float
    eps2: float


def check_b_condition(a_min: float, a_max: float, params: KineticParams) -> tuple[bool, float]:
    """Standing hypothesis b < a_min / a_max; returns (holds, margin).

    The margin is a_min/a_max - b (positive iff the hypothesis holds
    strictly).  Everything downstream that builds bound quadruples requires
    this to hold.
    """
    if not (0.0 < a_min <= a_max):
        raise ValidationError(f"capacity extremes out of order: ({a_min}, {a_max})")
    margin = a_min / a_max - params.b
    return margin > 0.0, margin


def homogeneous_steady(a: float, params: KineticParams) -> float:
    """Coexistence steady state u = v for spatially constant capacity a.

    Solves f(a, u, u) = 0, i.e. r u^2 + (b + 1 - a r) u - a = 0, picking the
    positive root; for r = 0 this is a / (1 + b).
    """
    if not a > 0.0:
        raise ValidationError(f"capacity must be positive, got {a}")
    b, r = params.b, params.r
    if r == 0.0:
        return a / (1.0 + b)
    c = b + 1.0 - a * r
    return (-c + math.sqrt(c * c + 4.0 * a * r)) / (2.0 * r)


def quadruple_closed_r0(a_min: float, a_max: float, b: float) -> BoundQuadruple:
    """Closed-form quadruple for the unsaturated response (r = 0).

    The identities linearize and solve to
        u_lo = (a_min - b a_max) / (1 - b^2),
        u_hi = (a_max - b a_min) / (1 - b^2).
    Requires b < a_min/a_max (which also forces b < 1).
    """
    params = KineticParams(b=b, r=0.0, mu=1.0)
    ok, margin = check_b_condition(a_min, a_max, params)
    if not ok:
        raise HypothesisError(
            f"predation strength b = {b} violates b < a_min/a_max = {a_min / a_max}"
            f" (margin {margin})")
    u_lo = (a_min - b * a_max) / (1.0 - b * b)
    u_hi = (a_max - b * a_min) / (1.0 - b * b)
    return BoundQuadruple(u_lo=u_lo, u_hi=u_hi, v_lo=u_lo, v_hi=u_hi)


def h_eval(tau, a_min: float, a_max: float, params: KineticParams):
    """Scalar reduction h(tau) whose root in (0, a_min) is u_lo.

    Substituting u_hi = (a_min - tau)(1 + r tau) / b into the u_hi identity
    gives, with P(tau) = (a_min - tau)(1 + r tau),

        h(tau) = (b a_max - P) (b + r P) - b^3 tau.

    Under the standing hypothesis h(0) < 0 < h(a_min) and the root is unique.
    Accepts scalar or array tau.
    """
    tau = np.asarray(tau, dtype=float)
    b, r = params.b, params.r
    P = (a_min - tau) * (1.0 + r * tau)
    out = (b * a_max - P) * (b + r * P) - b ** 3 * tau
    return float(out) if out.ndim == 0 else out


def h_prime(tau, a_min: float, a_max: float, params: KineticParams):
    """Derivative of :func:`h_eval` (used for the optional Newton polish)."""
    tau = np.asarray(tau, dtype=float)
    b, r = params.b, params.r
    P = (a_min - tau) * (1.0 + r * tau)
    Pp = r * (a_min - tau) - (1.0 + r * tau)
    out = (b * a_max - P) * r * Pp - Pp * (b + r * P) - b ** 3
    return float(out) if out.ndim == 0 else out


def _u_hi_from_u_lo(u_lo: float, a_min: float, r: float, b: float) -> float:
    return (a_min - u_lo) * (1.0 + r * u_lo) / b


def solve_quadruple(a_min: float, a_max: float, params: KineticParams,
                    tol: float = 1e-12) -> BoundQuadruple:
    """Bound quadruple via the scalar root of h (source of truth).

    r = 0 delegates to the closed form.  For r > 0, bisection on [0, a_min]
    (the bracketing signs are guaranteed by the hypothesis) down to bracket
    width ``tol``, then two safeguarded Newton polish steps.  The residuals of
    all four defining equations are checked to 10 * tol before returning.
    """
    ok, margin = check_b_condition(a_min, a_max, params)
    if not ok:
        raise HypothesisError(
            f"predation strength b = {params.b} violates b < a_min/a_max = "
            f"{a_min / a_max} (margin {margin})")
    b, r = params.b, params.r
    if r == 0.0:
        return quadruple_closed_r0(a_min, a_max, b)

    lo, hi = 0.0, a_min
    h_lo = h_eval(lo, a_min, a_max, params)
    h_hi = h_eval(hi, a_min, a_max, params)
    if not (h_lo < 0.0 < h_hi):
        raise ConvergenceError(
            f"internal: h does not bracket a root on [0, {a_min}]: "
            f"h(0) = {h_lo}, h(a_min) = {h_hi}")
    for _ in range(200):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        if h_eval(mid, a_min, a_max, params) < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    # Newton polish, kept inside the final bracket.
    for _ in range(2):
        hp = h_prime(root, a_min, a_max, params)
        if hp == 0.0:
            break
        cand = root - h_eval(root, a_min, a_max, params) / hp
        if lo <= cand <= hi:
            root = cand

    u_lo = root
    u_hi = _u_hi_from_u_lo(u_lo, a_min, r, b)
    q = BoundQuadruple(u_lo=u_lo, u_hi=u_hi, v_lo=u_lo, v_hi=u_hi)
    res = max(
        abs(u_hi * (a_max - u_hi - b * q.v_lo / (1.0 + r * u_hi))),
        abs(u_lo * (a_min - u_lo - b * q.v_hi / (1.0 + r * u_lo))),
    )
    if res > 10.0 * tol:
        raise ConvergenceError(
            f"internal: quadruple residual {res} exceeds {10.0 * tol}", partial=q)
    return q


def quadruple_residuals(q: BoundQuadruple, a_min: float, a_max: float,
                        params: KineticParams) -> tuple[float, float, float, float]:
    """Residuals of the four defining equations of the quadruple.

    Returns (f(a_max, u_hi, v_lo), f(a_min, u_lo, v_hi), g(u_hi, v_hi),
    g(u_lo, v_lo)); all four vanish at the exact quadruple.
    """
    b, r, mu = params.b, params.r, params.mu
    f_hi = q.u_hi * (a_max - q.u_hi - b * q.v_lo / (1.0 + r * q.u_hi))
    f_lo = q.u_lo * (a_min - q.u_lo - b * q.v_hi / (1.0 + r * q.u_lo))
    g_hi = mu * q.v_hi * (1.0 - q.v_hi / q.u_hi)
    g_lo = mu * q.v_lo * (1.0 - q.v_lo / q.u_lo)
    return (f_hi, f_lo, g_hi, g_lo)


def lipschitz_K(u_lo: float, u_hi: float, v_lo: float, v_hi: float,
                a_min: float, a_max: float, params: KineticParams) -> float:
    """Lipschitz bound K of the kinetics on the box [u_lo,u_hi]x[v_lo,v_hi].

    Interval/corner bounds of the four partials, with capacity ranging over
    [a_min, a_max]:

        |df/dv| <= b u_hi
        |dg/du| <= mu v_hi^2 / u_lo^2
        |dg/dv| <= mu max(1, |1 - 2 v_hi / u_lo|)
        |df/du| <= max |y - 2u - b v/(1 + r u)^2| over the corners.

    K is the max of the four; the monotone iteration stays ordered for any
    damping at least this large.
    """
    if not (0.0 < u_lo <= u_hi and 0.0 < v_lo <= v_hi):
        raise ValidationError("lipschitz_K: box bounds out of order")
    b, r, mu = params.b, params.r, params.mu
    k_fv = b * u_hi
    k_gu = mu * v_hi ** 2 / u_lo ** 2
    k_gv = mu * max(1.0, abs(1.0 - 2.0 * v_hi / u_lo))
    fu_upper = a_max - 2.0 * u_lo - b * v_lo / (1.0 + r * u_hi) ** 2
    fu_lower = a_min - 2.0 * u_hi - b * v_hi / (1.0 + r * u_lo) ** 2
    k_fu = max(abs(fu_upper), abs(fu_lower))
    return max(k_fu, k_fv, k_gu, k_gv)


def default_eps1(a_min: float, a_max: float, b: float) -> float:
    """Largest eps in {1e-2, 1e-3, ...} with b (a_max + eps) < a_min - eps."""
    for k in range(2, 17):
        eps = 10.0 ** (-k)
        if b * (a_max + eps) < a_min - eps:
            return eps
    raise HypothesisError(
        f"no admissible seed margin for b = {b}, a in [{a_min}, {a_max}]")


def monotone_iteration(a_min: float, a_max: float, params: KineticParams,
                       eps1: float | None = None, eps2: float | None = None,
                       tol: float = 1e-12, max_iter: int = 10_000_000,
                       ) -> tuple[BoundQuadruple, IterateTrace]:
    """Bound quadruple by damped monotone iteration from outer seeds.

    Seeds u_hi = v_hi = a_max + eps1 and u_lo = v_lo = eps2 enclose the
    quadruple; each iterate moves by the kinetic residual damped by 1/K:

        u_hi <- u_hi + f(a_max, u_hi, v_lo) / K,    (and likewise the others)

    which keeps u_hi nonincreasing, u_lo nondecreasing, lower <= upper at
    every step.  Stops when the largest component change drops below ``tol``
    and the kinetic residuals are below 10 * tol.  The ordering chain is
    verified at every iterate; a violation means the damping constant failed
    and is reported as an internal error.
    """
    ok, margin = check_b_condition(a_min, a_max, params)
    if not ok:
        raise HypothesisError(
            f"predation strength b = {params.b} violates b < a_min/a_max = "
            f"{a_min / a_max} (margin {margin})")
    if eps1 is None:
        eps1 = default_eps1(a_min, a_max, params.b)
    if eps2 is None:
        eps2 = eps1
    if not (0.0 < eps2 <= eps1):
        raise ValidationError(f"need 0 < eps2 <= eps1, got eps1={eps1}, eps2={eps2}")
    if not params.b * (a_max + eps1) < a_min - eps1:
        raise ValidationError(
            f"seed margin eps1 = {eps1} too large: need b (a_max + eps1) < a_min - eps1")
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")

    u_hi0 = v_hi0 = a_max + eps1
    u_lo0 = v_lo0 = eps2
    K = lipschitz_K(u_lo0, u_hi0, v_lo0, v_hi0, a_min, a_max, params)
    rec_stride = max(1, -(-max_iter // 4096))  # ceil division
    cap = max_iter // rec_stride + 3
    rec = np.empty((cap, 4))
    n_iter, n_rec, converged, ordering_ok = kernels.monotone_iterate(
        a_min, a_max, params.b, params.r, params.mu, K,
        u_hi0, u_lo0, v_hi0, v_lo0, tol, max_iter, rec_stride, rec)
    trace = IterateTrace(iterates=rec[:n_rec].copy(), K=K, n_iter=int(n_iter),
                         converged=bool(converged), eps1=eps1, eps2=eps2)
    if not ordering_ok:
        raise ConvergenceError(
            "internal: monotone ordering violated (damping constant too small)",
            partial=trace)
    if not converged:
        raise ConvergenceError(
            f"monotone iteration did not converge in {max_iter} iterations",
            partial=trace)
    u_hi, u_lo, v_hi, v_lo = trace.iterates[-1]
    q = BoundQuadruple(u_lo=float(u_lo), u_hi=float(u_hi),
                       v_lo=float(v_lo), v_hi=float(v_hi))
    return q, trace


def _d_ratio(d_extremes) -> float:
    (d1_min, d1_max), (d2_min, d2_max) = d_extremes
    if not (0.0 < d1_min <= d1_max and 0.0 < d2_min <= d2_max):
        raise ValidationError(f"diffusivity extremes out of order: {d_extremes}")
    return math.sqrt((d1_min * d2_min) / (d1_max * d2_max))


def check_global_stability(q: BoundQuadruple, d_extremes, params: KineticParams,
                           a_min: float) -> tuple[bool, float]:
    """Sufficient condition for global convergence to the steady state.

    Requires

        b < (1 + 2 r u_lo - r a_min) sqrt(d1_min d2_min / (d1_max d2_max))
            * (u_lo / u_hi)^(5/2)

    and returns (holds, rhs - b).  For r = 0 and constant diffusivities this
    reduces to b < (u_lo / u_hi)^(5/2).
    """
    rhs = ((1.0 + 2.0 * params.r * q.u_lo - params.r * a_min)
           * _d_ratio(d_extremes) * (q.u_lo / q.u_hi) ** 2.5)
    margin = rhs - params.b
    return margin > 0.0, margin


def check_ratio_condition(M: float, d_extremes, params: KineticParams,
                           a_min: float) -> tuple[bool, float]:
    """Small-contrast variant of the stability condition.

    For any verified bound u_hi/u_lo < M the requirement

        b < (1 + r a_min) sqrt(d1_min d2_min / (d1_max d2_max)) M^(-5/2)

    suffices.  M = 1 gives the sharpest (zero-contrast) form.  Returns
    (holds, rhs - b).
    """
    if not M >= 1.0:
        raise ValidationError(f"contrast bound M must be >= 1, got {M}")
    rhs = (1.0 + params.r * a_min) * _d_ratio(d_extremes) * M ** -2.5
    margin = rhs - params.b
    return margin > 0.0, margin
