"""Steady-state solvers for the discrete no-flux system.

Two routes, cross-checkable:

* :func:`steady_by_relaxation` integrates the parabolic system until the
  semi-discrete residual is below tolerance.  Robust, works in 1-D and 2-D,
  and is the default everywhere.
* :func:`steady_newton_1d` solves the discrete elliptic system directly with
  a damped Newton method on the interleaved (u_0, v_0, u_1, v_1, ...) vector;
  the Jacobian is analytic and pentadiagonal, solved with a banded LU.  It
  falls back loudly (:class:`~htpde.errors.NewtonFallback`) instead of
  wandering off when damping cannot restore progress.

Converged states are meant to live inside the attractor box from
:mod:`htpde.bounds`; :func:`check_containment` verifies that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import pde
from .backend import kernels
from .bounds import BoundQuadruple, solve_quadruple
from .errors import ConvergenceError, NewtonFallback, ValidationError
from .model import ModelSpec, ScalarField, State

__all__ = [
    "SteadyResult",
    "residual_sup",
    "default_initial",
    "steady_by_relaxation",
    "steady_newton_1d",
    "check_containment",
]


@dataclass(frozen=True)
class SteadyResult:
    """A converged (or partial) steady state with solver metadata."""

    u_star: ScalarField
    v_star: ScalarField
    residual_sup: float
    method: str
    iterations: int
    converged: bool
    update_norms: tuple[float, ...] = ()

    @property
    def state(self) -> State:
        return State(self.u_star, self.v_star, 0.0)


def residual_sup(u_star: ScalarField, v_star: ScalarField, model: ModelSpec) -> float:
    """Sup-norm of the steady residual (d1 lap u + f, d2 lap v + g)."""
    du, dv = pde.rhs(State(u_star, v_star, 0.0), model)
    return float(max(np.abs(du.values).max(), np.abs(dv.values).max()))


def default_initial(model: ModelSpec) -> State:
    """Constant state at the midpoint of the attractor box."""
    a_min, a_max = model.a_extremes
    q = solve_quadruple(a_min, a_max, model.params)
    mid = 0.5 * (q.u_lo + q.u_hi)
    return State.constant(model.grid, mid, mid)


def steady_by_relaxation(model: ModelSpec, initial: State | None = None,
                         tol: float = 1e-10, t_max: float = 400.0,
                         scheme: str = "explicit-rk4") -> SteadyResult:
    """Integrate until the steady residual drops below ``tol``.

    Checks the residual at a bounded cadence (roughly every 0.25 time units)
    rather than every step.  Raises :class:`ConvergenceError` carrying the
    partial result if t_max is exhausted first.
    """
    if initial is None:
        initial = default_initial(model)
    dt_auto = pde.cfl_limit(model)
    chunk = max(1, min(int(round(0.25 / dt_auto)), 200_000))
    stepper = pde.StepperConfig(t_end=t_max, record_every=chunk, scheme=scheme)

    def small_residual(state: State) -> bool:
        return residual_sup(state.u, state.v, model) < tol

    trace = pde.simulate(model, initial, stepper, stop_when=small_residual,
                         store_states=False)
    final = trace.final_state
    res = residual_sup(final.u, final.v, model)
    steps = int(round((trace.times[-1] - trace.times[0]) / trace.dt))
    result = SteadyResult(u_star=final.u, v_star=final.v, residual_sup=res,
                          method="relaxation", iterations=steps,
                          converged=res < tol)
    if not result.converged:
        raise ConvergenceError(
            f"relaxation residual {res} still above {tol} at t = {t_max}",
            partial=result)
    return result


def _newton_residual(u: np.ndarray, v: np.ndarray, model: ModelSpec) -> np.ndarray:
    g = model.grid
    du = np.empty_like(u)
    dv = np.empty_like(v)
    bad = kernels.rhs1d(u, v, model.a.values, model.d1.values, model.d2.values,
                        model.params.b, model.params.r, model.params.mu,
                        g.spacing[0], du, dv)
    if bad >= 0:
        raise NewtonFallback(f"residual undefined at node {bad} (u <= 0)")
    out = np.empty(2 * u.size)
    out[0::2] = du
    out[1::2] = dv
    return out


def _newton_jacobian_banded(u: np.ndarray, v: np.ndarray, model: ModelSpec) -> np.ndarray:
    """Pentadiagonal Jacobian in scipy.linalg.solve_banded layout (l=u=2).

    Interleaved ordering keeps the stencil couplings at offsets +-2 and the
    local kinetic couplings at +-1; mirror boundary rows double the single
    inward coefficient.
    """
    n = u.size
    h = model.grid.spacing[0]
    ih2 = 1.0 / (h * h)
    b, r, mu = model.params.b, model.params.r, model.params.mu
    a = model.a.values
    d1 = model.d1.values
    d2 = model.d2.values

    fu = a - 2.0 * u - b * v / (1.0 + r * u) ** 2
    fv = -b * u / (1.0 + r * u)
    gu = mu * v ** 2 / u ** 2
    gv = mu * (1.0 - 2.0 * v / u)

    right1 = d1 * ih2
    right1 = right1.copy()
    right1[0] *= 2.0
    left1 = d1 * ih2
    left1 = left1.copy()
    left1[-1] *= 2.0
    right2 = d2 * ih2
    right2 = right2.copy()
    right2[0] *= 2.0
    left2 = d2 * ih2
    left2 = left2.copy()
    left2[-1] *= 2.0

    ab = np.zeros((5, 2 * n))
    ab[2, 0::2] = -2.0 * d1 * ih2 + fu
    ab[2, 1::2] = -2.0 * d2 * ih2 + gv
    ab[1, 1::2] = fv            # d(u-eq)/dv at the same node
    ab[3, 0:2 * n - 1:2] = gu   # d(v-eq)/du at the same node
    ab[0, 2::2] = right1[:-1]   # u_i -> u_{i+1}
    ab[0, 3::2] = right2[:-1]   # v_i -> v_{i+1}
    ab[4, 0:2 * (n - 1):2] = left1[1:]   # u_{i+1} -> u_i
    ab[4, 1:2 * (n - 1):2] = left2[1:]   # v_{i+1} -> v_i
    return ab


def steady_newton_1d(model: ModelSpec, initial: State | None = None,
                     tol: float = 1e-10, max_iter: int = 25) -> SteadyResult:
    """Damped Newton on the 1-D steady system with analytic banded Jacobian.

    Each step solves J delta = -F and halves the step (up to 30 times) until
    the iterate stays strictly positive and the residual decreases.  Raises
    :class:`NewtonFallback` when the linear solve fails, damping is
    exhausted, or the iteration budget runs out; callers should fall back to
    :func:`steady_by_relaxation`.
    """
    if model.grid.dim != 1:
        raise ValidationError("steady_newton_1d requires a 1-D grid")
    if initial is None:
        initial = default_initial(model)
    if not initial.strictly_positive():
        raise ValidationError("Newton needs a strictly positive initial state")

    u = np.array(initial.u.values)
    v = np.array(initial.v.values)
    res_vec = _newton_residual(u, v, model)
    res = float(np.abs(res_vec).max())
    update_norms: list[float] = []

    for it in range(max_iter):
        if res < tol:
            return SteadyResult(
                u_star=ScalarField(model.grid, u), v_star=ScalarField(model.grid, v),
                residual_sup=res, method="newton", iterations=it, converged=True,
                update_norms=tuple(update_norms))
        ab = _newton_jacobian_banded(u, v, model)
        try:
            delta = scipy.linalg.solve_banded((2, 2), ab, -res_vec)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise NewtonFallback(f"banded solve failed: {exc}") from exc
        if not np.all(np.isfinite(delta)):
            raise NewtonFallback("banded solve produced non-finite update")
        du = delta[0::2]
        dv = delta[1::2]

        lam = 1.0
        for _ in range(31):
            u_new = u + lam * du
            v_new = v + lam * dv
            if u_new.min() > 0.0 and v_new.min() > 0.0:
                new_vec = _newton_residual(u_new, v_new, model)
                new_res = float(np.abs(new_vec).max())
                if new_res < res:
                    break
            lam *= 0.5
        else:
            raise NewtonFallback(
                f"damping exhausted at iteration {it} (residual {res}); "
                "fall back to relaxation")
        update_norms.append(float(lam * np.abs(delta).max()))
        u, v, res_vec, res = u_new, v_new, new_vec, new_res

    if res < tol:
        return SteadyResult(
            u_star=ScalarField(model.grid, u), v_star=ScalarField(model.grid, v),
            residual_sup=res, method="newton", iterations=max_iter, converged=True,
            update_norms=tuple(update_norms))
    raise NewtonFallback(
        f"no convergence in {max_iter} Newton iterations (residual {res}); "
        "fall back to relaxation")


def check_containment(result: SteadyResult, q: BoundQuadruple,
                      slack: float = 0.0) -> tuple[bool, float]:
    """Verify the steady state sits in the bound box; returns (ok, worst).

    ``worst`` is the largest exceedance over the four box faces (0 when the
    state is strictly inside).
    """
    u, v = result.u_star.values, result.v_star.values
    worst = max(
        q.u_lo - float(u.min()),
        float(u.max()) - q.u_hi,
        q.v_lo - float(v.min()),
        float(v.max()) - q.v_hi,
        0.0,
    )
    return worst <= slack, worst
