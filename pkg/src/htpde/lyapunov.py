"""Lyapunov functional, discriminant monitoring, and the Green-type identity.

The convergence analysis rests on the weighted functional

    G(t) = int (u*/d1) [ (u - u*) - u* log(u/u*) ] dx
         + eta int (v*/d2) [ (v - v*) - v* log(v/v*) ] dx

with reference steady state (u*, v*).  Along trajectories its derivative is
controlled by a quadratic form E = A (u-u*)^2 + B (u-u*)(v-v*) + C (v-v*)^2
per node; G decreases wherever E is negative definite, i.e. A < 0, C < 0 and
2 sqrt(A C) > |B|.  This module evaluates G and the nodewise discriminant
margin 2 sqrt(A C) - |B| on recorded trajectories, plus the discrete analogue
of the integral inequality

    int (w* (w - w*) / w) (lap w - (w/w*) lap w*) dx
        <= - int w^2 |grad(w*/w)|^2 dx

that makes the diffusion terms sign-correct under no-flux boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .bounds import BoundQuadruple
from .errors import PositivityError, ValidationError
from .model import Grid, KineticParams, ModelSpec, ScalarField, State
from .pde import SimulationTrace

__all__ = [
    "LyapunovConfig",
    "DiscriminantReport",
    "MonitorReport",
    "eta_default",
    "lyapunov_value",
    "discriminant_margin",
    "monitor_decrease",
    "green_inequality_check",
]


def eta_default(q: BoundQuadruple, d_extremes, params: KineticParams) -> float:
    """Default weight for the predator term, built from the bound box.

    eta = sqrt( d2_min d2_max u_lo u_hi u_lo^3 u_hi
                / (d1_min d1_max v_lo v_hi^3) ) * b / (mu (1 + r u_lo)).

    For the homogeneous box (u_lo = u_hi = v_lo = v_hi = w) this collapses to
    sqrt(d2_min d2_max / (d1_min d1_max)) * w * b / (mu (1 + r w)).
    """
    (d1_min, d1_max), (d2_min, d2_max) = d_extremes
    if not (0.0 < d1_min <= d1_max and 0.0 < d2_min <= d2_max):
        raise ValidationError(f"diffusivity extremes out of order: {d_extremes}")
    num = d2_min * d2_max * q.u_lo * q.u_hi * q.u_lo ** 3 * q.u_hi
    den = d1_min * d1_max * q.v_lo * q.v_hi ** 3
    return float(np.sqrt(num / den) * params.b / (params.mu * (1.0 + params.r * q.u_lo)))


def _ref_state(reference) -> State:
    if isinstance(reference, State):
        return reference
    if hasattr(reference, "u_star") and hasattr(reference, "v_star"):
        return State(reference.u_star, reference.v_star, 0.0)
    raise ValidationError(
        "reference must be a State or a steady result with u_star/v_star")


@dataclass(frozen=True)
class LyapunovConfig:
    """Weight and reference state defining one functional G.

    ``reference`` may be a State or any object with u_star/v_star fields; it
    is normalized to a State.  Both invariants are enforced at construction:
    eta > 0 and the reference strictly positive node-wise.
    """

    eta: float
    reference: State

    def __post_init__(self):
        if not self.eta > 0.0:
            raise ValidationError(f"eta must be strictly positive, got {self.eta}")
        ref = _ref_state(self.reference)
        object.__setattr__(self, "reference", ref)
        for name, arr in (("u", ref.u.values), ("v", ref.v.values)):
            if arr.min() <= 0.0:
                node = int(np.argmax(arr.ravel() <= 0.0))
                raise ValidationError(
                    f"reference {name} must be strictly positive everywhere "
                    f"(value {arr.min()} at node {node})")

    def value(self, state: State, model: ModelSpec) -> float:
        return lyapunov_value(state, self.reference, model, self.eta)

    def margin(self, state: State, model: ModelSpec) -> "DiscriminantReport":
        return discriminant_margin(state, self.reference, model, self.eta)

    def monitor(self, trace: SimulationTrace, model: ModelSpec,
                t_start: float = 0.0, tol: float = 1e-10) -> "MonitorReport":
        return monitor_decrease(trace, self.reference, model, self.eta,
                                t_start=t_start, tol=tol)


def lyapunov_value(state: State, reference, model: ModelSpec, eta: float) -> float:
    """Evaluate G at a state (trapezoid quadrature on the model grid).

    All four densities must be strictly positive (the integrand contains
    log u and log v).  G >= 0 with equality exactly at the reference.
    """
    ref = _ref_state(reference)
    u, v = state.u.values, state.v.values
    us, vs = ref.u.values, ref.v.values
    for name, arr in (("u", u), ("v", v), ("u_star", us), ("v_star", vs)):
        if arr.min() <= 0.0:
            raise PositivityError(f"lyapunov_value: {name} must be strictly positive",
                                  node=int(np.argmax(arr.ravel() <= 0.0)))
    wq = model.grid.quadrature_weights()
    term_u = (us / model.d1.values) * ((u - us) - us * np.log(u / us))
    term_v = (vs / model.d2.values) * ((v - vs) - vs * np.log(v / vs))
    return float(np.sum(wq * (term_u + eta * term_v)))


@dataclass(frozen=True)
class DiscriminantReport:
    """Nodewise quadratic-form coefficients and definiteness margin."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    margin: np.ndarray
    min_margin: float
    argmin_node: int
    negative_definite: bool


def discriminant_margin(state: State, reference, model: ModelSpec,
                        eta: float) -> DiscriminantReport:
    """Definiteness margin 2 sqrt(A C) - |B| of the derivative form, per node.

    With s = (1 + r u)(1 + r u*):

        A = -d2 u u*^2 (s - b r v*)
        C = -d1 eta mu u* v* s
        B = -b d2 u u*^2 (1 + r u*) + d1 eta mu v*^2 s

    The margin is -inf (and the report is flagged) wherever A or C fails to
    be negative, since the form cannot be negative definite there.
    """
    ref = _ref_state(reference)
    u = state.u.values
    us, vs = ref.u.values, ref.v.values
    b, r, mu = model.params.b, model.params.r, model.params.mu
    d1, d2 = model.d1.values, model.d2.values
    s = (1.0 + r * u) * (1.0 + r * us)
    A = -d2 * u * us ** 2 * (s - b * r * vs)
    C = -d1 * eta * mu * us * vs * s
    B = -b * d2 * u * us ** 2 * (1.0 + r * us) + d1 * eta * mu * vs ** 2 * s
    ok = (A < 0.0) & (C < 0.0)
    with np.errstate(invalid="ignore"):
        margin = np.where(ok, 2.0 * np.sqrt(np.abs(A * C)) - np.abs(B), -np.inf)
    flat = margin.ravel()
    arg = int(np.argmin(flat))
    return DiscriminantReport(
        A=A, B=B, C=C, margin=margin, min_margin=float(flat[arg]),
        argmin_node=arg, negative_definite=bool(ok.all() and flat[arg] > 0.0))


@dataclass(frozen=True)
class MonitorReport:
    """G and discriminant diagnostics over the records of one trace.

    ``dG`` holds consecutive differences (first entry 0).  ``nonincreasing``
    is true when no difference exceeds ``tol``.  Margin statistics are per
    record (min over nodes) plus the global worst case.
    """

    times: np.ndarray
    G: np.ndarray
    dG: np.ndarray
    margin_min: np.ndarray
    margin_argmin: np.ndarray
    max_increase: float
    nonincreasing: bool
    min_margin: float
    min_margin_node: int
    min_margin_time: float
    eta: float
    t_start: float

    def rows(self):
        """Rows (t, G, dG, min_margin, min_margin_node) for the CSV export."""
        for k in range(self.times.size):
            yield (self.times[k], self.G[k], self.dG[k],
                   self.margin_min[k], int(self.margin_argmin[k]))


def monitor_decrease(trace: SimulationTrace, reference, model: ModelSpec,
                     eta: float, t_start: float = 0.0,
                     tol: float = 1e-10) -> MonitorReport:
    """Check G-decrease and discriminant negativity along recorded states.

    Only records with t >= t_start participate (pass the box entry time to
    monitor the regime where the theory applies).  Requires the trace to have
    stored states.
    """
    if not trace.states:
        raise ValidationError("monitor_decrease needs a trace with stored states")
    ref = _ref_state(reference)
    picked = [(t, st) for t, st in zip(trace.times, trace.states) if t >= t_start]
    if len(picked) < 2:
        raise ValidationError(
            f"need at least 2 records at t >= {t_start}, have {len(picked)}")

    times = np.array([t for t, _ in picked])
    G = np.empty(times.size)
    margin_min = np.empty(times.size)
    margin_argmin = np.empty(times.size, dtype=int)
    for k, (_, st) in enumerate(picked):
        G[k] = lyapunov_value(st, ref, model, eta)
        rep = discriminant_margin(st, ref, model, eta)
        margin_min[k] = rep.min_margin
        margin_argmin[k] = rep.argmin_node
    dG = np.zeros_like(G)
    dG[1:] = np.diff(G)
    max_increase = float(dG.max(initial=0.0))
    worst = int(np.argmin(margin_min))
    return MonitorReport(
        times=times, G=G, dG=dG, margin_min=margin_min, margin_argmin=margin_argmin,
        max_increase=max_increase, nonincreasing=max_increase <= tol,
        min_margin=float(margin_min[worst]), min_margin_node=int(margin_argmin[worst]),
        min_margin_time=float(times[worst]), eta=eta, t_start=t_start)


def _grad_sq(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Squared gradient magnitude, central differences, mirror boundaries.

    The mirror ghost makes the boundary-normal derivative vanish, matching
    the Laplacian's boundary convention.
    """
    out = np.zeros(grid.shape)
    h = grid.spacing
    if grid.dim == 1:
        g = np.zeros(grid.shape)
        g[1:-1] = (values[2:] - values[:-2]) / (2.0 * h[0])
        return g * g
    g0 = np.zeros(grid.shape)
    g0[1:-1, :] = (values[2:, :] - values[:-2, :]) / (2.0 * h[0])
    g1 = np.zeros(grid.shape)
    g1[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2.0 * h[1])
    out = g0 * g0 + g1 * g1
    return out


def green_inequality_check(w: ScalarField, w_star: ScalarField) -> tuple[float, float]:
    """Discrete sides (lhs, rhs) of the Green-type inequality.

    lhs = int (w* (w - w*) / w) (lap w - (w/w*) lap w*) dx,
    rhs = -int w^2 |grad(w*/w)|^2 dx,

    both with the module's mirror stencils and trapezoid quadrature.  In the
    continuum lhs = rhs for smooth no-flux pairs, so the discrete defect
    lhs - rhs is O(h^2); rhs <= 0 always.
    """
    grid = w.grid
    if w_star.grid != grid:
        raise ValidationError("green_inequality_check: grid mismatch")
    wv, sv = w.values, w_star.values
    if wv.min() <= 0.0 or sv.min() <= 0.0:
        raise ValidationError("green_inequality_check: fields must be positive")
    lap_w = np.empty(grid.shape)
    lap_s = np.empty(grid.shape)
    if grid.dim == 1:
        kernels.lap1d(wv, grid.spacing[0], lap_w)
        kernels.lap1d(sv, grid.spacing[0], lap_s)
    else:
        kernels.lap2d(wv, grid.spacing[0], grid.spacing[1], lap_w)
        kernels.lap2d(sv, grid.spacing[0], grid.spacing[1], lap_s)
    wq = grid.quadrature_weights()
    lhs = float(np.sum(wq * (sv * (wv - sv) / wv) * (lap_w - (wv / sv) * lap_s)))
    rhs = float(-np.sum(wq * wv ** 2 * _grad_sq(sv / wv, grid)))
    return lhs, rhs
