"""Spatial discretization and explicit time stepping.

Space: second-order central Laplacian on the uniform grid with the no-flux
boundary realized by mirror ghost nodes, applied in non-divergence form
d(x) * lap(w).  Time: method of lines with classical RK4 (default) or
explicit Euler under the diffusive CFL bound

    dt <= 0.9 * h_min^2 / (2 * dim * max(d1, d2)).

Positivity is enforced, not repaired: the stepper aborts with the offending
node the moment a density leaves the admissible region.  The hot loops are
delegated to the selected kernel backend (compiled or NumPy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .bounds import BoundQuadruple
from .errors import ConvergenceError, PositivityError, ValidationError
from .model import Grid, ModelSpec, ScalarField, State

__all__ = [
    "StepperConfig",
    "SimulationTrace",
    "cfl_limit",
    "laplacian_neumann",
    "rhs",
    "step",
    "simulate",
    "box_entry_time",
    "export_trace_csv",
    "export_snapshots",
    "write_field_csv",
]

SCHEMES = ("explicit-rk4", "explicit-euler")
_SCHEME_CODE = {"explicit-euler": 0, "explicit-rk4": 1}


@dataclass(frozen=True)
class StepperConfig:
    """Time-stepping configuration.

    ``dt = None`` resolves to the CFL-safe step for the given model; an
    explicit dt above the CFL bound is rejected, never silently clipped.
    ``record_every`` is the record stride in steps.
    """

    t_end: float
    dt: float | None = None
    record_every: int = 1
    scheme: str = "explicit-rk4"

    def __post_init__(self):
        if not (self.t_end > 0.0 and math.isfinite(self.t_end)):
            raise ValidationError(f"t_end must be positive finite, got {self.t_end}")
        if self.dt is not None and not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValidationError(f"dt must be positive finite, got {self.dt}")
        if int(self.record_every) < 1:
            raise ValidationError(f"record_every must be >= 1, got {self.record_every}")
        object.__setattr__(self, "record_every", int(self.record_every))
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")


@dataclass
class SimulationTrace:
    """Recorded history of a run.

    Scalar statistics are recorded at every record time; full states are kept
    only when the run was asked to store them (they back the Lyapunov
    monitoring and the snapshot export).
    """

    grid: Grid
    scheme: str
    dt: float
    times: np.ndarray
    u_min: np.ndarray
    u_max: np.ndarray
    v_min: np.ndarray
    v_max: np.ndarray
    rhs_sup: np.ndarray
    final_state: State
    states: list[State] = field(default_factory=list)
    extras: dict[str, np.ndarray] = field(default_factory=dict)

    def n_records(self) -> int:
        return len(self.times)


def cfl_limit(model: ModelSpec) -> float:
    """Largest admissible dt: 0.9 h_min^2 / (2 dim max(d1, d2))."""
    d_max = max(model.d1.max(), model.d2.max())
    h_min = model.grid.min_spacing
    return 0.9 * h_min * h_min / (2.0 * model.grid.dim * d_max)


def _resolve_steps(stepper: StepperConfig, model: ModelSpec) -> tuple[float, int]:
    limit = cfl_limit(model)
    dt0 = limit if stepper.dt is None else float(stepper.dt)
    if dt0 > limit * (1.0 + 1e-9):
        raise ValidationError(
            f"dt = {dt0} violates the diffusive CFL bound {limit:.6e} "
            f"(0.9 h_min^2 / (2 dim d_max)); reduce dt or refine in time only")
    n = max(1, math.ceil(stepper.t_end / dt0 - 1e-9))
    return stepper.t_end / n, n


def laplacian_neumann(fld: ScalarField, grid: Grid | None = None) -> ScalarField:
    """Mirror-boundary Laplacian of a field (second order everywhere)."""
    g = fld.grid
    if grid is not None and grid != g:
        raise ValidationError("laplacian_neumann: grid mismatch")
    out = np.empty(g.shape)
    if g.dim == 1:
        kernels.lap1d(fld.values, g.spacing[0], out)
    else:
        kernels.lap2d(fld.values, g.spacing[0], g.spacing[1], out)
    return ScalarField(g, out)


def _rhs_arrays(u, v, model: ModelSpec, du, dv) -> int:
    g = model.grid
    if g.dim == 1:
        return kernels.rhs1d(u, v, model.a.values, model.d1.values, model.d2.values,
                             model.params.b, model.params.r, model.params.mu,
                             g.spacing[0], du, dv)
    return kernels.rhs2d(u, v, model.a.values, model.d1.values, model.d2.values,
                         model.params.b, model.params.r, model.params.mu,
                         g.spacing[0], g.spacing[1], du, dv)


def rhs(state: State, model: ModelSpec) -> tuple[ScalarField, ScalarField]:
    """Semi-discrete right-hand side (du/dt, dv/dt) at a state."""
    if state.grid != model.grid:
        raise ValidationError("rhs: state grid does not match model grid")
    du = np.empty(model.grid.shape)
    dv = np.empty(model.grid.shape)
    bad = _rhs_arrays(state.u.values, state.v.values, model, du, dv)
    if bad >= 0:
        raise PositivityError(
            f"rhs undefined: u <= 0 with v != 0 at node {bad}", node=int(bad), t=state.t)
    return ScalarField(model.grid, du), ScalarField(model.grid, dv)


def _advance(u, v, model: ModelSpec, dt: float, nsteps: int, scheme: str):
    g = model.grid
    code = _SCHEME_CODE[scheme]
    if g.dim == 1:
        return kernels.step_many_1d(u, v, model.a.values, model.d1.values,
                                    model.d2.values, model.params.b, model.params.r,
                                    model.params.mu, g.spacing[0], dt, nsteps, code)
    return kernels.step_many_2d(u, v, model.a.values, model.d1.values,
                                model.d2.values, model.params.b, model.params.r,
                                model.params.mu, g.spacing[0], g.spacing[1],
                                dt, nsteps, code)


def step(state: State, model: ModelSpec, stepper: StepperConfig) -> State:
    """Advance one step of stepper.dt (or the CFL-safe dt).  Pure."""
    if state.grid != model.grid:
        raise ValidationError("step: state grid does not match model grid")
    limit = cfl_limit(model)
    dt = limit if stepper.dt is None else float(stepper.dt)
    if dt > limit * (1.0 + 1e-9):
        raise ValidationError(
            f"dt = {dt} violates the diffusive CFL bound {limit:.6e}")
    u = np.array(state.u.values)
    v = np.array(state.v.values)
    bad, _ = _advance(u, v, model, dt, 1, stepper.scheme)
    if bad >= 0:
        raise PositivityError(
            f"positivity lost at node {bad} during step from t = {state.t}",
            node=int(bad), t=state.t, suggested_dt=0.5 * dt)
    return State.from_arrays(model.grid, u, v, state.t + dt)


def simulate(model: ModelSpec, initial: State, stepper: StepperConfig,
             observers=(), stop_when=None, store_states: bool = True,
             ) -> SimulationTrace:
    """Integrate to t_end, recording every ``record_every`` steps.

    ``observers`` are callables State -> dict of scalar diagnostics, merged
    into ``trace.extras``.  ``stop_when`` (State -> bool) is evaluated at
    record times and ends the run early when true (used by the relaxation
    steady solver).  Aborts with :class:`PositivityError` the moment a
    density leaves the admissible region, with :class:`ConvergenceError` on
    non-finite values.
    """
    if initial.grid != model.grid:
        raise ValidationError("simulate: initial state grid does not match model grid")
    dt, n_steps = _resolve_steps(stepper, model)
    u = np.array(initial.u.values)
    v = np.array(initial.v.values)
    du = np.empty_like(u)
    dv = np.empty_like(v)

    times: list[float] = []
    stats: list[tuple[float, float, float, float, float]] = []
    states: list[State] = []
    extras: dict[str, list[float]] = {}

    def record(t: float) -> bool:
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            raise ConvergenceError(
                f"non-finite values at t = {t}; the integration became unstable")
        bad = _rhs_arrays(u, v, model, du, dv)
        if bad >= 0:
            raise PositivityError(
                f"rhs undefined at node {bad}, t = {t}", node=int(bad), t=t,
                suggested_dt=0.5 * dt)
        state = State.from_arrays(model.grid, u, v, t)
        if store_states:
            states.append(state)
        times.append(t)
        stats.append((float(u.min()), float(u.max()), float(v.min()), float(v.max()),
                      float(max(np.abs(du).max(), np.abs(dv).max()))))
        for obs in observers:
            for key, val in obs(state).items():
                extras.setdefault(key, []).append(float(val))
        return bool(stop_when(state)) if stop_when is not None else False

    stopped = record(initial.t)
    done = 0
    while not stopped and done < n_steps:
        take = min(stepper.record_every, n_steps - done)
        bad, advanced = _advance(u, v, model, dt, take, stepper.scheme)
        if bad >= 0:
            t_fail = initial.t + (done + advanced) * dt
            raise PositivityError(
                f"positivity lost at node {bad}, t = {t_fail}; retry with a smaller dt",
                node=int(bad), t=t_fail, suggested_dt=0.5 * dt)
        done += take
        stopped = record(initial.t + done * dt)

    arr = np.asarray(stats)
    final = State.from_arrays(model.grid, u, v, float(times[-1]))
    return SimulationTrace(
        grid=model.grid, scheme=stepper.scheme, dt=dt,
        times=np.asarray(times), u_min=arr[:, 0], u_max=arr[:, 1],
        v_min=arr[:, 2], v_max=arr[:, 3], rhs_sup=arr[:, 4], final_state=final,
        states=states, extras={k: np.asarray(vs) for k, vs in extras.items()})


def box_entry_time(trace: SimulationTrace, q: BoundQuadruple,
                   slack: float = 0.0) -> float | None:
    """First record time from which the run stays inside the bound box.

    Permanence is part of the definition: the returned time starts the
    maximal all-inside suffix of the records; None if the final record is
    still outside the slack-widened box.
    """
    inside = [q.contains(trace.u_min[k], trace.u_max[k], trace.v_min[k],
                         trace.v_max[k], slack)
              for k in range(trace.n_records())]
    if not inside[-1]:
        return None
    k = trace.n_records() - 1
    while k > 0 and inside[k - 1]:
        k -= 1
    return float(trace.times[k])


def export_trace_csv(trace: SimulationTrace, path) -> None:
    """Write the scalar trace table (17 significant digits per value)."""
    keys = sorted(trace.extras)
    header = "t,u_min,u_max,v_min,v_max,rhs_sup" + "".join("," + k for k in keys)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for k in range(trace.n_records()):
            row = [trace.times[k], trace.u_min[k], trace.u_max[k],
                   trace.v_min[k], trace.v_max[k], trace.rhs_sup[k]]
            row += [trace.extras[key][k] for key in keys]
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def write_field_csv(values: np.ndarray, path) -> None:
    """Write a field as a CSV matrix (1-D fields become a single row)."""
    np.savetxt(path, np.atleast_2d(values), fmt="%.17g", delimiter=",")


def export_snapshots(trace: SimulationTrace, out_dir, prefix: str) -> list[str]:
    """Write one u and one v CSV matrix per stored record; returns the paths."""
    import os

    if not trace.states:
        raise ValidationError("trace did not store states; nothing to export")
    paths = []
    for idx, st in enumerate(trace.states):
        for name, fld in (("u", st.u), ("v", st.v)):
            p = os.path.join(out_dir, f"{prefix}_{name}_{idx}.csv")
            write_field_csv(fld.values, p)
            paths.append(p)
    return paths
