"""Command-line interface.

Subcommands (each takes ``--config <path>``, an INI file with flat
``key = value`` sections, and most take ``--out <dir>``):

* ``bounds``    attractor box via both routes (scalar root and monotone
                iteration) with agreement diagnostics
* ``check``     hypothesis and stability condition verdicts as JSON
* ``simulate``  time integration; trace CSV, snapshot CSVs, box entry time
* ``steady``    steady state (relaxation, optionally Newton in 1-D) with
                containment verdict
* ``lyapunov``  trajectory + reference + G/discriminant monitoring CSV
* ``scan``      one-axis parameter sweep (``--axis``, ``--values``)

Exit codes: 0 success, 2 the standing hypothesis b < a_min/a_max fails,
3 numerical failure (non-convergence, positivity loss), 4 invalid
configuration or arguments.  Floats are printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys

import numpy as np

from . import bounds, lyapunov, pde, steady
from .backend import BACKEND
from .errors import (ConvergenceError, HypothesisError, NewtonFallback,
                     PositivityError, ValidationError)
from .model import (CoefficientSpec, Grid, KineticParams, ModelSpec, ScalarField,
                    State, build_coefficient)

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4

SCHEME_ALIASES = {
    "rk4": "explicit-rk4",
    "euler": "explicit-euler",
    "explicit-rk4": "explicit-rk4",
    "explicit-euler": "explicit-euler",
}


def _f17(x) -> str:
    return f"{float(x):.17g}"


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as config errors (exit 4)."""

    def error(self, message):
        raise ValidationError(message)


# ---------------------------------------------------------------- config

def _load(path: str) -> configparser.ConfigParser:
    if not os.path.isfile(path):
        raise ValidationError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ValidationError(f"cannot parse config: {exc}") from exc
    return cp


def _get(cp, section: str, key: str, default=None, cast=str):
    if not cp.has_option(section, key):
        if default is None:
            raise ValidationError(f"missing config value [{section}] {key}")
        return default
    raw = cp.get(section, key).strip()
    try:
        return cast(raw)
    except ValueError as exc:
        raise ValidationError(f"bad config value [{section}] {key} = {raw!r}") from exc


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(" ", "").split(",") if tok)


def _ints(raw: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in raw.replace(" ", "").split(",") if tok)


def _parse_grid(cp) -> Grid:
    extents = _get(cp, "grid", "extents", cast=_floats)
    counts = _get(cp, "grid", "counts", cast=_ints)
    if cp.has_option("grid", "dim"):
        dim = _get(cp, "grid", "dim", cast=int)
        if dim != len(extents):
            raise ValidationError(
                f"[grid] dim = {dim} disagrees with {len(extents)} extents")
    return Grid(extents=extents, counts=counts)


def _parse_params(cp) -> KineticParams:
    return KineticParams(
        b=_get(cp, "model", "b", cast=float),
        r=_get(cp, "model", "r", cast=float),
        mu=_get(cp, "model", "mu", cast=float),
    )


def _read_table(path: str) -> np.ndarray:
    if not os.path.isfile(path):
        raise ValidationError(f"tabulated field file not found: {path}")
    return np.loadtxt(path, delimiter=",", ndmin=2)


def _parse_coefficient(cp, section: str, grid: Grid,
                       default_value: float | None = None) -> ScalarField:
    if not cp.has_section(section):
        if default_value is None:
            raise ValidationError(f"missing config section [{section}]")
        return build_coefficient(CoefficientSpec.constant(default_value), grid)
    kind = _get(cp, section, "kind", default="constant")
    if kind == "constant":
        spec = CoefficientSpec.constant(_get(cp, section, "value", cast=float))
    elif kind == "cosine":
        modes = _get(cp, section, "modes", default=(1,) * grid.dim, cast=_ints)
        spec = CoefficientSpec.cosine(
            c0=_get(cp, section, "c0", cast=float),
            c1=_get(cp, section, "c1", cast=float),
            modes=modes)
    elif kind == "tabulated":
        if cp.has_option(section, "file"):
            vals = _read_table(cp.get(section, "file").strip())
        else:
            vals = np.asarray(_get(cp, section, "values", cast=_floats))
        spec = CoefficientSpec.tabulated(vals)
    else:
        raise ValidationError(f"[{section}] kind must be constant/cosine/tabulated, "
                              f"got {kind!r}")
    return build_coefficient(spec, grid)


def _build_model(cp) -> ModelSpec:
    grid = _parse_grid(cp)
    return ModelSpec(
        params=_parse_params(cp),
        a=_parse_coefficient(cp, "a", grid),
        d1=_parse_coefficient(cp, "d1", grid, default_value=1.0),
        d2=_parse_coefficient(cp, "d2", grid, default_value=1.0),
    )


def _quadruple(cp, model: ModelSpec) -> bounds.BoundQuadruple:
    a_min, a_max = model.a_extremes
    tol = _get(cp, "solver", "tol", default=1e-12, cast=float) \
        if cp.has_section("solver") else 1e-12
    return bounds.solve_quadruple(a_min, a_max, model.params, tol=tol)


def _parse_initial(cp, model: ModelSpec) -> State:
    grid = model.grid
    if not cp.has_section("init"):
        mid_state = steady.default_initial(model)
        return mid_state
    kind = _get(cp, "init", "kind", default="constant")
    if kind == "constant":
        if cp.has_option("init", "u0"):
            u0 = _get(cp, "init", "u0", cast=float)
            v0 = _get(cp, "init", "v0", default=u0, cast=float)
            return State.constant(grid, u0, v0)
        return steady.default_initial(model)
    if kind == "cosine":
        modes = _get(cp, "init", "modes", default=(1,) * grid.dim, cast=_ints)
        u = build_coefficient(CoefficientSpec.cosine(
            _get(cp, "init", "u_base", cast=float),
            _get(cp, "init", "u_amp", cast=float), modes), grid)
        v = build_coefficient(CoefficientSpec.cosine(
            _get(cp, "init", "v_base", cast=float),
            _get(cp, "init", "v_amp", cast=float), modes), grid)
        return State(u, v, 0.0)
    if kind == "random":
        u_lo = _get(cp, "init", "u_min", cast=float)
        u_hi = _get(cp, "init", "u_max", cast=float)
        v_lo = _get(cp, "init", "v_min", default=u_lo, cast=float)
        v_hi = _get(cp, "init", "v_max", default=u_hi, cast=float)
        seed = _get(cp, "init", "seed", default=12345, cast=int)
        rng = np.random.default_rng(seed)
        return State.from_arrays(grid, rng.uniform(u_lo, u_hi, grid.shape),
                                 rng.uniform(v_lo, v_hi, grid.shape))
    if kind == "tabulated":
        u = _read_table(_get(cp, "init", "u_file"))
        v = _read_table(_get(cp, "init", "v_file"))
        return State.from_arrays(grid, u.reshape(grid.shape), v.reshape(grid.shape))
    raise ValidationError(f"[init] kind must be constant/cosine/random/tabulated, "
                          f"got {kind!r}")


def _parse_stepper(cp) -> pde.StepperConfig:
    if not cp.has_section("stepper"):
        raise ValidationError("missing config section [stepper]")
    raw_dt = _get(cp, "stepper", "dt", default="auto")
    dt = None if str(raw_dt).strip().lower() == "auto" else float(raw_dt)
    scheme_raw = _get(cp, "stepper", "scheme", default="rk4").lower()
    if scheme_raw not in SCHEME_ALIASES:
        raise ValidationError(f"[stepper] scheme must be one of {sorted(SCHEME_ALIASES)}")
    return pde.StepperConfig(
        t_end=_get(cp, "stepper", "t_end", cast=float),
        dt=dt,
        record_every=_get(cp, "stepper", "record_every", default=1, cast=int),
        scheme=SCHEME_ALIASES[scheme_raw],
    )


def _solver_opt(cp, key: str, default: float, cast=float):
    if cp.has_section("solver") and cp.has_option("solver", key):
        return _get(cp, "solver", key, cast=cast)
    return default


def _out_dir(args) -> str:
    out = args.out
    if out is None:
        raise ValidationError("this subcommand requires --out <dir>")
    os.makedirs(out, exist_ok=True)
    return out


def _prefix(cp) -> str:
    if cp.has_section("output") and cp.has_option("output", "prefix"):
        return cp.get("output", "prefix").strip()
    return "run"


def _write_json(payload: dict, out: str | None, name: str) -> None:
    if out is not None:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, name), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------- commands

def cmd_bounds(args) -> int:
    cp = _load(args.config)
    model = _build_model(cp)
    a_min, a_max = model.a_extremes
    holds, margin = bounds.check_b_condition(a_min, a_max, model.params)
    print(f"a_min = {_f17(a_min)}  a_max = {_f17(a_max)}")
    print(f"condition b < a_min/a_max: {'holds' if holds else 'FAILS'} "
          f"(margin {_f17(margin)})")
    if not holds:
        raise HypothesisError(
            f"predation strength b = {model.params.b} violates the standing "
            f"hypothesis b < a_min/a_max = {_f17(a_min / a_max)}")

    tol = _solver_opt(cp, "tol", 1e-12)
    max_iter = int(_solver_opt(cp, "max_iter", 10_000_000, cast=int))
    q = bounds.solve_quadruple(a_min, a_max, model.params, tol=tol)
    q_it, trace = bounds.monotone_iteration(a_min, a_max, model.params,
                                            tol=tol, max_iter=max_iter)
    diff = max(abs(x - y) for x, y in zip(q.as_tuple(), q_it.as_tuple()))
    resids = bounds.quadruple_residuals(q, a_min, a_max, model.params)
    print(f"quadruple (root solve): u_lo = {_f17(q.u_lo)}  u_hi = {_f17(q.u_hi)}  "
          f"v_lo = {_f17(q.v_lo)}  v_hi = {_f17(q.v_hi)}")
    print(f"quadruple (iteration):  u_lo = {_f17(q_it.u_lo)}  u_hi = {_f17(q_it.u_hi)}  "
          f"v_lo = {_f17(q_it.v_lo)}  v_hi = {_f17(q_it.v_hi)}")
    print(f"route disagreement = {_f17(diff)}  "
          f"(iteration: {trace.n_iter} iterations, K = {_f17(trace.K)})")
    print("defining-equation residuals: "
          + "  ".join(_f17(x) for x in resids))
    _write_json({
        "a_min": a_min, "a_max": a_max,
        "condition_2_2": holds, "margin_2_2": margin,
        "quadruple": dict(zip(("u_lo", "u_hi", "v_lo", "v_hi"), q.as_tuple())),
        "quadruple_iteration": dict(zip(("u_lo", "u_hi", "v_lo", "v_hi"),
                                        q_it.as_tuple())),
        "route_disagreement": diff,
        "residuals": list(resids),
        "iteration": {"n_iter": trace.n_iter, "K": trace.K,
                      "eps1": trace.eps1, "eps2": trace.eps2},
    }, args.out, "bounds.json")
    return EXIT_OK


def _check_payload(cp, model: ModelSpec) -> dict:
    a_min, a_max = model.a_extremes
    holds, margin_22 = bounds.check_b_condition(a_min, a_max, model.params)
    if not holds:
        raise HypothesisError(
            f"predation strength b = {model.params.b} violates the standing "
            f"hypothesis b < a_min/a_max = {_f17(a_min / a_max)}")
    q = _quadruple(cp, model)
    d_ext = model.d_extremes
    ok46, margin46 = bounds.check_global_stability(q, d_ext, model.params, a_min)
    if cp.has_section("check") and cp.has_option("check", "M"):
        raw = cp.get("check", "M").strip().lower()
        M = max(q.u_hi / q.u_lo, 1.0) if raw == "auto" else float(raw)
    else:
        M = max(q.u_hi / q.u_lo, 1.0)
    ok466, margin466 = bounds.check_ratio_condition(M, d_ext, model.params, a_min)
    return {
        "condition_2_2": holds,
        "condition_4_6": ok46,
        "condition_4_66": ok466,
        "margins": {"2_2": margin_22, "4_6": margin46, "4_66": margin466},
        "rhs": {"4_6": margin46 + model.params.b, "4_66": margin466 + model.params.b},
        "M": M,
        "quadruple": dict(zip(("u_lo", "u_hi", "v_lo", "v_hi"), q.as_tuple())),
    }


def cmd_check(args) -> int:
    cp = _load(args.config)
    model = _build_model(cp)
    payload = _check_payload(cp, model)
    print(json.dumps(payload, indent=2, sort_keys=True))
    _write_json(payload, args.out, "check.json")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cp = _load(args.config)
    model = _build_model(cp)
    out = _out_dir(args)
    prefix = _prefix(cp)
    q = _quadruple(cp, model)
    initial = _parse_initial(cp, model)
    stepper = _parse_stepper(cp)
    trace = pde.simulate(model, initial, stepper)
    slack = _solver_opt(cp, "box_slack", 1e-3)
    entry = pde.box_entry_time(trace, q, slack=slack)
    trace_path = os.path.join(out, f"{prefix}_trace.csv")
    pde.export_trace_csv(trace, trace_path)
    snapshots = True
    if cp.has_section("output") and cp.has_option("output", "snapshots"):
        snapshots = cp.getboolean("output", "snapshots")
    if snapshots:
        pde.export_snapshots(trace, out, prefix)
    print(f"backend = {BACKEND}  scheme = {trace.scheme}  dt = {_f17(trace.dt)}  "
          f"records = {trace.n_records()}")
    print(f"final u in [{_f17(trace.u_min[-1])}, {_f17(trace.u_max[-1])}]  "
          f"v in [{_f17(trace.v_min[-1])}, {_f17(trace.v_max[-1])}]")
    print("box entry time = " + ("none" if entry is None else _f17(entry))
          + f"  (slack {_f17(slack)})")
    _write_json({
        "dt": trace.dt, "records": trace.n_records(),
        "box_entry_time": entry, "box_slack": slack,
        "quadruple": dict(zip(("u_lo", "u_hi", "v_lo", "v_hi"), q.as_tuple())),
        "trace_csv": trace_path,
    }, out, f"{prefix}_simulate.json")
    return EXIT_OK


def cmd_steady(args) -> int:
    cp = _load(args.config)
    model = _build_model(cp)
    out = _out_dir(args)
    prefix = _prefix(cp)
    q = _quadruple(cp, model)
    tol = _solver_opt(cp, "steady_tol", 1e-10)
    t_max = _solver_opt(cp, "t_max", 400.0)
    method = "relaxation"
    if cp.has_section("solver") and cp.has_option("solver", "method"):
        method = cp.get("solver", "method").strip().lower()
    if method not in ("relaxation", "newton"):
        raise ValidationError(f"[solver] method must be relaxation or newton, got {method!r}")
    initial = _parse_initial(cp, model) if cp.has_section("init") else None

    status = EXIT_OK
    if method == "newton":
        try:
            result = steady.steady_newton_1d(model, initial, tol=tol)
        except NewtonFallback as exc:
            print(f"newton fallback: {exc}; retrying with relaxation")
            method = "relaxation"
    if method == "relaxation":
        try:
            result = steady.steady_by_relaxation(model, initial, tol=tol, t_max=t_max)
        except ConvergenceError as exc:
            if exc.partial is None:
                raise
            result = exc.partial
            status = EXIT_NUMERICAL

    h2 = model.grid.min_spacing ** 2
    slack = 1e-6 + 10.0 * h2
    contained, worst = steady.check_containment(result, q, slack=slack)
    pde.write_field_csv(result.u_star.values, os.path.join(out, f"{prefix}_ustar.csv"))
    pde.write_field_csv(result.v_star.values, os.path.join(out, f"{prefix}_vstar.csv"))
    print(f"status = {'converged' if result.converged else 'not-converged'}  "
          f"method = {result.method}  iterations = {result.iterations}  "
          f"residual = {_f17(result.residual_sup)}")
    print(f"u_star in [{_f17(result.u_star.min())}, {_f17(result.u_star.max())}]")
    print(f"containment: {'ok' if contained else 'VIOLATED'} "
          f"(worst exceedance {_f17(worst)}, slack {_f17(slack)})")
    _write_json({
        "method": result.method, "iterations": result.iterations,
        "residual": result.residual_sup, "converged": result.converged,
        "status": "converged" if result.converged else "not-converged",
        "containment": contained, "containment_worst": worst,
        "containment_slack": slack,
        "grid": {"extents": list(model.grid.extents),
                 "counts": list(model.grid.counts)},
        "params": {"b": model.params.b, "r": model.params.r,
                   "mu": model.params.mu},
        "quadruple": dict(zip(("u_lo", "u_hi", "v_lo", "v_hi"), q.as_tuple())),
    }, out, f"{prefix}_steady.json")
    return status


def cmd_lyapunov(args) -> int:
    cp = _load(args.config)
    model = _build_model(cp)
    out = _out_dir(args)
    prefix = _prefix(cp)
    q = _quadruple(cp, model)
    initial = _parse_initial(cp, model)
    stepper = _parse_stepper(cp)
    trace = pde.simulate(model, initial, stepper)

    reference_kind = "steady"
    if cp.has_section("lyapunov") and cp.has_option("lyapunov", "reference"):
        reference_kind = cp.get("lyapunov", "reference").strip().lower()
    steady_tol = _solver_opt(cp, "steady_tol", 1e-10)
    t_max = _solver_opt(cp, "t_max", 400.0)
    if reference_kind == "steady":
        ref = steady.steady_by_relaxation(model, trace.final_state,
                                          tol=steady_tol, t_max=t_max).state
    elif reference_kind == "final":
        ref = trace.final_state
    else:
        raise ValidationError(f"[lyapunov] reference must be steady or final, "
                              f"got {reference_kind!r}")

    if cp.has_section("lyapunov") and cp.has_option("lyapunov", "eta"):
        raw = cp.get("lyapunov", "eta").strip().lower()
        eta = lyapunov.eta_default(q, model.d_extremes, model.params) \
            if raw == "auto" else float(raw)
    else:
        eta = lyapunov.eta_default(q, model.d_extremes, model.params)

    slack = _solver_opt(cp, "box_slack", 1e-3)
    entry = pde.box_entry_time(trace, q, slack=slack)
    if cp.has_section("lyapunov") and cp.has_option("lyapunov", "t_start"):
        raw = cp.get("lyapunov", "t_start").strip().lower()
        t_start = (entry if raw == "entry" else float(raw))
    else:
        t_start = entry
    if t_start is None:
        raise ConvergenceError(
            f"trajectory never entered the bound box (slack {slack}); "
            "extend t_end or loosen box_slack")

    monitor_tol = 1e-10
    if cp.has_section("lyapunov") and cp.has_option("lyapunov", "monitor_tol"):
        monitor_tol = _get(cp, "lyapunov", "monitor_tol", cast=float)
    report = lyapunov.monitor_decrease(trace, ref, model, eta,
                                       t_start=t_start, tol=monitor_tol)
    mon_path = os.path.join(out, f"{prefix}_monitor.csv")
    with open(mon_path, "w") as fh:
        fh.write("t,G,dG,min_margin,min_margin_node\n")
        for t, G, dG, mm, node in report.rows():
            fh.write(f"{t:.17g},{G:.17g},{dG:.17g},{mm:.17g},{node}\n")
    print(f"eta = {_f17(eta)}  t_start = {_f17(t_start)}  "
          f"records monitored = {report.times.size}")
    print(f"G nonincreasing (tol {_f17(monitor_tol)}): {report.nonincreasing}  "
          f"max increase = {_f17(report.max_increase)}")
    print(f"min discriminant margin = {_f17(report.min_margin)} at node "
          f"{report.min_margin_node}, t = {_f17(report.min_margin_time)}")
    _write_json({
        "eta": eta, "t_start": t_start, "monitor_tol": monitor_tol,
        "nonincreasing": report.nonincreasing,
        "max_increase": report.max_increase,
        "min_margin": report.min_margin,
        "min_margin_node": report.min_margin_node,
        "min_margin_time": report.min_margin_time,
        "monitor_csv": mon_path,
    }, out, f"{prefix}_lyapunov.json")
    return EXIT_OK


_SCAN_AXES = ("b", "r", "a_amplitude", "diffusion_contrast")


def _scan_model(cp, axis: str, value: float) -> ModelSpec:
    grid = _parse_grid(cp)
    params = _parse_params(cp)
    if axis == "b":
        params = KineticParams(b=value, r=params.r, mu=params.mu)
    elif axis == "r":
        params = KineticParams(b=params.b, r=value, mu=params.mu)

    a = _parse_coefficient(cp, "a", grid)
    if axis == "a_amplitude":
        if not (cp.has_section("a") and _get(cp, "a", "kind", default="constant") == "cosine"):
            raise ValidationError("scan axis a_amplitude requires [a] kind = cosine")
        modes = _get(cp, "a", "modes", default=(1,) * grid.dim, cast=_ints)
        a = build_coefficient(CoefficientSpec.cosine(
            c0=_get(cp, "a", "c0", cast=float), c1=value, modes=modes), grid)

    d1 = _parse_coefficient(cp, "d1", grid, default_value=1.0)
    d2 = _parse_coefficient(cp, "d2", grid, default_value=1.0)
    if axis == "diffusion_contrast":
        if value < 1.0:
            raise ValidationError("diffusion_contrast values must be >= 1")

        def _contrast(section: str, default_value: float) -> ScalarField:
            c0 = default_value
            if cp.has_section(section):
                kind = _get(cp, section, "kind", default="constant")
                if kind == "constant":
                    c0 = _get(cp, section, "value", default=default_value, cast=float)
                elif kind == "cosine":
                    c0 = _get(cp, section, "c0", cast=float)
                else:
                    raise ValidationError(
                        "scan axis diffusion_contrast requires constant or cosine d fields")
            c1 = c0 * (value - 1.0) / (value + 1.0)
            if c1 == 0.0:
                return build_coefficient(CoefficientSpec.constant(c0), grid)
            return build_coefficient(
                CoefficientSpec.cosine(c0=c0, c1=c1, modes=(1,) * grid.dim), grid)

        d1 = _contrast("d1", 1.0)
        d2 = _contrast("d2", 1.0)
    return ModelSpec(params=params, a=a, d1=d1, d2=d2)


def cmd_scan(args) -> int:
    cp = _load(args.config)
    out = _out_dir(args)
    prefix = _prefix(cp)
    if args.axis not in _SCAN_AXES:
        raise ValidationError(f"--axis must be one of {_SCAN_AXES}, got {args.axis!r}")
    values = _floats(args.values)
    if not values:
        raise ValidationError("--values must name at least one number")
    if any(v <= 0.0 for v in values):
        raise ValidationError("--values must all be positive")
    do_sim = cp.has_section("scan") and cp.has_option("scan", "simulate") \
        and cp.getboolean("scan", "simulate")

    header = ("value,a_min,a_max,cond_2_2,margin_2_2,u_lo,u_hi,v_lo,v_hi,"
              "cond_4_6,margin_4_6,cond_4_66,margin_4_66")
    if do_sim:
        header += ",entry_time"
    rows = []
    for value in values:
        model = _scan_model(cp, args.axis, value)
        a_min, a_max = model.a_extremes
        holds, margin22 = bounds.check_b_condition(a_min, a_max, model.params)
        if not holds:
            row = [_f17(value), _f17(a_min), _f17(a_max), "false", _f17(margin22)] \
                + ["nan"] * 4 + ["false", "nan", "false", "nan"]
            if do_sim:
                row.append("nan")
            rows.append(",".join(row))
            continue
        q = bounds.solve_quadruple(a_min, a_max, model.params)
        ok46, margin46 = bounds.check_global_stability(q, model.d_extremes,
                                                       model.params, a_min)
        M = max(q.u_hi / q.u_lo, 1.0)
        ok466, margin466 = bounds.check_ratio_condition(M, model.d_extremes,
                                                         model.params, a_min)
        row = [_f17(value), _f17(a_min), _f17(a_max), "true", _f17(margin22),
               _f17(q.u_lo), _f17(q.u_hi), _f17(q.v_lo), _f17(q.v_hi),
               "true" if ok46 else "false", _f17(margin46),
               "true" if ok466 else "false", _f17(margin466)]
        if do_sim:
            stepper = _parse_stepper(cp)
            trace = pde.simulate(model, _parse_initial(cp, model), stepper,
                                 store_states=False)
            slack = _solver_opt(cp, "box_slack", 1e-3)
            entry = pde.box_entry_time(trace, q, slack=slack)
            row.append("nan" if entry is None else _f17(entry))
        rows.append(",".join(row))

    path = os.path.join(out, f"{prefix}_scan_{args.axis}.csv")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


# ---------------------------------------------------------------- driver

def _build_parser() -> _Parser:
    parser = _Parser(prog="htpde",
                     description="Holling-Tanner reaction-diffusion laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (("bounds", cmd_bounds), ("check", cmd_check),
                       ("simulate", cmd_simulate), ("steady", cmd_steady),
                       ("lyapunov", cmd_lyapunov), ("scan", cmd_scan)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--out", default=None, help="output directory")
        if name == "scan":
            p.add_argument("--axis", required=True,
                           help=f"sweep axis, one of {_SCAN_AXES}")
            p.add_argument("--values", required=True,
                           help="comma-separated sweep values")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConvergenceError, PositivityError, NewtonFallback) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
