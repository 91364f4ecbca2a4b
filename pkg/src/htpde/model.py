"""Model data types and kinetic terms.

The package studies a predator-prey system of Holling-Tanner type on a
rectangular domain with no-flux boundaries.  Prey u and predator v obey

    u_t = d1(x) lap(u) + f(a(x), u, v),   f(y, u, v) = u (y - u - b v / (1 + r u))
    v_t = d2(x) lap(v) + g(u, v),         g(u, v)    = mu v (1 - v / u)

where a(x) is a heterogeneous prey capacity, d1(x), d2(x) are strictly
positive diffusivities, b is the predation strength, r the handling-time
saturation and mu the intrinsic predator growth rate.

This module holds the immutable containers (parameters, grid, fields, model,
state), the kinetic functions f and g, and the coefficient-field builders.
Discrete operators and time stepping live in :mod:`htpde.pde`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PositivityError, ValidationError

__all__ = [
    "KineticParams",
    "Grid",
    "ScalarField",
    "CoefficientSpec",
    "ModelSpec",
    "State",
    "eval_f",
    "eval_g",
    "build_coefficient",
    "coeff_extremes",
]


def _require_finite(name, *values):
    for val in values:
        arr = np.asarray(val, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"{name}: non-finite value encountered")


@dataclass(frozen=True)
class KineticParams:
    """Kinetic parameters (b, r, mu) of the reaction terms.

    b > 0 is the predation strength, r >= 0 the saturation constant of the
    functional response, mu > 0 the predator growth rate.  r = 0 reduces the
    functional response to the unsaturated (Leslie-Gower type) form.
    """

    b: float
    r: float
    mu: float

    def __post_init__(self):
        _require_finite("KineticParams", self.b, self.r, self.mu)
        if not self.b > 0.0:
            raise ValidationError(f"b must be positive, got {self.b}")
        if self.r < 0.0:
            raise ValidationError(f"r must be nonnegative, got {self.r}")
        if not self.mu > 0.0:
            raise ValidationError(f"mu must be positive, got {self.mu}")


def eval_f(y, u, v, params: KineticParams):
    """Prey kinetics f(y, u, v) = u (y - u - b v / (1 + r u)).

    Accepts scalars or arrays (broadcasting).  ``y`` plays the role of the
    local capacity a(x); passing the extremes of a gives the comparison
    kinetics used by the bound constructions.
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _require_finite("eval_f", y, u, v)
    denom = 1.0 + params.r * u
    if np.any(denom <= 0.0):
        raise ValidationError("eval_f: 1 + r u must stay positive")
    out = u * (y - u - params.b * v / denom)
    return float(out) if out.ndim == 0 else out


def eval_g(u, v, params: KineticParams):
    """Predator kinetics g(u, v) = mu v (1 - v / u); requires u > 0.

    The predator carrying capacity is the local prey density, so u <= 0 is a
    singularity and raises.  v may be zero (g vanishes there: the predator-free
    manifold is invariant).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _require_finite("eval_g", u, v)
    if np.any(u <= 0.0):
        bad = int(np.argmax(np.asarray(u <= 0.0)))
        raise PositivityError("eval_g: u <= 0 makes v/u singular", node=bad)
    out = params.mu * v * (1.0 - v / u)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on [0, L1] (x [0, L2]) including the endpoints.

    ``extents`` are the side lengths, ``counts`` the node counts per axis
    (at least 3 each, so the interior stencil exists).  Spacing along axis k
    is extents[k] / (counts[k] - 1).
    """

    extents: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "extents", tuple(float(e) for e in self.extents))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        if len(self.extents) != len(self.counts):
            raise ValidationError("Grid: extents and counts must have equal length")
        if len(self.counts) not in (1, 2):
            raise ValidationError(f"Grid: dimension must be 1 or 2, got {len(self.counts)}")
        if any(n < 3 for n in self.counts):
            raise ValidationError(f"Grid: need at least 3 nodes per axis, got {self.counts}")
        if any(not (e > 0.0 and math.isfinite(e)) for e in self.extents):
            raise ValidationError(f"Grid: extents must be positive finite, got {self.extents}")

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.counts))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(e / (n - 1) for e, n in zip(self.extents, self.counts))

    @property
    def min_spacing(self) -> float:
        return min(self.spacing)

    def axes(self) -> list[np.ndarray]:
        """Node coordinates along each axis."""
        return [np.linspace(0.0, e, n) for e, n in zip(self.extents, self.counts)]

    def meshes(self) -> list[np.ndarray]:
        """Coordinate arrays of full grid shape (indexing='ij')."""
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def quadrature_weights(self) -> np.ndarray:
        """Trapezoid quadrature weights of full grid shape.

        Along each axis the weights are h * [1/2, 1, ..., 1, 1/2]; in 2-D the
        tensor product.  Summing weights returns the domain measure.
        """
        w = np.ones(self.shape[0]) * self.spacing[0]
        w[0] *= 0.5
        w[-1] *= 0.5
        if self.dim == 1:
            return w
        w2 = np.ones(self.shape[1]) * self.spacing[1]
        w2[0] *= 0.5
        w2[-1] *= 0.5
        return np.outer(w, w2)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)  # defensive copy
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField:
    """A nodal scalar field on a :class:`Grid`.  Values are immutable."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValidationError(
                f"ScalarField: values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("ScalarField: non-finite values")
        object.__setattr__(self, "values", _freeze(vals))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def require_positive(self, name: str) -> "ScalarField":
        if self.values.min() <= 0.0:
            node = int(self.values.argmin())
            raise ValidationError(f"{name} must be strictly positive everywhere "
                                  f"(value {self.values.min()} at node {node})")
        return self


@dataclass(frozen=True)
class CoefficientSpec:
    """Recipe for a coefficient field: constant, cosine, or tabulated.

    kinds:
      * ``constant``: value c0 everywhere.
      * ``cosine``: c0 + c1 * prod_k cos(modes[k] * pi * x_k / L_k).  Cosine
        modes have zero normal derivative on the boundary, so the field is
        compatible with the no-flux discretization.
      * ``tabulated``: explicit per-node values.
    """

    kind: str
    c0: float = 0.0
    c1: float = 0.0
    modes: tuple[int, ...] = (1,)
    table: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("constant", "cosine", "tabulated"):
            raise ValidationError(f"CoefficientSpec: unknown kind {self.kind!r}")
        object.__setattr__(self, "modes", tuple(int(k) for k in self.modes))
        if self.kind == "cosine" and any(k < 0 for k in self.modes):
            raise ValidationError("CoefficientSpec: cosine modes must be nonnegative")

    @classmethod
    def constant(cls, value: float) -> "CoefficientSpec":
        return cls(kind="constant", c0=float(value))

    @classmethod
    def cosine(cls, c0: float, c1: float, modes=(1,)) -> "CoefficientSpec":
        modes = (modes,) if np.isscalar(modes) else tuple(modes)
        return cls(kind="cosine", c0=float(c0), c1=float(c1), modes=modes)

    @classmethod
    def tabulated(cls, values) -> "CoefficientSpec":
        vals = np.asarray(values, dtype=float).ravel()
        return cls(kind="tabulated", table=tuple(vals))


def build_coefficient(spec: CoefficientSpec, grid: Grid) -> ScalarField:
    """Realize a coefficient spec on a grid as a strictly positive field."""
    if spec.kind == "constant":
        vals = np.full(grid.shape, spec.c0)
    elif spec.kind == "cosine":
        modes = spec.modes
        if len(modes) != grid.dim:
            raise ValidationError(
                f"cosine coefficient needs {grid.dim} mode(s), got {len(modes)}")
        prof = np.ones(grid.shape)
        meshes = grid.meshes()
        for k in range(grid.dim):
            prof = prof * np.cos(modes[k] * np.pi * meshes[k] / grid.extents[k])
        vals = spec.c0 + spec.c1 * prof
    else:  # tabulated
        table = np.asarray(spec.table, dtype=float)
        if table.size != grid.n_nodes:
            raise ValidationError(
                f"tabulated coefficient has {table.size} values, grid has {grid.n_nodes} nodes")
        vals = table.reshape(grid.shape)
    fld = ScalarField(grid, vals)
    return fld.require_positive("coefficient field")


def coeff_extremes(field: ScalarField) -> tuple[float, float]:
    """(min, max) of a coefficient field over the grid."""
    return field.min(), field.max()


@dataclass(frozen=True)
class ModelSpec:
    """Full problem description: kinetics plus coefficient fields on one grid."""

    params: KineticParams
    a: ScalarField
    d1: ScalarField
    d2: ScalarField

    def __post_init__(self):
        g = self.a.grid
        if self.d1.grid != g or self.d2.grid != g:
            raise ValidationError("ModelSpec: a, d1, d2 must share one grid")
        self.a.require_positive("a")
        self.d1.require_positive("d1")
        self.d2.require_positive("d2")

    @property
    def grid(self) -> Grid:
        return self.a.grid

    @property
    def a_extremes(self) -> tuple[float, float]:
        return coeff_extremes(self.a)

    @property
    def d_extremes(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return coeff_extremes(self.d1), coeff_extremes(self.d2)


@dataclass(frozen=True)
class State:
    """Densities (u, v) at time t.

    u must be nonnegative and not identically zero; v nonnegative.  Strict
    positivity of evolving states is the stepper's responsibility: it aborts
    rather than continue past a sign change.  v identically zero is a valid
    (invariant) configuration.
    """

    u: ScalarField
    v: ScalarField
    t: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValidationError("State: u and v must share one grid")
        if self.u.values.min() < 0.0 or self.v.values.min() < 0.0:
            raise ValidationError("State: densities must be nonnegative")
        if self.u.values.max() == 0.0:
            raise ValidationError("State: u must not vanish identically")

    @classmethod
    def constant(cls, grid: Grid, u0: float, v0: float, t: float = 0.0) -> "State":
        return cls(ScalarField.constant(grid, u0), ScalarField.constant(grid, v0), t)

    @classmethod
    def from_arrays(cls, grid: Grid, u, v, t: float = 0.0) -> "State":
        return cls(ScalarField(grid, u), ScalarField(grid, v), t)

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def strictly_positive(self) -> bool:
        return self.u.values.min() > 0.0 and self.v.values.min() > 0.0
