"""Discrete fields, differential operators, viscous stress, and norms.

Derivatives are second-order central differences; non-periodic boundaries
use one-sided second-order stencils, periodic axes wrap around.  Both are
exact on affine fields, so sampled rigid motions have exactly vanishing
stress.  Integrals use fixed-order compensated summation (``math.fsum``),
which makes every reported functional independent of any parallel split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import BoundaryKind, Grid


class FieldShapeError(ValueError):
    """Field values do not match the grid layout."""


class NonFiniteFieldError(ValueError):
    """Field contains NaN or Inf entries."""


class GridMismatchError(ValueError):
    """Operands live on different grids."""


class DegenerateFieldError(ValueError):
    """Denominator functional vanishes (e.g. rigid motion in a Korn ratio)."""


def _frozen_array(values, expected_shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != expected_shape:
        raise FieldShapeError(f"{what}: expected shape {expected_shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteFieldError(f"{what}: non-finite entries present")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _frozen_array(self.values, self.grid.shape, "ScalarField")
        )


@dataclass(frozen=True)
class VectorField:
    grid: Grid
    values: np.ndarray  # shape (dim, *grid.shape)

    def __post_init__(self) -> None:
        shape = (self.grid.dim,) + self.grid.shape
        object.__setattr__(self, "values", _frozen_array(self.values, shape, "VectorField"))


@dataclass(frozen=True)
class TensorField:
    grid: Grid
    values: np.ndarray  # shape (dim, dim, *grid.shape); [i, j] holds d(v_i)/d(x_j)

    def __post_init__(self) -> None:
        d = self.grid.dim
        shape = (d, d) + self.grid.shape
        object.__setattr__(self, "values", _frozen_array(self.values, shape, "TensorField"))


@dataclass(frozen=True)
class ViscosityParams:
    """Shear viscosity mu > 0, bulk viscosity eta >= 0, wall friction beta >= 0."""

    mu: float
    eta: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ValueError(f"shear viscosity must be positive, got mu={self.mu}")
        if self.eta < 0:
            raise ValueError(f"bulk viscosity must be nonnegative, got eta={self.eta}")
        if self.beta < 0:
            raise ValueError(f"friction coefficient must be nonnegative, got beta={self.beta}")


def compensated_sum(values: np.ndarray) -> float:
    """Exactly rounded sum in fixed C order; reproducible under any data split."""
    return math.fsum(values.ravel(order="C").tolist())


def integrate(f: ScalarField) -> float:
    """Cell-volume weighted integral over the domain."""
    return compensated_sum(f.values) * f.grid.cell_volume


def _axis_derivative(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    h = grid.spacing[axis]
    if grid.axis_periodic(axis):
        return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)
    return np.gradient(values, h, axis=axis, edge_order=2)


def gradient(v: VectorField) -> TensorField:
    """Velocity gradient G with G[i, j] = d(v_i)/d(x_j)."""
    d = v.grid.dim
    out = np.empty((d, d) + v.grid.shape)
    for i in range(d):
        for j in range(d):
            out[i, j] = _axis_derivative(v.values[i], v.grid, j)
    return TensorField(v.grid, out)


def divergence(v: VectorField) -> ScalarField:
    d = v.grid.dim
    out = np.zeros(v.grid.shape)
    for i in range(d):
        out += _axis_derivative(v.values[i], v.grid, i)
    return ScalarField(v.grid, out)


def tensor_divergence(t: TensorField) -> VectorField:
    """Row-wise divergence, (div T)_i = sum_j d(T_ij)/d(x_j)."""
    d = t.grid.dim
    out = np.zeros((d,) + t.grid.shape)
    for i in range(d):
        for j in range(d):
            out[i] += _axis_derivative(t.values[i, j], t.grid, j)
    return VectorField(t.grid, out)


def stress(grad_u: TensorField, visc: ViscosityParams) -> TensorField:
    """Viscous stress mu*(G + G^T - (2/3) tr(G) I) + eta*tr(G) I.

    The 2/3 deviatoric coefficient is kept in every dimension, so the
    1D/2D stress matches the three-dimensional constitutive law verbatim.
    """
    g = grad_u.values
    d = grad_u.grid.dim
    tr = np.einsum("ii...->...", g)
    s = visc.mu * (g + np.swapaxes(g, 0, 1))
    diag = (visc.eta - 2.0 * visc.mu / 3.0) * tr
    for i in range(d):
        s[i, i] += diag
    return TensorField(grad_u.grid, s)


def dissipation_pairing(gv: TensorField, gw: TensorField, visc: ViscosityParams) -> float:
    """Bilinear pairing integral of S(gv) : gw over the domain.

    With gv == gw this is the viscous dissipation rate, nonnegative for
    mu > 0, eta >= 0 and vanishing exactly on rigid-motion gradients.
    """
    if gv.grid is not gw.grid and gv.grid != gw.grid:
        raise GridMismatchError("dissipation pairing requires both tensors on one grid")
    s = stress(gv, visc).values
    return compensated_sum(np.einsum("ij...,ij...->...", s, gw.values)) * gv.grid.cell_volume


def _pointwise_magnitude(f: ScalarField | VectorField | TensorField) -> np.ndarray:
    if isinstance(f, ScalarField):
        return np.abs(f.values)
    if isinstance(f, VectorField):
        return np.sqrt(np.einsum("i...,i...->...", f.values, f.values))
    return np.sqrt(np.einsum("ij...,ij...->...", f.values, f.values))


def lp_norm(f: ScalarField | VectorField | TensorField, p: float) -> float:
    """Discrete cell-volume-weighted L^p norm; p = inf gives the max norm."""
    if p < 1:
        raise ValueError(f"L^p norms require p >= 1, got p={p}")
    mag = _pointwise_magnitude(f)
    if math.isinf(p):
        return float(mag.max())
    return (compensated_sum(mag**p) * f.grid.cell_volume) ** (1.0 / p)


def korn_ratio(
    z: VectorField,
    visc: ViscosityParams,
    weight: ScalarField | None = None,
) -> float:
    """Ratio ||z||^2_{W^{1,2}} / (||S(grad z)||^2_{L^2} + integral of weight*|z|^2).

    Without a weight this probes the plain Korn inequality; a nonnegative
    weight with positive mass restores coercivity on rigid motions.
    Raises :class:`DegenerateFieldError` when the denominator vanishes.
    """
    g = gradient(z)
    num = lp_norm(z, 2) ** 2 + lp_norm(g, 2) ** 2
    den = lp_norm(stress(g, visc), 2) ** 2
    if weight is not None:
        if weight.grid != z.grid:
            raise GridMismatchError("weight must live on the field's grid")
        if np.any(weight.values < 0):
            raise ValueError("korn weight must be nonnegative")
        zsq = np.einsum("i...,i...->...", z.values, z.values)
        den += compensated_sum(weight.values * zsq) * z.grid.cell_volume
    if den <= 1e-12 * max(num, np.finfo(float).tiny):
        raise DegenerateFieldError(
            "denominator vanishes (rigid motion without a coercive weight)"
        )
    return num / den


def wall_velocity_trace(u: VectorField, visc: ViscosityParams, axis: int, side: int) -> np.ndarray:
    """Discrete velocity trace on one wall, shaped (dim, faces-on-wall).

    No-slip walls trace to zero.  Navier-slip walls have zero normal
    component and a tangential value from the first-order friction closure
    t_wall = t_cell * 2 mu / (2 mu + beta h), which interpolates between
    complete slip (beta = 0) and no slip (beta -> inf).
    """
    grid = u.grid
    kind = grid.side_kind(axis, side)
    if kind is BoundaryKind.PERIODIC:
        raise ValueError("periodic sides carry no wall trace")
    take = 0 if side == 0 else -1
    adj = np.take(u.values, take, axis=1 + axis)
    adj = np.atleast_2d(adj) if grid.dim == 1 else adj
    trace = np.zeros_like(adj)
    if kind is BoundaryKind.NAVIERSLIP:
        h = grid.spacing[axis]
        factor = 2.0 * visc.mu / (2.0 * visc.mu + visc.beta * h)
        for comp in range(grid.dim):
            if comp != axis:
                trace[comp] = factor * adj[comp]
    return trace
