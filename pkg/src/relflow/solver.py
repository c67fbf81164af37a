"""Explicit finite-difference integrator for the barotropic Navier-Stokes system.

Semi-discretization on a collocated cell-centered grid:

* continuity by conservative first-order upwind fluxes of rho*u,
* momentum by conservative upwind convection of (rho*u) x u,
* central pressure gradient of p(rho),
* viscous term div S(grad u) with the velocity gradient taken through
  boundary-aware ghost cells and the outer divergence by the shared
  one-sided/periodic stencils,
* SSP-RK2 (Heun) in time under a combined acoustic/viscous CFL restriction.

Ghost values encode the boundary condition: no-slip walls reflect the
velocity oddly, Navier-slip walls zero the normal component and scale the
tangential one by (2 mu - beta h)/(2 mu + beta h), scalars reflect evenly,
periodic sides wrap.  Wall-normal face velocities therefore vanish exactly
and no mass or momentum ever crosses a wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fields as _f
from .fields import ScalarField, TensorField, VectorField, ViscosityParams
from .grids import BoundaryKind, Grid
from .pairs import AnalyticPair, AdmissibilityError, Coords, boundary_trace_violation
from .thermo import PressureLaw


class SolverDivergedError(RuntimeError):
    """State became non-finite during time integration."""

    def __init__(self, time: float):
        super().__init__(f"solver state became non-finite at t={time:.6g}")
        self.time = time


class TimeStepCollapseError(RuntimeError):
    """Stable time step underflowed, typically at a vacuum cell."""

    def __init__(self, cell: tuple[int, ...], dt: float):
        super().__init__(f"stable time step collapsed to {dt:.3e} at cell {cell}")
        self.cell = cell
        self.dt = dt


@dataclass(frozen=True)
class FluidParams:
    visc: ViscosityParams
    law: PressureLaw


@dataclass(frozen=True)
class Forcing:
    """Body force plus optional manufactured mass/momentum corrections.

    ``body_force`` is an acceleration f(t, x); the corrections are source
    densities added verbatim to the continuity and momentum equations.
    """

    body_force: Callable[[float, Coords], np.ndarray] | None = None
    mass_source: Callable[[float, Coords], np.ndarray] | None = None
    momentum_source: Callable[[float, Coords], np.ndarray] | None = None


NO_FORCING = Forcing()


@dataclass(frozen=True)
class State:
    """Density and velocity at one time instant."""

    time: float
    rho: ScalarField
    u: VectorField
    clipped_mass: float = 0.0  # cumulative mass added by vacuum flooring

    def __post_init__(self) -> None:
        if self.rho.grid != self.u.grid:
            raise _f.GridMismatchError("rho and u must share a grid")
        if np.any(self.rho.values < 0):
            raise ValueError("density must be nonnegative")

    @property
    def grid(self) -> Grid:
        return self.rho.grid


@dataclass(frozen=True)
class Trajectory:
    """States at strictly increasing save times, plus the forcing that drove them."""

    states: tuple[State, ...]
    forcing: Forcing = NO_FORCING

    def __post_init__(self) -> None:
        if not self.states:
            raise ValueError("trajectory must contain at least one state")
        times = self.times
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def grid(self) -> Grid:
        return self.states[0].grid


# ---------------------------------------------------------------------------
# ghost-cell extension


def _slab(a: np.ndarray, axis: int, index) -> np.ndarray:
    sl = [slice(None)] * a.ndim
    sl[axis] = index
    return a[tuple(sl)]


def _extend_axis(
    a: np.ndarray,
    grid: Grid,
    axis: int,
    visc: ViscosityParams,
    comp: int | None,
) -> np.ndarray:
    """Add one ghost layer on both ends of ``axis``.

    ``comp`` is None for scalars (even wall reflection) or the velocity
    component index (odd for the wall-normal component and for no-slip
    walls, friction-scaled tangentially on Navier-slip walls).
    """
    if grid.axis_periodic(axis):
        lo = _slab(a, axis, slice(-1, None))
        hi = _slab(a, axis, slice(0, 1))
        return np.concatenate([lo, a, hi], axis=axis)

    h = grid.spacing[axis]
    slip = (2.0 * visc.mu - visc.beta * h) / (2.0 * visc.mu + visc.beta * h)

    def ghost(side: int) -> np.ndarray:
        layer = _slab(a, axis, slice(0, 1) if side == 0 else slice(-1, None))
        kind = grid.side_kind(axis, side)
        if comp is None:
            return layer
        if kind is BoundaryKind.NOSLIP or comp == axis:
            return -layer
        return slip * layer  # Navier-slip tangential component

    return np.concatenate([ghost(0), a, ghost(1)], axis=axis)


def _central(ext: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (_slab(ext, axis, slice(2, None)) - _slab(ext, axis, slice(None, -2))) / (2.0 * h)


def _upwind_divergence(
    q: np.ndarray,
    u_axis: np.ndarray,
    grid: Grid,
    axis: int,
    visc: ViscosityParams,
    comp: int | None,
) -> np.ndarray:
    """d/dx_axis of the upwind face flux q * u_axis (conservative form)."""
    qe = _extend_axis(q, grid, axis, visc, comp)
    ue = _extend_axis(u_axis, grid, axis, visc, axis)
    u_face = 0.5 * (_slab(ue, axis, slice(None, -1)) + _slab(ue, axis, slice(1, None)))
    flux = _slab(qe, axis, slice(None, -1)) * np.maximum(u_face, 0.0) + _slab(
        qe, axis, slice(1, None)
    ) * np.minimum(u_face, 0.0)
    return (_slab(flux, axis, slice(1, None)) - _slab(flux, axis, slice(None, -1))) / grid.spacing[
        axis
    ]


def _rhs(
    t: float,
    rho: np.ndarray,
    u: np.ndarray,
    grid: Grid,
    params: FluidParams,
    forcing: Forcing,
    coords: Coords,
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives of (rho, rho*u)."""
    d = grid.dim
    visc, law = params.visc, params.law
    m = rho * u

    drho = np.zeros_like(rho)
    dm = np.zeros_like(m)
    for k in range(d):
        drho -= _upwind_divergence(rho, u[k], grid, k, visc, None)
        for i in range(d):
            dm[i] -= _upwind_divergence(m[i], u[k], grid, k, visc, i)

    p = np.asarray(law.pressure(rho))
    for i in range(d):
        pe = _extend_axis(p, grid, i, visc, None)
        dm[i] -= _central(pe, i, grid.spacing[i])

    grad_u = np.empty((d, d) + grid.shape)
    for i in range(d):
        for j in range(d):
            ue = _extend_axis(u[i], grid, j, visc, i)
            grad_u[i, j] = _central(ue, j, grid.spacing[j])
    s = _f.stress(TensorField(grid, grad_u), visc).values
    for i in range(d):
        for j in range(d):
            dm[i] += _f._axis_derivative(s[i, j], grid, j)

    if forcing.body_force is not None:
        dm += rho * np.asarray(forcing.body_force(t, coords))
    if forcing.mass_source is not None:
        drho += np.asarray(forcing.mass_source(t, coords))
    if forcing.momentum_source is not None:
        dm += np.asarray(forcing.momentum_source(t, coords))
    return drho, dm


def _apply_floor(rho: np.ndarray, m: np.ndarray, grid: Grid) -> tuple[np.ndarray, np.ndarray, float]:
    """Floor density at zero, zero momentum in vacuum cells, report added mass."""
    clipped = 0.0
    negative = rho < 0
    if negative.any():
        clipped = -float(rho[negative].sum()) * grid.cell_volume
        rho = np.where(negative, 0.0, rho)
    vacuum = rho <= 0
    if vacuum.any():
        m = np.where(vacuum[None, ...], 0.0, m)
    return rho, m, clipped


def _velocity(rho: np.ndarray, m: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(rho[None, ...] > 0, m / rho[None, ...], 0.0)
    return u


def stable_dt(state: State, params: FluidParams, cfl_safety: float = 0.4) -> float:
    """Explicit step size limit.

    cfl_safety * min over cells of min( dx/(|u| + c), rho dx^2/(4 mu/3 + eta) )
    with sound speed c = sqrt(p'(rho)).  Raises
    :class:`TimeStepCollapseError` when the bound underflows, carrying the
    offending cell.
    """
    grid = state.grid
    rho = state.rho.values
    speed = np.sqrt(np.einsum("i...,i...->...", state.u.values, state.u.values))
    h = min(grid.spacing)
    sound = np.asarray(params.law.sound_speed(rho))

    with np.errstate(divide="ignore"):
        acoustic = np.where(speed + sound > 0, h / (speed + sound), np.inf)
    visc_coeff = 4.0 * params.visc.mu / 3.0 + params.visc.eta
    if visc_coeff > 0:
        viscous = rho * h**2 / visc_coeff
    else:
        viscous = np.full_like(rho, np.inf)
    local = np.minimum(acoustic, viscous)
    dt = cfl_safety * float(local.min())
    if dt < 1e-12 * h:
        cell = np.unravel_index(int(np.argmin(local)), grid.shape)
        raise TimeStepCollapseError(cell, dt)
    return dt


def step(state: State, dt: float, params: FluidParams, forcing: Forcing = NO_FORCING) -> State:
    """One SSP-RK2 step; raises :class:`SolverDivergedError` on NaN/Inf."""
    if dt <= 0:
        raise ValueError(f"time step must be positive, got dt={dt}")
    grid = state.grid
    coords = grid.cell_centers()
    t = state.time
    rho0 = state.rho.values
    u0 = state.u.values
    m0 = rho0 * u0
    clipped = 0.0

    drho, dm = _rhs(t, rho0, u0, grid, params, forcing, coords)
    rho1 = rho0 + dt * drho
    m1 = m0 + dt * dm
    rho1, m1, c1 = _apply_floor(rho1, m1, grid)
    clipped += c1
    if not (np.all(np.isfinite(rho1)) and np.all(np.isfinite(m1))):
        raise SolverDivergedError(t + dt)
    u1 = _velocity(rho1, m1)

    drho2, dm2 = _rhs(t + dt, rho1, u1, grid, params, forcing, coords)
    rho_new = 0.5 * (rho0 + rho1 + dt * drho2)
    m_new = 0.5 * (m0 + m1 + dt * dm2)
    rho_new, m_new, c2 = _apply_floor(rho_new, m_new, grid)
    clipped += c2
    if not (np.all(np.isfinite(rho_new)) and np.all(np.isfinite(m_new))):
        raise SolverDivergedError(t + dt)

    return State(
        time=t + dt,
        rho=ScalarField(grid, rho_new),
        u=VectorField(grid, _velocity(rho_new, m_new)),
        clipped_mass=state.clipped_mass + clipped,
    )


def integrate(
    state: State,
    params: FluidParams,
    forcing: Forcing,
    t_final: float,
    save_every: int = 1,
    cfl_safety: float = 0.4,
    max_steps: int = 10_000_000,
) -> Trajectory:
    """March to ``t_final``, saving every ``save_every``-th step and the last."""
    if save_every < 1:
        raise ValueError("save_every must be at least 1")
    saved = [state]
    n = 0
    horizon = t_final - 1e-12 * max(1.0, abs(t_final))
    while state.time < horizon:
        if n >= max_steps:
            raise RuntimeError(f"exceeded {max_steps} steps before reaching t={t_final}")
        dt = min(stable_dt(state, params, cfl_safety), t_final - state.time)
        state = step(state, dt, params, forcing)
        n += 1
        if n % save_every == 0 or state.time >= horizon:
            saved.append(state)
    if saved[-1] is not state:
        saved.append(state)
    return Trajectory(states=tuple(saved), forcing=forcing)


def mass(state: State) -> float:
    return _f.integrate(state.rho)


# ---------------------------------------------------------------------------
# manufactured forcing


def _source_terms(
    pair: AnalyticPair, params: FluidParams, t: float, x: Coords
) -> tuple[np.ndarray, np.ndarray]:
    """Mass and momentum residuals of the pair inserted into the equations."""
    law, visc = params.law, params.visc
    r = pair.r(t, x)
    u = pair.u(t, x)
    gu = pair.grad_u(t, x)
    div_u = np.einsum("ii...->...", gu)
    grad_r = pair.grad_r(t, x)
    div_ru = np.einsum("i...,i...->...", grad_r, u) + r * div_u
    g_mass = pair.dr_dt(t, x) + div_ru

    conv = np.einsum("ij...,j...->i...", gu, u)  # (U . grad) U
    div_stress = visc.mu * pair.lap_u(t, x) + (visc.eta + visc.mu / 3.0) * pair.grad_div_u(t, x)
    g_mom = (
        pair.dr_dt(t, x) * u
        + r * pair.du_dt(t, x)
        + u * div_ru
        + r * conv
        + np.asarray(law.dpressure(r)) * grad_r
        - div_stress
    )
    return g_mass, g_mom


def mms_forcing(pair: AnalyticPair, params: FluidParams, grid: Grid | None = None) -> Forcing:
    """Source terms that make the pair an exact solution of the forced system.

    When a grid is supplied, the pair's wall compatibility is verified first.
    """
    if grid is not None:
        violation = boundary_trace_violation(pair, grid, np.array([0.0]))
        if violation > 1e-10:
            raise AdmissibilityError(
                f"pair '{pair.name}' violates the grid's wall condition by {violation:.3e}"
            )

    def g_mass(t: float, x: Coords) -> np.ndarray:
        return _source_terms(pair, params, t, x)[0]

    def g_mom(t: float, x: Coords) -> np.ndarray:
        return _source_terms(pair, params, t, x)[1]

    return Forcing(mass_source=g_mass, momentum_source=g_mom)


def exact_body_force(pair: AnalyticPair, params: FluidParams, grid: Grid | None = None) -> Forcing:
    """Pure body force under which the pair solves the unmodified system.

    Only valid for pairs that satisfy the continuity equation exactly; the
    momentum residual divided by the pair density is then an admissible
    body force f with the pair a genuine strong solution.
    """
    if not pair.exact_continuity:
        raise AdmissibilityError(
            f"pair '{pair.name}' does not solve continuity exactly; use mms_forcing"
        )
    if grid is not None:
        violation = boundary_trace_violation(pair, grid, np.array([0.0]))
        if violation > 1e-10:
            raise AdmissibilityError(
                f"pair '{pair.name}' violates the grid's wall condition by {violation:.3e}"
            )

    def f(t: float, x: Coords) -> np.ndarray:
        g_mass, g_mom = _source_terms(pair, params, t, x)
        return g_mom / pair.r(t, x)

    return Forcing(body_force=f)
