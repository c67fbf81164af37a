"""Analytic comparison pairs (r, U) with closed-form space-time derivatives.

Each pair supplies the density r > 0, velocity U, their first derivatives,
and the second-derivative combinations needed by the viscous terms
(component Laplacian and gradient of the divergence).  Pairs are exact
functions of (t, x); nothing here is ever finite-differenced.

Families whose (r, U) satisfies the continuity equation exactly
(``exact_continuity``) can be driven by a pure body force and are then
honest strong solutions of the forced system; the others need manufactured
mass/momentum corrections and are meant for convergence studies only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .fields import ScalarField, VectorField, ViscosityParams
from .grids import BoundaryKind, Grid

Coords = tuple[np.ndarray, ...]
ScalarFn = Callable[[float, Coords], np.ndarray]
VectorFn = Callable[[float, Coords], np.ndarray]
TensorFn = Callable[[float, Coords], np.ndarray]

TWO_PI = 2.0 * math.pi


class AdmissibilityError(ValueError):
    """Comparison pair violates an admissibility requirement."""


class PairCompatibility(Enum):
    """Strongest boundary condition the velocity trace satisfies."""

    NOSLIP_COMPATIBLE = "noslip"  # U = 0 on every wall
    SLIP_COMPATIBLE = "slip"  # U . n = 0 on every wall


@dataclass(frozen=True)
class AnalyticPair:
    name: str
    compatibility: PairCompatibility
    exact_continuity: bool
    r: ScalarFn
    u: VectorFn
    dr_dt: ScalarFn
    grad_r: VectorFn
    du_dt: VectorFn
    grad_u: TensorFn
    lap_u: VectorFn
    grad_div_u: VectorFn
    params: dict[str, float] = field(default_factory=dict)

    def div_u(self, t: float, x: Coords) -> np.ndarray:
        return np.einsum("ii...->...", self.grad_u(t, x))


def sample_state_fields(pair: AnalyticPair, grid: Grid, t: float) -> tuple[ScalarField, VectorField]:
    """Sample (r, U) at cell centers as discrete fields."""
    x = grid.cell_centers()
    return ScalarField(grid, pair.r(t, x)), VectorField(grid, pair.u(t, x))


def boundary_trace_violation(pair: AnalyticPair, grid: Grid, times: np.ndarray) -> float:
    """Largest wall violation of the pair's compatibility class on this grid.

    No-slip sides require the full trace of U to vanish; Navier-slip sides
    only the normal component.  Periodic sides impose nothing.
    """
    worst = 0.0
    for axis, side in grid.wall_sides():
        coords, _ = grid.wall_face_centers(axis, side)
        kind = grid.side_kind(axis, side)
        for t in np.atleast_1d(times):
            u_wall = pair.u(float(t), coords)
            if kind is BoundaryKind.NOSLIP:
                worst = max(worst, float(np.abs(u_wall).max()))
            else:
                worst = max(worst, float(np.abs(u_wall[axis]).max()))
    return worst


def _zeros(x: Coords) -> np.ndarray:
    return np.zeros_like(x[0])


def _vec(x: Coords, *comps: np.ndarray) -> np.ndarray:
    return np.stack([np.broadcast_to(c, x[0].shape) for c in comps])


def _tens(x: Coords, rows) -> np.ndarray:
    d = len(rows)
    out = np.zeros((d, d) + x[0].shape)
    for i in range(d):
        for j in range(d):
            out[i, j] = rows[i][j]
    return out


def equilibrium(rho_bar: float, dim: int) -> AnalyticPair:
    """Constant state (rho_bar, 0); compatible with every boundary kind."""
    if rho_bar <= 0:
        raise AdmissibilityError("equilibrium pair needs a positive far-field density")

    def r(t, x):
        return np.full_like(x[0], rho_bar)

    def zero_s(t, x):
        return _zeros(x)

    def zero_v(t, x):
        return np.zeros((dim,) + x[0].shape)

    def zero_t(t, x):
        return np.zeros((dim, dim) + x[0].shape)

    return AnalyticPair(
        name="equilibrium",
        compatibility=PairCompatibility.NOSLIP_COMPATIBLE,
        exact_continuity=True,
        r=r,
        u=zero_v,
        dr_dt=zero_s,
        grad_r=zero_v,
        du_dt=zero_v,
        grad_u=zero_t,
        lap_u=zero_v,
        grad_div_u=zero_v,
        params={"rho_bar": rho_bar},
    )


def steady_density_wave(rho_bar: float, amplitude: float, dim: int) -> AnalyticPair:
    """Steady r = rho_bar + amplitude*sin(2 pi x), U = 0; periodic domains only."""
    if amplitude >= rho_bar:
        raise AdmissibilityError("density wave amplitude must stay below rho_bar")

    def r(t, x):
        return rho_bar + amplitude * np.sin(TWO_PI * x[0])

    def dr_dt(t, x):
        return _zeros(x)

    def grad_r(t, x):
        gx = amplitude * TWO_PI * np.cos(TWO_PI * x[0])
        comps = [gx] + [_zeros(x)] * (dim - 1)
        return _vec(x, *comps)

    def zero_v(t, x):
        return np.zeros((dim,) + x[0].shape)

    def zero_t(t, x):
        return np.zeros((dim, dim) + x[0].shape)

    return AnalyticPair(
        name="steady_density_wave",
        compatibility=PairCompatibility.NOSLIP_COMPATIBLE,
        exact_continuity=True,
        r=r,
        u=zero_v,
        dr_dt=dr_dt,
        grad_r=grad_r,
        du_dt=zero_v,
        grad_u=zero_t,
        lap_u=zero_v,
        grad_div_u=zero_v,
        params={"rho_bar": rho_bar, "amplitude": amplitude},
    )


def traveling_wave(rho_bar: float, amplitude: float, speed: float) -> AnalyticPair:
    """1D density wave advected by a uniform velocity; solves continuity exactly."""
    if amplitude >= rho_bar:
        raise AdmissibilityError("wave amplitude must stay below rho_bar")

    def phase(t, x):
        return TWO_PI * (x[0] - speed * t)

    def r(t, x):
        return rho_bar + amplitude * np.sin(phase(t, x))

    def dr_dt(t, x):
        return -amplitude * TWO_PI * speed * np.cos(phase(t, x))

    def grad_r(t, x):
        return _vec(x, amplitude * TWO_PI * np.cos(phase(t, x)))

    def u(t, x):
        return _vec(x, np.full_like(x[0], speed))

    def zero_v(t, x):
        return np.zeros((1,) + x[0].shape)

    def zero_t(t, x):
        return np.zeros((1, 1) + x[0].shape)

    return AnalyticPair(
        name="traveling_wave",
        compatibility=PairCompatibility.SLIP_COMPATIBLE,
        exact_continuity=True,
        r=r,
        u=u,
        dr_dt=dr_dt,
        grad_r=grad_r,
        du_dt=zero_v,
        grad_u=zero_t,
        lap_u=zero_v,
        grad_div_u=zero_v,
        params={"rho_bar": rho_bar, "amplitude": amplitude, "speed": speed},
    )


def taylor_green(
    rho_bar: float,
    velocity_amplitude: float,
    omega: float = TWO_PI,
    density_amplitude: float = 0.0,
) -> AnalyticPair:
    """Divergence-free single-mode vortex on the unit box, 2D.

    U = sigma(t) * (sin(2 pi x) cos(2 pi y), -cos(2 pi x) sin(2 pi y)) with
    sigma(t) = velocity_amplitude * cos(omega t).  The trace satisfies
    U . n = 0 on the unit-box walls, so the pair is slip-compatible there
    and periodic everywhere.  With density_amplitude = 0 the density is
    constant and the continuity equation holds exactly.
    """
    if density_amplitude >= rho_bar:
        raise AdmissibilityError("density amplitude must stay below rho_bar")
    u0, eps = velocity_amplitude, density_amplitude

    def sigma(t):
        return u0 * math.cos(omega * t)

    def dsigma(t):
        return -u0 * omega * math.sin(omega * t)

    def trig(x):
        sx, cx = np.sin(TWO_PI * x[0]), np.cos(TWO_PI * x[0])
        sy, cy = np.sin(TWO_PI * x[1]), np.cos(TWO_PI * x[1])
        return sx, cx, sy, cy

    def r(t, x):
        sx, cx, sy, cy = trig(x)
        return rho_bar + eps * math.cos(omega * t) * cx * cy

    def dr_dt(t, x):
        sx, cx, sy, cy = trig(x)
        return -eps * omega * math.sin(omega * t) * cx * cy

    def grad_r(t, x):
        sx, cx, sy, cy = trig(x)
        f = eps * math.cos(omega * t)
        return _vec(x, -f * TWO_PI * sx * cy, -f * TWO_PI * cx * sy)

    def u(t, x):
        sx, cx, sy, cy = trig(x)
        s = sigma(t)
        return _vec(x, s * sx * cy, -s * cx * sy)

    def du_dt(t, x):
        sx, cx, sy, cy = trig(x)
        ds = dsigma(t)
        return _vec(x, ds * sx * cy, -ds * cx * sy)

    def grad_u(t, x):
        sx, cx, sy, cy = trig(x)
        s = sigma(t)
        return _tens(
            x,
            [
                [s * TWO_PI * cx * cy, -s * TWO_PI * sx * sy],
                [s * TWO_PI * sx * sy, -s * TWO_PI * cx * cy],
            ],
        )

    def lap_u(t, x):
        return -2.0 * TWO_PI**2 * u(t, x)

    def zero_v(t, x):
        return np.zeros((2,) + x[0].shape)

    return AnalyticPair(
        name="taylor_green",
        compatibility=PairCompatibility.SLIP_COMPATIBLE,
        exact_continuity=(eps == 0.0),
        r=r,
        u=u,
        dr_dt=dr_dt,
        grad_r=grad_r,
        du_dt=du_dt,
        grad_u=grad_u,
        lap_u=lap_u,
        grad_div_u=zero_v,
        params={
            "rho_bar": rho_bar,
            "velocity_amplitude": u0,
            "omega": omega,
            "density_amplitude": eps,
        },
    )


def wall_vortex(
    rho_bar: float,
    velocity_amplitude: float,
    omega: float = TWO_PI,
    density_amplitude: float = 0.0,
) -> AnalyticPair:
    """Divergence-free vortex vanishing on the unit-box boundary, 2D.

    U = sigma(t) * (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y)).
    The full trace vanishes on the walls, so the pair is no-slip
    compatible.  The density mode cos(pi x) cos(pi y) has zero normal
    derivative at the walls, matching the scheme's wall extrapolation.
    """
    if density_amplitude >= rho_bar:
        raise AdmissibilityError("density amplitude must stay below rho_bar")
    u0, eps = velocity_amplitude, density_amplitude
    pi = math.pi

    def sigma(t):
        return u0 * math.cos(omega * t)

    def dsigma(t):
        return -u0 * omega * math.sin(omega * t)

    def shape_u(x):
        # (phi, psi) with U = sigma * (phi, -psi)
        phi = np.sin(pi * x[0]) ** 2 * np.sin(TWO_PI * x[1])
        psi = np.sin(TWO_PI * x[0]) * np.sin(pi * x[1]) ** 2
        return phi, psi

    def r(t, x):
        return rho_bar + eps * math.cos(omega * t) * np.cos(pi * x[0]) * np.cos(pi * x[1])

    def dr_dt(t, x):
        return -eps * omega * math.sin(omega * t) * np.cos(pi * x[0]) * np.cos(pi * x[1])

    def grad_r(t, x):
        f = eps * math.cos(omega * t)
        return _vec(
            x,
            -f * pi * np.sin(pi * x[0]) * np.cos(pi * x[1]),
            -f * pi * np.cos(pi * x[0]) * np.sin(pi * x[1]),
        )

    def u(t, x):
        phi, psi = shape_u(x)
        s = sigma(t)
        return _vec(x, s * phi, -s * psi)

    def du_dt(t, x):
        phi, psi = shape_u(x)
        ds = dsigma(t)
        return _vec(x, ds * phi, -ds * psi)

    def grad_u(t, x):
        s = sigma(t)
        s2x, s2y = np.sin(TWO_PI * x[0]), np.sin(TWO_PI * x[1])
        c2x, c2y = np.cos(TWO_PI * x[0]), np.cos(TWO_PI * x[1])
        sx2 = np.sin(pi * x[0]) ** 2
        sy2 = np.sin(pi * x[1]) ** 2
        return _tens(
            x,
            [
                [s * pi * s2x * s2y, s * TWO_PI * sx2 * c2y],
                [-s * TWO_PI * c2x * sy2, -s * pi * s2x * s2y],
            ],
        )

    def lap_u(t, x):
        s = sigma(t)
        s2x, s2y = np.sin(TWO_PI * x[0]), np.sin(TWO_PI * x[1])
        c2x, c2y = np.cos(TWO_PI * x[0]), np.cos(TWO_PI * x[1])
        sx2 = np.sin(pi * x[0]) ** 2
        sy2 = np.sin(pi * x[1]) ** 2
        lap1 = s * (2.0 * pi**2 * c2x * s2y - 4.0 * pi**2 * sx2 * s2y)
        lap2 = s * (4.0 * pi**2 * s2x * sy2 - 2.0 * pi**2 * s2x * c2y)
        return _vec(x, lap1, lap2)

    def zero_v(t, x):
        return np.zeros((2,) + x[0].shape)

    return AnalyticPair(
        name="wall_vortex",
        compatibility=PairCompatibility.NOSLIP_COMPATIBLE,
        exact_continuity=(eps == 0.0),
        r=r,
        u=u,
        dr_dt=dr_dt,
        grad_r=grad_r,
        du_dt=du_dt,
        grad_u=grad_u,
        lap_u=lap_u,
        grad_div_u=zero_v,
        params={
            "rho_bar": rho_bar,
            "velocity_amplitude": u0,
            "omega": omega,
            "density_amplitude": eps,
        },
    )


def slip_shear_wavenumber(beta: float, mu: float) -> float:
    """Transverse wavenumber of the decaying shear mode on a unit channel.

    Solves kappa*tan(kappa/2) = beta/mu on (0, pi); beta = 0 degenerates to
    the stress-free mode kappa = 2 pi.
    """
    if beta < 0 or mu <= 0:
        raise ValueError("need beta >= 0 and mu > 0")
    if beta == 0:
        return TWO_PI
    target = beta / mu

    def f(k):
        return k * math.tan(k / 2.0) - target

    return brentq(f, 1e-12, math.pi - 1e-12, xtol=1e-14, rtol=1e-15)


def decaying_shear(
    rho_bar: float,
    velocity_amplitude: float,
    visc: ViscosityParams,
    wall_kind: BoundaryKind,
) -> AnalyticPair:
    """Viscous shear mode U = (sigma(t) cos(kappa (y - 1/2)), 0) on a unit channel.

    An exact unforced solution: the density is constant, convection vanishes
    identically, and sigma(t) = velocity_amplitude * exp(-mu kappa^2 t / rho_bar).
    The wavenumber matches the wall condition on y in {0, 1}:

        no slip       kappa = pi        (mode vanishes at the walls)
        navier slip   kappa solves kappa tan(kappa/2) = beta/mu
                      (complete slip beta = 0 gives kappa = 2 pi)

    Periodic transverse boundaries also accept kappa = 2 pi.
    """
    if wall_kind is BoundaryKind.NOSLIP:
        kappa = math.pi
    elif wall_kind is BoundaryKind.NAVIERSLIP:
        kappa = slip_shear_wavenumber(visc.beta, visc.mu)
    else:
        kappa = TWO_PI
    nu = visc.mu / rho_bar
    u0 = velocity_amplitude

    def sigma(t):
        return u0 * math.exp(-nu * kappa**2 * t)

    def profile(x):
        return np.cos(kappa * (x[1] - 0.5))

    def dprofile(x):
        return -kappa * np.sin(kappa * (x[1] - 0.5))

    def r(t, x):
        return np.full_like(x[0], rho_bar)

    def zero_s(t, x):
        return _zeros(x)

    def zero_v(t, x):
        return np.zeros((2,) + x[0].shape)

    def u(t, x):
        return _vec(x, sigma(t) * profile(x), _zeros(x))

    def du_dt(t, x):
        return _vec(x, -nu * kappa**2 * sigma(t) * profile(x), _zeros(x))

    def grad_u(t, x):
        z = _zeros(x)
        return _tens(x, [[z, sigma(t) * dprofile(x)], [z, z]])

    def lap_u(t, x):
        return _vec(x, -(kappa**2) * sigma(t) * profile(x), _zeros(x))

    compat = (
        PairCompatibility.NOSLIP_COMPATIBLE
        if wall_kind is BoundaryKind.NOSLIP
        else PairCompatibility.SLIP_COMPATIBLE
    )
    return AnalyticPair(
        name="decaying_shear",
        compatibility=compat,
        exact_continuity=True,
        r=r,
        u=u,
        dr_dt=zero_s,
        grad_r=zero_v,
        du_dt=du_dt,
        grad_u=grad_u,
        lap_u=lap_u,
        grad_div_u=zero_v,
        params={"rho_bar": rho_bar, "velocity_amplitude": u0, "kappa": kappa},
    )


def build_pair(
    family: str,
    params: dict[str, float],
    rho_bar: float,
    visc: ViscosityParams,
    grid: Grid,
) -> AnalyticPair:
    """Construct a named pair family against a grid and fluid parameters."""
    p = dict(params)
    if family == "equilibrium":
        pair = equilibrium(rho_bar, grid.dim)
    elif family == "steady_density_wave":
        pair = steady_density_wave(rho_bar, p.pop("amplitude", 0.25), grid.dim)
    elif family == "traveling_wave":
        if grid.dim != 1:
            raise AdmissibilityError("traveling_wave is a 1D family")
        pair = traveling_wave(rho_bar, p.pop("amplitude", 0.25), p.pop("speed", 1.0))
    elif family == "taylor_green":
        if grid.dim != 2:
            raise AdmissibilityError("taylor_green is a 2D family")
        pair = taylor_green(
            rho_bar,
            p.pop("velocity_amplitude", 0.5),
            p.pop("omega", TWO_PI),
            p.pop("density_amplitude", 0.0),
        )
    elif family == "wall_vortex":
        if grid.dim != 2:
            raise AdmissibilityError("wall_vortex is a 2D family")
        pair = wall_vortex(
            rho_bar,
            p.pop("velocity_amplitude", 0.5),
            p.pop("omega", TWO_PI),
            p.pop("density_amplitude", 0.0),
        )
    elif family == "decaying_shear":
        if grid.dim != 2:
            raise AdmissibilityError("decaying_shear is a 2D family")
        wall = grid.side_kind(1, 0)
        pair = decaying_shear(rho_bar, p.pop("velocity_amplitude", 0.5), visc, wall)
    else:
        raise KeyError(f"unknown pair family '{family}'")
    if p:
        raise KeyError(f"unknown parameters for family '{family}': {sorted(p)}")
    return pair


PAIR_FAMILIES = (
    "equilibrium",
    "steady_density_wave",
    "traveling_wave",
    "taylor_green",
    "wall_vortex",
    "decaying_shear",
)
