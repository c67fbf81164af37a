"""Barotropic pressure laws, the pressure potential, and its Bregman distance.

The potential is H(rho) = rho * int_{rho_bar}^{rho} p(z)/z^2 dz.  It satisfies
H'(rho) rho - H(rho) = p(rho) and H''(rho) = p'(rho)/rho, which is all the
diagnostics machinery ever needs.  The Bregman distance

    d(rho | r) = H(rho) - H'(r) (rho - r) - H(r)

is the convexity gap of H: nonnegative, zero only at rho = r, and locally
quadratic with a density-dependent constant.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

ArrayLike = float | np.ndarray


def _check_nonnegative(rho: ArrayLike, what: str) -> None:
    if np.any(np.asarray(rho) < 0):
        raise ValueError(f"{what} must be nonnegative")


def _check_positive(rho: ArrayLike, what: str) -> None:
    if np.any(np.asarray(rho) <= 0):
        raise ValueError(f"{what} must be strictly positive")


class PressureLaw(abc.ABC):
    """Interface for monotone barotropic pressure laws with a far-field density."""

    rho_bar: float
    gamma: float  # polytropic growth exponent of p'(rho)/rho^(gamma-1)

    @abc.abstractmethod
    def pressure(self, rho: ArrayLike) -> ArrayLike:
        """p(rho), monotone increasing with p(0) = 0."""

    @abc.abstractmethod
    def dpressure(self, rho: ArrayLike) -> ArrayLike:
        """p'(rho)."""

    @abc.abstractmethod
    def potential(self, rho: ArrayLike) -> ArrayLike:
        """Pressure potential H(rho); H(rho_bar) = 0."""

    @abc.abstractmethod
    def dpotential(self, rho: ArrayLike) -> ArrayLike:
        """H'(rho); requires rho > 0."""

    def sound_speed(self, rho: ArrayLike) -> ArrayLike:
        return np.sqrt(self.dpressure(rho))

    def bregman(self, rho: ArrayLike, r: ArrayLike) -> ArrayLike:
        """Convexity gap H(rho) - H'(r)(rho - r) - H(r), nonnegative."""
        _check_nonnegative(rho, "density")
        _check_positive(r, "reference density")
        rho = np.asarray(rho, dtype=float) if not np.isscalar(rho) else rho
        return self.potential(rho) - self.dpotential(r) * (rho - r) - self.potential(r)

    def quadratic_bound_constant(
        self,
        r: float,
        samples: int = 20000,
        span: float = 100.0,
        safety: float = 0.99,
    ) -> float:
        """Constant c(r) > 0 such that the Bregman distance dominates
        c(r)*(rho - r)^2 on r/2 < rho < 2r and c(r)*(1 + rho^gamma) elsewhere.

        Computed as the sampled infimum of the two branch ratios over
        rho in (0, span*r], scaled by a safety factor.
        """
        if r <= 0:
            raise ValueError(f"reference density must be positive, got r={r}")
        m = samples // 2
        # Near window: skip a tiny relative slice around rho = r, where the
        # ratio has a removable 0/0 singularity; its limit H''(r)/2 is
        # included as an explicit candidate.
        near = np.linspace(r / 2, 2 * r, m)
        near = near[np.abs(near - r) > 1e-7 * r]
        near_ratio = self.bregman(near, r) / (near - r) ** 2
        center_limit = 0.5 * self.dpressure(r) / r
        far = np.concatenate(
            [np.geomspace(1e-8 * r, r / 2, m // 2), np.linspace(2 * r, span * r, m // 2)]
        )
        far_ratio = self.bregman(far, r) / (1.0 + far**self.gamma)
        c = safety * min(float(near_ratio.min()), float(center_limit), float(far_ratio.min()))
        if c <= 0:
            raise ValueError(f"sampled quadratic bound constant is not positive for r={r}")
        return c


@dataclass(frozen=True)
class IsentropicLaw(PressureLaw):
    """Isentropic pressure p(rho) = a * rho**gamma with far-field density rho_bar.

    Closed forms:
        H(rho)  = a/(gamma-1) * (rho**gamma - rho_bar**(gamma-1) * rho)
        H'(rho) = a/(gamma-1) * (gamma * rho**(gamma-1) - rho_bar**(gamma-1))
    """

    a: float = 1.0
    gamma: float = 2.0
    rho_bar: float = 1.0

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError(f"pressure coefficient must be positive, got a={self.a}")
        if self.gamma <= 1.5:
            raise ValueError(f"adiabatic exponent must exceed 3/2, got gamma={self.gamma}")
        if self.rho_bar < 0:
            raise ValueError(f"far-field density must be nonnegative, got {self.rho_bar}")

    def pressure(self, rho: ArrayLike) -> ArrayLike:
        _check_nonnegative(rho, "density")
        return self.a * rho**self.gamma

    def dpressure(self, rho: ArrayLike) -> ArrayLike:
        _check_nonnegative(rho, "density")
        return self.a * self.gamma * rho ** (self.gamma - 1.0)

    def potential(self, rho: ArrayLike) -> ArrayLike:
        _check_nonnegative(rho, "density")
        coeff = self.a / (self.gamma - 1.0)
        return coeff * (rho**self.gamma - self.rho_bar ** (self.gamma - 1.0) * rho)

    def dpotential(self, rho: ArrayLike) -> ArrayLike:
        _check_positive(rho, "density")
        coeff = self.a / (self.gamma - 1.0)
        return coeff * (self.gamma * rho ** (self.gamma - 1.0) - self.rho_bar ** (self.gamma - 1.0))
