"""Structured rectangular grids with per-side boundary conditions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class BoundaryKind(Enum):
    """Condition applied on one side of the domain."""

    NOSLIP = "noslip"
    NAVIERSLIP = "navierslip"
    PERIODIC = "periodic"


class GridError(ValueError):
    """Inconsistent grid specification."""


@dataclass(frozen=True)
class Grid:
    """Cell-centered rectangular mesh in 1 or 2 dimensions.

    ``boundary`` holds one :class:`BoundaryKind` per side, ordered
    ``(x_lo, x_hi)`` in 1D and ``(x_lo, x_hi, y_lo, y_hi)`` in 2D.
    Periodic sides must come in opposing pairs.
    """

    cells: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]
    boundary: tuple[BoundaryKind, ...]

    def __post_init__(self) -> None:
        dim = len(self.cells)
        if dim not in (1, 2):
            raise GridError(f"only 1D and 2D grids are supported, got dim={dim}")
        if len(self.spacing) != dim or len(self.origin) != dim:
            raise GridError("cells, spacing and origin must have matching length")
        if len(self.boundary) != 2 * dim:
            raise GridError(f"expected {2 * dim} boundary sides, got {len(self.boundary)}")
        if any(n < 4 for n in self.cells):
            raise GridError(f"need at least 4 cells per axis, got {self.cells}")
        if any(h <= 0 for h in self.spacing):
            raise GridError(f"spacing must be positive, got {self.spacing}")
        for axis in range(dim):
            lo, hi = self.boundary[2 * axis], self.boundary[2 * axis + 1]
            if (lo is BoundaryKind.PERIODIC) != (hi is BoundaryKind.PERIODIC):
                raise GridError(f"periodic sides on axis {axis} must come in pairs")

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(n * h for n, h in zip(self.cells, self.spacing))

    def axis_periodic(self, axis: int) -> bool:
        return self.boundary[2 * axis] is BoundaryKind.PERIODIC

    def side_kind(self, axis: int, side: int) -> BoundaryKind:
        """Boundary kind on one side; ``side`` 0 is the low face, 1 the high face."""
        return self.boundary[2 * axis + side]

    def axis_coords(self, axis: int) -> np.ndarray:
        n, h, x0 = self.cells[axis], self.spacing[axis], self.origin[axis]
        return x0 + (np.arange(n) + 0.5) * h

    def cell_centers(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of cell centers, each shaped like the grid."""
        axes = [self.axis_coords(a) for a in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def wall_sides(self) -> list[tuple[int, int]]:
        """(axis, side) pairs for every non-periodic side."""
        return [
            (axis, side)
            for axis in range(self.dim)
            for side in (0, 1)
            if self.side_kind(axis, side) is not BoundaryKind.PERIODIC
        ]

    def wall_face_centers(self, axis: int, side: int) -> tuple[tuple[np.ndarray, ...], float]:
        """Face-center coordinates along one wall and the face measure.

        In 2D the wall is a line of ``cells[other]`` faces of length
        ``spacing[other]`` each; in 1D it is a single point of measure 1.
        """
        wall_pos = self.origin[axis] + (0.0 if side == 0 else self.extent[axis])
        if self.dim == 1:
            return (np.array([wall_pos]),), 1.0
        other = 1 - axis
        tang = self.axis_coords(other)
        fixed = np.full_like(tang, wall_pos)
        coords = (fixed, tang) if axis == 0 else (tang, fixed)
        return coords, self.spacing[other]

    @classmethod
    def regular(
        cls,
        cells: int | tuple[int, ...],
        extent: float | tuple[float, ...] = 1.0,
        origin: float | tuple[float, ...] = 0.0,
        boundary: str | BoundaryKind | tuple = BoundaryKind.PERIODIC,
    ) -> "Grid":
        """Uniform grid over a box.

        ``boundary`` may be a single kind (all sides), one kind per axis
        (both sides of that axis), or the full per-side tuple.
        """
        cells_t = (cells,) if isinstance(cells, int) else tuple(int(n) for n in cells)
        dim = len(cells_t)
        extent_t = (float(extent),) * dim if np.isscalar(extent) else tuple(float(e) for e in extent)
        origin_t = (float(origin),) * dim if np.isscalar(origin) else tuple(float(o) for o in origin)
        spacing = tuple(e / n for e, n in zip(extent_t, cells_t))

        def as_kind(b) -> BoundaryKind:
            return BoundaryKind(b) if isinstance(b, str) else b

        if isinstance(boundary, (str, BoundaryKind)):
            sides = (as_kind(boundary),) * (2 * dim)
        else:
            entries = tuple(as_kind(b) for b in boundary)
            if len(entries) == dim:
                sides = tuple(entries[axis] for axis in range(dim) for _ in (0, 1))
            elif len(entries) == 2 * dim:
                sides = entries
            else:
                raise GridError(f"boundary must have {dim} or {2 * dim} entries")
        return cls(cells=cells_t, spacing=spacing, origin=origin_t, boundary=sides)
