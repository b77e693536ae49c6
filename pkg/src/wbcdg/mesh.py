"""Overlapping primal/dual uniform meshes with ghost layers.

Indexing along one axis with N interior primal cells:

* primal array index ``p`` holds cell j = p - 1, j in [-1, N]; interior p = 1..N;
* dual array index ``q`` holds dual cell d = q - 1 spanning (x_{d-1}, x_d),
  d in [-1, N+1]. Dual cells d = 0 and d = N straddle the boundary.

A cell's left half is covered by the right half of opposite cell ``L`` and its
right half by the left half of opposite cell ``R``: for primal cells
L = p, R = p + 1 (dual indices); for dual cells L = q - 1, R = q (primal).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .quadrature import QuadratureSet

PRIMAL, DUAL = "primal", "dual"


@dataclass(frozen=True)
class Axis:
    """One coordinate direction of the mesh pair."""

    lo: float
    hi: float
    n: int
    periodic: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"need at least 2 cells per direction, got {self.n}")
        if not self.hi > self.lo:
            raise ConfigError(f"degenerate extent [{self.lo}, {self.hi}]")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.n

    def size(self, family: str) -> int:
        return self.n + 2 if family == PRIMAL else self.n + 3

    def origin(self, family: str) -> float:
        """Left edge of array cell 0."""
        return self.lo - self.h if family == PRIMAL else self.lo - 1.5 * self.h

    def centers(self, family: str) -> np.ndarray:
        return self.origin(family) + (np.arange(self.size(family)) + 0.5) * self.h

    def interior(self, family: str) -> slice:
        """Array slice of evolved cells."""
        if family == PRIMAL:
            return slice(1, self.n + 1)
        return slice(2, self.n + 2) if self.periodic else slice(1, self.n + 2)

    def overlap(self, family: str) -> tuple[np.ndarray, np.ndarray]:
        """Opposite-family indices covering the left and right halves of evolved cells."""
        idx = np.arange(self.size(family))[self.interior(family)]
        if family == PRIMAL:
            return idx, idx + 1
        return idx - 1, idx


def opposite(family: str) -> str:
    return DUAL if family == PRIMAL else PRIMAL


@dataclass(frozen=True)
class Mesh1D:
    axis: Axis

    @property
    def dim(self) -> int:
        return 1

    @property
    def dx(self) -> float:
        return self.axis.h

    @property
    def n(self) -> int:
        return self.axis.n

    def centers(self, family: str) -> np.ndarray:
        return self.axis.centers(family)

    def cell_interval(self, family: str, index: int) -> tuple[float, float]:
        a = self.axis.origin(family) + index * self.dx
        return a, a + self.dx

    def overlap_halves(self, q: int) -> tuple[tuple[float, float], tuple[float, float]]:
        """Primal half-cells (right half of one cell, left half of the next) forming dual cell ``q``."""
        if q < 0 or q >= self.axis.size(DUAL):
            raise IndexError(f"dual index {q} out of range")
        a, b = self.cell_interval(DUAL, q)
        mid = 0.5 * (a + b)
        return (a, mid), (mid, b)


@dataclass(frozen=True)
class Mesh2D:
    ax: Axis
    ay: Axis

    @property
    def dim(self) -> int:
        return 2

    @property
    def dx(self) -> float:
        return self.ax.h

    @property
    def dy(self) -> float:
        return self.ay.h

    def shape(self, family: str) -> tuple[int, int]:
        return self.ax.size(family), self.ay.size(family)

    def centers(self, family: str) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.ax.centers(family), self.ay.centers(family), indexing="ij")

    def quadrant(self, family: str, i: int, j: int, m: int) -> tuple[tuple[float, float], tuple[float, float]]:
        """Quadrant m of array cell (i, j): 0 lower-left, 1 lower-right, 2 upper-left, 3 upper-right."""
        x0 = self.ax.origin(family) + i * self.dx
        y0 = self.ay.origin(family) + j * self.dy
        hx, hy = 0.5 * self.dx, 0.5 * self.dy
        xs = (x0, x0 + hx) if m in (0, 2) else (x0 + hx, x0 + 2 * hx)
        ys = (y0, y0 + hy) if m in (0, 1) else (y0 + hy, y0 + 2 * hy)
        return xs, ys


@dataclass(frozen=True)
class CriticalPoints:
    """Reference-coordinate point sets shared by all cells of either family.

    ``gauss`` is Q (half-cell Gauss points of both halves); ``S`` adds the
    half-cell Gauss-Lobatto points. In 2D both are (xi, eta) arrays built from
    the mixed Gauss/Lobatto tensor products per quadrant.
    """

    dim: int
    gauss: tuple
    S: tuple

    @classmethod
    def build(cls, quad: QuadratureSet, dim: int) -> "CriticalPoints":
        gx, _ = quad.cell_gauss()
        if dim == 1:
            s = np.unique(np.concatenate((gx, quad.cell_lobatto())))
            return cls(1, (gx,), (s,))
        qs, ls = quad.gauss_nodes, quad.lobatto_nodes
        pts = set()
        for ox in (-1.0, 0.0):
            for oy in (-1.0, 0.0):
                for ax_, ay_ in ((qs, ls), (ls, qs), (qs, qs)):
                    for a in ax_:
                        for b in ay_:
                            pts.add((round(a + ox, 15), round(b + oy, 15)))
        arr = np.array(sorted(pts))
        g = np.array([(a + ox, b + oy) for ox in (-1.0, 0.0) for oy in (-1.0, 0.0) for a in qs for b in qs])
        return cls(2, (g[:, 0], g[:, 1]), (arr[:, 0], arr[:, 1]))

    def physical(self, center, h) -> tuple:
        """Physical coordinates of S around a cell center with cell size(s) h."""
        if self.dim == 1:
            return (center + 0.5 * h * self.S[0],)
        return tuple(c + 0.5 * hh * s for c, hh, s in zip(center, h, self.S))


def build_meshes(dim: int, extent, n, periodic=(False, False), k: int = 2):
    """Mesh pair and critical point sets for degree k."""
    if dim == 1:
        mesh = Mesh1D(Axis(extent[0], extent[1], int(n), bool(periodic[0])))
    else:
        (x0, x1), (y0, y1) = extent
        nx, ny = (n, n) if np.isscalar(n) else n
        mesh = Mesh2D(Axis(x0, x1, int(nx), bool(periodic[0])), Axis(y0, y1, int(ny), bool(periodic[1])))
    quad = QuadratureSet.build(k)
    return mesh, CriticalPoints.build(quad, dim)
