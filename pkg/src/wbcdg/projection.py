"""L2 and half-cell-mean-preserving projections onto piecewise polynomials.

Coefficient arrays have shape (ncell, ncomp, nbasis) in 1D and
(nx, ny, ncomp, nbasis) in 2D. ``f`` maps coordinates to an array whose
leading axis is the component axis.

The novel projection keeps every L2 moment except the linear one(s), which are
chosen so that the means over the left half-cell (1D) or over the quadrants
(2D) equal those of f. Primal and dual projections of the same function then
share cell averages on both meshes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .mesh import DUAL, PRIMAL, Mesh1D, Mesh2D
from .quadrature import Basis1D, Basis2D, gauss_rule


@dataclass
class PolyField:
    """Modal coefficients of one mesh family."""

    coef: np.ndarray
    family: str
    k: int
    dim: int

    @property
    def ncomp(self) -> int:
        return self.coef.shape[-2]

    def averages(self) -> np.ndarray:
        return self.coef[..., 0]

    def copy(self) -> "PolyField":
        return PolyField(self.coef.copy(), self.family, self.k, self.dim)


# ------------------------------------------------------------------- 1D


@lru_cache(maxsize=None)
def _half_points_1d(k: int, extra: int = 3):
    s, w = gauss_rule(k + extra, (0.0, 1.0))
    xi = np.concatenate((s - 1.0, s))
    return xi, np.concatenate((w, w)), len(s), Basis1D(k).eval(xi)[0]


def _sample_1d(f, centers, h, xi):
    x = centers[:, None] + 0.5 * h * xi[None, :]
    fv = np.asarray(f(x), dtype=float)
    if fv.ndim == 2:
        fv = fv[None]
    return np.moveaxis(fv, 0, 1)  # (ncell, ncomp, npts)


def project_l2_1d(f, centers, h: float, k: int) -> np.ndarray:
    """N_i = int f Phi_i / int Phi_i^2 on each cell centered at ``centers``."""
    basis = Basis1D(k)
    xi, w, _, phi = _half_points_1d(k)
    fv = _sample_1d(f, np.asarray(centers, float), h, xi)
    return (fv * w) @ phi.T / basis.norms


def project_novel_1d(f, centers, h: float, k: int) -> np.ndarray:
    """Novel projection constraining the mean over each cell's left half.

    For primal cells the left half is I_j^-; for dual cells it is I_j^+ of the
    primal cell underneath, so the same formula serves both families.
    """
    basis = Basis1D(k)
    xi, w, n, phi = _half_points_1d(k)
    fv = _sample_1d(f, np.asarray(centers, float), h, xi)
    coef = (fv * w) @ phi.T / basis.norms
    if k >= 1:
        others = np.delete(np.arange(k + 1), 1)
        rem = fv[..., :n] - coef[..., others] @ phi[others][:, :n]
        # left-half integral of Phi_1 is -h/4, i.e. -1/2 in units of h/2
        coef[..., 1] = -2.0 * (rem @ w[:n])
    return coef


def project_novel_primal_1d(f, mesh: Mesh1D, k: int) -> PolyField:
    return PolyField(project_novel_1d(f, mesh.centers(PRIMAL), mesh.dx, k), PRIMAL, k, 1)


def project_novel_dual_1d(f, mesh: Mesh1D, k: int) -> PolyField:
    return PolyField(project_novel_1d(f, mesh.centers(DUAL), mesh.dx, k), DUAL, k, 1)


def project_l2(f, mesh, family: str, k: int) -> PolyField:
    if isinstance(mesh, Mesh1D):
        return PolyField(project_l2_1d(f, mesh.centers(family), mesh.dx, k), family, k, 1)
    X, Y = mesh.centers(family)
    return PolyField(project_l2_2d(f, X, Y, mesh.dx, mesh.dy, k), family, k, 2)


# ------------------------------------------------------------------- 2D


def quadrant_points(s: np.ndarray, w: np.ndarray):
    """Tensor points of the four quadrants on [-1,1]^2, ordered by quadrant.

    Returns xi, eta, weights (each quadrant's weights sum to 1) and the
    quadrant id of every point.
    """
    xs, ys, ws, qs = [], [], [], []
    for q in range(4):
        ox = -1.0 if q in (0, 2) else 0.0
        oy = -1.0 if q in (0, 1) else 0.0
        a, b = np.meshgrid(s + ox, s + oy, indexing="ij")
        wa, wb = np.meshgrid(w, w, indexing="ij")
        xs.append(a.ravel())
        ys.append(b.ravel())
        ws.append((wa * wb).ravel())
        qs.append(np.full(a.size, q))
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws), np.concatenate(qs)


def _sample_2d(f, X, Y, dx, dy, xi, eta):
    x = X[..., None] + 0.5 * dx * xi
    y = Y[..., None] + 0.5 * dy * eta
    fv = np.asarray(f(x, y), dtype=float)
    if fv.ndim == X.ndim + 1:
        fv = fv[None]
    return np.moveaxis(fv, 0, -2)  # (..., ncomp, npts)


@lru_cache(maxsize=None)
def _quadrant_table(k: int):
    s, w = gauss_rule(k + 3, (0.0, 1.0))
    xi, eta, wq, quad = quadrant_points(s, w)
    return xi, eta, wq, quad, Basis2D(k).eval(xi, eta)[0]


def project_l2_2d(f, X, Y, dx: float, dy: float, k: int) -> np.ndarray:
    basis = Basis2D(k)
    xi, eta, wq, _, phi = _quadrant_table(k)
    fv = _sample_2d(f, np.asarray(X, float), np.asarray(Y, float), dx, dy, xi, eta)
    return ((fv * wq) @ phi.T) / basis.norms


def project_novel_2d_raw(f, X, Y, dx: float, dy: float, k: int) -> np.ndarray:
    """Novel 2D projection on cells centered at (X, Y); requires k >= 2."""
    basis = Basis2D(k)
    xi, eta, wq, quad, phi = _quadrant_table(k)
    fv = _sample_2d(f, np.asarray(X, float), np.asarray(Y, float), dx, dy, xi, eta)
    coef = ((fv * wq) @ phi.T) / basis.norms
    if k >= 2:
        others = np.array([l for l in range(basis.size) if l not in (1, 2, 3)])
        rem = (fv - coef[..., others] @ phi[others]) * wq
        # quadrant integrals divided by dx*dy (each quadrant has area dx*dy/4)
        B = [0.25 * rem[..., quad == m].sum(axis=-1) for m in range(3)]
        coef[..., 1] = -4.0 * (B[0] + B[2])
        coef[..., 2] = -4.0 * (B[0] + B[1])
        coef[..., 3] = -8.0 * (B[1] + B[2])
    return coef


def project_novel_2d(f, mesh: Mesh2D, family: str, k: int) -> PolyField:
    X, Y = mesh.centers(family)
    return PolyField(project_novel_2d_raw(f, X, Y, mesh.dx, mesh.dy, k), family, k, 2)


def project_novel(f, mesh, family: str, k: int) -> PolyField:
    if isinstance(mesh, Mesh1D):
        return PolyField(project_novel_1d(f, mesh.centers(family), mesh.dx, k), family, k, 1)
    return project_novel_2d(f, mesh, family, k)


# ------------------------------------------------------- equilibrium pair


@dataclass
class EquilibriumPair:
    """Projected stationary solution on both mesh families.

    ``cache`` is filled by the residual assembly with constant quadrature
    samples (pressure derivatives, edge terms, source weights).
    """

    primal: PolyField
    dual: PolyField
    gamma: float
    cache: dict = field(default_factory=dict)

    def field(self, family: str) -> PolyField:
        return self.primal if family == PRIMAL else self.dual


def build_equilibrium_pair(profile, mesh, k: int, gamma: float, limit: bool = True) -> EquilibriumPair:
    """Project (rho^s, 0, p^s/(gamma-1)) with the novel projection on both families."""
    from .errors import SetupError
    from .limiters import pp_limit

    def f(*x):
        return profile.state(*x, gamma=gamma)

    pair = EquilibriumPair(project_novel(f, mesh, PRIMAL, k), project_novel(f, mesh, DUAL, k), gamma)
    if limit:
        for fam in (PRIMAL, DUAL):
            fld = pair.field(fam)
            try:
                fld.coef[...] = pp_limit(fld.coef, k, gamma, dim=mesh.dim)[0]
            except Exception as exc:  # noqa: BLE001
                raise SetupError(f"projected equilibrium inadmissible on {fam} mesh: {exc}") from exc
    return pair
