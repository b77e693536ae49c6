"""Error norms, equilibrium distances and sampling helpers."""
from __future__ import annotations

import numpy as np

from .mesh import Mesh1D
from .quadrature import Basis1D, Basis2D, gauss_rule


def _cell_points(k: int, n: int | None = None):
    xi, w = gauss_rule(k + 2 if n is None else n, (-1.0, 1.0))
    return xi, w  # weights sum to 1


def evaluate_1d(coef: np.ndarray, k: int, xi: np.ndarray) -> np.ndarray:
    """Values (ncell, ncomp, npts) at reference points."""
    return coef @ Basis1D(k).eval(np.asarray(xi, float))[0]


def evaluate_2d(coef: np.ndarray, k: int, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    return coef @ Basis2D(k).eval(np.asarray(xi, float), np.asarray(eta, float))[0]


def _measure(mesh, interior: tuple) -> float:
    """Total measure of the evolved cells (the domain itself for the primal family)."""
    if isinstance(mesh, Mesh1D):
        return mesh.dx * len(range(*interior[0].indices(10**9)))
    nx = len(range(*interior[0].indices(10**9)))
    ny = len(range(*interior[1].indices(10**9)))
    return mesh.dx * mesh.dy * nx * ny


def l1_error(coef: np.ndarray, mesh, family: str, k: int, f, interior: tuple, normalize: bool = True) -> np.ndarray:
    """Per-component sum over evolved cells of the integral of |u_h - f|.

    Cell integrals use a (k+2)-point Gauss rule per direction. With
    ``normalize`` the sum is divided by the evolved measure.
    """
    scale = 1.0 / _measure(mesh, interior) if normalize else 1.0
    xi, w = _cell_points(k)
    if isinstance(mesh, Mesh1D):
        c = mesh.centers(family)[interior[0]]
        x = c[:, None] + 0.5 * mesh.dx * xi
        uh = evaluate_1d(coef[interior], k, xi)
        ex = np.moveaxis(np.asarray(f(x), float), 0, 1)
        return scale * mesh.dx * (np.abs(uh - ex) @ w).sum(axis=0)
    a, b = np.meshgrid(xi, xi, indexing="ij")
    ww = np.outer(w, w).ravel()
    X, Y = mesh.centers(family)
    X, Y = X[interior], Y[interior]
    x = X[..., None] + 0.5 * mesh.dx * a.ravel()
    y = Y[..., None] + 0.5 * mesh.dy * b.ravel()
    uh = evaluate_2d(coef[interior], k, a.ravel(), b.ravel())
    ex = np.moveaxis(np.asarray(f(x, y), float), 0, -2)
    return scale * mesh.dx * mesh.dy * (np.abs(uh - ex) @ ww).reshape(-1, uh.shape[-2]).sum(axis=0)


def l1_distance(coef: np.ndarray, ref: np.ndarray, mesh, k: int, interior: tuple, normalize: bool = True) -> np.ndarray:
    """Per-component L1 distance between two fields of the same family."""
    scale = 1.0 / _measure(mesh, interior) if normalize else 1.0
    xi, w = _cell_points(k)
    d = coef[interior] - ref[interior]
    if isinstance(mesh, Mesh1D):
        return scale * mesh.dx * (np.abs(evaluate_1d(d, k, xi)) @ w).sum(axis=0)
    a, b = np.meshgrid(xi, xi, indexing="ij")
    vals = np.abs(evaluate_2d(d, k, a.ravel(), b.ravel())) @ np.outer(w, w).ravel()
    return scale * mesh.dx * mesh.dy * vals.reshape(-1, d.shape[-2]).sum(axis=0)


def orders(errors: list, ns: list) -> list:
    """Observed orders between successive levels of a refinement ladder."""
    out = []
    for i in range(1, len(errors)):
        r = np.log(np.asarray(errors[i - 1]) / np.asarray(errors[i])) / np.log(ns[i] / ns[i - 1])
        out.append(r)
    return out


def _locate(ax, x: np.ndarray):
    j = np.clip(np.floor((x - ax.lo) / ax.h).astype(int), 0, ax.n - 1)
    xi = 2.0 * (x - (ax.lo + (j + 0.5) * ax.h)) / ax.h
    return j + 1, xi


def sample_primal(coef: np.ndarray, mesh, k: int, *x) -> np.ndarray:
    """Primal-field states (ncomp, npts) at physical points inside the domain."""
    if isinstance(mesh, Mesh1D):
        p, xi = _locate(mesh.axis, np.asarray(x[0], float).ravel())
        phi = Basis1D(k).eval(xi)[0]
        return np.einsum("pcl,lp->cp", coef[p], phi)
    px, xi = _locate(mesh.ax, np.asarray(x[0], float).ravel())
    py, eta = _locate(mesh.ay, np.asarray(x[1], float).ravel())
    phi = Basis2D(k).eval(xi, eta)[0]
    return np.einsum("pcl,lp->cp", coef[px, py], phi)
