"""Positivity-preserving scaling limiter and well-balanced WENO limiting.

The WENO part follows the compact "simple WENO" construction: a troubled
cell's polynomial is replaced by a nonlinear convex combination of its own
polynomial and its neighbours' polynomials (shifted to share the cell mean),
done in characteristic variables. Both detection and reconstruction act on
the perturbation from the projected equilibrium, so an equilibrium state is
never touched.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import PositivityError
from .euler import pressure
from .mesh import CriticalPoints
from .quadrature import Basis1D, Basis2D, QuadratureSet, gauss_rule, mm

EPS_FLOOR = 1e-13


@dataclass
class LimiterReport:
    rho_limited: int = 0
    p_limited: int = 0
    troubled: int = 0
    theta1_min: float = 1.0
    theta2_min: float = 1.0
    rho_min: float = np.inf
    p_min: float = np.inf

    def merge(self, other: "LimiterReport") -> None:
        self.rho_limited += other.rho_limited
        self.p_limited += other.p_limited
        self.troubled += other.troubled
        self.theta1_min = min(self.theta1_min, other.theta1_min)
        self.theta2_min = min(self.theta2_min, other.theta2_min)
        self.rho_min = min(self.rho_min, other.rho_min)
        self.p_min = min(self.p_min, other.p_min)


@dataclass(frozen=True)
class TvbParams:
    M: tuple = (0.0,)

    def per_component(self, ncomp: int) -> np.ndarray:
        m = np.asarray(self.M, dtype=float).ravel()
        if np.any(m < 0):
            raise ValueError("TVB constants must be nonnegative")
        if m.size not in (1, ncomp):
            raise ValueError(f"expected 1 or {ncomp} TVB constants, got {m.size}")
        return np.broadcast_to(m, (ncomp,)).copy()


# --------------------------------------------------------------- scaling


@lru_cache(maxsize=None)
def critical_matrix(k: int, dim: int) -> np.ndarray:
    """Basis values at the critical point set S, shape (nbasis, npts)."""
    cp = CriticalPoints.build(QuadratureSet.build(k), dim)
    if dim == 1:
        return Basis1D(k).eval(cp.S[0])[0]
    return Basis2D(k).eval(*cp.S)[0]


@njit(cache=True, error_model="numpy")
def _point_minima(c, i, phi, gm1, V):
    ncomp, nb = c.shape[1], c.shape[2]
    nS = phi.shape[1]
    for d in range(ncomp):
        for q in range(nS):
            V[d, q] = 0.0
        for l in range(nb):
            a = c[i, d, l]
            if a != 0.0:
                for q in range(nS):
                    V[d, q] += a * phi[l, q]
    rmin = np.inf
    pmin = np.inf
    for q in range(nS):
        kin = 0.0
        for d in range(1, ncomp - 1):
            kin += V[d, q] * V[d, q]
        rmin = min(rmin, V[0, q])
        pmin = min(pmin, gm1 * (V[ncomp - 1, q] - 0.5 * kin / V[0, q]))
    return rmin, pmin


@njit(cache=True, error_model="numpy")
def _pp_kernel(c, phi, gamma, repeats, eps, out):
    """In-place scaling on c (ncell, ncomp, nbasis); out collects per-cell stats.

    out columns: rho limited, p limited, theta1, theta2, rho min, p min.
    """
    nc, ncomp, nb = c.shape
    gm1 = gamma - 1.0
    V = np.zeros((ncomp, phi.shape[1]))
    for i in range(nc):
        rbar = c[i, 0, 0]
        kin = 0.0
        for d in range(1, ncomp - 1):
            kin += c[i, d, 0] * c[i, d, 0]
        pbar = gm1 * (c[i, ncomp - 1, 0] - 0.5 * kin / rbar)
        eps1 = min(eps, rbar)
        eps2 = min(eps, pbar)
        out[i, 2] = 1.0
        out[i, 3] = 1.0
        rmin, pmin = _point_minima(c, i, phi, gm1, V)
        if rmin < eps1:
            th1 = min(1.0, (rbar - eps1) / (rbar - rmin))
            for l in range(1, nb):
                c[i, 0, l] *= th1
            out[i, 0] = 1.0
            out[i, 2] = th1
            rmin, pmin = _point_minima(c, i, phi, gm1, V)
        for attempt in range(1 + repeats):
            if not pmin < eps2:
                break
            th2 = (pbar - eps2) / (pbar - pmin)
            if not th2 > 0.0:
                th2 = 0.0
            th2 = min(th2, 1.0)
            if attempt == repeats:
                th2 = 0.0
            for d in range(ncomp):
                for l in range(1, nb):
                    c[i, d, l] *= th2
            if attempt == 0:
                out[i, 1] = 1.0
            out[i, 3] = min(out[i, 3], th2)
            rmin, pmin = _point_minima(c, i, phi, gm1, V)
        out[i, 4] = rmin
        out[i, 5] = pmin


def pp_limit(coef: np.ndarray, k: int, gamma: float, dim: int = 1, phi_S: np.ndarray | None = None,
             repeats: int = 2, strict: np.ndarray | None = None, fast: bool = True):
    """Scale each cell toward its average so that rho, p >= eps at the points S.

    ``coef`` has shape (..., ncomp, nbasis); returns (new coef, LimiterReport).
    An inadmissible average is a fault in cells where ``strict`` is true (all
    cells by default); other such cells are returned untouched.
    """
    phi = critical_matrix(k, dim) if phi_S is None else phi_S
    coef = np.array(coef, dtype=float, copy=True)
    shape = coef.shape
    full = coef.reshape(-1, shape[-2], shape[-1])
    avg = full[:, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = (avg[:, 0] > 0) & (pressure(avg.T, gamma) > 0)
    if not np.all(ok):
        hard = ~ok if strict is None else ~ok & np.broadcast_to(strict, shape[:-2]).ravel()
        if np.any(hard):
            bad = np.flatnonzero(hard)
            raise PositivityError(f"inadmissible cell average in {bad.size} cells (first flat index {bad[0]})", where=bad)
        c = full[ok]
    else:
        c = full
    rep = LimiterReport()
    if not fast:
        rep = _scale_numpy(c, phi, gamma, repeats)
    elif c.shape[0]:
        c = np.ascontiguousarray(c)
        st = np.zeros((c.shape[0], 6))
        _pp_kernel(c, np.ascontiguousarray(phi), float(gamma), int(repeats), EPS_FLOOR, st)
        rep.rho_limited = int(st[:, 0].sum())
        rep.p_limited = int(st[:, 1].sum())
        rep.theta1_min = float(st[:, 2].min())
        rep.theta2_min = float(st[:, 3].min())
        rep.rho_min = float(st[:, 4].min())
        rep.p_min = float(st[:, 5].min())
    if c is not full:
        full[ok] = c
    elif fast and c.shape[0]:
        full[...] = c
    return full.reshape(shape), rep


def _scale_numpy(c, phi, gamma, repeats):
    """Vectorised reference for the compiled scaling; edits c in place."""
    rep = LimiterReport()
    rbar = c[:, 0, 0]
    pbar = pressure(c[:, :, 0].T, gamma)

    rho = mm(c[:, 0, :], phi)
    rmin = rho.min(axis=1)
    eps1 = np.minimum(EPS_FLOOR, rbar)
    m1 = rmin < eps1
    theta1 = np.ones_like(rbar)
    if np.any(m1):
        theta1[m1] = np.minimum(1.0, (rbar[m1] - eps1[m1]) / (rbar[m1] - rmin[m1]))
        sub = c[m1]
        sub[:, 0, 1:] *= theta1[m1][:, None]
        c[m1] = sub
        rep.rho_limited = int(m1.sum())
        rep.theta1_min = float(theta1.min())

    eps2 = np.minimum(EPS_FLOOR, pbar)
    for attempt in range(1 + repeats):
        vals = mm(c, phi)
        p = pressure(np.moveaxis(vals, 1, 0), gamma)
        pmin = p.min(axis=1)
        m2 = pmin < eps2
        if not np.any(m2):
            break
        theta2 = np.ones_like(pbar)
        with np.errstate(divide="ignore", invalid="ignore"):
            theta2[m2] = np.clip((pbar[m2] - eps2[m2]) / (pbar[m2] - pmin[m2]), 0.0, 1.0)
        if attempt == repeats:
            theta2[m2] = 0.0  # collapse to the (admissible) average
        sub = c[m2]
        sub[:, :, 1:] *= theta2[m2][:, None, None]
        c[m2] = sub
        rep.p_limited = max(rep.p_limited, int(m2.sum()))
        rep.theta2_min = min(rep.theta2_min, float(theta2.min()))

    vals = mm(c, phi)
    rep.rho_min = float(vals[:, 0, :].min())
    rep.p_min = float(pressure(np.moveaxis(vals, 1, 0), gamma).min())
    return rep



# --------------------------------------------------------- TVB detection


def tvb_minmod(*a, M: float = 0.0, h: float = 1.0):
    """Return a1 if |a1| <= M h^2, else the classical minmod of all arguments."""
    if len(a) < 2:
        raise ValueError("tvb_minmod needs at least two arguments")
    a = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in a))
    stack = np.stack(a)
    s = np.sign(stack[0])
    same = np.all(np.sign(stack) == s, axis=0)
    mm = np.where(same, s * np.min(np.abs(stack), axis=0), 0.0)
    out = np.where(np.abs(stack[0]) <= M * h * h, stack[0], mm)
    return out if out.ndim else float(out)


def _flag(dev, dplus, dminus, M, h):
    """True where the minmod-modified deviation differs from the actual one."""
    thr = M * h * h
    s = np.sign(dev)
    same = (np.sign(dplus) == s) & (np.sign(dminus) == s)
    mm = np.where(same, s * np.minimum(np.abs(dev), np.minimum(np.abs(dplus), np.abs(dminus))), 0.0)
    modified = np.where(np.abs(dev) <= thr, dev, mm)
    return modified != dev


def detect_troubled_1d(coef, eq, M: np.ndarray, h: float, interior: slice) -> np.ndarray:
    """Troubled-cell mask (over interior cells) from TVB detection on U - U^s."""
    pert = coef - eq
    k = coef.shape[-1] - 1
    v1, _ = Basis1D(k).eval(np.array([-1.0, 1.0]))
    ubar = pert[:, :, 0]
    left = pert @ v1[:, 0]
    right = pert @ v1[:, 1]
    idx = np.arange(coef.shape[0])[interior]
    dp = ubar[idx + 1] - ubar[idx]
    dm = ubar[idx] - ubar[idx - 1]
    f1 = _flag(right[idx] - ubar[idx], dp, dm, M, h)
    f2 = _flag(ubar[idx] - left[idx], dp, dm, M, h)
    return np.any(f1 | f2, axis=1)


def detect_troubled_2d(coef, eq, M: np.ndarray, hx: float, hy: float, ix: slice, iy: slice) -> np.ndarray:
    """Mask of shape (nx_interior, ny_interior); x and y checks use edge means."""
    pert = coef - eq
    basis = Basis2D(_deg2d(coef.shape[-1]))
    ax, ay = basis.xpow, basis.ypow
    v1, _ = Basis1D(basis.k).eval(np.array([-1.0, 1.0]))
    ex_r = np.where(ay == 0, v1[ax, 1], 0.0)
    ex_l = np.where(ay == 0, v1[ax, 0], 0.0)
    ey_t = np.where(ax == 0, v1[ay, 1], 0.0)
    ey_b = np.where(ax == 0, v1[ay, 0], 0.0)
    ubar = pert[..., 0]
    I = np.arange(coef.shape[0])[ix][:, None]
    J = np.arange(coef.shape[1])[iy][None, :]
    c = ubar[I, J]
    flags = np.zeros(c.shape[:2] + (coef.shape[2],), dtype=bool)
    for (ep, em), (nP, nM), h in (
        ((ex_r, ex_l), ((I + 1, J), (I - 1, J)), hx),
        ((ey_t, ey_b), ((I, J + 1), (I, J - 1)), hy),
    ):
        dp = ubar[nP] - c
        dm = c - ubar[nM]
        up = pert[I, J] @ ep
        um = pert[I, J] @ em
        flags |= _flag(up - c, dp, dm, M, h) | _flag(c - um, dp, dm, M, h)
    return np.any(flags, axis=-1)


def _deg2d(nb: int) -> int:
    return {1: 0, 3: 1, 6: 2, 10: 3}[nb]


# ------------------------------------------------------------------ WENO

GAMMA_CENTER_1D = 0.998
GAMMA_CENTER_2D = 0.996
GAMMA_SIDE = 0.001
WENO_EPS = 1e-6


@lru_cache(maxsize=None)
def _shift_matrix_1d(k: int, shift: float) -> np.ndarray:
    """T with (c @ T) the coefficients of xi -> p(xi + shift)."""
    basis = Basis1D(k)
    x, w = gauss_rule(k + 2)
    v, _ = basis.eval(x)
    vs, _ = basis.eval(x + shift)
    return (vs * w) @ v.T / (basis.norms / 2.0)


@lru_cache(maxsize=None)
def _shift_matrix_2d(k: int, sx: float, sy: float) -> np.ndarray:
    basis = Basis2D(k)
    s, w = gauss_rule(k + 2)
    X, Y = np.meshgrid(s, s, indexing="ij")
    W = np.outer(w, w).ravel()
    v = basis.eval(X.ravel(), Y.ravel())[0]
    vs = basis.eval(X.ravel() + sx, Y.ravel() + sy)[0]
    return (vs * W) @ v.T / (basis.norms / 4.0)


@lru_cache(maxsize=None)
def _smoothness_1d(k: int) -> np.ndarray:
    """Quadratic form B with beta = c^T B c (mesh-size free reference form)."""
    x, w = gauss_rule(k + 2)
    B = np.zeros((k + 1, k + 1))
    for m in range(1, k + 1):
        d = np.stack([np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(_mono(i), m)) for i in range(k + 1)])
        B += 2.0 ** (2 * m - 1) * 2.0 * (d * w) @ d.T
    return B


def _mono(i):
    from .quadrature import _MONIC

    return _MONIC[i]


@lru_cache(maxsize=None)
def _smoothness_2d(k: int) -> np.ndarray:
    basis = Basis2D(k)
    s, w = gauss_rule(k + 2)
    X, Y = np.meshgrid(s, s, indexing="ij")
    W = 4.0 * np.outer(w, w).ravel()  # weights on [-1,1]^2
    P = np.polynomial.polynomial
    B = np.zeros((basis.size, basis.size))
    for lx in range(k + 1):
        for ly in range(k + 1 - lx):
            if lx + ly == 0:
                continue
            d = np.stack([
                P.polyval(X.ravel(), P.polyder(_mono(a), lx)) * P.polyval(Y.ravel(), P.polyder(_mono(b), ly))
                for a, b in basis.pairs
            ])
            B += 4.0 ** (lx + ly - 1) * (d * W) @ d.T
    return B


def euler_eigenvectors(avg: np.ndarray, gamma: float, direction: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Right/left eigenvector matrices of the flux Jacobian at states ``avg`` (n, ncomp)."""
    n, nc = avg.shape
    rho = avg[:, 0]
    if nc == 3:
        u = avg[:, 1] / rho
        p = (gamma - 1.0) * (avg[:, 2] - 0.5 * rho * u * u)
        c = np.sqrt(gamma * p / rho)
        H = (avg[:, 2] + p) / rho
        one = np.ones(n)
        R = np.stack([
            np.stack([one, one, one], -1),
            np.stack([u - c, u, u + c], -1),
            np.stack([H - u * c, 0.5 * u * u, H + u * c], -1),
        ], 1)
    else:
        u = avg[:, 1] / rho
        v = avg[:, 2] / rho
        q2 = u * u + v * v
        p = (gamma - 1.0) * (avg[:, 3] - 0.5 * rho * q2)
        c = np.sqrt(gamma * p / rho)
        H = (avg[:, 3] + p) / rho
        one, zero = np.ones(n), np.zeros(n)
        if direction == 0:
            R = np.stack([
                np.stack([one, one, zero, one], -1),
                np.stack([u - c, u, zero, u + c], -1),
                np.stack([v, v, one, v], -1),
                np.stack([H - u * c, 0.5 * q2, v, H + u * c], -1),
            ], 1)
        else:
            R = np.stack([
                np.stack([one, one, zero, one], -1),
                np.stack([u, u, one, u], -1),
                np.stack([v - c, v, zero, v + c], -1),
                np.stack([H - v * c, 0.5 * q2, u, H + v * c], -1),
            ], 1)
    if not np.all(np.isfinite(R)):
        raise PositivityError("characteristic decomposition at an inadmissible average")
    return R, np.linalg.inv(R)


def _weno_combine(polys: np.ndarray, gammas: np.ndarray, B: np.ndarray) -> np.ndarray:
    """polys: (n, npoly, nchar, nbasis) sharing coefficient 0; returns (n, nchar, nbasis)."""
    beta = np.einsum("npci,ij,npcj->npc", polys, B, polys)
    wt = gammas[None, :, None] / (WENO_EPS + beta) ** 2
    wt /= wt.sum(axis=1, keepdims=True)
    return np.einsum("npc,npci->nci", wt, polys)


def weno_limit_1d(coef, eq, mask: np.ndarray, interior: slice, gamma: float) -> np.ndarray:
    """Rebuild troubled interior cells; other cells are returned bit-identical."""
    out = coef.copy()
    if not np.any(mask):
        return out
    k = coef.shape[-1] - 1
    idx = np.arange(coef.shape[0])[interior][mask]
    pert = coef - eq
    self_ = pert[idx]
    left = pert[idx - 1] @ _shift_matrix_1d(k, -2.0)
    right = pert[idx + 1] @ _shift_matrix_1d(k, 2.0)
    mean = self_[:, :, :1]
    left[:, :, :1] = mean
    right[:, :, :1] = mean
    R, L = euler_eigenvectors(coef[idx, :, 0], gamma)
    polys = np.stack([L @ self_, L @ left, L @ right], axis=1)
    g = np.array([GAMMA_CENTER_1D, GAMMA_SIDE, GAMMA_SIDE])
    new = R @ _weno_combine(polys, g, _smoothness_1d(k))
    new[:, :, 0] = self_[:, :, 0]
    out[idx] = eq[idx] + new
    out[idx, :, 0] = coef[idx, :, 0]
    return out


def weno_limit_2d(coef, eq, mask: np.ndarray, ix: slice, iy: slice, gamma: float) -> np.ndarray:
    out = coef.copy()
    if not np.any(mask):
        return out
    k = _deg2d(coef.shape[-1])
    I0 = np.arange(coef.shape[0])[ix]
    J0 = np.arange(coef.shape[1])[iy]
    ii, jj = np.nonzero(mask)
    I, J = I0[ii], J0[jj]
    pert = coef - eq
    self_ = pert[I, J]
    mean = self_[:, :, :1]
    nbrs = []
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        pn = pert[I + di, J + dj] @ _shift_matrix_2d(k, 2.0 * di, 2.0 * dj)
        pn[:, :, :1] = mean
        nbrs.append(pn)
    g = np.array([GAMMA_CENTER_2D] + [GAMMA_SIDE] * 4)
    B = _smoothness_2d(k)
    acc = np.zeros_like(self_)
    for direction in (0, 1):
        R, L = euler_eigenvectors(coef[I, J, :, 0], gamma, direction)
        polys = np.stack([L @ self_] + [L @ pn for pn in nbrs], axis=1)
        acc += 0.5 * (R @ _weno_combine(polys, g, B))
    acc[:, :, 0] = self_[:, :, 0]
    out[I, J] = eq[I, J] + acc
    out[I, J, :, 0] = coef[I, J, :, 0]
    return out
