"""Semi-discrete well-balanced CDG operators in one dimension.

For a cell of one family, the opposite family supplies the solution on both
half-cells and at both interfaces (which are interior points of opposite
cells), so no Riemann solver is needed. Every term that depends only on the
projected equilibrium is precomputed once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels1d
from .errors import PositivityError, SetupError
from .mesh import DUAL, PRIMAL, Mesh1D, opposite
from .quadrature import Basis1D, QuadratureSet


@dataclass
class FamilyOps:
    """Precomputed maps for evolving one family against its opposite."""

    L: np.ndarray  # opposite cell covering the left half
    R: np.ndarray  # opposite cell covering the right half
    A: np.ndarray  # (ncell, nbasis) r-bar coefficient of the source, divided by mean rho^s
    W: np.ndarray  # (ncell, npts, nbasis) pointwise source weights
    phihat: np.ndarray  # (ncell, npts) modified potential gradient
    rho_s_mean: np.ndarray


class Scheme1D:
    """Right-hand sides and CFL coefficients for both mesh families."""

    def __init__(self, mesh: Mesh1D, k: int, gamma: float, eq: dict, grad_phi=None, wb: bool = True,
                 fast: bool = True):
        self.mesh, self.k, self.gamma, self.wb, self.fast = mesh, k, gamma, wb, fast
        self.eqc = {f: eq[f] for f in (PRIMAL, DUAL)} if wb else None
        self.basis = Basis1D(k)
        self.quad = QuadratureSet.build(k)
        s, w = self.quad.gauss_nodes, self.quad.gauss_weights
        n = s.size
        self.n = n
        self.w = np.concatenate((w, w))
        xi = np.concatenate((s - 1.0, s))
        self.xi = xi
        self.Tv, self.Td = self.basis.eval(xi)  # test functions at the cell's points
        self.BL = self.basis.eval(s)[0]  # opposite-left cell at its right half
        self.BR = self.basis.eval(s - 1.0)[0]
        self.dBL = self.basis.eval(s)[1]
        self.dBR = self.basis.eval(s - 1.0)[1]
        self.phi0 = self.basis.eval(np.array([0.0]))[0][:, 0]
        ends = self.basis.eval(np.array([-1.0, 1.0]))[0]
        self.phim, self.phip = ends[:, 0], ends[:, 1]
        self.norms = self.basis.norms
        self.half = 0.5 * mesh.dx
        self.ops = {fam: self._build(fam, eq, grad_phi) for fam in (PRIMAL, DUAL)}
        self._kernel_tables()

    def _kernel_tables(self) -> None:
        c, n, h = np.ascontiguousarray, self.n, self.half
        self.kB = c(np.stack((self.BL, self.BR)))
        self.kVx = c(self.Td * self.w)
        wt = self.w * self.Tv
        # dissipation is linear in the opposite coefficients: one block per role
        self.kVd = c(np.stack([h * self.kB[r] @ wt[:, r * n:(r + 1) * n].T for r in range(2)]))
        self.kmass = h * self.norms
        self.kops = {f: (c(op.W), c(op.A), c(op.phihat), op.L.astype(np.int64), op.R.astype(np.int64))
                     for f, op in self.ops.items()}

    def perturbations(self, fam: str, X, Y):
        """Deviations from the projected equilibrium; the dissipation acts on these only."""
        if self.eqc is None:
            return X, Y
        return X - self.eqc[fam], Y - self.eqc[opposite(fam)]

    def interior(self, fam: str) -> tuple:
        return (self.mesh.axis.interior(fam),)

    # ------------------------------------------------------------ setup

    def _gather(self, Y, L, R):
        return np.concatenate((Y[L] @ self.BL, Y[R] @ self.BR), axis=-1)

    def _build(self, fam: str, eq: dict, grad_phi) -> FamilyOps:
        ax = self.mesh.axis
        L, R = ax.overlap(fam)
        Xs, Ys = eq[fam], eq[opposite(fam)]
        h = self.half
        if self.wb:
            rho = self._gather(Ys[:, 0], L, R)
            pcoef = (self.gamma - 1.0) * Ys[:, 2]
            p = self._gather(pcoef, L, R)
            px = np.concatenate((pcoef[L] @ self.dBL, pcoef[R] @ self.dBR), axis=-1) / h
            if np.any(rho <= 0):
                raise SetupError(f"projected equilibrium density not positive on the {opposite(fam)} mesh")
            rbar = 0.5 * rho @ self.w
            pl, pr = pcoef[L] @ self.phi0, pcoef[R] @ self.phi0
            A = (pr[:, None] * self.phip - pl[:, None] * self.phim
                 - (p * self.w) @ self.Td.T - h * (px * self.w) @ self.Tv.T)
            W = h * (self.w * px / rho)[:, :, None] * self.Tv.T[None]
            phihat = -A[:, :1] / (rbar[:, None] * self.mesh.dx) - px / rho
            return FamilyOps(L, R, A / rbar[:, None], W, phihat, rbar)
        # non-balanced reference: pointwise quadrature of -rho phi_x, standard dissipation
        centers = ax.centers(fam)[ax.interior(fam)]
        x = centers[:, None] + h * self.xi
        gx = np.asarray(grad_phi(x), dtype=float)
        W = -h * (self.w * gx)[:, :, None] * self.Tv.T[None]
        nc = centers.size
        return FamilyOps(L, R, np.zeros((nc, self.k + 1)), W, gx, np.ones(nc))

    # ---------------------------------------------------------- residual

    def _flux(self, U):
        rho, m, E = U[:, 0], U[:, 1], U[:, 2]
        u = m / rho
        p = (self.gamma - 1.0) * (E - 0.5 * m * u)
        return np.stack((m, m * u + p, (E + p) * u), axis=1), p

    def evaluate_opposite(self, fam: str, Y: np.ndarray):
        """Opposite-family states at the cell's Gauss points and at both interfaces."""
        op = self.ops[fam]
        Uq = self._gather(Y, op.L, op.R)
        faces = np.stack((Y[op.L] @ self.phi0, Y[op.R] @ self.phi0), axis=-1)
        return Uq, faces

    def residual(self, fam: str, X: np.ndarray, Y: np.ndarray, tau: float, parts: bool = False):
        """Time derivative of the interior coefficients of family ``fam``."""
        if self.fast and not parts:
            return self._residual_fast(fam, X, Y, tau)
        op = self.ops[fam]
        Uq, faces = self.evaluate_opposite(fam, Y)
        Fq, pq = self._flux(Uq)
        Ff, pf = self._flux(faces)
        if not (np.all(Uq[:, 0] > 0) and np.all(pq > 0) and np.all(faces[:, 0] > 0) and np.all(pf > 0)):
            raise PositivityError(f"inadmissible {opposite(fam)} state at quadrature points")
        h = self.half
        vol = (Fq * self.w) @ self.Td.T
        face = Ff[:, :, 1:2] * self.phip - Ff[:, :, 0:1] * self.phim
        Xd, Yd = self.perturbations(fam, X, Y)
        Ud = self._gather(Yd, op.L, op.R)
        diss = (h * (Ud * self.w) @ self.Tv.T - h * self.norms * Xd[self.mesh.axis.interior(fam)]) / tau
        rbar = 0.5 * Uq[:, 0] @ self.w
        mbar = 0.5 * Uq[:, 1] @ self.w
        src = np.zeros_like(vol)
        src[:, 1] = rbar[:, None] * op.A + np.einsum("cp,cpk->ck", Uq[:, 0], op.W)
        src[:, 2] = mbar[:, None] * op.A + np.einsum("cp,cpk->ck", Uq[:, 1], op.W)
        mass = h * self.norms
        if parts:
            return {"diss": diss / mass, "flux": (vol - face) / mass, "source": src / mass}
        return (diss + vol - face + src) / mass

    def _residual_fast(self, fam, X, Y, tau):
        W, A, _, L, R = self.kops[fam]
        Xd, Yd = self.perturbations(fam, X, Y)
        c = np.ascontiguousarray
        sl = self.mesh.axis.interior(fam)
        out = np.empty((L.size, 3, self.k + 1))
        bad = kernels1d.residual_kernel(c(Xd), c(Y), c(Yd), sl.start, L, R, self.kB,
                                        self.phi0, self.w, self.kVx, self.kVd, self.phim, self.phip, W, A,
                                        self.kmass, 1.0 / tau, self.gamma, out)
        if bad:
            raise PositivityError(f"inadmissible {opposite(fam)} state at quadrature points")
        return out

    def cell_average_rhs(self, fam: str, X, Y, tau: float) -> np.ndarray:
        """Average update written with interface fluxes and the reformulated source."""
        op = self.ops[fam]
        Uq, faces = self.evaluate_opposite(fam, Y)
        Ff, _ = self._flux(faces)
        Ybar = 0.5 * (Uq * self.w).sum(-1)
        Xbar = X[self.mesh.axis.interior(fam), :, 0]
        dx = self.mesh.dx
        s = np.zeros_like(Xbar)
        s[:, 1] = -0.5 * dx * (Uq[:, 0] * op.phihat) @ self.w
        s[:, 2] = -0.5 * dx * (Uq[:, 1] * op.phihat) @ self.w
        return (Ybar - Xbar) / tau - (Ff[:, :, 1] - Ff[:, :, 0]) / dx + s / dx

    # ------------------------------------------------------------- CFL

    def alpha(self, fam: str, Y: np.ndarray) -> np.ndarray:
        """Per-cell alpha-tilde of family ``fam`` (wave speed + source strength)."""
        if self.fast:
            _, _, phihat, L, R = self.kops[fam]
            out = np.empty(L.size)
            bad = kernels1d.alpha_kernel(np.ascontiguousarray(Y), L, R, self.kB, self.phi0, phihat, self.gamma,
                                         0.5 * self.quad.w_hat1 * self.mesh.dx, out)
            if bad or not np.all(np.isfinite(out)):
                raise PositivityError("inadmissible state in the CFL estimate")
            return out
        op = self.ops[fam]
        Uq, faces = self.evaluate_opposite(fam, Y)
        g = self.gamma

        def speed(U):
            u = U[:, 1] / U[:, 0]
            p = (g - 1.0) * (U[:, 2] - 0.5 * U[:, 1] * u)
            if np.any(U[:, 0] <= 0) or np.any(p <= 0) or not np.all(np.isfinite(p)):
                raise PositivityError("inadmissible state in the CFL estimate")
            return np.abs(u) + np.sqrt(g * p / U[:, 0]), p

        a_face, _ = speed(faces)
        _, pq = speed(Uq)
        a1 = a_face.max(axis=-1)
        a2 = 0.5 * self.quad.w_hat1 * self.mesh.dx * np.max(
            np.abs(op.phihat) * np.sqrt((g - 1.0) * Uq[:, 0] / (2.0 * pq)), axis=-1)
        return a1 + a2
