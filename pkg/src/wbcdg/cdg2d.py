"""Semi-discrete well-balanced CDG operators in two dimensions.

Each cell is split into four quadrants, quadrant m being covered by one
opposite-family cell (its "role"): 0 lower-left, 1 lower-right, 2 upper-left,
3 upper-right. Each role also supplies the two half-edges of the cell that run
through its center lines, so every evaluation is an interior trace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError, SetupError
from .mesh import DUAL, PRIMAL, Mesh2D, opposite
from . import kernels2d
from .quadrature import Basis2D, QuadratureSet, mm

ROLE_X = (0, 1, 0, 1)  # 0 = left opposite cell, 1 = right
ROLE_Y = (0, 0, 1, 1)


@dataclass
class FamilyOps2D:
    sx: tuple  # per role (x slice, y slice) into the opposite array
    Ax: np.ndarray  # (nx, ny, nb) divided by mean rho^s
    Ay: np.ndarray
    wx: np.ndarray  # (nx, ny, P) pointwise source weights
    wy: np.ndarray
    phx: np.ndarray  # (nx, ny, P) modified potential gradient
    phy: np.ndarray
    rho_s_mean: np.ndarray


def _as_slice(idx: np.ndarray) -> slice:
    return slice(int(idx[0]), int(idx[-1]) + 1)


class Scheme2D:
    """Right-hand sides and CFL coefficients for both mesh families in 2D."""

    def __init__(self, mesh: Mesh2D, k: int, gamma: float, eq: dict, grad_phi=None, wb: bool = True,
                 fast: bool = True):
        if k < 1:
            raise SetupError("2D scheme needs k >= 1")
        self.mesh, self.k, self.gamma, self.wb, self.fast = mesh, k, gamma, wb, fast
        self.eqc = {f: eq[f] for f in (PRIMAL, DUAL)} if wb else None
        self.basis = b = Basis2D(k)
        self.quad = q = QuadratureSet.build(k)
        s, w = q.gauss_nodes, q.gauss_weights
        n = s.size
        self.n = n
        lob = q.lobatto_nodes
        a, c = np.meshgrid(s, s, indexing="ij")
        wq = np.outer(w, w).ravel()
        self.P = 4 * n * n
        xs, ys = [], []
        for m in range(4):
            ox, oy = ROLE_X[m] - 1.0, ROLE_Y[m] - 1.0
            xs.append(a.ravel() + ox)
            ys.append(c.ravel() + oy)
        self.xi, self.eta = np.concatenate(xs), np.concatenate(ys)
        self.ww = np.tile(wq, 4)
        self.Tv, self.Tx, self.Ty = b.eval(self.xi, self.eta)
        # per-role opposite coordinates: volume block, then x half-edge, then y half-edge
        self.B, self.Bx, self.By, self.BS = [], [], [], []
        zero = np.zeros(n)
        for m in range(4):
            sx = s if ROLE_X[m] == 0 else s - 1.0
            sy = s if ROLE_Y[m] == 0 else s - 1.0
            ga, gb = np.meshgrid(sx, sy, indexing="ij")
            pa = np.concatenate((ga.ravel(), zero, sx))
            pb = np.concatenate((gb.ravel(), sy, zero))
            v, gx, gy = b.eval(pa, pb)
            self.B.append(v)
            self.Bx.append(gx)
            self.By.append(gy)
            lx = lob if ROLE_X[m] == 0 else lob - 1.0
            ly = lob if ROLE_Y[m] == 0 else lob - 1.0
            pts = set()
            for X_, Y_ in ((sx, ly), (lx, sy), (sx, sy)):
                for u in X_:
                    for v_ in Y_:
                        pts.add((round(float(u), 15), round(float(v_), 15)))
            arr = np.array(sorted(pts))
            self.BS.append(b.eval(arr[:, 0], arr[:, 1])[0])
        half = np.concatenate((s - 1.0, s))
        self.we = np.concatenate((w, w))
        one = np.ones(2 * n)
        self.Ter = b.eval(one, half)[0]
        self.Tel = b.eval(-one, half)[0]
        self.Tet = b.eval(half, one)[0]
        self.Teb = b.eval(half, -one)[0]
        for name in ("Tv", "Tx", "Ty", "Ter", "Tel", "Tet", "Teb"):
            setattr(self, name + "T", np.ascontiguousarray(getattr(self, name).T))
        self.norms = b.norms
        self.quarter = 0.25 * mesh.dx * mesh.dy
        self.ops = {fam: self._build(fam, eq, grad_phi) for fam in ("primal", "dual")}
        self._kernel_tables()

    def perturbations(self, fam: str, X, Y):
        """Deviations from the projected equilibrium; the dissipation acts on these only."""
        if self.eqc is None:
            return X, Y
        return X - self.eqc[fam], Y - self.eqc[opposite(fam)]

    def interior(self, fam: str) -> tuple:
        return (self.mesh.ax.interior(fam), self.mesh.ay.interior(fam))

    def _kernel_tables(self) -> None:
        """Weight-folded test-function tables for the compiled loops."""
        dx, dy = self.mesh.dx, self.mesh.dy
        n, w = self.n, self.we[:self.n]
        c = np.ascontiguousarray
        B = np.stack(self.B)
        nn = n * n
        self.kB = c(B)
        self.kBS = c(np.stack(self.BS))
        self.kVx = c(0.5 * dy * self.Tx * self.ww)
        self.kVy = c(0.5 * dx * self.Ty * self.ww)
        # dissipation is linear in the overlapped coefficients: one nb x nb block per role
        vd = (self.quarter * self.Tv * self.ww).T
        self.kVd = c(np.stack([B[m, :, :nn] @ vd[m * nn:(m + 1) * nn] for m in range(4)]))
        self.kTv = c(self.Tv)
        Ge, Gf = np.zeros((4, self.basis.size, n)), np.zeros((4, self.basis.size, n))
        for m in range(4):
            hy, hx = ROLE_Y[m] * n, ROLE_X[m] * n
            if ROLE_X[m] == 1:
                Ge[m] = 0.5 * dy * w * self.Ter[:, hy:hy + n]
            else:
                Ge[m] = -0.5 * dy * w * self.Tel[:, hy:hy + n]
            if ROLE_Y[m] == 1:
                Gf[m] = 0.5 * dx * w * self.Tet[:, hx:hx + n]
            else:
                Gf[m] = -0.5 * dx * w * self.Teb[:, hx:hx + n]
        # edge points flattened as role * n + alpha
        self.kGe = c(Ge.transpose(1, 0, 2).reshape(self.basis.size, 4 * n))
        self.kGf = c(Gf.transpose(1, 0, 2).reshape(self.basis.size, 4 * n))
        self.kmass = self.quarter * self.norms
        self.koff = {}
        for fam in ("primal", "dual"):
            ix, iy = self.interior(fam)
            Lx, Rx = self.mesh.ax.overlap(fam)
            Ly, Ry = self.mesh.ay.overlap(fam)
            self.koff[fam] = (np.array([Lx[0] - ix.start, Rx[0] - ix.start]),
                              np.array([Ly[0] - iy.start, Ry[0] - iy.start]))

    # ---------------------------------------------------------- gathering

    def _role_slices(self, fam: str) -> tuple:
        Lx, Rx = self.mesh.ax.overlap(fam)
        Ly, Ry = self.mesh.ay.overlap(fam)
        xs = (_as_slice(Lx), _as_slice(Rx))
        ys = (_as_slice(Ly), _as_slice(Ry))
        return tuple((xs[ROLE_X[m]], ys[ROLE_Y[m]]) for m in range(4))

    def _split(self, vals: list) -> dict:
        """Assemble role evaluations into volume and edge arrays."""
        nn = self.n * self.n
        n = self.n
        vol = np.concatenate([v[..., :nn] for v in vals], axis=-1)
        xe = [v[..., nn:nn + n] for v in vals]
        ye = [v[..., nn + n:] for v in vals]
        return {
            "vol": vol,
            "right": np.concatenate((xe[1], xe[3]), axis=-1),
            "left": np.concatenate((xe[0], xe[2]), axis=-1),
            "top": np.concatenate((ye[2], ye[3]), axis=-1),
            "bottom": np.concatenate((ye[0], ye[1]), axis=-1),
        }

    def _gather(self, Y: np.ndarray, sl: tuple, mats: list) -> dict:
        return self._split([mm(Y[sl[m]], mats[m]) for m in range(4)])

    # -------------------------------------------------------------- setup

    def _edge_moments(self, fr, fl, ft, fb, hx, hy):
        """(dy/2) sum w [f_r v(1,.) - f_l v(-1,.)] and the y analogue."""
        mx = 0.5 * hy * (mm(fr * self.we, self.TerT) - mm(fl * self.we, self.TelT))
        my = 0.5 * hx * (mm(ft * self.we, self.TetT) - mm(fb * self.we, self.TebT))
        return mx, my

    def _build(self, fam: str, eq: dict, grad_phi) -> FamilyOps2D:
        m = self.mesh
        dx, dy = m.dx, m.dy
        sl = self._role_slices(fam)
        ix, iy = self.interior(fam)
        Xs, Ys = eq[fam], eq[opposite(fam)]
        Q = self.quarter
        if self.wb:
            ps = (self.gamma - 1.0) * Ys[..., -1, :]
            rho = self._gather(Ys[..., 0, :], sl, self.B)
            p = self._gather(ps, sl, self.B)
            px = self._gather(ps, sl, self.Bx)["vol"] * (2.0 / dx)
            py = self._gather(ps, sl, self.By)["vol"] * (2.0 / dy)
            rv = rho["vol"]
            if np.any(rv <= 0):
                raise SetupError(f"projected equilibrium density not positive on the {opposite(fam)} mesh")
            rbar = 0.25 * mm(rv, self.ww[:, None])[..., 0]
            ex, ey = self._edge_moments(p["right"], p["left"], p["top"], p["bottom"], dx, dy)
            Ax = ex - 0.5 * dy * mm(p["vol"] * self.ww, self.TxT) - Q * mm(px * self.ww, self.TvT)
            Ay = ey - 0.5 * dx * mm(p["vol"] * self.ww, self.TyT) - Q * mm(py * self.ww, self.TvT)
            wx = Q * self.ww * px / rv
            wy = Q * self.ww * py / rv
            phx = -px / rv - (Ax[..., :1] / (rbar[..., None] * dx * dy))
            phy = -py / rv - (Ay[..., :1] / (rbar[..., None] * dx * dy))
            return FamilyOps2D(sl, Ax / rbar[..., None], Ay / rbar[..., None], wx, wy, phx, phy, rbar)
        X, Y = m.centers(fam)
        X, Y = X[ix, iy], Y[ix, iy]
        gx, gy = grad_phi(X[..., None] + 0.5 * dx * self.xi, Y[..., None] + 0.5 * dy * self.eta)
        gx = np.broadcast_to(np.asarray(gx, float), X.shape + (self.P,))
        gy = np.broadcast_to(np.asarray(gy, float), X.shape + (self.P,))
        shape = X.shape + (self.basis.size,)
        return FamilyOps2D(sl, np.zeros(shape), np.zeros(shape), -Q * self.ww * gx, -Q * self.ww * gy,
                           np.array(gx), np.array(gy),
                           np.ones(X.shape))

    # ----------------------------------------------------------- residual

    def _state(self, U):
        rho, m1, m2, E = U[..., 0, :], U[..., 1, :], U[..., 2, :], U[..., 3, :]
        u, v = m1 / rho, m2 / rho
        p = (self.gamma - 1.0) * (E - 0.5 * (m1 * u + m2 * v))
        return rho, m1, m2, E, u, v, p

    def _fluxes(self, U, which: str):
        rho, m1, m2, E, u, v, p = self._state(U)
        if not (np.all(rho > 0) and np.all(p > 0)):
            raise PositivityError("inadmissible opposite state at quadrature points")
        if which == "x":
            return np.stack((m1, m1 * u + p, m2 * u, (E + p) * u), axis=-2)
        return np.stack((m2, m1 * v, m2 * v + p, (E + p) * v), axis=-2)

    def evaluate_opposite(self, fam: str, Y: np.ndarray) -> dict:
        return self._gather(Y, self.ops[fam].sx, self.B)

    def residual(self, fam: str, X: np.ndarray, Y: np.ndarray, tau: float, parts: bool = False):
        if self.fast and not parts:
            return self._residual_fast(fam, X, Y, tau)
        op = self.ops[fam]
        m = self.mesh
        dx, dy = m.dx, m.dy
        G = self.evaluate_opposite(fam, Y)
        Uv = G["vol"]
        F1 = self._fluxes(Uv, "x")
        F2 = self._fluxes(Uv, "y")
        vol = 0.5 * dy * mm(F1 * self.ww, self.TxT) + 0.5 * dx * mm(F2 * self.ww, self.TyT)
        ex, ey = self._edge_moments(self._fluxes(G["right"], "x"), self._fluxes(G["left"], "x"),
                                    self._fluxes(G["top"], "y"), self._fluxes(G["bottom"], "y"), dx, dy)
        Q = self.quarter
        Xd, Yd = self.perturbations(fam, X, Y)
        Ud = self.evaluate_opposite(fam, Yd)["vol"]
        diss = (Q * mm(Ud * self.ww, self.TvT) - Q * self.norms * Xd[self.interior(fam)]) / tau
        rbar = 0.25 * Uv[..., 0, :] @ self.ww
        m1bar = 0.25 * Uv[..., 1, :] @ self.ww
        m2bar = 0.25 * Uv[..., 2, :] @ self.ww
        src = np.zeros_like(vol)
        rho, m1, m2 = Uv[..., 0, :], Uv[..., 1, :], Uv[..., 2, :]
        src[..., 1, :] = rbar[..., None] * op.Ax + mm(rho * op.wx, self.TvT)
        src[..., 2, :] = rbar[..., None] * op.Ay + mm(rho * op.wy, self.TvT)
        src[..., 3, :] = (m1bar[..., None] * op.Ax + m2bar[..., None] * op.Ay
                          + mm(m1 * op.wx + m2 * op.wy, self.TvT))
        mass = Q * self.norms
        if parts:
            return {"diss": diss / mass, "flux": (vol - ex - ey) / mass, "source": src / mass}
        return (diss + vol - ex - ey + src) / mass

    def _soa_ops(self, fam):
        """Per-cell tables in the component-major layout of the compiled loops."""
        cache = self.__dict__.setdefault("_soa_cache", {})
        if fam not in cache:
            op, c = self.ops[fam], np.ascontiguousarray
            cache[fam] = (c(np.moveaxis(op.wx, -1, 0)), c(np.moveaxis(op.wy, -1, 0)),
                          c(np.moveaxis(op.Ax, -1, 0)), c(np.moveaxis(op.Ay, -1, 0)),
                          c(np.moveaxis(op.phx, -1, 0)),
                          c(np.moveaxis(op.phy, -1, 0)))
        return cache[fam]

    @staticmethod
    def _soa(Z):
        return np.ascontiguousarray(Z.transpose(2, 3, 0, 1))

    def _residual_fast(self, fam, X, Y, tau):
        wx, wy, Ax, Ay, _, _ = self._soa_ops(fam)
        Xd, Yd = self.perturbations(fam, X, Y)
        ix, iy = self.interior(fam)
        nx, ny = Ax.shape[1:]
        out = np.empty((X.shape[-2], self.basis.size, nx, ny))
        offx, offy = self.koff[fam]
        bad = kernels2d.residual_kernel(
            self._soa(Xd), self._soa(Y), self._soa(Yd), ix.start, iy.start, nx, ny, offx, offy, self.kB,
            self.kVx, self.kVy, self.kVd, self.kGe, self.kGf, self.kTv, self.ww, wx, wy, Ax, Ay,
            self.kmass, 1.0 / tau, self.gamma, self.n * self.n, self.n, out)
        if bad:
            raise PositivityError(f"inadmissible {opposite(fam)} state at {bad} quadrature points")
        return out.transpose(2, 3, 0, 1)

    def cell_average_rhs(self, fam: str, X, Y, tau: float) -> np.ndarray:
        """Average update from edge fluxes and the reformulated source."""
        op = self.ops[fam]
        m = self.mesh
        dx, dy = m.dx, m.dy
        G = self.evaluate_opposite(fam, Y)
        Uv = G["vol"]
        Ybar = 0.25 * (Uv * self.ww).sum(-1)
        Xbar = X[self.interior(fam)][..., 0]
        dfx = 0.5 * ((self._fluxes(G["right"], "x") - self._fluxes(G["left"], "x")) * self.we).sum(-1)
        dfy = 0.5 * ((self._fluxes(G["top"], "y") - self._fluxes(G["bottom"], "y")) * self.we).sum(-1)
        s = np.zeros_like(Xbar)
        w = self.quarter * self.ww
        rho, m1, m2 = Uv[..., 0, :], Uv[..., 1, :], Uv[..., 2, :]
        s[..., 1] = -(rho * op.phx) @ w
        s[..., 2] = -(rho * op.phy) @ w
        s[..., 3] = -(m1 * op.phx + m2 * op.phy) @ w
        return (Ybar - Xbar) / tau - dfx / dx - dfy / dy + s / (dx * dy)

    # --------------------------------------------------------------- CFL

    def alpha(self, fam: str, Y: np.ndarray) -> tuple:
        """Per-cell (alpha_x, alpha_y) including the source-strength part."""
        op = self.ops[fam]
        g = self.gamma
        w1 = self.quad.w_hat1
        if self.fast:
            ix, iy = self.interior(fam)
            nx, ny = op.Ax.shape[:2]
            ax, ay, st = np.empty((nx, ny)), np.empty((nx, ny)), np.empty((nx, ny))
            offx, offy = self.koff[fam]
            *_, phx, phy = self._soa_ops(fam)
            bad = kernels2d.alpha_kernel(self._soa(Y), ix.start, iy.start, nx, ny, offx, offy, self.kBS,
                                         self.kB, self.n * self.n, phx, phy, g, ax, ay, st)
            if bad:
                raise PositivityError("inadmissible state in the CFL estimate")
            return ax + 0.25 * w1 * self.mesh.dx * st, ay + 0.25 * w1 * self.mesh.dy * st
        ax = ay = None
        for r in range(4):
            rho, _, _, _, u, v, p = self._state(mm(Y[op.sx[r]], self.BS[r]))
            if np.any(rho <= 0) or np.any(p <= 0) or not np.all(np.isfinite(p)):
                raise PositivityError("inadmissible state in the CFL estimate")
            c = np.sqrt(g * p / rho)
            bx, by = (np.abs(u) + c).max(-1), (np.abs(v) + c).max(-1)
            ax = bx if ax is None else np.maximum(ax, bx)
            ay = by if ay is None else np.maximum(ay, by)
        Uv = self.evaluate_opposite(fam, Y)["vol"]
        rho, _, _, _, _, _, p = self._state(Uv)
        strength = np.max(np.hypot(op.phx, op.phy) * np.sqrt((g - 1.0) * rho / (2.0 * p)), axis=-1)
        return ax + 0.25 * w1 * self.mesh.dx * strength, ay + 0.25 * w1 * self.mesh.dy * strength
