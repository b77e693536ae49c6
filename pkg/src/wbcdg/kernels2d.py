"""Compiled loops for the 2D residual and CFL coefficients.

The numpy assembly in ``cdg2d`` is the readable reference; these kernels fuse
the same sums into one pass per mesh row. Fields are passed component-major,
(comp, basis, nx, ny), so the innermost loops run over the cells of a row
and vectorise. Point tables are scalars broadcast across the row.
"""
from __future__ import annotations

import numpy as np
from numba import njit

ROLE_X = np.array([0, 1, 0, 1])
ROLE_Y = np.array([0, 0, 1, 1])


@njit(cache=True, error_model="numpy", inline="always")
def _values(Y, oi, oj0, m, q, B, V, ny):
    nb = Y.shape[1]
    if nb == 6:
        # unrolled for k = 2: one pass over the row instead of one per basis function
        b0, b1, b2, b3, b4, b5 = B[m, 0, q], B[m, 1, q], B[m, 2, q], B[m, 3, q], B[m, 4, q], B[m, 5, q]
        for c in range(4):
            for j in range(ny):
                jj = oj0 + j
                V[c, j] = (b0 * Y[c, 0, oi, jj] + b1 * Y[c, 1, oi, jj] + b2 * Y[c, 2, oi, jj]
                           + b3 * Y[c, 3, oi, jj] + b4 * Y[c, 4, oi, jj] + b5 * Y[c, 5, oi, jj])
        return
    for c in range(4):
        for j in range(ny):
            V[c, j] = 0.0
        for r in range(nb):
            b = B[m, r, q]
            for j in range(ny):
                V[c, j] += b * Y[c, r, oi, oj0 + j]


@njit(cache=True, error_model="numpy")
def residual_kernel(Xd, Y, Yd, ix0, iy0, nx, ny, offx, offy, B, Vx, Vy, Vd, Ge, Gf, Tv, ww, wx, wy,
                    Ax, Ay, massq, inv_tau, gamma, nn, n, out):
    """Xd, Y, Yd are (comp, basis, NX, NY), the perturbations Xd, Yd entering the dissipation only;
    wx, wy are (point, nx, ny); Ax, Ay are (basis, nx, ny); out is (comp, basis, nx, ny). B is (role, basis, point), Vx, Vy, Tv are
    (basis, volume point), Ge, Gf are (basis, role * n + edge point), Vd is (role, basis, basis)."""
    nb = Xd.shape[1]
    nq = B.shape[2]
    gm1 = gamma - 1.0
    bad = 0
    acc = np.zeros((4, nb, ny))
    V = np.zeros((4, ny))
    F1 = np.zeros((4, ny))
    F2 = np.zeros((4, ny))
    sa = np.zeros(ny)
    sb = np.zeros(ny)
    sc = np.zeros(ny)
    rbar = np.zeros(ny)
    m1bar = np.zeros(ny)
    m2bar = np.zeros(ny)
    for i in range(nx):
        I = ix0 + i
        acc[:, :, :] = 0.0
        rbar[:] = 0.0
        m1bar[:] = 0.0
        m2bar[:] = 0.0
        for m in range(4):
            oi = I + offx[ROLE_X[m]]
            oj0 = iy0 + offy[ROLE_Y[m]]
            for c in range(4):
                for r in range(nb):
                    for l in range(nb):
                        d = Vd[m, r, l] * inv_tau
                        for j in range(ny):
                            acc[c, l, j] += d * Yd[c, r, oi, oj0 + j]
            for q in range(nq):
                _values(Y, oi, oj0, m, q, B, V, ny)
                for j in range(ny):
                    rho = V[0, j]
                    m1 = V[1, j]
                    m2 = V[2, j]
                    E = V[3, j]
                    u = m1 / rho
                    v = m2 / rho
                    p = gm1 * (E - 0.5 * (m1 * u + m2 * v))
                    if not (rho > 0.0 and p > 0.0):
                        bad += 1
                    F1[0, j] = m1
                    F1[1, j] = m1 * u + p
                    F1[2, j] = m2 * u
                    F1[3, j] = (E + p) * u
                    F2[0, j] = m2
                    F2[1, j] = m1 * v
                    F2[2, j] = m2 * v + p
                    F2[3, j] = (E + p) * v
                if q < nn:
                    P = m * nn + q
                    w = ww[P]
                    for j in range(ny):
                        rho = V[0, j]
                        a = wx[P, i, j]
                        b = wy[P, i, j]
                        sa[j] = rho * a
                        sb[j] = rho * b
                        sc[j] = V[1, j] * a + V[2, j] * b
                        rbar[j] += w * rho
                        m1bar[j] += w * V[1, j]
                        m2bar[j] += w * V[2, j]
                    for l in range(nb):
                        gx = Vx[l, P]
                        gy = Vy[l, P]
                        t = Tv[l, P]
                        for c in range(4):
                            for j in range(ny):
                                acc[c, l, j] += gx * F1[c, j] + gy * F2[c, j]
                        for j in range(ny):
                            acc[1, l, j] += t * sa[j]
                            acc[2, l, j] += t * sb[j]
                            acc[3, l, j] += t * sc[j]
                elif q < nn + n:
                    e = m * n + q - nn
                    for l in range(nb):
                        g = Ge[l, e]
                        for c in range(4):
                            for j in range(ny):
                                acc[c, l, j] -= g * F1[c, j]
                else:
                    e = m * n + q - nn - n
                    for l in range(nb):
                        g = Gf[l, e]
                        for c in range(4):
                            for j in range(ny):
                                acc[c, l, j] -= g * F2[c, j]
        for l in range(nb):
            for j in range(ny):
                ax = Ax[l, i, j]
                ay = Ay[l, i, j]
                acc[1, l, j] += 0.25 * rbar[j] * ax
                acc[2, l, j] += 0.25 * rbar[j] * ay
                acc[3, l, j] += 0.25 * (m1bar[j] * ax + m2bar[j] * ay)
        for c in range(4):
            for l in range(nb):
                s = 1.0 / massq[l]
                for j in range(ny):
                    out[c, l, i, j] = (acc[c, l, j] - massq[l] * Xd[c, l, I, iy0 + j] * inv_tau) * s
    return bad


@njit(cache=True, error_model="numpy")
def alpha_kernel(Y, ix0, iy0, nx, ny, offx, offy, BS, B, nn, phx, phy, gamma, ax_out, ay_out, s_out):
    """Max |u|+c, |v|+c over S points and the source strength over Gauss points.

    Y is (comp, basis, NX, NY); BS and B are (role, basis, point); phx, phy are (point, nx, ny).
    """
    ns = BS.shape[2]
    gm1 = gamma - 1.0
    bad = 0
    V = np.zeros((4, ny))
    for i in range(nx):
        I = ix0 + i
        for j in range(ny):
            ax_out[i, j] = 0.0
            ay_out[i, j] = 0.0
            s_out[i, j] = 0.0
        for m in range(4):
            oi = I + offx[ROLE_X[m]]
            oj0 = iy0 + offy[ROLE_Y[m]]
            for q in range(ns):
                _values(Y, oi, oj0, m, q, BS, V, ny)
                for j in range(ny):
                    rho = V[0, j]
                    u = V[1, j] / rho
                    v = V[2, j] / rho
                    p = gm1 * (V[3, j] - 0.5 * (V[1, j] * u + V[2, j] * v))
                    bad += not (rho > 0.0 and p > 0.0)
                    cs = np.sqrt(gamma * abs(p / rho))
                    ax_out[i, j] = max(ax_out[i, j], abs(u) + cs)
                    ay_out[i, j] = max(ay_out[i, j], abs(v) + cs)
            for q in range(nn):
                _values(Y, oi, oj0, m, q, B, V, ny)
                P = m * nn + q
                for j in range(ny):
                    rho = V[0, j]
                    p = gm1 * (V[3, j] - 0.5 * (V[1, j] * V[1, j] + V[2, j] * V[2, j]) / rho)
                    bad += not (rho > 0.0 and p > 0.0)
                    g2 = (phx[P, i, j] ** 2 + phy[P, i, j] ** 2) * abs(gm1 * rho / (2.0 * p))
                    s_out[i, j] = max(s_out[i, j], np.sqrt(g2))
    return bad
