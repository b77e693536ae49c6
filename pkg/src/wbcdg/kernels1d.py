"""Compiled per-cell loops for the 1D residual and CFL coefficients.

Same sums as the numpy path in ``cdg1d``; role 0 is the opposite cell covering
the left half, role 1 the one covering the right half.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, error_model="numpy")
def _role_values(Y, o, role, B, phi0, V, face):
    nb = Y.shape[2]
    n = B.shape[2]
    for c in range(3):
        f = 0.0
        for q in range(n):
            V[c, q] = 0.0
        for r in range(nb):
            y = Y[o, c, r]
            f += y * phi0[r]
            for q in range(n):
                V[c, q] += y * B[role, r, q]
        face[c, role] = f


@njit(cache=True, error_model="numpy")
def residual_kernel(Xd, Y, Yd, i0, L, R, B, phi0, w, Vx, Vd, phim, phip, W, A, mass, inv_tau, gamma, out):
    """Xd, Yd are the perturbations that enter the dissipation; Y drives fluxes and sources.

    B is (role, basis, point); Vx is (basis, point); Vd is (role, basis, basis)."""
    nc = out.shape[0]
    nb = Xd.shape[2]
    n = B.shape[2]
    gm1 = gamma - 1.0
    bad = 0
    acc = np.zeros((3, nb))
    V = np.zeros((3, n))
    face = np.zeros((3, 2))
    for i in range(nc):
        acc[:, :] = 0.0
        rbar = 0.0
        mbar = 0.0
        for role in range(2):
            o = L[i] if role == 0 else R[i]
            _role_values(Y, o, role, B, phi0, V, face)
            for c in range(3):
                for r in range(nb):
                    yt = Yd[o, c, r] * inv_tau
                    for l in range(nb):
                        acc[c, l] += yt * Vd[role, r, l]
            for q in range(n):
                P = role * n + q
                rho = V[0, q]
                m = V[1, q]
                E = V[2, q]
                u = m / rho
                p = gm1 * (E - 0.5 * m * u)
                if not (rho > 0.0 and p > 0.0):
                    bad += 1
                f1 = m * u + p
                f2 = (E + p) * u
                for l in range(nb):
                    vx = Vx[l, P]
                    wp = W[i, P, l]
                    acc[0, l] += m * vx
                    acc[1, l] += f1 * vx + rho * wp
                    acc[2, l] += f2 * vx + m * wp
                rbar += 0.5 * w[P] * rho
                mbar += 0.5 * w[P] * m
        for role in range(2):
            rho = face[0, role]
            m = face[1, role]
            E = face[2, role]
            u = m / rho
            p = gm1 * (E - 0.5 * m * u)
            if not (rho > 0.0 and p > 0.0):
                bad += 1
            face[0, role] = m
            face[1, role] = m * u + p
            face[2, role] = (E + p) * u
        for l in range(nb):
            for c in range(3):
                acc[c, l] -= face[c, 1] * phip[l] - face[c, 0] * phim[l]
            acc[1, l] += rbar * A[i, l]
            acc[2, l] += mbar * A[i, l]
        I = i0 + i
        for c in range(3):
            for l in range(nb):
                out[i, c, l] = (acc[c, l] - mass[l] * Xd[I, c, l] * inv_tau) / mass[l]
    return bad


@njit(cache=True, error_model="numpy")
def alpha_kernel(Y, L, R, B, phi0, phihat, gamma, coef2, out):
    """Largest face wave speed plus coef2 times the source strength, per cell."""
    nc = out.shape[0]
    n = B.shape[2]
    gm1 = gamma - 1.0
    bad = 0
    V = np.zeros((3, n))
    face = np.zeros((3, 2))
    for i in range(nc):
        a1 = 0.0
        a2 = 0.0
        for role in range(2):
            o = L[i] if role == 0 else R[i]
            _role_values(Y, o, role, B, phi0, V, face)
            for q in range(n):
                rho = V[0, q]
                p = gm1 * (V[2, q] - 0.5 * V[1, q] * V[1, q] / rho)
                if not (rho > 0.0 and p > 0.0):
                    bad += 1
                    continue
                a2 = max(a2, abs(phihat[i, role * n + q]) * np.sqrt(gm1 * rho / (2.0 * p)))
            rho = face[0, role]
            u = face[1, role] / rho
            p = gm1 * (face[2, role] - 0.5 * face[1, role] * u)
            if not (rho > 0.0 and p > 0.0):
                bad += 1
                continue
            a1 = max(a1, abs(u) + np.sqrt(gamma * p / rho))
        out[i] = a1 + coef2 * a2
    return bad
