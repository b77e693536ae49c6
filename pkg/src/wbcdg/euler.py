"""Compressible Euler equations with a static gravitational potential.

States are arrays whose leading axis holds the conservative components
(rho, m, E) in 1D or (rho, m1, m2, E) in 2D; trailing axes are arbitrary.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, PositivityError


@dataclass(frozen=True)
class GasLaw:
    gamma: float = 1.4
    R: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")


def kinetic(U: np.ndarray) -> np.ndarray:
    rho = U[0]
    m2 = U[1] ** 2 if U.shape[0] == 3 else U[1] ** 2 + U[2] ** 2
    return 0.5 * m2 / rho


def pressure(U: np.ndarray, gamma: float) -> np.ndarray:
    """p = (gamma - 1)(E - |m|^2 / (2 rho))."""
    U = np.asarray(U, dtype=float)
    return (gamma - 1.0) * (U[-1] - kinetic(U))


def admissible(U: np.ndarray, gamma: float) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    rho = U[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(rho > 0, pressure(U, gamma), -1.0)
    return (rho > 0) & (p > 0)


def _require(U, gamma, what):
    if not np.all(admissible(U, gamma)):
        raise PositivityError(f"{what}: inadmissible state")


def flux_1d(U: np.ndarray, gamma: float, check: bool = True) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if check:
        _require(U, gamma, "flux")
    rho, m, E = U
    u = m / rho
    p = (gamma - 1.0) * (E - 0.5 * m * u)
    return np.stack((m, m * u + p, (E + p) * u))


def flux_x_2d(U: np.ndarray, gamma: float, check: bool = True) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if check:
        _require(U, gamma, "flux")
    rho, m1, m2, E = U
    u = m1 / rho
    p = (gamma - 1.0) * (E - 0.5 * (m1 * m1 + m2 * m2) / rho)
    return np.stack((m1, m1 * u + p, m2 * u, (E + p) * u))


def flux_y_2d(U: np.ndarray, gamma: float, check: bool = True) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if check:
        _require(U, gamma, "flux")
    rho, m1, m2, E = U
    v = m2 / rho
    p = (gamma - 1.0) * (E - 0.5 * (m1 * m1 + m2 * m2) / rho)
    return np.stack((m2, m1 * v, m2 * v + p, (E + p) * v))


def source(U: np.ndarray, grad_phi) -> np.ndarray:
    """(0, -rho grad(phi), -m . grad(phi))."""
    U = np.asarray(U, dtype=float)
    if U.shape[0] == 3:
        gx = np.asarray(grad_phi, dtype=float)
        return np.stack((np.zeros_like(U[0]), -U[0] * gx, -U[1] * gx))
    gx, gy = (np.asarray(g, dtype=float) for g in grad_phi)
    return np.stack((np.zeros_like(U[0]) + 0 * gx, -U[0] * gx, -U[0] * gy, -(U[1] * gx + U[2] * gy)))


def sound_speed(U: np.ndarray, gamma: float) -> np.ndarray:
    return np.sqrt(gamma * pressure(U, gamma) / U[0])


def wave_speed_x(U: np.ndarray, gamma: float) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    _require(U, gamma, "wave speed")
    return np.abs(U[1] / U[0]) + sound_speed(U, gamma)


def wave_speed_y(U: np.ndarray, gamma: float) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    _require(U, gamma, "wave speed")
    return np.abs(U[2] / U[0]) + sound_speed(U, gamma)


def primitive_to_conservative(rho, vel, p, gamma: float) -> np.ndarray:
    """Build a state from density, velocity (scalar or 2-tuple) and pressure."""
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if isinstance(vel, tuple):
        u, v = (np.broadcast_to(np.asarray(c, dtype=float), rho.shape) for c in vel)
        E = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
        return np.stack((rho, rho * u, rho * v, E))
    u = np.broadcast_to(np.asarray(vel, dtype=float), rho.shape)
    return np.stack((rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u))


# ---------------------------------------------------------------- gravity


@dataclass(frozen=True)
class GravityField:
    """phi and its gradient; ``grad`` returns phi_x in 1D or (phi_x, phi_y) in 2D."""

    phi: Callable
    grad: Callable
    dim: int = 1


def linear_gravity_1d(g: float = 1.0) -> GravityField:
    return GravityField(lambda x: g * np.asarray(x, float), lambda x: np.full_like(np.asarray(x, float), g))


def linear_gravity_2d(gx: float, gy: float) -> GravityField:
    return GravityField(
        lambda x, y: gx * np.asarray(x, float) + gy * np.asarray(y, float),
        lambda x, y: (np.full(np.broadcast(x, y).shape, float(gx)), np.full(np.broadcast(x, y).shape, float(gy))),
        dim=2,
    )


# ----------------------------------------------------------- equilibria


@dataclass(frozen=True)
class EquilibriumProfile:
    """Zero-velocity stationary solution with p_grad = -rho grad(phi)."""

    kind: str
    rho: Callable
    p: Callable
    p_grad: Callable
    dim: int = 1

    def state(self, *x, gamma: float) -> np.ndarray:
        rho = np.asarray(self.rho(*x), dtype=float)
        p = np.asarray(self.p(*x), dtype=float)
        zero = np.zeros_like(rho)
        if self.dim == 1:
            return np.stack((rho, zero, p / (gamma - 1.0)))
        return np.stack((rho, zero, zero.copy(), p / (gamma - 1.0)))


def isothermal_profile(gravity: GravityField, rho0: float = 1.0, p0: float = 1.0, RT: float | None = None) -> EquilibriumProfile:
    """rho = rho0 exp(-phi/RT), p = p0 exp(-phi/RT) with RT = p0/rho0 by default."""
    if rho0 <= 0 or p0 <= 0:
        raise ConfigError("isothermal profile needs positive reference density and pressure")
    rt = p0 / rho0 if RT is None else RT
    if abs(rt - p0 / rho0) > 1e-14 * rt:
        raise ConfigError("isothermal profile requires p0 / rho0 == RT")

    def rho(*x):
        return rho0 * np.exp(-gravity.phi(*x) / rt)

    def p(*x):
        return p0 * np.exp(-gravity.phi(*x) / rt)

    def p_grad(*x):
        r = rho(*x)
        g = gravity.grad(*x)
        if gravity.dim == 1:
            return -r * g
        return (-r * g[0], -r * g[1])

    return EquilibriumProfile("isothermal", rho, p, p_grad, gravity.dim)


def _sinc(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sin(z)/z and its derivative, with Taylor series near the origin."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    s = np.where(small, 1.0 - z * z / 6.0 + z**4 / 120.0, np.sin(zs) / zs)
    ds = np.where(small, -z / 3.0 + z**3 / 30.0, (zs * np.cos(zs) - np.sin(zs)) / (zs * zs))
    return s, ds


def polytropic_profile_radial(rho_c: float, K: float = 1.0, g: float = 1.0, center=(0.0, 0.0)) -> tuple[EquilibriumProfile, GravityField]:
    """Radial polytropic (gamma=2) equilibrium rho = rho_c sin(ar)/(ar), p = K rho^2.

    The matching potential is phi = -2 K rho_c sin(ar)/(ar) with a = sqrt(2 pi g / K).
    """
    if rho_c <= 0 or K <= 0 or g <= 0:
        raise ConfigError("polytropic profile needs positive rho_c, K and g")
    a = np.sqrt(2.0 * np.pi * g / K)
    cx, cy = center

    def radius(x, y):
        return np.hypot(np.asarray(x, float) - cx, np.asarray(y, float) - cy)

    def rho(x, y):
        return rho_c * _sinc(a * radius(x, y))[0]

    def p(x, y):
        return K * rho(x, y) ** 2

    def drho(x, y):
        # d(rho)/dx = rho_c a sinc'(ar) (x - cx)/r; sinc'(z)/z is smooth at 0
        r = radius(x, y)
        z = a * r
        small = z < 1e-4
        zs = np.where(small, 1.0, z)
        _, ds = _sinc(z)
        ratio = np.where(small, -1.0 / 3.0 + z * z / 30.0, ds / zs)
        f = rho_c * a * a * ratio
        return f * (np.asarray(x, float) - cx), f * (np.asarray(y, float) - cy)

    def p_grad(x, y):
        r = rho(x, y)
        dx, dy = drho(x, y)
        return 2 * K * r * dx, 2 * K * r * dy

    def phi(x, y):
        return -2.0 * K * rho(x, y)

    def grad(x, y):
        dx, dy = drho(x, y)
        return -2.0 * K * dx, -2.0 * K * dy

    prof = EquilibriumProfile("polytropic", rho, p, p_grad, 2)
    return prof, GravityField(phi, grad, 2)
