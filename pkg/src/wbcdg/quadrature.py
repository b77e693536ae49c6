"""Scaled Legendre bases and half-cell quadrature rules.

Quadrature weights are normalized to sum to one, so a physical integral over
an interval of length h is ``h * sum(w * f(x))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil

import numpy as np
from numpy.polynomial import legendre as npleg

from .errors import ConfigError

MAX_DEGREE = 3


def _check_interval(a: float, b: float) -> None:
    if not b > a:
        raise ConfigError(f"quadrature interval must satisfy a < b, got [{a}, {b}]")


@lru_cache(maxsize=None)
def _gauss_ref(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = npleg.leggauss(n)
    return x, w / 2.0


@lru_cache(maxsize=None)
def _lobatto_ref(n: int) -> tuple[np.ndarray, np.ndarray]:
    # interior nodes are the roots of P'_{n-1}; polish them with Newton steps
    pn = npleg.Legendre.basis(n - 1)
    d1, d2 = pn.deriv(1), pn.deriv(2)
    x = np.sort(d1.roots().real) if n > 2 else np.array([])
    for _ in range(6):
        x = x - d1(x) / d2(x)
    x = np.concatenate(([-1.0], x, [1.0]))
    w = 2.0 / (n * (n - 1) * pn(x) ** 2)
    x = 0.5 * (x - x[::-1])  # exact antisymmetry
    w = 0.5 * (w + w[::-1])
    return x, w / 2.0


def gauss_rule(n: int, interval: tuple[float, float] = (-1.0, 1.0)) -> tuple[np.ndarray, np.ndarray]:
    """N-point Gauss-Legendre nodes on ``interval`` with weights summing to 1."""
    if n < 1 or n > 64:
        raise ConfigError(f"unsupported Gauss point count {n}")
    a, b = interval
    _check_interval(a, b)
    x, w = _gauss_ref(n)
    return 0.5 * (a + b) + 0.5 * (b - a) * x, w.copy()


def lobatto_rule(n: int, interval: tuple[float, float] = (-1.0, 1.0)) -> tuple[np.ndarray, np.ndarray]:
    """L-point Gauss-Lobatto nodes (endpoints included), weights summing to 1."""
    if n < 2 or n > 64:
        raise ConfigError(f"Gauss-Lobatto rule needs 2 <= L <= 64, got {n}")
    a, b = interval
    _check_interval(a, b)
    x, w = _lobatto_ref(n)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    nodes[0], nodes[-1] = a, b
    return nodes, w.copy()


def lobatto_count(k: int) -> int:
    """Smallest L with 2L - 3 >= k."""
    return max(2, ceil((k + 3) / 2))


# monic Legendre coefficients in the power basis, lowest power first
_MONIC = [
    np.array([1.0]),
    np.array([0.0, 1.0]),
    np.array([-1.0 / 3.0, 0.0, 1.0]),
    np.array([0.0, -3.0 / 5.0, 0.0, 1.0]),
]


def legendre_1d(k: int, xi) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of Phi_0..Phi_k at ``xi``; arrays of shape (k+1, *xi.shape)."""
    if k < 0 or k > MAX_DEGREE:
        raise ConfigError(f"polynomial degree must be in 0..{MAX_DEGREE}, got {k}")
    xi = np.asarray(xi, dtype=float)
    val = np.empty((k + 1,) + xi.shape)
    der = np.empty_like(val)
    for i in range(k + 1):
        c = _MONIC[i]
        val[i] = np.polynomial.polynomial.polyval(xi, c)
        der[i] = np.polynomial.polynomial.polyval(xi, np.polynomial.polynomial.polyder(c)) if i else 0.0
    return val, der


def _pairs_2d(k: int) -> list[tuple[int, int]]:
    pairs = [(0, 0)]
    if k >= 1:
        pairs += [(1, 0), (0, 1)]
    if k >= 2:
        pairs += [(1, 1), (2, 0), (0, 2)]
    if k >= 3:
        pairs += [(3, 0), (0, 3), (2, 1), (1, 2)]
    return pairs


@dataclass(frozen=True)
class Basis1D:
    k: int

    @property
    def size(self) -> int:
        return self.k + 1

    @property
    def xpow(self) -> np.ndarray:
        return np.arange(self.k + 1)

    @property
    def norms(self) -> np.ndarray:
        """Integrals of Phi_i^2 over [-1, 1]."""
        x, w = gauss_rule(self.k + 1)
        v, _ = legendre_1d(self.k, x)
        return 2.0 * (v**2) @ w

    def eval(self, xi) -> tuple[np.ndarray, np.ndarray]:
        return legendre_1d(self.k, xi)


@dataclass(frozen=True)
class Basis2D:
    """Tensor Legendre products of total degree <= k, ordered 1, xi, eta, xi*eta, ..."""

    k: int
    pairs: tuple = field(init=False)

    def __post_init__(self):
        if self.k < 0 or self.k > MAX_DEGREE:
            raise ConfigError(f"polynomial degree must be in 0..{MAX_DEGREE}, got {self.k}")
        object.__setattr__(self, "pairs", tuple(_pairs_2d(self.k)))

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def xpow(self) -> np.ndarray:
        return np.array([a for a, _ in self.pairs])

    @property
    def ypow(self) -> np.ndarray:
        return np.array([b for _, b in self.pairs])

    @property
    def norms(self) -> np.ndarray:
        """Integrals of Phi_l^2 over [-1, 1]^2."""
        n1 = Basis1D(self.k).norms
        return np.array([n1[a] * n1[b] for a, b in self.pairs])

    def eval(self, xi, eta) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values, d/dxi and d/deta, each of shape (K+1, *xi.shape)."""
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        vx, dx = legendre_1d(self.k, xi)
        vy, dy = legendre_1d(self.k, eta)
        val = np.stack([vx[a] * vy[b] for a, b in self.pairs])
        gx = np.stack([dx[a] * vy[b] for a, b in self.pairs])
        gy = np.stack([vx[a] * dy[b] for a, b in self.pairs])
        return val, gx, gy


def eval_basis(basis, xi, eta=None):
    """Basis values and gradient components at reference points."""
    if isinstance(basis, Basis2D):
        return basis.eval(xi, eta)
    return basis.eval(xi)


@dataclass(frozen=True)
class QuadratureSet:
    """Half-cell rules in reference coordinates of the unit half-interval [0, 1].

    ``gauss``/``lobatto`` hold nodes on [0, 1]; a cell's left half maps to
    xi = s - 1 and its right half to xi = s.
    """

    k: int
    n_gauss: int
    gauss_nodes: np.ndarray
    gauss_weights: np.ndarray
    lobatto_nodes: np.ndarray
    lobatto_weights: np.ndarray

    @classmethod
    def build(cls, k: int, n_gauss: int | None = None) -> "QuadratureSet":
        n = k + 1 if n_gauss is None else n_gauss
        if n < k + 1:
            raise ConfigError(f"need at least k+1 Gauss points per half-cell, got {n}")
        gx, gw = gauss_rule(n, (0.0, 1.0))
        lx, lw = lobatto_rule(lobatto_count(k), (0.0, 1.0))
        return cls(k, n, gx, gw, lx, lw)

    @property
    def w_hat1(self) -> float:
        return float(self.lobatto_weights[0])

    def cell_gauss(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss points of both half-cells on [-1, 1] (left half first), weights per half."""
        s, w = self.gauss_nodes, self.gauss_weights
        return np.concatenate((s - 1.0, s)), np.concatenate((w, w))

    def cell_lobatto(self) -> np.ndarray:
        s = self.lobatto_nodes
        return np.concatenate((s - 1.0, s))


def mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a @ b`` contracting the last axis of ``a``, done as one 2D product."""
    lead = a.shape[:-1]
    return (np.reshape(a, (-1, a.shape[-1])) @ b).reshape(lead + (b.shape[-1],))
