"""Reduced densities of the free Slater determinant.

``rho_p`` is the Wick determinant ``det[gamma(x_i - x_j)]``.  The discrete
torus gives an independent check: on an alias-free grid the plane waves are
exactly orthonormal, so marginalizing ``|D_N|^2`` over grid nodes must
reproduce every ``rho_p`` to rounding error.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, FitIllConditioned, GridAliased, PreconditionError
from .fermi_surface import MomentumSet, fermi_momentum

__all__ = [
    "OneBodyKernel",
    "DiscreteTorus",
    "rho_p",
    "grid_marginal",
    "rho2_small_separation_fit",
    "rho3_quartic_bound_check",
    "FIT_DIRECTIONS",
]

_CHUNK = 2048


class OneBodyKernel:
    """``gamma(x) = L^-d sum_{k in P} exp(i k x)`` and its exact derivatives."""

    def __init__(self, ms: MomentumSet):
        self.ms = ms
        self.d = ms.d
        self.L = ms.L
        self.k = ms.k
        self.N = ms.N
        self.rho = ms.N / ms.L ** ms.d
        pts = {tuple(r) for r in ms.points.tolist()}
        self.symmetric = all(tuple(-x for x in r) in pts for r in pts)

    def _phase(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, float).reshape(-1, self.d) @ self.k.T

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        shape = x.shape[:-1] if self.d > 1 or (x.ndim and x.shape[-1] == 1) else x.shape
        flat = x.reshape(-1, self.d)
        out = np.empty(len(flat), dtype=float if self.symmetric else complex)
        for i in range(0, len(flat), _CHUNK):
            ph = self._phase(flat[i:i + _CHUNK])
            if self.symmetric:
                out[i:i + _CHUNK] = np.cos(ph).sum(axis=1)
            else:
                out[i:i + _CHUNK] = np.exp(1j * ph).sum(axis=1)
        return (out / self.L ** self.d).reshape(shape)

    def one_minus(self, x) -> np.ndarray:
        """``rho - gamma(x)`` without cancellation (symmetric sets only)."""
        if not self.symmetric:
            return self.rho - self(x)
        x = np.asarray(x, float)
        shape = x.shape[:-1] if self.d > 1 or (x.ndim and x.shape[-1] == 1) else x.shape
        flat = x.reshape(-1, self.d)
        out = np.empty(len(flat))
        for i in range(0, len(flat), _CHUNK):
            out[i:i + _CHUNK] = (2 * np.sin(0.5 * self._phase(flat[i:i + _CHUNK])) ** 2).sum(axis=1)
        return (out / self.L ** self.d).reshape(shape)

    def derivative(self, x, orders) -> np.ndarray:
        """Frequency-space derivative: multiply each term by ``prod (i k_j)^o_j``."""
        orders = tuple(orders)
        w = np.ones(self.N, dtype=complex)
        for j, o in enumerate(orders):
            w = w * (1j * self.k[:, j]) ** o
        flat = np.asarray(x, float).reshape(-1, self.d)
        out = np.exp(1j * self._phase(flat)) @ w / self.L ** self.d
        return out.real if self.symmetric else out

    def matrix(self, points) -> np.ndarray:
        pts = np.asarray(points, float).reshape(-1, self.d)
        diff = pts[:, None, :] - pts[None, :, :]
        return self(diff)


def rho_p(kernel: OneBodyKernel, points) -> float:
    """p-point density ``det[gamma(x_i - x_j)]``; zero when p > N."""
    pts = np.asarray(points, float).reshape(-1, kernel.d)
    p = len(pts)
    if p < 1:
        raise PreconditionError("need at least one point")
    if p > kernel.N:
        return 0.0
    val = np.linalg.det(kernel.matrix(pts))
    return float(np.real(val))


@dataclass
class DiscreteTorus:
    """Uniform grid with ``M`` nodes per axis on the torus of side ``L``."""

    d: int
    L: float
    M: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        axis = np.arange(self.M) * self.h
        self.nodes = np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"), axis=-1).reshape(-1, self.d)

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def weight(self) -> float:
        return self.h ** self.d

    def alias_free(self, ms: MomentumSet) -> bool:
        return self.M > 2 * ms.max_index + 1

    def check(self, ms: MomentumSet) -> None:
        if not self.alias_free(ms):
            raise GridAliased(f"M={self.M} needs to exceed {2 * ms.max_index + 1}")

    def on_grid(self, x, tol: float = 1e-12) -> bool:
        u = np.asarray(x, float) / self.h
        return bool(np.all(np.abs(u - np.round(u)) <= tol * max(1.0, float(np.max(np.abs(u))))))

    def distance(self, x) -> np.ndarray:
        """Minimum-image norm of displacement vectors."""
        x = np.asarray(x, float)
        y = x - self.L * np.round(x / self.L)
        return np.sqrt(np.sum(y * y, axis=-1))

    def gram(self, ms: MomentumSet) -> np.ndarray:
        """Grid inner products of the normalized plane waves."""
        u = np.exp(1j * self.nodes @ ms.k.T) / self.L ** (self.d / 2)
        return (u.conj().T @ u) * self.weight


def _slater_rows(ms: MomentumSet, x: np.ndarray) -> np.ndarray:
    return np.exp(1j * (x @ ms.k.T)) / ms.L ** (ms.d / 2)


def grid_marginal(ms: MomentumSet, torus: DiscreteTorus, fixed, budget: float = 2e8) -> float:
    """``N!/(N-p)!`` times the grid integral of ``|D_N|^2 / N!`` over the free variables.

    Independent of Wick's theorem: only builds Slater determinants.
    """
    torus.check(ms)
    N = ms.N
    fixed = np.asarray(fixed, float).reshape(-1, ms.d)
    p = len(fixed)
    if p > N:
        return 0.0
    free = N - p
    G = len(torus.nodes)
    terms = float(G) ** free
    if terms > budget:
        raise BudgetExceeded(f"grid marginalization needs {terms:.3g} determinants (budget {budget:.3g})")
    fixed_rows = _slater_rows(ms, fixed)
    node_rows = _slater_rows(ms, torus.nodes)
    total = 0.0
    if free == 0:
        total = abs(np.linalg.det(fixed_rows)) ** 2
    else:
        # outer free variables iterated, the innermost one or two vectorized over the grid
        v = 2 if free >= 2 and G * G <= 2 ** 18 else 1
        inner = np.stack(np.meshgrid(*([np.arange(G)] * v), indexing="ij"), axis=-1).reshape(-1, v)
        mats = np.empty((len(inner), N, N), dtype=complex)
        for j in range(v):
            mats[:, N - v + j, :] = node_rows[inner[:, j]]
        for outer in itertools.product(range(G), repeat=free - v):
            head = np.vstack([fixed_rows] + [node_rows[i][None, :] for i in outer])
            mats[:, :N - v, :] = head
            total += float(np.sum(np.abs(np.linalg.det(mats)) ** 2))
    total *= torus.weight ** free
    return total * math.factorial(N) / math.factorial(N - p) / math.factorial(N)


FIT_DIRECTIONS = np.array([v for v in itertools.product((-1, 0, 1), repeat=3) if any(v)], float)
FIT_DIRECTIONS /= np.linalg.norm(FIT_DIRECTIONS, axis=1)[:, None]


def rho2_small_separation_fit(kernel: OneBodyKernel, d: int = 3, n_radii: int = 8,
                              spread_tol: float = 0.05) -> dict:
    """Fit ``rho2(0, r e) = c2 r^2 (1 - c4 r^2)`` over 26 directions and 8 radii.

    ``rho^2 - gamma^2`` is evaluated as ``(rho - gamma)(rho + gamma)`` with
    ``rho - gamma`` summed from ``2 sin^2`` terms to avoid cancellation.
    """
    if d != 3 or kernel.d != 3:
        raise PreconditionError("the small-separation fit is three-dimensional")
    rho = kernel.rho
    radii = np.linspace(0.01, 0.1, n_radii) * rho ** (-1 / 3)
    c2s, c4s = [], []
    for e in FIT_DIRECTIONS:
        x = radii[:, None] * e[None, :]
        om = kernel.one_minus(x)
        r2 = om * (2 * rho - om)
        coef = np.polyfit(radii ** 2, r2 / radii ** 2, 1)
        c2 = coef[1]
        c2s.append(c2)
        c4s.append(-coef[0] / c2)
    c2s, c4s = np.array(c2s), np.array(c4s)
    spread = float(np.std(c2s) / np.mean(c2s))
    if spread > spread_tol:
        raise FitIllConditioned(f"directional spread {spread:.3g} exceeds {spread_tol}")
    c2, c4 = float(np.mean(c2s)), float(np.mean(c4s))
    ref2 = (6 * math.pi ** 2) ** (2 / 3) * rho ** (8 / 3) / 5
    ref4 = 3 * (6 * math.pi ** 2) ** (2 / 3) * rho ** (2 / 3) / 35
    return {"c2": c2, "c4": c4, "c2_ref": ref2, "c4_ref": ref4,
            "c2_ratio": c2 / ref2, "c4_ratio": c4 / ref4, "spread": spread,
            "kF": fermi_momentum(rho, 3)}


def rho3_quartic_bound_check(kernel: OneBodyKernel, samples: int = 1000, seed: int = 0,
                             scale: float = 1.0) -> dict:
    """Largest ``rho3 / (rho^(3+4/3) |x12|^2 |x13|^2)`` over random close triples."""
    if kernel.d != 3:
        raise PreconditionError("the quartic bound check is three-dimensional")
    rng = np.random.default_rng(seed)
    rho = kernel.rho
    ell = scale * rho ** (-1 / 3)
    worst = 0.0
    for _ in range(samples):
        x1 = rng.uniform(0, kernel.L, 3)
        pts = np.vstack([x1, x1 + rng.uniform(-ell, ell, 3), x1 + rng.uniform(-ell, ell, 3)])
        val = rho_p(kernel, pts)
        den = rho ** (3 + 4 / 3) * np.sum((pts[1] - pts[0]) ** 2) * np.sum((pts[2] - pts[0]) ** 2)
        worst = max(worst, val / den)
    return {"max_ratio": worst, "samples": samples}
