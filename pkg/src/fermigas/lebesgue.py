"""Lebesgue constants of lattice regions and the 1D power kernels.

The Lebesgue constant of an index set Omega with weight t is
``(2 pi)^-d * integral over the torus of |sum_q t(q) exp(i q u)|``.  The
trigonometric polynomial is evaluated exactly on a uniform grid by FFT and the
absolute value is averaged; the result at grid ``M`` is compared against ``2M``
to report an error estimate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft
from numpy.polynomial.legendre import leggauss

from .errors import GridAliased, InvalidConfig, PreconditionError
from .fermi_surface import FermiPolyhedron, MomentumSet, PolyhedronSpec, build_polyhedron, enumerate_momenta

__all__ = ["KernelSpec", "KernelResult", "kernel_l1", "one_d_power_kernel_l1", "scaling_study", "MAX_REFINE_NODES"]

# largest grid (total nodes) for the automatic refinement step
MAX_REFINE_NODES = 2 ** 24


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


@dataclass
class KernelSpec:
    """Index set, monomial weight and grid for one Lebesgue constant.

    ``points`` are integer lattice vectors; ``weights`` is the exponent vector
    of the monomial ``t(q) = prod q_i^e_i`` (total degree at most 2).
    """

    points: np.ndarray
    weights: tuple = ()
    M: int | None = None
    tol: float = 1e-3
    refine: bool = True

    def __post_init__(self):
        if isinstance(self.points, MomentumSet):
            self.points = self.points.points
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] == 0:
            raise PreconditionError("empty index set")
        self.points = pts
        d = pts.shape[1]
        w = tuple(int(e) for e in self.weights) if self.weights else (0,) * d
        if len(w) != d or min(w) < 0 or sum(w) > 2:
            raise InvalidConfig(f"weights must be {d} nonnegative exponents with total degree <= 2")
        self.weights = w
        if self.M is None:
            self.M = _next_pow2(2 * self.span + 2)
        if self.M < self.alias_bound:
            raise GridAliased(f"M={self.M} below alias-free bound {self.alias_bound}")

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def span(self) -> int:
        return int(np.max(self.points.max(axis=0) - self.points.min(axis=0)))

    @property
    def alias_bound(self) -> int:
        return self.span + 2

    def coefficients(self) -> np.ndarray:
        t = np.ones(len(self.points))
        for axis, e in enumerate(self.weights):
            if e:
                t = t * self.points[:, axis].astype(float) ** e
        return t


@dataclass(frozen=True)
class KernelResult:
    value: float
    error_estimate: float
    M: int
    refined: bool


def _grid_mean_abs(points: np.ndarray, coef: np.ndarray, M: int) -> float:
    d = points.shape[1]
    grid = np.zeros((M,) * d, dtype=complex)
    idx = tuple((points - points.min(axis=0)).T % M)
    np.add.at(grid, idx, coef)
    vals = scipy.fft.ifftn(grid) * M ** d
    return float(np.mean(np.abs(vals)))


def kernel_l1(spec: KernelSpec) -> KernelResult:
    """Normalized L1 norm of the weighted Dirichlet-type kernel."""
    coef = spec.coefficients()
    v = _grid_mean_abs(spec.points, coef, spec.M)
    if not spec.refine or (2 * spec.M) ** spec.d > MAX_REFINE_NODES:
        return KernelResult(v, float("nan"), spec.M, False)
    v2 = _grid_mean_abs(spec.points, coef, 2 * spec.M)
    return KernelResult(v2, abs(v2 - v), 2 * spec.M, True)


# --- 1D power kernels -----------------------------------------------------------

def _power_sum_closed(x: np.ndarray, M: int, p: int) -> np.ndarray:
    q = np.exp(1j * x)
    one = 1 - q
    if p == 0:
        return (1 - q ** (M + 1)) / one
    if p == 1:
        return q * (1 - (M + 1) * q ** M + M * q ** (M + 1)) / one ** 2
    return q * (1 + q - (M + 1) ** 2 * q ** M + (2 * M * M + 2 * M - 1) * q ** (M + 1)
                - M * M * q ** (M + 2)) / one ** 3


def _power_sum_direct(x: np.ndarray, M: int, p: int) -> np.ndarray:
    k = np.arange(M + 1, dtype=float)
    return np.exp(1j * np.outer(x, k)) @ (k ** p)


def one_d_power_kernel_l1(M: int, p: int, nodes: int = 10) -> float:
    """Integral over [0, 2 pi] of |sum_{k=0}^M k^p exp(i k x)|.

    Composite Gauss-Legendre on ``4 (M + 1)`` panels over [0, pi], doubled by
    the reflection symmetry.  Near ``x = 0`` the geometric closed forms cancel
    catastrophically, so the sum is evaluated directly there.
    """
    if M < 1:
        raise PreconditionError("M must be >= 1")
    if p not in (0, 1, 2):
        raise InvalidConfig("p must be 0, 1 or 2")
    panels = 4 * (M + 1)
    t, w = leggauss(nodes)
    edges = np.linspace(0.0, math.pi, panels + 1)
    half = 0.5 * np.diff(edges)
    x = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * t[None, :]).ravel()
    wx = (half[:, None] * w[None, :]).ravel()
    near = x < 8.0 / M
    vals = np.empty(x.shape, dtype=complex)
    vals[~near] = _power_sum_closed(x[~near], M, p)
    if np.any(near):
        vals[near] = _power_sum_direct(x[near], M, p)
    return float(2.0 * np.sum(wx * np.abs(vals)))


# --- scaling sweeps ----------------------------------------------------------------

def predicted_bound(shape: str, R: float, order: int, s: int | None = None) -> float:
    """Growth law the ratio is normalized by (constants not explicit)."""
    if shape == "ball":
        return float(R) ** (1 + order)
    lr = math.log(R)
    if order == 0:
        return s * lr ** 3
    if order == 1:
        return s * R * lr ** 3
    return s * R ** 2 * lr ** 4


CSV_HEADER = ("shape", "R", "N", "s", "weight", "value", "bound_ratio", "error_estimate")


def scaling_study(shape, R_list, weights=(), d: int = 3, csv_path: str | Path | None = None,
                  M_factor: int = 2) -> dict:
    """Lebesgue constants over a dilation sweep with the predicted bound ratio.

    ``shape`` is ``"ball"``, a FermiPolyhedron or a PolyhedronSpec.  Returns
    the rows and the fitted log-log slope of the value against R.
    """
    if isinstance(shape, PolyhedronSpec):
        shape = build_polyhedron(shape)
    name = "ball" if shape == "ball" else "polyhedron"
    s = None if name == "ball" else shape.s
    rows = []
    for R in R_list:
        ms = enumerate_momenta(shape, R, d=d if name == "ball" else None)
        w = tuple(weights) if weights else (0,) * ms.d
        span = int(np.max(ms.points.max(axis=0) - ms.points.min(axis=0)))
        spec = KernelSpec(ms.points, w, M=_next_pow2(M_factor * span + 2))
        res = kernel_l1(spec)
        bound = predicted_bound(name, R, sum(w), s)
        rows.append({"shape": name, "R": R, "N": ms.N, "s": s if s is not None else "",
                     "weight": "".join(map(str, w)), "value": res.value,
                     "bound_ratio": res.value / bound, "error_estimate": res.error_estimate})
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=CSV_HEADER)
            wr.writeheader()
            wr.writerows(rows)
    slope = float("nan")
    if len(rows) >= 2:
        slope = float(np.polyfit(np.log([float(r["R"]) for r in rows]), np.log([r["value"] for r in rows]), 1)[0])
    return {"rows": rows, "slope": slope}
