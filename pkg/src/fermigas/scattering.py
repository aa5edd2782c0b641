"""Zero-energy p-wave scattering in one, two and three dimensions.

The scattering function solves

    -f'' - ((d+1)/r) f' + v f / 2 = 0,     f(r) -> 1 as r -> infinity,

and outside the support of ``v`` it equals ``1 - a^d / r^d`` which defines the
scattering length ``a``.  The equation is integrated as a first-order system in
``(f, F)`` with the flux ``F = r^(d+1) f'``; ``F' = v r^(d+1) f / 2`` so the flux
is nondecreasing wherever ``v >= 0``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import (
    GridTooCoarse,
    InvalidConfig,
    NoBracket,
    NonpositiveRange,
    PreconditionError,
    UnsupportedMoment,
    ZeroScatteringLength,
)

__all__ = [
    "RadialPotential",
    "ScatteringSolution",
    "JastrowProfile",
    "DerivedLengths",
    "sphere_area",
    "solve_p_wave",
    "derived_lengths",
    "effective_range",
    "definition_length",
    "calibrate_soft_core",
    "moment_integral",
    "odd_wave_length",
]

RTOL = 1e-12
RESIDUAL_TOL = 1e-6
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
# largest growth factor exp(GROWTH_STEP) allowed inside one integration piece
GROWTH_STEP = 30.0


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2 points for d=1)."""
    return {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[d]


@dataclass(frozen=True)
class RadialPotential:
    """Nonnegative, compactly supported radial interaction.

    ``kind`` is ``"hardcore"``, ``"softcore"`` or ``"tabulated"``.  A tabulated
    potential is piecewise linear through ``(r_tab, v_tab)`` and vanishes past
    ``r_tab[-1]``; ``r_hc`` adds an optional hard core on ``[0, r_hc]``.
    """

    d: int
    kind: str
    R0: float
    V0: float = 0.0
    r_tab: tuple = ()
    v_tab: tuple = ()
    r_hc: float = 0.0

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise InvalidConfig(f"dimension must be 1, 2 or 3, got {self.d}")
        if self.kind not in ("hardcore", "softcore", "tabulated"):
            raise InvalidConfig(f"unknown potential kind {self.kind!r}")
        if not self.R0 > 0:
            raise NonpositiveRange(f"range R0 must be positive, got {self.R0}")
        if self.kind == "softcore" and self.V0 < 0:
            raise PreconditionError("soft-core strength must be nonnegative")
        if self.kind == "tabulated":
            r = np.asarray(self.r_tab, float)
            v = np.asarray(self.v_tab, float)
            if r.ndim != 1 or r.shape != v.shape or r.size < 2:
                raise InvalidConfig("tabulated potential needs matching r and v arrays")
            if np.any(np.diff(r) <= 0):
                raise PreconditionError("tabulated grid must be strictly increasing")
            if np.any(v < 0):
                raise PreconditionError("potential must be nonnegative")
            if r[0] < 0:
                raise PreconditionError("tabulated grid must start at r >= 0")
            if not math.isclose(r[-1], self.R0):
                raise PreconditionError("R0 must equal the last tabulated radius")
        if not 0 <= self.r_hc <= self.R0:
            raise PreconditionError("hard-core radius must lie in [0, R0]")

    @classmethod
    def hardcore(cls, R0: float, d: int = 3) -> "RadialPotential":
        return cls(d=d, kind="hardcore", R0=R0, r_hc=R0)

    @classmethod
    def softcore(cls, R0: float, V0: float, d: int = 3) -> "RadialPotential":
        return cls(d=d, kind="softcore", R0=R0, V0=V0)

    @classmethod
    def tabulated(cls, r: Sequence[float], v: Sequence[float], d: int = 3,
                  r_hc: float = 0.0) -> "RadialPotential":
        r = tuple(float(x) for x in r)
        return cls(d=d, kind="tabulated", R0=r[-1], r_tab=r,
                   v_tab=tuple(float(x) for x in v), r_hc=r_hc)

    @classmethod
    def from_config(cls, cfg: dict, base_dir: str | Path = ".") -> "RadialPotential":
        """Build from a mapping with keys dimension, kind, R0, V0 or table."""
        try:
            d = int(cfg.get("dimension", 3))
            kind = cfg["kind"]
        except KeyError as exc:
            raise InvalidConfig(f"missing potential key {exc}") from None
        if kind == "hardcore":
            return cls.hardcore(float(cfg["R0"]), d)
        if kind == "softcore":
            return cls.softcore(float(cfg["R0"]), float(cfg["V0"]), d)
        if kind == "tabulated":
            path = Path(base_dir) / cfg["table"]
            data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
            return cls.tabulated(data[:, 0], data[:, 1], d, float(cfg.get("r_hc", 0.0)))
        raise InvalidConfig(f"unknown potential kind {kind!r}")

    def to_config(self) -> dict:
        out = {"dimension": self.d, "kind": self.kind, "R0": self.R0}
        if self.kind == "softcore":
            out["V0"] = self.V0
        if self.kind == "tabulated":
            out["r"] = list(self.r_tab)
            out["v"] = list(self.v_tab)
            out["r_hc"] = self.r_hc
        return out

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        if self.kind == "hardcore":
            return np.where(r < self.R0, np.inf, 0.0)
        if self.kind == "softcore":
            return np.where(r < self.R0, self.V0, 0.0)
        rt = np.asarray(self.r_tab)
        vt = np.asarray(self.v_tab)
        out = np.where(r <= rt[-1], np.interp(r, rt, vt), 0.0)
        if self.r_hc > 0:
            out = np.where(r < self.r_hc, np.inf, out)
        return out

    def breakpoints(self) -> list[float]:
        """Radii where ``v`` is not smooth, sorted, excluding 0."""
        pts = {self.R0}
        if self.kind == "tabulated":
            pts.update(x for x in self.r_tab if x > 0)
        if self.r_hc > 0:
            pts.add(self.r_hc)
        return sorted(p for p in pts if p > self.r_hc or (self.r_hc == 0 and p > 0))

    def max_on(self, lo: float, hi: float) -> float:
        if self.kind == "tabulated":
            rr = np.linspace(lo, hi, 5)
            inner = [x for x in self.r_tab if lo <= x <= hi]
            return float(np.max(self(np.concatenate([rr, inner]))))
        return float(self(0.5 * (lo + hi)))


@dataclass
class _Piece:
    lo: float
    hi: float
    sol: Callable
    log_scale: float


@dataclass
class ScatteringSolution:
    """Scattering function on a radial grid plus the derived lengths.

    ``f`` and ``df`` evaluate the normalized solution anywhere: inside
    ``[r_start, r_max]`` from the integrator's dense output, beyond ``r_max``
    from the exterior closed form.
    """

    d: int
    potential: RadialPotential
    r: np.ndarray
    f0: np.ndarray
    f0_prime: np.ndarray
    a: float
    residual: float
    r_max: float
    a0: float = float("nan")
    a0_inv: float = float("nan")
    Reff: float = float("nan")
    _pieces: list = field(default_factory=list, repr=False)
    _log_A: float = 0.0
    _start: tuple = (0.0, 0.0, 0.0)

    @property
    def r_start(self) -> float:
        return self._start[0]

    def _eval(self, r, which: int) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, float))
        out = np.zeros_like(r)
        r_s, v0, eps = self._start
        d = self.d
        if r_s == 0.0:
            small = r < eps
            if np.any(small):
                raw = _local_regular(r[small], v0, d)[which]
                out[small] = raw * math.exp(self._pieces[0].log_scale - self._log_A)
        for pc in self._pieces:
            m = (r >= pc.lo) & (r <= pc.hi)
            if np.any(m):
                y = pc.sol(r[m])
                scale = math.exp(pc.log_scale - self._log_A)
                if which == 0:
                    out[m] = scale * y[0]
                else:
                    out[m] = scale * y[1] / r[m] ** (d + 1)
        far = r > self.r_max
        if np.any(far):
            ad = self.a ** d
            out[far] = 1.0 - ad / r[far] ** d if which == 0 else d * ad / r[far] ** (d + 1)
        return out

    def f(self, r) -> np.ndarray:
        return self._eval(r, 0)

    def df(self, r) -> np.ndarray:
        return self._eval(r, 1)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "f0", "f0_prime"])
            for row in zip(self.r, self.f0, self.f0_prime):
                w.writerow([f"{x:.17g}" for x in row])


def _local_regular(r, v0: float, d: int):
    """Regular solution near the origin for constant ``v = v0``, f(0) = 1."""
    r = np.asarray(r, float)
    if v0 <= 0:
        return np.ones_like(r), np.zeros_like(r)
    nu = d / 2.0
    kappa = math.sqrt(v0 / 2.0)
    z = np.maximum(kappa * r, 1e-300)
    c = special.gamma(nu + 1) * 2.0 ** nu
    small = z < 1e-6
    zz = np.where(small, 1.0, z)
    f = np.where(small, 1.0 + z ** 2 / (4 * (nu + 1)), c * special.iv(nu, zz) / zz ** nu)
    fp = np.where(small, kappa * z / (2 * (nu + 1)), c * kappa * special.iv(nu + 1, zz) / zz ** nu)
    return f, fp


def _integrate(v: RadialPotential, r_max: float, rtol: float):
    d = v.d
    if v.r_hc > 0:
        r_s = v.r_hc
        y = np.array([0.0, r_s ** (d + 1)])
        v0, eps = 0.0, r_s
    else:
        first = v.breakpoints()[0]
        v0 = float(v(0.0))
        kappa = math.sqrt(v0 / 2.0) if v0 > 0 else 0.0
        eps = 1e-3 * first if kappa == 0 else min(1e-3 * first, 1e-2 / kappa)
        f, fp = _local_regular(np.array([eps]), v0, d)
        r_s = 0.0
        y = np.array([f[0], eps ** (d + 1) * fp[0]])
    nodes = [eps] + [b for b in v.breakpoints() if b > eps] + [r_max]
    nodes = sorted(set(n for n in nodes if n <= r_max))

    def rhs(r, y, vv):
        return [y[1] / r ** (d + 1), 0.5 * vv(r) * r ** (d + 1) * y[0]]

    pieces = []
    log_scale = 0.0
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        vmax = v.max_on(lo, hi)
        if vmax > 0:
            step = GROWTH_STEP / math.sqrt(vmax / 2.0)
            n_sub = max(1, int(math.ceil((hi - lo) / step)))
        else:
            n_sub = 1
        sub = np.linspace(lo, hi, n_sub + 1)
        for a_, b_ in zip(sub[:-1], sub[1:]):
            vv = (lambda r, _v=v: float(_v(r)))
            if vmax == 0:
                vv = (lambda r: 0.0)
            sol = integrate.solve_ivp(rhs, (a_, b_), y, method="DOP853", rtol=rtol,
                                      atol=1e-20, dense_output=True, args=(vv,))
            if not sol.success:
                raise GridTooCoarse(f"integration failed on [{a_}, {b_}]: {sol.message}")
            pieces.append(_Piece(a_, b_, sol.sol, log_scale))
            y_end = sol.y[:, -1]
            norm = max(abs(y_end[0]), abs(y_end[1]) / b_ ** (d + 1), 1e-300)
            y = y_end / norm
            log_scale += math.log(norm)
    return pieces, (r_s, v0, eps)


def _flux_residual(v: RadialPotential, pieces, r_nodes: np.ndarray) -> float:
    """Relative residual of F' = v r^(d+1) f / 2 at interior nodes."""
    d = v.d
    worst = 0.0
    bps = np.array(v.breakpoints())
    for pc in pieces:
        m = (r_nodes > pc.lo) & (r_nodes < pc.hi)
        rr = r_nodes[m]
        if rr.size == 0:
            continue
        h = 1e-4 * np.minimum(rr - pc.lo, pc.hi - rr)
        h = np.minimum(h, 1e-4 * rr)
        ok = h > 0
        if bps.size:
            dist = np.min(np.abs(rr[:, None] - bps[None, :]), axis=1)
            ok &= dist > 2 * h
        rr, h = rr[ok], h[ok]
        if rr.size == 0:
            continue
        Fp = (pc.sol(rr + h)[1] - pc.sol(rr - h)[1]) / (2 * h)
        y = pc.sol(rr)
        vv = v(rr)
        target = 0.5 * vv * rr ** (d + 1) * y[0]
        scale = np.abs(target) + np.abs(y[1]) / rr + np.abs(y[0]) * rr ** d
        worst = max(worst, float(np.max(np.abs(Fp - target) / scale)))
    return worst


def solve_p_wave(v: RadialPotential, r_max: float, n_grid: int = 2000,
                 rtol: float = RTOL, residual_tol: float = RESIDUAL_TOL) -> ScatteringSolution:
    """Solve the zero-energy p-wave problem and extract the scattering length."""
    if not v.R0 > 0:
        raise NonpositiveRange(f"range R0 must be positive, got {v.R0}")
    if r_max < 4 * v.R0:
        raise PreconditionError(f"r_max={r_max} must be at least 4*R0={4 * v.R0}")
    if n_grid < 200:
        raise PreconditionError(f"n_grid={n_grid} must be at least 200")
    d = v.d
    grid = np.unique(np.concatenate([np.linspace(0.0, r_max, n_grid), v.breakpoints()]))
    grid = grid[grid <= r_max]
    residual = math.inf
    for _ in range(4):
        pieces, start = _integrate(v, r_max, rtol)
        residual = _flux_residual(v, pieces, grid)
        if residual <= residual_tol:
            break
        rtol = max(rtol / 10, 1e-14)
    else:
        raise GridTooCoarse(f"flux residual {residual:.3e} exceeds {residual_tol:.1e}")

    sol = ScatteringSolution(d=d, potential=v, r=grid, f0=np.zeros_like(grid),
                             f0_prime=np.zeros_like(grid), a=0.0, residual=residual,
                             r_max=r_max, _pieces=pieces, _log_A=0.0, _start=start)
    # raw values in the frame of the last piece
    last = pieces[-1]
    tail = grid[(grid >= max(r_max / 10, v.R0)) & (grid >= last.lo)]
    if tail.size < 3:
        tail = np.linspace(max(last.lo, v.R0), r_max, 50)
    raw = last.sol(tail)[0]
    # exterior flux is constant, so the r^-d coefficient is F/d; A is the
    # least-squares offset over the last decade
    B = float(np.mean(last.sol(tail)[1])) / d
    A = float(np.mean(raw + B * tail ** (-float(d))))
    sol._log_A = last.log_scale + math.log(A)
    ad = max(B / A, 0.0)
    sol.a = ad ** (1.0 / d)
    sol.f0 = sol.f(grid)
    sol.f0_prime = sol.df(grid)
    if v.r_hc > 0:
        core = grid < v.r_hc
        sol.f0[core] = 0.0
        sol.f0_prime[core] = 0.0
    if d == 3 and sol.a > 0:
        lengths = derived_lengths(sol)
        sol.a0, sol.Reff = lengths.a0, lengths.Reff
    if d == 1 and sol.a > 0:
        sol.a0_inv = derived_lengths(sol).a0_inv
    return sol


def _radial_quad(func, sol: ScatteringSolution, lo: float, hi: float) -> float:
    """Integrate ``func(r)`` over [lo, hi] split at the potential breakpoints."""
    pts = [lo] + [p for p in sol.potential.breakpoints() if lo < p < hi]
    pts += [pc.hi for pc in sol._pieces if lo < pc.hi < hi]
    pts = sorted(set(pts)) + [hi]
    total = 0.0
    for a_, b_ in zip(pts[:-1], pts[1:]):
        if b_ <= a_:
            continue
        val, _ = integrate.quad(func, a_, b_, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
        total += val
    return total


def _energy_density(sol: ScatteringSolution):
    v = sol.potential

    def dens(r):
        fp = sol.df(r)[0]
        vv = float(v(r))
        pot = 0.0 if (vv == 0 or math.isinf(vv)) else 0.5 * vv * sol.f(r)[0] ** 2
        return fp * fp + pot

    return dens


def _moment_to_infinity(sol: ScatteringSolution, n: int) -> float:
    """|S| * int_0^inf r^(n+d-1) (f'^2 + v f^2 / 2) dr for the bare solution."""
    d = sol.d
    if n >= d + 2:
        raise UnsupportedMoment(f"moment n={n} diverges for the bare scattering function")
    dens = _energy_density(sol)
    inner = _radial_quad(lambda r: r ** (n + d - 1) * dens(r), sol, sol.r_start, sol.r_max)
    tail = d * d * sol.a ** (2 * d) * sol.r_max ** (n - d - 2) / (d + 2 - n)
    return sphere_area(d) * (inner + tail)


@dataclass(frozen=True)
class DerivedLengths:
    a: float
    a0: float
    Reff: float
    a0_inv: float = float("nan")
    zero_scattering_length: bool = False


def effective_range(a: float, a0: float) -> float:
    """Effective range from ``1/Reff = (18/5) a0^2 / a^3``."""
    if a == 0:
        raise ZeroScatteringLength("effective range undefined for a = 0")
    return 5.0 * a ** 3 / (18.0 * a0 ** 2)


def derived_lengths(sol: ScatteringSolution) -> DerivedLengths:
    """Second length a0 (and Reff in three dimensions).

    In three dimensions ``3 a0^2 * 12 pi a^3`` is the fourth moment of the
    scattering energy density.  In one dimension ``1/(2 a0)`` is the zeroth
    moment over the whole line.
    """
    a = sol.a
    if a == 0:
        return DerivedLengths(a=0.0, a0=float("nan"), Reff=float("nan"),
                              zero_scattering_length=True)
    if sol.d == 3:
        m4 = _moment_to_infinity(sol, 4)
        a0 = math.sqrt(m4 / (36.0 * math.pi * a ** 3))
        return DerivedLengths(a=a, a0=a0, Reff=effective_range(a, a0), a0_inv=1.0 / a0)
    if sol.d == 1:
        m0 = _moment_to_infinity(sol, 0)
        return DerivedLengths(a=a, a0=1.0 / (2.0 * m0), Reff=float("nan"), a0_inv=2.0 * m0)
    return DerivedLengths(a=a, a0=float("nan"), Reff=float("nan"))


def definition_length(sol: ScatteringSolution) -> float:
    """Scattering length recomputed from the variational integrand.

    ``int |x|^2 (|grad f|^2 + v f^2 / 2) dx = d |S^(d-1)| a^d``.
    """
    m2 = _moment_to_infinity(sol, 2)
    return (m2 / (sol.d * sphere_area(sol.d))) ** (1.0 / sol.d)


def calibrate_soft_core(target_a: float, radius_factor: float, d: int = 3,
                        V_max: float = 1e10, r_max_factor: float = 20.0,
                        rtol: float = 1e-9) -> float:
    """Soft-core height ``V0`` whose scattering length equals ``target_a``."""
    if not target_a > 0:
        raise PreconditionError("target scattering length must be positive")
    if not radius_factor > 1:
        raise PreconditionError("radius_factor must exceed 1")
    R = radius_factor * target_a

    def a_of(V0):
        pot = RadialPotential.softcore(R, V0, d)
        return solve_p_wave(pot, r_max=r_max_factor * R, n_grid=400).a

    lo, hi = 1.0 / R ** 2, 1.0 / R ** 2
    while a_of(lo) > target_a:
        lo /= 10.0
        if lo < 1e-30:
            raise NoBracket("could not find a weak enough potential")
    a_hi = a_of(hi)
    while a_hi < target_a:
        hi *= 10.0
        if hi > V_max:
            raise NoBracket(f"scattering length reachable range is (0, {a_hi}] for "
                            f"V0 <= {V_max}; target {target_a} not reached")
        a_hi = a_of(hi)
    logV = optimize.brentq(lambda t: a_of(math.exp(t)) / target_a - 1.0,
                           math.log(lo), math.log(hi), xtol=1e-14, rtol=1e-14)
    V0 = math.exp(logV)
    if abs(a_of(V0) / target_a - 1) > rtol:
        raise NoBracket("root polish failed to reach the target tolerance")
    return V0


@dataclass
class JastrowProfile:
    """Scaled and truncated scattering function used as the pair factor."""

    base: ScatteringSolution
    b: float

    def __post_init__(self):
        if not self.b > self.base.potential.R0:
            raise PreconditionError(f"cutoff b={self.b} must exceed R0={self.base.potential.R0}")
        self.norm = 1.0 - (self.base.a / self.b) ** self.base.d

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def a(self) -> float:
        return self.base.a

    def f(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        inside = r <= self.b
        rr = np.where(inside, r, self.b)
        return np.where(inside, self.base.f(rr).reshape(rr.shape) / self.norm, 1.0)

    def df(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        inside = r <= self.b
        rr = np.where(inside, r, self.b)
        return np.where(inside, self.base.df(rr).reshape(rr.shape) / self.norm, 0.0)

    def g(self, r) -> np.ndarray:
        return self.f(r) ** 2 - 1.0

    def v(self, r) -> np.ndarray:
        return self.base.potential(r)


ENERGY_MOMENTS = (0, 2, 4, 6)
FDF_MOMENTS = (0, 1, 2)


def moment_integral(profile: JastrowProfile, n: int, kind: str = "energy_form") -> float:
    """Radial moments of the pair factor over the d-dimensional volume.

    ``energy_form``: int (|grad f|^2 + v f^2 / 2) |x|^n dx.
    ``f_df_form``: int |x|^n f df/dr dx.
    """
    sol = profile.base
    d = sol.d
    if kind == "energy_form":
        if n not in ENERGY_MOMENTS:
            raise UnsupportedMoment(f"energy_form supports n in {ENERGY_MOMENTS}, got {n}")
        dens = _energy_density(sol)
        val = _radial_quad(lambda r: r ** (n + d - 1) * dens(r), sol, sol.r_start,
                           min(profile.b, sol.r_max))
        if profile.b > sol.r_max:
            val += _exterior_energy(sol, n, sol.r_max, profile.b)
        return sphere_area(d) * val / profile.norm ** 2
    if kind == "f_df_form":
        if n not in FDF_MOMENTS:
            raise UnsupportedMoment(f"f_df_form supports n in {FDF_MOMENTS}, got {n}")
        val = _radial_quad(lambda r: r ** (n + d - 1) * sol.f(r)[0] * sol.df(r)[0], sol,
                           sol.r_start, min(profile.b, sol.r_max))
        if profile.b > sol.r_max:
            val += integrate.quad(lambda r: r ** (n + d - 1) * sol.f(r)[0] * sol.df(r)[0],
                                  sol.r_max, profile.b, epsabs=QUAD_EPSABS,
                                  epsrel=QUAD_EPSREL, limit=400)[0]
        return sphere_area(d) * val / profile.norm ** 2
    raise UnsupportedMoment(f"unknown moment kind {kind!r}")


def _exterior_energy(sol: ScatteringSolution, n: int, lo: float, hi: float) -> float:
    d = sol.d
    c = d * d * sol.a ** (2 * d)
    p = n - d - 3
    if p == -1:
        return c * math.log(hi / lo)
    return c * (hi ** (p + 1) - lo ** (p + 1)) / (p + 1)


def odd_wave_length(v: RadialPotential, R: float | None = None) -> float:
    """One-dimensional odd-wave length from the variational problem on [-R, R].

    ``4 / (R - a_odd) = inf int (2 |h'|^2 + v h^2)`` over odd ``h`` with
    ``h(R) = 1``.  The minimizer solves ``h'' = v h / 2``; the functional is
    evaluated by quadrature of the normalized minimizer.
    """
    if v.d != 1:
        raise PreconditionError("odd-wave length is one-dimensional")
    R = 2.0 * v.R0 if R is None else R
    if R <= v.R0:
        raise PreconditionError("R must exceed the interaction range")
    x0 = v.r_hc
    nodes = sorted(set([x0] + [p for p in v.breakpoints() if x0 < p < R] + [R]))
    y = np.array([0.0, 1.0])
    segs = []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        sol = integrate.solve_ivp(lambda x, y: [y[1], 0.5 * float(v(x)) * y[0]], (lo, hi), y,
                                  method="DOP853", rtol=1e-12, atol=1e-20, dense_output=True)
        segs.append((lo, hi, sol.sol))
        y = sol.y[:, -1]
    hR = y[0]
    total = 0.0
    for lo, hi, s in segs:
        def integrand(x, s=s):
            h, hp = s(x) / hR
            vv = float(v(x))
            return 2 * hp * hp + (vv * h * h if vv > 0 else 0.0)
        total += integrate.quad(integrand, lo, hi, epsabs=QUAD_EPSABS,
                                epsrel=QUAD_EPSREL, limit=400)[0]
    total *= 2.0  # odd minimizer: both half-lines contribute equally
    return R - 4.0 / total


def potential_from_json(path: str | Path) -> RadialPotential:
    path = Path(path)
    return RadialPotential.from_config(json.loads(path.read_text()), path.parent)
