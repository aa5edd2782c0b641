"""Fermi polyhedron, lattice momenta and kinetic sums.

The polyhedron is the convex hull of ``s`` evenly spread, axis-symmetric
points whose coordinates are rounded to fractions ``p / Q_j`` with three
distinct primes ``Q_j``.  All geometric predicates (hull facets, extremality,
volume) are evaluated exactly on integers.  Lattice membership only needs one
high-precision multiplication by the irrational scale ``sigma``.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.spatial import ConvexHull

from .errors import DegenerateHull, EmptySet, InvalidConfig, PreconditionError, SymmetryOrbitMismatch

__all__ = [
    "PolyhedronSpec",
    "FermiPolyhedron",
    "MomentumSet",
    "KineticSums",
    "next_primes",
    "is_prime",
    "build_polyhedron",
    "polyhedron_from_corners",
    "enumerate_momenta",
    "kinetic_sums",
    "symmetry_defect",
]

MP_DPS = 50
WINDOW_C = 10.0
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_primes(Q: int, count: int) -> tuple[int, ...]:
    """Smallest ``count`` distinct primes >= Q."""
    out = []
    n = max(int(Q), 2)
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n += 1
    return tuple(out)


@dataclass(frozen=True)
class PolyhedronSpec:
    d: int = 3
    s: int = 48
    Q: int = 10 ** 6
    mode: str = "rational"
    rng_seed: int = 0
    N_hint: int | None = None

    def __post_init__(self):
        if self.d not in (2, 3):
            raise InvalidConfig("polyhedron dimension must be 2 or 3")
        if self.mode not in ("rational", "simple"):
            raise InvalidConfig(f"unknown mode {self.mode!r}")
        if self.s < 4 or self.Q < 2:
            raise PreconditionError("need s >= 4 corners and Q >= 2")

    def window_report(self) -> dict:
        """Asymptotic window checks with the recorded constant ``WINDOW_C``."""
        if self.d == 3:
            ok_s = self.Q ** -0.25 <= WINDOW_C / self.s
            ok_n = self.N_hint is None or self.N_hint ** (4 / 3) <= self.Q
        else:
            ok_s = self.Q ** -0.5 <= WINDOW_C / self.s ** 2
            ok_n = self.N_hint is None or self.N_hint ** 1.5 <= self.Q
        return {"C": WINDOW_C, "corner_condition": ok_s, "particle_condition": ok_n}


# --- evenly spread symmetric points ------------------------------------------

def _group_images(p: np.ndarray) -> np.ndarray:
    """All images of ``p`` under coordinate permutations and sign flips."""
    d = p.shape[-1]
    imgs = []
    for perm in itertools.permutations(range(d)):
        q = p[list(perm)]
        for signs in itertools.product((1.0, -1.0), repeat=d):
            imgs.append(q * np.array(signs))
    return np.array(imgs)


def _orbit(p: np.ndarray) -> np.ndarray:
    imgs = _group_images(p)
    _, idx = np.unique(np.round(imgs, 12), axis=0, return_index=True)
    return imgs[np.sort(idx)]


def _fibonacci_sphere(n: int, offset: float) -> np.ndarray:
    i = np.arange(n)
    z = 1.0 - (2 * i + 1) / n
    rho = np.sqrt(1.0 - z * z)
    phi = i * GOLDEN_ANGLE + offset
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def _orbit_decomposition(s: int) -> tuple[int, int, tuple[int, ...]] | None:
    for m in range(s // 48, -1, -1):
        r = s - 48 * m
        for k in range(r // 24 + 1):
            rest = r - 24 * k
            for size in range(4):
                for sub in itertools.combinations((6, 8, 12), size):
                    if sum(sub) == rest:
                        return m, k, sub
    return None


_SPECIAL = {
    6: np.array([1.0, 0.0, 0.0]),
    8: np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0),
    12: np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0),
}


def _spread_points_3d(s: int, seed: int) -> np.ndarray:
    dec = _orbit_decomposition(s)
    if dec is None:
        raise SymmetryOrbitMismatch(f"s={s} is not a sum of symmetry orbit sizes (6, 8, 12, 24, 48)")
    m, k, specials = dec
    placed = [_orbit(_SPECIAL[o]) for o in specials]
    pts = np.vstack(placed) if placed else np.zeros((0, 3))

    rng = np.random.default_rng(seed)
    pool = np.sort(np.abs(_fibonacci_sphere(6000, rng.uniform(0, 2 * math.pi))), axis=1)[:, ::-1]
    gap = 1e-6
    generic = pool[(pool[:, 0] - pool[:, 1] > gap) & (pool[:, 1] - pool[:, 2] > gap) & (pool[:, 2] > gap)]
    t = np.linspace(0.0, 1.0, 400)[1:-1]
    ang = t * math.pi / 4
    fam1 = np.column_stack([np.cos(ang), np.sin(ang), np.zeros_like(ang)])  # (x, y, 0)
    th = np.arctan(np.sqrt(2.0)) * t  # (c, c, z) with c > z, and (c, z, z)
    fam2 = np.column_stack([np.cos(th) / math.sqrt(2), np.cos(th) / math.sqrt(2), np.sin(th)])
    fam2 = np.sort(fam2, axis=1)[:, ::-1]
    fam3 = np.column_stack([np.cos(th / 2), np.sin(th / 2) / math.sqrt(2), np.sin(th / 2) / math.sqrt(2)])
    pool24 = np.vstack([fam1, fam2, fam3])

    def self_distance(c):
        imgs = _group_images(c)
        dist = np.linalg.norm(imgs - c, axis=1)
        return np.min(dist[dist > 1e-9]) if np.any(dist > 1e-9) else 2.0

    def greedy(candidates, count, orbit_size):
        nonlocal pts
        selfd = np.array([self_distance(c) for c in candidates])
        for _ in range(count):
            if pts.shape[0]:
                dmin = np.min(np.linalg.norm(candidates[:, None, :] - pts[None, :, :], axis=2), axis=1)
            else:
                dmin = np.full(len(candidates), 2.0)
            score = np.minimum(dmin, selfd)
            c = candidates[int(np.argmax(score))]
            orb = _orbit(c)
            if orb.shape[0] != orbit_size:
                raise SymmetryOrbitMismatch("candidate orbit has unexpected size")
            pts = np.vstack([pts, orb])

    greedy(pool24, k, 24)
    greedy(generic, m, 48)
    return pts


def _spread_points_2d(s: int) -> np.ndarray:
    if s % 4:
        raise SymmetryOrbitMismatch(f"s={s} must be a multiple of 4 in two dimensions")
    ang = 2 * math.pi * np.arange(s) / s
    return np.column_stack([np.cos(ang), np.sin(ang)])


# --- exact geometry ------------------------------------------------------------

def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _det3(a, b, c):
    return _dot(a, _cross(b, c))


@dataclass
class FermiPolyhedron:
    """Exact rational polytope ``sigma * conv{(p^1/Q_1, ..., p^d/Q_d)}``.

    ``facets`` holds integer pairs ``(n, c)`` meaning ``n . X <= c`` for the
    integer coordinates ``X = D * x`` with ``D = prod(primes)``.
    """

    d: int
    s: int
    Q: int
    primes: tuple
    p: list
    sigma: mpmath.mpf
    faces: list
    facets: list
    volume_unscaled: Fraction
    mode: str = "rational"
    rng_seed: int = 0
    constants: dict = field(default_factory=dict)

    @property
    def D(self) -> int:
        return math.prod(self.primes)

    @property
    def X(self) -> list:
        D = self.D
        return [tuple(pi * (D // q) for pi, q in zip(row, self.primes)) for row in self.p]

    @property
    def corners(self) -> np.ndarray:
        """Corner coordinates of the scaled polytope (floats)."""
        sig = float(self.sigma)
        return np.array([[pi / q for pi, q in zip(row, self.primes)] for row in self.p]) * sig

    @property
    def centre(self) -> np.ndarray:
        return float(self.sigma) / np.array(self.primes, float)

    @property
    def volume(self) -> mpmath.mpf:
        with mpmath.workdps(MP_DPS):
            return self.sigma ** self.d * mpmath.mpf(self.volume_unscaled.numerator) / self.volume_unscaled.denominator

    def sigma_string(self, digits: int = 40) -> str:
        return mpmath.nstr(self.sigma, digits, strip_zeros=False)

    def to_json(self) -> str:
        return json.dumps({
            "d": self.d, "s": self.s, "Q": self.Q, "mode": self.mode, "rng_seed": self.rng_seed,
            "primes": list(self.primes), "sigma": self.sigma_string(40),
            "corners": [list(r) for r in self.p], "faces": [list(f) for f in self.faces],
        })

    @classmethod
    def from_json(cls, text: str) -> "FermiPolyhedron":
        data = json.loads(text)
        poly = polyhedron_from_corners([tuple(r) for r in data["corners"]], tuple(data["primes"]),
                                       d=data["d"], Q=data["Q"], mode=data["mode"],
                                       rng_seed=data.get("rng_seed", 0))
        stored = mpmath.mpf(data["sigma"])
        if abs(stored / poly.sigma - 1) > mpmath.mpf(10) ** -35:
            raise InvalidConfig("stored sigma disagrees with the recomputed normalization")
        return poly

    def unit_normals(self) -> tuple[np.ndarray, np.ndarray]:
        """Facet unit normals and plane offsets of the scaled polytope."""
        D = self.D
        normals, offsets = [], []
        sig = float(self.sigma)
        for n, c in self.facets:
            nn = math.sqrt(float(_dot(n, n)))
            normals.append(np.array(n, float) / nn)
            offsets.append(float(Fraction(c, D)) / nn * sig)
        return np.array(normals), np.array(offsets)


def _hull_3d(X: list, pts_float: np.ndarray):
    hull = ConvexHull(pts_float)
    tris = []
    for simplex in hull.simplices:
        i, j, k = (int(x) for x in simplex)
        n = _cross(_sub(X[j], X[i]), _sub(X[k], X[i]))
        if _dot(n, X[i]) < 0:
            j, k = k, j
            n = tuple(-x for x in n)
        if _dot(n, X[i]) <= 0:
            raise DegenerateHull("a hull facet passes through the origin")
        off = _dot(n, X[i])
        for l, Xl in enumerate(X):
            if _dot(n, Xl) > off:
                raise DegenerateHull(f"facet {(i, j, k)} is not supporting: corner {l} lies outside")
        tris.append((i, j, k, n))
    # extremality certificate: sum of incident outward normals strictly separates
    incident = {i: [0, 0, 0] for i in range(len(X))}
    seen = set()
    for i, j, k, n in tris:
        for v in (i, j, k):
            seen.add(v)
            incident[v] = [a + b for a, b in zip(incident[v], n)]
    for v in range(len(X)):
        if v not in seen:
            raise DegenerateHull(f"corner {v} is not an extreme point")
        w = incident[v]
        base = _dot(w, X[v])
        for l, Xl in enumerate(X):
            if l != v and _dot(w, Xl) >= base:
                raise DegenerateHull(f"corner {v} is not an extreme point (certificate failed vs {l})")
    # merge coplanar triangles into polygonal faces, then fan each polygon
    groups: dict = {}
    for i, j, k, n in tris:
        g = math.gcd(*n)
        key = (tuple(x // g for x in n),)
        off = _dot(key[0], X[i])
        groups.setdefault((key[0], off), set()).update((i, j, k))
    faces, facets = [], []
    for (n, off), verts in sorted(groups.items()):
        verts = sorted(verts)
        facets.append((n, off))
        if len(verts) == 3:
            order = verts
        else:
            cen = np.mean(pts_float[verts], axis=0)
            nf = np.array(n, float)
            e1 = pts_float[verts[0]] - cen
            e1 /= np.linalg.norm(e1)
            e2 = np.cross(nf / np.linalg.norm(nf), e1)
            ang = [math.atan2(np.dot(pts_float[v] - cen, e2), np.dot(pts_float[v] - cen, e1)) for v in verts]
            order = [v for _, v in sorted(zip(ang, verts))]
            start = order.index(min(order))
            order = order[start:] + order[:start]
        for a_, b_ in zip(order[1:-1], order[2:]):
            tri = (order[0], a_, b_)
            nn = _cross(_sub(X[tri[1]], X[tri[0]]), _sub(X[tri[2]], X[tri[0]]))
            if _dot(nn, n) < 0:
                tri = (tri[0], tri[2], tri[1])
            faces.append(tri)
    return faces, facets


def _volume_3d(X: list, faces: list) -> tuple[Fraction, Fraction]:
    v_origin = sum(_det3(X[i], X[j], X[k]) for i, j, k in faces)
    n = len(X)
    cen = tuple(Fraction(sum(x[t] for x in X), n) for t in range(3))
    v_cen = sum(_det3(_sub(X[i], cen), _sub(X[j], cen), _sub(X[k], cen)) for i, j, k in faces)
    return Fraction(v_origin, 6), Fraction(v_cen) / 6


def _polygon_2d(X: list):
    n = len(X)
    faces, facets = [], []
    for i in range(n):
        a, b, c = X[i - 1], X[i], X[(i + 1) % n]
        turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if turn <= 0:
            raise DegenerateHull(f"corner {i} is not an extreme point (turn {turn})")
    for i in range(n):
        j = (i + 1) % n
        a, b = X[i], X[j]
        nvec = (b[1] - a[1], a[0] - b[0])
        off = nvec[0] * a[0] + nvec[1] * a[1]
        g = math.gcd(*nvec)
        faces.append((i, j))
        facets.append(((nvec[0] // g, nvec[1] // g), off // g))
    area2 = sum(X[i][0] * X[(i + 1) % n][1] - X[(i + 1) % n][0] * X[i][1] for i in range(n))
    return faces, facets, Fraction(area2, 2)


def polyhedron_from_corners(p: Sequence[tuple], primes: tuple, d: int = 3, Q: int | None = None,
                            mode: str = "rational", rng_seed: int = 0) -> FermiPolyhedron:
    """Exact hull, volume and normalization for given integer numerators."""
    p = [tuple(int(x) for x in row) for row in p]
    seen = {}
    for idx, row in enumerate(p):
        if row in seen:
            raise DegenerateHull(f"corners {seen[row]} and {idx} coincide after rounding")
        seen[row] = idx
    D = math.prod(primes)
    X = [tuple(pi * (D // q) for pi, q in zip(row, primes)) for row in p]
    pts_float = np.array([[pi / q for pi, q in zip(row, primes)] for row in p])
    pts_float /= np.max(np.abs(pts_float))
    if d == 3:
        faces, facets = _hull_3d(X, pts_float)
        vol_X, vol_check = _volume_3d(X, faces)
        if vol_X != vol_check:
            raise DegenerateHull("volume mismatch between the two decompositions")
    else:
        # sort corners by angle so the boundary is traversed counterclockwise
        order = np.argsort(np.arctan2(pts_float[:, 1], pts_float[:, 0]))
        p = [p[i] for i in order]
        X = [X[i] for i in order]
        faces, facets, vol_X = _polygon_2d(X)
    vol_unscaled = vol_X / Fraction(D) ** d
    target = mpmath.mpf(4) * mpmath.pi / 3 if d == 3 else +mpmath.pi
    with mpmath.workdps(MP_DPS):
        target = mpmath.mpf(4) * mpmath.pi / 3 if d == 3 else +mpmath.pi
        vol = mpmath.mpf(vol_unscaled.numerator) / vol_unscaled.denominator
        sigma = (target / vol) ** (mpmath.mpf(1) / d)
    poly = FermiPolyhedron(d=d, s=len(p), Q=Q if Q is not None else min(primes), primes=tuple(primes),
                           p=p, sigma=sigma, faces=faces, facets=facets, volume_unscaled=vol_unscaled,
                           mode=mode, rng_seed=rng_seed)
    poly.constants.update(_radial_constants(poly))
    return poly


def _radial_constants(poly: FermiPolyhedron) -> dict:
    """Measured radial range of the boundary as ``1 +- C / s``."""
    normals, offsets = poly.unit_normals()
    r_in = float(np.min(offsets))
    r_out = float(np.max(np.linalg.norm(poly.corners, axis=1)))
    return {"r_in": r_in, "r_out": r_out,
            "C_radial": max(abs(1 - r_in), abs(r_out - 1)) * poly.s,
            "sigma_over_Q_power": float(poly.sigma) / poly.Q ** (0.75 if poly.d == 3 else 0.5)}


def build_polyhedron(spec: PolyhedronSpec) -> FermiPolyhedron:
    """Construct the Fermi polyhedron (d=3) or polygon (d=2) for ``spec``."""
    rep = spec.window_report()
    if not (rep["corner_condition"] and rep["particle_condition"]):
        warnings.warn(f"(s, Q, N) outside the asymptotic window: {rep}", stacklevel=2)
    d = spec.d
    unit = _spread_points_3d(spec.s, spec.rng_seed) if d == 3 else _spread_points_2d(spec.s)
    radius = spec.Q ** (-0.75 if d == 3 else -0.5)
    primes = next_primes(spec.Q, d) if spec.mode == "rational" else (spec.Q,) * d
    real = unit * radius
    p = []
    for row in real:
        p.append(tuple(int(math.copysign(math.floor(abs(x) * q + 0.5), x)) for x, q in zip(row, primes)))
    poly = polyhedron_from_corners(p, primes, d=d, Q=spec.Q, mode=spec.mode, rng_seed=spec.rng_seed)
    poly.constants.update(_spread_constants(unit))
    poly.constants["window"] = rep
    return poly


def _spread_constants(unit: np.ndarray) -> dict:
    """Measured min-distance and covering constants in units of s^(-1/2) (3D) or 1/s (2D)."""
    s, d = unit.shape
    diff = np.linalg.norm(unit[:, None, :] - unit[None, :, :], axis=2)
    np.fill_diagonal(diff, np.inf)
    dmin = float(np.min(diff))
    if d == 3:
        probe = _fibonacci_sphere(20000, 0.123)
        scale = s ** -0.5
    else:
        ang = np.linspace(0, 2 * math.pi, 20000, endpoint=False)
        probe = np.column_stack([np.cos(ang), np.sin(ang)])
        scale = 1.0 / s
    cover = 0.0
    for chunk in np.array_split(probe, 20):
        cover = max(cover, float(np.max(np.min(np.linalg.norm(chunk[:, None, :] - unit[None], axis=2), axis=1))))
    return {"c_min_distance": dmin / scale, "C_covering": cover / scale}


# --- lattice momenta -------------------------------------------------------------

@dataclass
class MomentumSet:
    """Lattice momenta ``(2 pi / L) j`` with ``j`` integer, inside ``kF * region``."""

    d: int
    L: float
    ratio: Fraction
    region: object
    points: np.ndarray
    ties: int = 0

    @property
    def N(self) -> int:
        return int(self.points.shape[0])

    @property
    def kF(self) -> float:
        return 2 * math.pi * float(self.ratio) / self.L

    @property
    def k(self) -> np.ndarray:
        return self.points * (2 * math.pi / self.L)

    @property
    def rho(self) -> float:
        return self.N / self.L ** self.d

    @property
    def max_index(self) -> int:
        return int(np.max(np.abs(self.points))) if self.N else 0

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# d={self.d} L={self.L!r} kF={self.kF!r} ratio={self.ratio}\n")
            w = csv.writer(fh)
            w.writerows(self.points.tolist())

    @classmethod
    def from_points(cls, points, L: float = 2 * math.pi, ratio=None) -> "MomentumSet":
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim == 1:
            pts = pts[:, None]
        order = np.lexsort(pts.T[::-1])
        pts = pts[order]
        if ratio is None:
            ratio = Fraction(math.isqrt(int(np.max(np.sum(pts ** 2, axis=1)))) + 1)
        return cls(d=pts.shape[1], L=L, ratio=Fraction(ratio), region="custom", points=pts)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x).limit_denominator(10 ** 12)


def enumerate_momenta(region, ratio, L: float = 2 * math.pi, d: int | None = None) -> MomentumSet:
    """All ``j`` in Z^d with ``j / ratio`` in ``region``; ``ratio = kF L / (2 pi)``.

    ``region`` is ``"ball"`` (then ``d`` is required) or a FermiPolyhedron.
    """
    R = _as_fraction(ratio)
    if not R >= 1:
        raise PreconditionError(f"kF L / (2 pi) must be at least 1, got {R}")
    if isinstance(region, str):
        if region != "ball":
            raise InvalidConfig(f"unknown region {region!r}")
        if d is None:
            raise InvalidConfig("ball region needs the dimension d")
        m = int(math.floor(R))
        axis = np.arange(-m, m + 1)
        grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
        sq = np.sum(grid.astype(np.int64) ** 2, axis=1)
        keep = sq <= R.numerator ** 2 // R.denominator ** 2
        pts = grid[keep]
        ties = 0
    else:
        d = region.d
        pts, ties = _polytope_points(region, R)
    if pts.shape[0] == 0:
        raise EmptySet("no lattice point lies in the region")
    order = np.lexsort(pts.T[::-1])
    return MomentumSet(d=d, L=float(L), ratio=R, region=region, points=pts[order], ties=ties)


def _polytope_points(poly: FermiPolyhedron, R: Fraction):
    d = poly.d
    normals, offsets = poly.unit_normals()
    Rf = float(R)
    bound = int(math.floor(Rf * float(np.max(np.abs(poly.corners))))) + 1
    axis = np.arange(-bound, bound + 1)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    keep = np.ones(len(grid), bool)
    unsure = np.zeros(len(grid), bool)
    for nrm, off in zip(normals, offsets):
        margin = off * Rf - grid @ nrm
        tol = 1e-9 * off * Rf
        keep &= margin > -tol
        unsure |= np.abs(margin) <= tol
    ties = 0
    if np.any(unsure & keep):
        D = poly.D
        with mpmath.workdps(MP_DPS):
            sig = poly.sigma
            for idx in np.nonzero(unsure & keep)[0]:
                j = [int(x) for x in grid[idx]]
                inside = True
                for n, c in poly.facets:
                    lhs = D * R.denominator * _dot(n, j)
                    rhs = c * R.numerator * sig
                    if lhs == rhs:
                        ties += 1
                    if lhs > rhs:
                        inside = False
                        break
                keep[idx] = inside
    return grid[keep], ties


# --- kinetic sums ------------------------------------------------------------------

@dataclass(frozen=True)
class KineticSums:
    S2: float
    S4: float
    S4_1: float
    S2_ref: float
    S4_ref: float
    S4_1_ref: float

    @property
    def dev2(self) -> float:
        return self.S2 / self.S2_ref - 1

    @property
    def dev4(self) -> float:
        return self.S4 / self.S4_ref - 1

    @property
    def dev4_1(self) -> float:
        return self.S4_1 / self.S4_1_ref - 1


def fermi_momentum(rho: float, d: int) -> float:
    """Continuum Fermi momentum for density ``rho`` of spinless fermions."""
    return {1: math.pi * rho, 2: math.sqrt(4 * math.pi * rho), 3: (6 * math.pi ** 2 * rho) ** (1 / 3)}[d]


def kinetic_sums(ms: MomentumSet) -> KineticSums:
    """Exact integer sums of |k|^2, |k|^4 and (k^1)^4 with continuum references.

    References use ``rho = N / L^d`` and ``kF = (6 pi^2 rho)^(1/3)`` in 3D:
    ``S2 = (3/5) kF^2 N``, ``S4 = (3/7) kF^4 N``, ``S4_1 = (3/35) kF^4 N``.
    """
    if ms.N == 0:
        raise EmptySet("empty momentum set")
    j = [tuple(int(x) for x in row) for row in ms.points]
    sq = [sum(x * x for x in row) for row in j]
    s2 = sum(sq)
    s4 = sum(q * q for q in sq)
    s41 = sum(row[0] ** 4 for row in j)
    u = 2 * math.pi / ms.L
    d = ms.d
    kF = fermi_momentum(ms.rho, d)
    N = ms.N
    m2 = d / (d + 2)
    m4 = d / (d + 4)
    c41 = 3.0 / (d * (d + 2))
    return KineticSums(S2=u ** 2 * s2, S4=u ** 4 * s4, S4_1=u ** 4 * s41,
                       S2_ref=m2 * kF ** 2 * N, S4_ref=m4 * kF ** 4 * N, S4_1_ref=m4 * c41 * kF ** 4 * N)


def symmetry_defect(ms: MomentumSet, axes: tuple[int, int] = (0, 1),
                    weight: Callable[[np.ndarray], np.ndarray] | None = None) -> dict:
    """Weighted size of the symmetric difference between P_F and its axis swap."""
    mu, nu = axes
    pts = ms.points
    swapped = pts.copy()
    swapped[:, [mu, nu]] = pts[:, [nu, mu]]
    a = {tuple(r) for r in pts.tolist()}
    b = {tuple(r) for r in swapped.tolist()}
    diff = np.array(sorted(a ^ b), dtype=np.int64).reshape(-1, ms.d)
    k_all = ms.k
    t_all = np.ones(ms.N) if weight is None else np.asarray(weight(k_all), float)
    sup_t = float(np.max(t_all)) if ms.N else 0.0
    if diff.shape[0]:
        kd = diff * (2 * math.pi / ms.L)
        t = np.ones(len(kd)) if weight is None else np.asarray(weight(kd), float)
        defect = float(np.sum(t))
    else:
        defect = 0.0
    Q = getattr(ms.region, "Q", None)
    ratio = defect / (Q ** -0.25 * ms.N * sup_t) if Q and sup_t > 0 else float("nan")
    return {"defect": defect, "count": int(diff.shape[0]), "ratio": ratio, "sup_t": sup_t}
