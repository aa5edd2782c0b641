"""Gaudin-Gillespie-Ripka diagrams on the discrete torus.

A diagram is a pair (permutation pi, g-edge graph G) on ``q`` external and
``p`` internal vertices.  Its value is

    sign(pi) * integral over internal positions of prod_{e in G} g_e * prod_i gamma(x_i - x_pi(i)).

On an alias-free grid all integrals are finite sums, so the finite-N
identities linking the Jastrow normalization and reduced densities to
diagram sums hold to rounding error.  Vertices are labelled from 1, externals
first.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded, CapExceeded, PreconditionError, UnknownId
from .slater import DiscreteTorus, OneBodyKernel

__all__ = [
    "GGraph",
    "Diagram",
    "GProfile",
    "enumerate_graphs",
    "perm_sign",
    "is_linked",
    "diagram_value",
    "diagram_value_fourier",
    "rho_tensor",
    "truncated_correlation",
    "cluster_cumulant",
    "normalization_series",
    "rho_jas_series",
    "linked_log_series",
    "direct_oracle",
    "convergence_parameter",
    "tree_graph_check",
    "connected_graphs",
    "spanning_trees",
    "small_diagram_catalog",
    "CATALOG",
    "expansion_report",
]

VERTEX_CAP = 7
PERM_CAP = 8
DEFAULT_THRESHOLD = 0.1


# --- graphs and diagrams -----------------------------------------------------------

@dataclass(frozen=True)
class GGraph:
    q: int
    p: int
    edges: tuple

    def __post_init__(self):
        n = self.q + self.p
        deg = [0] * (n + 1)
        for u, v in self.edges:
            if not (1 <= u < v <= n):
                raise PreconditionError(f"bad edge {(u, v)}")
            if v <= self.q:
                raise PreconditionError(f"edge {(u, v)} joins two external vertices")
            deg[u] += 1
            deg[v] += 1
        if any(deg[i] == 0 for i in range(self.q + 1, n + 1)):
            raise PreconditionError("internal vertex without edges")

    @property
    def n(self) -> int:
        return self.q + self.p

    def clusters(self) -> list[frozenset]:
        """Connected components of the g-edge graph (isolated vertices excluded)."""
        comps = _components(self.n, self.edges)
        return [c for c in comps if len(c) > 1]


def _components(n: int, pairs) -> list[frozenset]:
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: dict = {}
    for v in range(1, n + 1):
        groups.setdefault(find(v), set()).add(v)
    return [frozenset(g) for g in groups.values()]


def perm_sign(perm: Sequence[int]) -> int:
    """Sign by cycle decomposition; ``perm`` maps 1-based vertex i to perm[i-1]."""
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def is_linked(edges, perm: Sequence[int]) -> bool:
    n = len(perm)
    pairs = list(edges) + [(i + 1, perm[i]) for i in range(n)]
    return len(_components(n, pairs)) == 1


@dataclass(frozen=True)
class Diagram:
    graph: GGraph
    perm: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, self.graph.n + 1)):
            raise PreconditionError("perm must be a permutation of 1..q+p")

    @property
    def sign(self) -> int:
        return perm_sign(self.perm)

    @property
    def linked(self) -> bool:
        return is_linked(self.graph.edges, self.perm)

    @property
    def class_indices(self) -> tuple[int, int, int]:
        """``(k, nu, nu_star)`` with ``p = 2k + nu + nu_star``."""
        q = self.graph.q
        k = nu_sum = nu_star = 0
        for c in self.graph.clusters():
            internal = sum(1 for v in c if v > q)
            if internal == len(c):
                k += 1
                nu_sum += len(c)
            else:
                nu_star += internal
        return k, nu_sum - 2 * k, nu_star

    def components(self) -> list["Diagram"]:
        """Linked components, each relabelled as its own diagram."""
        n = self.graph.n
        pairs = list(self.graph.edges) + [(i + 1, self.perm[i]) for i in range(n)]
        out = []
        for comp in sorted(_components(n, pairs), key=min):
            ext = sorted(v for v in comp if v <= self.graph.q)
            inn = sorted(v for v in comp if v > self.graph.q)
            relabel = {v: i + 1 for i, v in enumerate(ext + inn)}
            edges = tuple(sorted((min(relabel[u], relabel[v]), max(relabel[u], relabel[v]))
                                 for u, v in self.graph.edges if u in comp))
            perm = tuple(relabel[self.perm[v - 1]] for v in ext + inn)
            out.append((ext, Diagram(GGraph(len(ext), len(inn), edges), perm)))
        return out

    def to_dict(self) -> dict:
        k, nu, nus = self.class_indices
        return {"q": self.graph.q, "p": self.graph.p, "edges": [list(e) for e in self.graph.edges],
                "perm": list(self.perm), "sign": self.sign, "linked": self.linked,
                "k": k, "nu": nu, "nu_star": nus}


def enumerate_graphs(p: int, q: int) -> list[GGraph]:
    """All g-graphs with ``q`` external and ``p`` internal vertices."""
    if p + q > VERTEX_CAP:
        raise CapExceeded(f"p + q = {p + q} exceeds the vertex cap {VERTEX_CAP}")
    return [GGraph(q, p, e) for e in _graph_edge_sets(p, q)]


@lru_cache(maxsize=None)
def _graph_edge_sets(p: int, q: int) -> tuple:
    if p == 0:
        return ()
    n = p + q
    cand = [(u, v) for u, v in itertools.combinations(range(1, n + 1), 2) if v > q]
    E = len(cand)
    masks = np.arange(1 << E, dtype=np.int64)
    ok = np.ones(len(masks), bool)
    for w in range(q + 1, n + 1):
        inc = sum(1 << i for i, e in enumerate(cand) if w in e)
        ok &= (masks & inc) != 0
    out = []
    for m in masks[ok]:
        out.append(tuple(cand[i] for i in range(E) if (int(m) >> i) & 1))
    out.sort(key=lambda es: (len(es), es))
    return tuple(out)


# --- the pair profile on the torus --------------------------------------------------

class GProfile:
    """``g = f^2 - 1`` on a discrete torus, with the minimum-image metric.

    ``f`` may be a JastrowProfile or any callable of the radius; a callable
    for ``g`` itself can be given instead via ``g=``.
    """

    def __init__(self, torus: DiscreteTorus, f: Callable | None = None, g: Callable | None = None,
                 scale: float = 1.0):
        if (f is None) == (g is None):
            raise PreconditionError("give exactly one of f or g")
        self.torus = torus
        self._g = g if g is not None else (lambda r: np.asarray(f(r), float) ** 2 - 1.0)
        self.scale = scale
        vals = self.on_grid()
        if np.any(vals < -1 - 1e-14) or np.any(vals > 1e-14):
            raise PreconditionError("g must lie in [-1, 0]")

    def scaled(self, eps: float) -> "GProfile":
        return GProfile(self.torus, g=self._g, scale=self.scale * eps)

    def radial(self, r) -> np.ndarray:
        return self.scale * np.asarray(self._g(np.asarray(r, float)), float)

    def __call__(self, x) -> np.ndarray:
        return self.radial(self.torus.distance(x))

    def matrix(self, xa, xb) -> np.ndarray:
        d = self.torus.d
        xa = np.asarray(xa, float).reshape(-1, d)
        xb = np.asarray(xb, float).reshape(-1, d)
        return self(xa[:, None, :] - xb[None, :, :])

    def on_grid(self) -> np.ndarray:
        return self(self.torus.nodes)

    def ghat(self, q_int) -> np.ndarray:
        """``sum_grid g(x) exp(-i k x) h^d`` for integer momenta ``q_int``."""
        q = np.asarray(q_int, float).reshape(-1, self.torus.d) * (2 * math.pi / self.torus.L)
        vals = self.on_grid()
        return (np.exp(-1j * q @ self.torus.nodes.T) @ vals).real * self.torus.weight

    def l1(self) -> float:
        return float(np.sum(np.abs(self.on_grid())) * self.torus.weight)

    def second_moment(self) -> float:
        r = self.torus.distance(self.torus.nodes)
        return float(np.sum(np.abs(self.on_grid()) * r ** 2) * self.torus.weight)


# --- diagram values -----------------------------------------------------------------

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def diagram_value(dg: Diagram, kernel: OneBodyKernel, gp: GProfile, ext=None,
                  budget: float = 1e8) -> float:
    """Direct grid evaluation by tensor contraction over the internal vertices."""
    torus = gp.torus
    q, p = dg.graph.q, dg.graph.p
    d = kernel.d
    ext = np.zeros((0, d)) if ext is None else np.asarray(ext, float).reshape(-1, d)
    if ext.shape[0] != q:
        raise PreconditionError(f"need {q} external points, got {ext.shape[0]}")
    if p + q > PERM_CAP:
        raise CapExceeded("too many vertices")
    G = len(torus.nodes)
    if float(G) ** p > budget:
        raise BudgetExceeded(f"direct evaluation needs {float(G) ** p:.3g} grid terms")
    pos = [ext[i][None, :] for i in range(q)] + [torus.nodes] * p
    operands, subs = [], []
    scalar = float(dg.sign)
    for u, v in dg.graph.edges:
        operands.append(gp.matrix(pos[u - 1], pos[v - 1]))
        subs.append(_LETTERS[u - 1] + _LETTERS[v - 1])
    for i in range(1, q + p + 1):
        j = dg.perm[i - 1]
        if i == j:
            scalar *= kernel.rho
            continue
        diff = pos[i - 1][:, None, :] - pos[j - 1][None, :, :]
        operands.append(kernel(diff))
        subs.append(_LETTERS[i - 1] + _LETTERS[j - 1])
    # vertices without any factor still range over their node set
    used = set("".join(subs))
    for i in range(q + p):
        if _LETTERS[i] not in used:
            operands.append(np.ones(len(pos[i])))
            subs.append(_LETTERS[i])
    val = np.einsum(",".join(subs) + "->", *operands, optimize="greedy")
    return float(np.real(val)) * scalar * torus.weight ** p


def diagram_value_fourier(dg: Diagram, kernel: OneBodyKernel, gp: GProfile, ext=None) -> float:
    """Momentum-space evaluation for the case of one g-edge between two internal vertices,
    or any diagram whose internal vertices each carry exactly one g-edge to an external vertex.

    Generic fallback used for cross-checks: every factor is expanded in plane
    waves and each internal grid sum becomes a Kronecker constraint mod M.
    """
    torus = gp.torus
    d, L, M = kernel.d, kernel.L, torus.M
    q, p = dg.graph.q, dg.graph.p
    n = q + p
    ext = np.zeros((0, d)) if ext is None else np.asarray(ext, float).reshape(-1, d)
    K = kernel.ms.points
    N = len(K)
    nf = n  # one momentum per permutation factor
    E = len(dg.graph.edges)
    BZ = np.stack(np.meshgrid(*([np.arange(M)] * d), indexing="ij"), axis=-1).reshape(-1, d)
    if float(N) ** nf * float(len(BZ)) ** E > 5e7:
        raise BudgetExceeded("momentum sum too large")
    ghat_bz = gp.ghat(BZ)
    total = 0.0 + 0.0j
    for ks in itertools.product(range(N), repeat=nf):
        for qs in itertools.product(range(len(BZ)), repeat=E):
            net = np.zeros((n, d), dtype=np.int64)
            for i in range(n):
                k = K[ks[i]]
                net[i] += k
                net[dg.perm[i] - 1] -= k
            weight = 1.0
            for (u, v), qi in zip(dg.graph.edges, qs):
                net[u - 1] += BZ[qi]
                net[v - 1] -= BZ[qi]
                weight *= ghat_bz[qi]
            if np.any(net[q:] % M):
                continue
            phase = sum(float(np.dot(net[i], ext[i])) for i in range(q)) * 2 * math.pi / L
            total += weight * np.exp(1j * phase)
    return float(np.real(total)) * dg.sign * L ** (-d * (nf + E)) * L ** (d * p)


# --- densities as grid tensors ------------------------------------------------------

def rho_tensor(kernel: OneBodyKernel, torus: DiscreteTorus, p: int, ext=None) -> np.ndarray:
    """``rho^(q+p)(ext, y_1..y_p)`` for all grid tuples ``y``; shape ``(G,)*p``."""
    d = kernel.d
    ext = np.zeros((0, d)) if ext is None else np.asarray(ext, float).reshape(-1, d)
    q = len(ext)
    G = len(torus.nodes)
    if q + p > kernel.N:
        return np.zeros((G,) * p)
    if p == 0:
        return np.array(np.linalg.det(kernel.matrix(ext)).real) if q else np.array(1.0)
    idx = np.stack(np.meshgrid(*([np.arange(G)] * p), indexing="ij"), axis=-1).reshape(-1, p)
    n = q + p
    out = np.empty(len(idx))
    step = max(1, 2 ** 20 // (n * n))
    for s in range(0, len(idx), step):
        sl = idx[s:s + step]
        pts = np.empty((len(sl), n, d))
        pts[:, :q, :] = ext
        pts[:, q:, :] = torus.nodes[sl]
        mats = kernel(pts[:, :, None, :] - pts[:, None, :, :])
        out[s:s + step] = np.real(np.linalg.det(mats))
    return out.reshape((G,) * p)


def _pair_factor(m: np.ndarray, p: int, a1: int, a2: int) -> np.ndarray:
    """Matrix ``m[i, j]`` broadcast onto axes ``a1, a2`` of a p-dimensional tensor."""
    if a1 > a2:
        m, a1, a2 = m.T, a2, a1
    return m.reshape([m.shape[0] if a == a1 else (m.shape[1] if a == a2 else 1) for a in range(p)])


def _graph_weight_tensor(edges, gmats: dict, shape: tuple, q: int) -> np.ndarray:
    """``prod_e g_e`` as a tensor over the internal grid indices."""
    p = len(shape)
    w = np.ones(shape)
    for u, v in edges:
        if u <= q:
            ax = v - q - 1
            w = w * gmats[("ext", u)].reshape([-1 if a == ax else 1 for a in range(p)])
        else:
            w = w * _pair_factor(gmats["int"], p, u - q - 1, v - q - 1)
    return w


def _series_terms(kernel, gp, q, ext, p_max) -> list[float]:
    torus = gp.torus
    d = kernel.d
    ext = np.zeros((0, d)) if ext is None else np.asarray(ext, float).reshape(-1, d)
    gmats = {"int": gp.matrix(torus.nodes, torus.nodes)}
    for i in range(q):
        gmats[("ext", i + 1)] = gp.matrix(ext[i], torus.nodes)[0]
    terms = []
    for p in range(0, p_max + 1):
        if p == 0:
            terms.append(float(rho_tensor(kernel, torus, 0, ext)) if q else 1.0)
            continue
        graphs = _graph_edge_sets(p, q)
        if not graphs:
            terms.append(0.0)
            continue
        rt = rho_tensor(kernel, torus, p, ext)
        total = 0.0
        for edges in graphs:
            total += float(np.sum(_graph_weight_tensor(edges, gmats, rt.shape, q) * rt))
        terms.append(total * torus.weight ** p / math.factorial(p))
    return terms


def normalization_series(kernel: OneBodyKernel, gp: GProfile, N: int | None = None) -> float:
    """``C_N / N! = 1 + sum_p (1/p!) integral W_p rho^(p)``, finite because rho^(p) = 0 for p > N."""
    N = kernel.N if N is None else N
    if N != kernel.N:
        raise PreconditionError("N must equal the number of momenta in the kernel")
    if N + 0 > VERTEX_CAP:
        raise CapExceeded(f"N={N} above the vertex cap")
    return float(sum(_series_terms(kernel, gp, 0, None, N)))


def rho_jas_series(kernel: OneBodyKernel, gp: GProfile, ext) -> dict:
    """Pre-resummation expansion of the Jastrow q-point density.

    ``rho_Jas^(q) = prod f_ext^2 * (N! / C_N) * sum_p (1/p!) integral X_p rho^(q+p)``.
    Returns the bracket (``rho^(q)`` plus the finite diagram sum), the
    normalization and the assembled density.
    """
    ext = np.asarray(ext, float).reshape(-1, kernel.d)
    q = len(ext)
    N = kernel.N
    if N > VERTEX_CAP:
        raise CapExceeded(f"N={N} above the vertex cap")
    terms = _series_terms(kernel, gp, q, ext, N - q)
    f2 = 1.0
    for i, j in itertools.combinations(range(q), 2):
        f2 *= 1.0 + float(gp(ext[i] - ext[j]))
    norm = normalization_series(kernel, gp)
    bracket = float(sum(terms))
    return {"bracket": bracket, "terms": terms, "f_ext2": f2, "norm": norm,
            "rho_jas": f2 * bracket / norm}


def linked_log_series(kernel: OneBodyKernel, gp: GProfile, P: int) -> list[float]:
    """Partial sums of ``log(C_N/N!) = sum_p (1/p!) sum_{linked (pi, G)} Gamma``, p = 2..P."""
    if P > 5:
        raise CapExceeded("linked series capped at p = 5")
    torus = gp.torus
    gm = gp.matrix(torus.nodes, torus.nodes)
    gam = kernel(torus.nodes[:, None, :] - torus.nodes[None, :, :])
    G = len(torus.nodes)
    partial, acc = [], 0.0
    for p in range(2, P + 1):
        shape = (G,) * p
        ptensors = []
        for perm in itertools.permutations(range(1, p + 1)):
            t = np.ones(shape)
            for i in range(1, p + 1):
                j = perm[i - 1]
                if i == j:
                    t = t * kernel.rho
                    continue
                t = t * _pair_factor(gam, p, i - 1, j - 1)
            ptensors.append((perm, perm_sign(perm), t))
        total = 0.0
        for edges in _graph_edge_sets(p, 0):
            w = _graph_weight_tensor(edges, {"int": gm}, shape, 0)
            for perm, sgn, t in ptensors:
                if is_linked(edges, perm):
                    total += sgn * float(np.real(np.sum(w * t)))
        acc += total * torus.weight ** p / math.factorial(p)
        partial.append(acc)
    return partial


def _grid_tuples(G: int, free: int, chunk: int = 2 ** 16):
    total = G ** free
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        yield np.stack(np.unravel_index(flat, (G,) * free), axis=1)


def direct_oracle(kernel: OneBodyKernel, gp: GProfile, q: int = 0, ext=None, budget: float = 1e8) -> dict:
    """Brute-force grid sums for ``C_N/N!`` and ``rho_Jas^(q)(ext)``.

    Builds ``prod_{i<j} (1 + g_ij) |D_N|^2`` from Slater determinants of
    plane waves at every grid configuration; no Wick expansion involved.
    """
    torus = gp.torus
    ms = kernel.ms
    torus.check(ms)
    N, d = ms.N, ms.d
    G = len(torus.nodes)
    if float(G) ** N > budget:
        raise BudgetExceeded(f"oracle needs {float(G) ** N:.3g} terms (budget {budget:.3g})")

    def integral(fixed: np.ndarray) -> float:
        nf = len(fixed)
        free = N - nf
        total = 0.0
        for idx in _grid_tuples(G, free) if free else [np.zeros((1, 0), dtype=np.int64)]:
            pts = np.empty((len(idx), N, d))
            pts[:, :nf, :] = fixed
            pts[:, nf:, :] = torus.nodes[idx]
            mats = np.exp(1j * pts @ ms.k.T) / ms.L ** (d / 2)
            dens = np.abs(np.linalg.det(mats)) ** 2
            w = np.ones(len(idx))
            for i, j in itertools.combinations(range(N), 2):
                w *= 1.0 + gp(pts[:, i, :] - pts[:, j, :])
            total += float(np.sum(w * dens))
        return total * torus.weight ** free

    norm = integral(np.zeros((0, d))) / math.factorial(N)
    out = {"norm": norm}
    if q:
        ext = np.asarray(ext, float).reshape(-1, d)
        if len(ext) != q:
            raise PreconditionError(f"need {q} external points")
        out["rho_jas"] = integral(ext) / math.factorial(N - q) / norm
    return out


# --- truncated correlations ---------------------------------------------------------

@lru_cache(maxsize=None)
def _perm_table(n: int):
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    signs = np.array([perm_sign(tuple(x + 1 for x in pm)) for pm in perms])
    return perms, signs


@lru_cache(maxsize=4096)
def _linked_mask(label: tuple, m: int) -> np.ndarray:
    """Permutations whose edges connect all clusters, for a cluster labelling of the points."""
    perms, _ = _perm_table(len(label))
    return np.array([len(_components(m, [(label[i] + 1, label[pm[i]] + 1) for i in range(len(label))])) == 1
                     for pm in perms])


def _cycle_products(kernel: OneBodyKernel, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pts = np.asarray(points, float).reshape(-1, kernel.d)
    n = len(pts)
    gam = kernel.matrix(pts)
    perms, signs = _perm_table(n)
    prod = np.prod(gam[np.arange(n)[None, :], perms], axis=1)
    return perms, signs, prod


def truncated_correlation(clusters: Sequence[Sequence[int]], points, kernel: OneBodyKernel,
                          check: bool = True, tol: float = 1e-12) -> dict:
    """Signed permutation sum restricted to permutations linking all clusters.

    ``clusters`` partitions the point indices (0-based).  For two clusters the
    value is checked against ``rho^(n) - rho^(n1) rho^(n2)``; in general it is
    compared with the cumulant (Moebius) formula.
    """
    pts = np.asarray(points, float).reshape(-1, kernel.d)
    n = len(pts)
    if n > PERM_CAP:
        raise CapExceeded(f"{n} vertices above the permutation cap {PERM_CAP}")
    clusters = [tuple(c) for c in clusters]
    if sorted(itertools.chain.from_iterable(clusters)) != list(range(n)):
        raise PreconditionError("clusters must partition the points")
    perms, signs, prod = _cycle_products(kernel, pts)
    label = [0] * n
    for c_idx, c in enumerate(clusters):
        for i in c:
            label[i] = c_idx
    m = len(clusters)
    linked = _linked_mask(tuple(label), m)
    value = float(np.real(np.sum(signs * prod * linked)))
    out = {"value": value}
    if m == 2:
        a = [pts[list(clusters[0])], pts[list(clusters[1])]]
        from .slater import rho_p
        ident = rho_p(kernel, pts) - rho_p(kernel, a[0]) * rho_p(kernel, a[1])
        out["identity"] = ident
    if check:
        ref = out.get("identity", None)
        if ref is None:
            ref = cluster_cumulant(clusters, pts, kernel)
        out["cumulant"] = ref
        scale = max(1.0, kernel.rho ** n)
        if abs(ref - value) > tol * scale:
            raise AssertionError(f"truncated correlation mismatch {value} vs {ref}")
    return out


def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def cluster_cumulant(clusters, points, kernel: OneBodyKernel) -> float:
    """Joint cumulant of the cluster densities via Moebius inversion on partitions."""
    from .slater import rho_p
    pts = np.asarray(points, float).reshape(-1, kernel.d)
    total = 0.0
    for part in _set_partitions(range(len(clusters))):
        r = len(part)
        term = (-1) ** (r - 1) * math.factorial(r - 1)
        for block in part:
            idx = [i for b in block for i in clusters[b]]
            term *= rho_p(kernel, pts[idx])
        total += term
    return total


# --- convergence parameter and tree-graph bound ---------------------------------------

def convergence_parameter(s: float, a: float, rho: float, b: float, N: float, d: int = 3,
                          threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Small parameter controlling the linked-diagram series."""
    if a == 0:
        return {"value": 0.0, "ok": True, "threshold": threshold}
    if not (s > 0 and a > 0 and rho > 0 and b > a and N > 1):
        raise PreconditionError("need positive inputs with b > a and N > 1")
    lb, lN = math.log(b / a), math.log(N)
    if d == 3:
        v = s * a ** 3 * rho * lb * lN ** 3
    elif d == 2:
        v = s * a ** 2 * rho * lb * lN ** 2
    elif d == 1:
        v = a * rho * lb * lN
    else:
        raise PreconditionError("d must be 1, 2 or 3")
    return {"value": v, "ok": v < threshold, "threshold": threshold}


@lru_cache(maxsize=None)
def _all_edge_subsets(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    E = len(pairs)
    conn, trees = [], []
    for m in range(1, 1 << E):
        es = [pairs[i] for i in range(E) if (m >> i) & 1]
        if len(es) < n - 1:
            continue
        if len(_components(n, [(u + 1, v + 1) for u, v in es])) == 1:
            conn.append(es)
            if len(es) == n - 1:
                trees.append(es)
    return pairs, conn, trees


def connected_graphs(n: int) -> list:
    if n > 6:
        raise CapExceeded("tree-graph check capped at n = 6")
    if n == 1:
        return [[]]
    return _all_edge_subsets(n)[1]


def spanning_trees(n: int) -> list:
    if n > 6:
        raise CapExceeded("tree-graph check capped at n = 6")
    if n == 1:
        return [[]]
    return _all_edge_subsets(n)[2]


def tree_graph_check(n: int, g_values) -> dict:
    """``|sum over connected graphs prod g_e| <= sum over spanning trees prod |g_e|``."""
    g = np.asarray(g_values, float)
    if n > 6:
        raise CapExceeded("tree-graph check capped at n = 6")
    conn, trees = connected_graphs(n), spanning_trees(n)
    lhs = abs(sum(math.prod(g[u, v] for u, v in es) for es in conn))
    rhs = sum(math.prod(abs(g[u, v]) for u, v in es) for es in trees)
    cayley = n ** (n - 2) if n >= 2 else 1
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs * (1 + 1e-12) + 1e-300,
            "n_trees": len(trees), "cayley": cayley, "n_connected": len(conn)}


# --- small-diagram catalog ------------------------------------------------------------

def _diag(q, p, edges, perm) -> Diagram:
    return Diagram(GGraph(q, p, tuple(edges)), tuple(perm))


CATALOG = {
    "A": _diag(2, 2, [(3, 4)], [3, 4, 1, 2]),
    "B1": _diag(2, 1, [(1, 3)], [3, 1, 2]),
    "B2": _diag(2, 1, [(2, 3)], [2, 1, 3]),
    "three_linked": _diag(3, 2, [(4, 5)], [4, 1, 5, 2, 3]),
    "three_two_component": _diag(3, 2, [(4, 5)], [4, 3, 2, 5, 1]),
}

CLUSTER_FORMS = {
    # id: (q, p, edges, clusters used in the truncated correlation)
    "C": (2, 1, [(1, 3), (2, 3)], [[0, 1, 2]]),
    "1D_A1": (2, 2, [(1, 3), (1, 4), (3, 4)], [[0, 2, 3], [1]]),
    "1D_A2": (2, 2, [(1, 3), (2, 4)], [[0, 2], [1, 3]]),
    "1D_B1": (2, 1, [(1, 3), (2, 3)], [[0, 1, 2]]),
    "1D_B2": (2, 3, [(1, 3), (2, 3), (4, 5)], [[0, 1, 2], [3, 4]]),
}


def _closed_form(cid: str, kernel: OneBodyKernel, gp: GProfile, ext) -> float:
    torus = gp.torus
    d, L, M = kernel.d, kernel.L, torus.M
    K = kernel.ms.points
    kv = kernel.k
    x1, x2 = ext[0], ext[1]
    Ld = L ** d

    def gh(qint):
        return gp.ghat(np.asarray(qint).reshape(-1, d))

    def ph(kvec, x):
        return np.exp(1j * (kvec @ x))

    if cid == "B2":
        g12 = complex(np.asarray(kernel(x1 - x2)).item())
        return -kernel.rho * float(gh(np.zeros(d, int))[0]) * abs(g12) ** 2
    if cid == "B1":
        # L^-3d sum exp(i(k2-k3)(x1-x2)) ghat(k2-k1)
        tot = 0.0 + 0.0j
        for i1 in range(len(K)):
            gvals = gh(K - K[i1])
            for i2 in range(len(K)):
                tot += gvals[i2] * np.sum(ph(kv[i2] - kv, x1 - x2))
        return float(np.real(tot)) / Ld ** 3
    if cid == "A":
        # L^-3d sum exp(i(k1-k2)x1) exp(i(k3-k4)x2) chi(k2-k1 = k3-k4) ghat(k4-k3)
        tot = 0.0 + 0.0j
        for i1, i2 in itertools.product(range(len(K)), repeat=2):
            diff = K[None, :, :] - K[:, None, :]  # k4 - k3 indexed [i3, i4]
            target = K[i1] - K[i2]  # k1 - k2 must equal k4 - k3
            mask = np.all((diff - target) % M == 0, axis=2)
            for i3, i4 in zip(*np.nonzero(mask)):
                tot += (ph(kv[i1] - kv[i2], x1) * ph(kv[i3] - kv[i4], x2) * gh(K[i4] - K[i3])[0])
        return float(np.real(tot)) / Ld ** 3
    if cid in ("three_linked", "three_two_component"):
        x3 = ext[2]
        tot = 0.0 + 0.0j
        n = len(K)
        if cid == "three_linked":
            # -L^-4d sum e^{i(k1-k3)x1} e^{i(k3-k2)x2} e^{i(k4-k5)x3} chi(k2-k1 = k4-k5) ghat(k5-k4)
            for i1, i2, i3 in itertools.product(range(n), repeat=3):
                for i4, i5 in itertools.product(range(n), repeat=2):
                    if np.any((K[i2] - K[i1] - K[i4] + K[i5]) % M):
                        continue
                    tot += (ph(kv[i1] - kv[i3], x1) * ph(kv[i3] - kv[i2], x2) * ph(kv[i4] - kv[i5], x3)
                            * gh(K[i5] - K[i4])[0])
        else:
            # -L^-4d sum_{k1,k4} ghat(k1-k4) * sum_{k2,k3} e^{i(k2-k3)(x2-x3)}
            s_g = sum(float(gh(K[i1] - K[i4])[0]) for i1 in range(n) for i4 in range(n))
            s_x = np.sum(ph(kv[:, None, :] - kv[None, :, :], x2 - x3))
            tot = s_g * s_x
        return -float(np.real(tot)) / Ld ** 4
    raise UnknownId(cid)


def _cluster_form(cid: str, kernel: OneBodyKernel, gp: GProfile, ext) -> float:
    """Grid integral of the g-product against the truncated correlation identity."""
    torus = gp.torus
    q, p, edges, clusters = CLUSTER_FORMS[cid]
    G = len(torus.nodes)
    if float(G) ** p > 1e7:
        raise BudgetExceeded("cluster form too large for the grid")
    d = kernel.d
    from .slater import rho_p
    total = 0.0
    for idx in itertools.product(range(G), repeat=p):
        pts = np.vstack([ext[:q], torus.nodes[list(idx)]])
        w = 1.0
        for u, v in edges:
            w *= float(gp(pts[u - 1] - pts[v - 1]))
        if w == 0.0:
            continue
        if len(clusters) == 1:
            rt = rho_p(kernel, pts)
        else:
            a, b = clusters
            rt = rho_p(kernel, pts) - rho_p(kernel, pts[a]) * rho_p(kernel, pts[b])
        total += w * rt
    return total * torus.weight ** p


def _generic_sum(cid: str, kernel: OneBodyKernel, gp: GProfile, ext) -> float:
    """Sum of diagram_value over permutations linked with the cluster graph."""
    if cid in CATALOG:
        dg = CATALOG[cid]
        q = dg.graph.q
        return diagram_value(dg, kernel, gp, ext[:q])
    q, p, edges, clusters = CLUSTER_FORMS[cid]
    graph = GGraph(q, p, tuple(edges))
    total = 0.0
    for perm in itertools.permutations(range(1, q + p + 1)):
        if is_linked(graph.edges, perm):
            total += diagram_value(Diagram(graph, perm), kernel, gp, ext[:q])
    return total


def small_diagram_catalog(cid: str, kernel: OneBodyKernel, gp: GProfile, ext, check: bool = True,
                          tol: float = 1e-10) -> dict:
    """Closed-form value of a catalogued small diagram, checked against the generic route.

    Forms where a g-edge touches an external vertex replace the grid sum by
    ``ghat``; that step is exact only for externals on grid nodes.
    """
    ext = np.asarray(ext, float).reshape(-1, kernel.d)
    if cid in ("B1", "B2") and not gp.torus.on_grid(ext):
        raise PreconditionError(f"{cid} closed form needs external points on grid nodes")
    if cid in CATALOG:
        value = _closed_form(cid, kernel, gp, ext)
    elif cid in CLUSTER_FORMS:
        value = _cluster_form(cid, kernel, gp, ext)
    else:
        raise UnknownId(f"unknown catalog id {cid!r}; known: {sorted(CATALOG) + sorted(CLUSTER_FORMS)}")
    out = {"id": cid, "value": value}
    if check:
        generic = _generic_sum(cid, kernel, gp, ext)
        out["generic"] = generic
        scale = max(abs(generic), kernel.rho ** 2 * 1e-3)
        if abs(value - generic) > tol * max(1.0, scale):
            raise AssertionError(f"{cid}: closed form {value} vs generic {generic}")
    if cid == "1D_A2":
        out["bound_constant"] = abs(value) / (kernel.rho ** 8 * gp.second_moment() ** 2)
    return out


def catalog_json() -> str:
    items = {k: v.to_dict() for k, v in CATALOG.items()}
    for k, (q, p, edges, clusters) in CLUSTER_FORMS.items():
        items[k] = {"q": q, "p": p, "edges": [list(e) for e in edges], "clusters": clusters}
    return json.dumps(items, indent=2)


def expansion_report(kernel: OneBodyKernel, gp: GProfile, P: int = 4) -> list[dict]:
    """Per-order rows (p, number of linked diagrams, partial log sum, tree bound)."""
    partial = linked_log_series(kernel, gp, P)
    rows = []
    g1 = gp.l1()
    for p, val in zip(range(2, P + 1), partial):
        count = sum(1 for edges in _graph_edge_sets(p, 0)
                    for perm in itertools.permutations(range(1, p + 1)) if is_linked(edges, perm))
        bound = kernel.N * p ** (p - 2) * (kernel.rho * g1) ** (p - 1)
        rows.append({"p": p, "n_diagrams": count, "partial_sum": val, "tree_bound": bound})
    return rows
