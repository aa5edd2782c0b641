"""Energy of the Jastrow trial state: closed forms, assembly and error budgets.

Units are hbar^2 / (2m) = 1, so the one-body kinetic operator is -Laplacian
and the pair interaction enters as ``sum_{i<j} v``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

from .errors import DiluteRegimeViolated, GeometryInvalid, PreconditionError
from .fermi_surface import MomentumSet, fermi_momentum, kinetic_sums
from .scattering import (JastrowProfile, RadialPotential, _energy_density, _radial_quad,
                         derived_lengths, solve_p_wave, sphere_area)

__all__ = [
    "closed_form_bound",
    "pair_kernel",
    "energy_assembled",
    "three_body_term",
    "interaction_routes",
    "residual_slope",
    "Term",
    "EnergyBudget",
    "BUDGET_TERMS",
    "REFERENCE_EXPONENTS",
    "error_budget",
    "optimize_exponents",
    "ding_zhang_curve",
    "box_method_density",
    "DILUTE_WARN",
]

C3 = (6 * math.pi ** 2) ** (2 / 3)
DILUTE_WARN = 0.1


# --- closed forms --------------------------------------------------------------------

def closed_form_bound(rho: float, a: float, a0: float | None = None, d: int = 3) -> dict:
    """Leading terms of the energy density upper bound.

    d=3: ``(3/5) c rho^(5/3) + (12 pi/5) c a^3 rho^(8/3) [1 - (9/35) c a0^2 rho^(2/3)]``
    with ``c = (6 pi^2)^(2/3)``; d=2: ``2 pi rho^2 + 4 pi^2 a^2 rho^3``;
    d=1: ``pi^2 rho^3 / 3 + 2 pi^2 a rho^4 / 3``.
    """
    if rho <= 0 or a < 0:
        raise PreconditionError("need rho > 0 and a >= 0")
    if a ** d * rho > DILUTE_WARN:
        warnings.warn(f"a^d rho = {a ** d * rho:.3g} is outside the dilute regime", stacklevel=2)
    a0 = a if a0 is None else a0
    if d == 3:
        free = 0.6 * C3 * rho ** (5 / 3)
        inter = 12 * math.pi / 5 * C3 * a ** 3 * rho ** (8 / 3)
        corr = -inter * 9 / 35 * C3 * a0 ** 2 * rho ** (2 / 3)
    elif d == 2:
        free = 2 * math.pi * rho ** 2
        inter = 4 * math.pi ** 2 * a ** 2 * rho ** 3
        corr = 0.0
    elif d == 1:
        free = math.pi ** 2 * rho ** 3 / 3
        inter = 2 * math.pi ** 2 * a * rho ** 4 / 3
        corr = 0.0
    else:
        raise PreconditionError("d must be 1, 2 or 3")
    return {"e_free": free, "e_interaction": inter, "e_correction": corr, "total": free + inter + corr}


# --- the thermodynamic two-point kernel --------------------------------------------------

def _kernel_series_terms(d: int, n_terms: int = 25):
    """Coefficients c_n of F(u) = sum c_n u^(2n), F = gamma / rho, F(0) = 1."""
    c = []
    for n in range(n_terms):
        if d == 3:
            c.append((-1) ** n * 6 * (n + 1) / math.factorial(2 * n + 3))
        elif d == 2:
            c.append((-1) ** n / (4 ** n * math.factorial(n) * math.factorial(n + 1)))
        else:
            c.append((-1) ** n / math.factorial(2 * n + 1))
    return c


def _one_minus_F(u: np.ndarray, d: int) -> np.ndarray:
    """``1 - gamma(u)/rho`` for the continuum Fermi sea, accurate near u = 0."""
    u = np.asarray(u, float)
    out = np.empty_like(u)
    small = u < 1.0
    us = u[small]
    coef = _kernel_series_terms(d)
    acc = np.zeros_like(us)
    for n in range(len(coef) - 1, 0, -1):
        acc = acc * us * us - coef[n]
    out[small] = acc * us * us
    ul = u[~small]
    if d == 3:
        F = 3 * (np.sin(ul) - ul * np.cos(ul)) / ul ** 3
    elif d == 2:
        F = 2 * special.j1(ul) / ul
    else:
        F = np.sin(ul) / ul
    out[~small] = 1 - F
    return out


def pair_kernel(r, rho: float, d: int = 3) -> np.ndarray:
    """``rho^(2)(0, x)`` of the infinite free Fermi sea at |x| = r."""
    kF = fermi_momentum(rho, d)
    eps = _one_minus_F(kF * np.asarray(r, float), d)
    return rho ** 2 * eps * (2 - eps)


# --- assembly ----------------------------------------------------------------------------

def _weighted_energy(profile: JastrowProfile, weight) -> float:
    """``int weight(|x|) (|grad f|^2 + v f^2 / 2) dx`` over the ball of radius b."""
    sol = profile.base
    d = sol.d
    dens = _energy_density(sol)
    hi = min(profile.b, sol.r_max)
    val = _radial_quad(lambda r: float(weight(r)) * r ** (d - 1) * dens(r), sol, sol.r_start, hi)
    if profile.b > sol.r_max:
        c = d * d * sol.a ** (2 * d)
        edges = np.geomspace(sol.r_max, profile.b, max(2, int(math.log2(profile.b / sol.r_max)) + 2))
        for lo, up in zip(edges[:-1], edges[1:]):
            val += integrate.quad(lambda r: float(weight(r)) * c * r ** (-d - 3), lo, up,
                                  epsabs=0, epsrel=1e-13, limit=200)[0]
    return sphere_area(d) * val / profile.norm ** 2


def three_body_term(profile: JastrowProfile, rho: float, n_radial: int = 48, n_angle: int = 24) -> float:
    """``int int f f'(y) f f'(z) (y.z)/(|y||z|) f(|y-z|)^2 rho3(0, y, z) dy dz`` (d = 3).

    The angular integrals reduce to ``8 pi^2 int dc`` with ``c`` the cosine
    between y and z; radial and angular parts use Gauss-Legendre rules.
    """
    if profile.d != 3:
        raise PreconditionError("three-body term implemented for d = 3")
    lo = profile.base.r_start
    hi = profile.b
    edges = np.geomspace(lo, hi, 12)
    t, w = leggauss(n_radial // 4)
    r_nodes, r_w = [], []
    for a_, b_ in zip(edges[:-1], edges[1:]):
        r_nodes.append(0.5 * (a_ + b_) + 0.5 * (b_ - a_) * t)
        r_w.append(0.5 * (b_ - a_) * w)
    r = np.concatenate(r_nodes)
    wr = np.concatenate(r_w)
    c, wc = leggauss(n_angle)
    ffp = profile.f(r) * profile.df(r)
    gamma_r = rho * (1 - _one_minus_F(fermi_momentum(rho, 3) * r, 3))
    R1, R2, C = np.meshgrid(r, r, c, indexing="ij")
    tt = np.sqrt(np.maximum(R1 ** 2 + R2 ** 2 - 2 * R1 * R2 * C, 0.0))
    g12 = gamma_r[:, None, None]
    g13 = gamma_r[None, :, None]
    g23 = rho * (1 - _one_minus_F(fermi_momentum(rho, 3) * tt, 3))
    rho3 = rho ** 3 + 2 * g12 * g13 * g23 - rho * (g12 ** 2 + g13 ** 2 + g23 ** 2)
    integrand = (ffp[:, None, None] * ffp[None, :, None] * C * profile.f(tt) ** 2 * rho3
                 * (R1 ** 2) * (R2 ** 2))
    val = np.einsum("ijk,i,j,k->", integrand, wr, wr, wc)
    return float(8 * math.pi ** 2 * val)


def energy_assembled(ms, profile: JastrowProfile | None, v: RadialPotential | None = None,
                     include_corrections: bool = False, method: str = "thermodynamic",
                     threshold: float = 0.1) -> dict:
    """Itemized energy density of the trial state.

    ``ms`` is a MomentumSet (kinetic term from the exact lattice sum) or a
    density (continuum Fermi sea).  ``method`` selects the two-point kernel:
    ``thermodynamic`` (exact infinite-volume kernel) or ``expansion``
    (quadratic-plus-quartic small-separation form fitted on ``ms``).
    """
    if isinstance(ms, MomentumSet):
        d = ms.d
        rho = ms.rho
        kinetic = kinetic_sums(ms).S2 / ms.L ** d
    else:
        rho = float(ms)
        d = profile.d if profile is not None else 3
        kF = fermi_momentum(rho, d)
        kinetic = d / (d + 2) * kF ** 2 * rho
    items = {"kinetic": kinetic, "interaction": 0.0, "three_body": 0.0}
    if profile is None or profile.a == 0:
        items["total"] = kinetic
        return items
    if v is not None and v is not profile.base.potential and v != profile.base.potential:
        raise PreconditionError("potential differs from the one the profile was solved for")
    if method == "thermodynamic":
        items["interaction"] = _weighted_energy(profile, lambda r: pair_kernel(r, rho, d))
    elif method == "expansion":
        from .slater import OneBodyKernel, rho2_small_separation_fit
        if not isinstance(ms, MomentumSet) or d != 3:
            raise PreconditionError("expansion method needs a 3D MomentumSet")
        fit = rho2_small_separation_fit(OneBodyKernel(ms))
        c2, c4 = fit["c2"], fit["c4"]
        items["interaction"] = _weighted_energy(profile, lambda r: c2 * r * r * (1 - c4 * r * r))
    else:
        raise PreconditionError(f"unknown method {method!r}")
    if include_corrections:
        from .ggr import convergence_parameter
        N = ms.N if isinstance(ms, MomentumSet) else 10 ** 6
        cp = convergence_parameter(1.0, profile.a, rho, profile.b, N, d, threshold)
        if not cp["ok"]:
            raise DiluteRegimeViolated(f"convergence parameter {cp['value']:.3g} above {threshold}")
        items["three_body"] = three_body_term(profile, rho)
    items["total"] = items["kinetic"] + items["interaction"] + items["three_body"]
    return items


def _hard_core_profile(a: float, b: float, d: int = 3) -> JastrowProfile:
    sol = solve_p_wave(RadialPotential.hardcore(a, d), r_max=20 * a)
    return JastrowProfile(sol, b)


def interaction_routes(kFa: float, b_over_a: float | None = None, a: float = 1.0,
                       profile: JastrowProfile | None = None) -> dict:
    """Closed-form leading interaction term vs the assembled integral (d = 3)."""
    rho = (kFa / a) ** 3 / (6 * math.pi ** 2)
    if b_over_a is None:
        b_over_a = (a ** 3 * rho) ** (-1 / 3)
    if profile is None:
        profile = _hard_core_profile(a, b_over_a * a)
    a_eff = profile.a
    a0 = derived_lengths(profile.base).a0
    cf = closed_form_bound(rho, a_eff, a0)
    assembled = energy_assembled(rho, profile)["interaction"]
    return {"rho": rho, "b": profile.b, "a0": a0, "closed_form": cf["e_interaction"],
            "closed_form_with_correction": cf["e_interaction"] + cf["e_correction"],
            "assembled": assembled, "ratio": assembled / cf["e_interaction"]}


def residual_slope(kFa_list: Sequence[float], a: float = 1.0) -> dict:
    """Slope of ``assembled / leading - 1`` against ``a0^2 rho^(2/3)``."""
    xs, ys = [], []
    for kFa in kFa_list:
        r = interaction_routes(kFa, a=a)
        xs.append(r["a0"] ** 2 * r["rho"] ** (2 / 3))
        ys.append(r["ratio"] - 1)
    slope, icpt = np.polyfit(xs, ys, 1)
    target = -9 / 35 * C3
    return {"x": xs, "residual": ys, "slope": float(slope), "intercept": float(icpt),
            "target": target, "relative_error": float(slope / target - 1)}


# --- error budgets -----------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    """Error term as a monomial in the physical inputs.

    ``powers`` maps symbols (a, a0, R0, b, rho, s, N, dc, Lb, LN, L) to
    exponents; ``L`` stands for |log(a^d rho)|.
    """

    label: str
    powers: dict

    def value(self, inputs: dict) -> float:
        return math.prod(inputs[k] ** e for k, e in self.powers.items())


def _T(label, **p):
    return Term(label, {k: Fraction(v) for k, v in p.items()})


F = Fraction
BUDGET_TERMS = {
    3: [
        _T("s^-2 rho^5/3", s=-2, rho=F(5, 3)),
        _T("N^-1/3 rho^5/3", N=F(-1, 3), rho=F(5, 3)),
        _T("a^6 b^-3 rho^8/3", a=6, b=-3, rho=F(8, 3)),
        _T("a^6 a0^2 b^-3 rho^10/3", a=6, a0=2, b=-3, rho=F(10, 3)),
        _T("R0^4 a^3 rho^4", R0=4, a=3, rho=4),
        _T("a^13 rho^6 s^3 Lb^4 LN^9", a=13, rho=6, s=3, Lb=4, LN=9),
        _T("a^7 rho^4 Lb^2", a=7, rho=4, Lb=2),
        _T("a^18 rho^23/3 s^5 Lb^5 LN^16", a=18, rho=F(23, 3), s=5, Lb=5, LN=16),
        _T("a^6 b^2 rho^13/3 (lattice)", a=6, b=2, rho=F(13, 3)),
        _T("a^6 rho^11/3 Lb", a=6, rho=F(11, 3), Lb=1),
        _T("a^6 b^2 rho^13/3 (three-body)", a=6, b=2, rho=F(13, 3)),
        _T("a^13 rho^6 s^3 Lb^4 LN^9 (ring)", a=13, rho=6, s=3, Lb=4, LN=9),
        _T("a^7 rho^4 Lb", a=7, rho=4, Lb=1),
    ],
    2: [
        _T("s^-4 rho^2", s=-4, rho=2),
        _T("N^-1/2 rho^2", N=F(-1, 2), rho=2),
        _T("a^4 b^-2 rho^3", a=4, b=-2, rho=3),
        _T("a^4 rho^4 L", a=4, rho=4, L=1),
        _T("R0^2 a^2 rho^4", R0=2, a=2, rho=4),
        _T("s^3 a^8 rho^6 L^10", s=3, a=8, rho=6, L=10),
        _T("a^4 rho^4 L^2", a=4, rho=4, L=2),
        _T("s^5 a^12 rho^8 L^16", s=5, a=12, rho=8, L=16),
        _T("a^2 b^2 rho^5 (lattice)", a=2, b=2, rho=5),
        _T("a^4 rho^4 L (two-body)", a=4, rho=4, L=1),
        _T("a^2 b^2 rho^5 (three-body)", a=2, b=2, rho=5),
        _T("s^3 a^8 rho^6 L^10 (ring)", s=3, a=8, rho=6, L=10),
        _T("a^4 rho^4 L (tail)", a=4, rho=4, L=1),
    ],
    1: [
        _T("N^-1 rho^3", N=-1, rho=3),
        _T("a^2 b^-1 rho^4", a=2, b=-1, rho=4),
        _T("a^2 b rho^6", a=2, b=1, rho=6),
        _T("a^2 rho^5 L^6", a=2, rho=5, L=6),
        _T("a b^4 rho^8", a=1, b=4, rho=8),
        _T("a^2 b^2 rho^7", a=2, b=2, rho=7),
        _T("N a^3 b^4 rho^10", N=1, a=3, b=4, rho=10),
        _T("a^2 rho^5 L", a=2, rho=5, L=1),
        _T("a^2 b^2 rho^7 (three-body)", a=2, b=2, rho=7),
        _T("a^2 rho^5 L^4", a=2, rho=5, L=4),
        _T("a^2 b^3 rho^8", a=2, b=3, rho=8),
        _T("a^2 b rho^6 L", a=2, b=1, rho=6, L=1),
        _T("dc rho^4 N^-1 (box edge)", dc=1, rho=4, N=-1),
        _T("b rho^4 N^-1 (box edge)", b=1, rho=4, N=-1),
        _T("rho dc^-2 (corridor)", rho=1, dc=-2),
    ],
}

# energy scale each budget is measured against
BASE_POWER = {3: F(5, 3), 2: F(2), 1: F(3)}

# parameter names per dimension, and how the inputs scale with x = a^d rho:
#   d=3: s = x^-alpha L^-delta, b = a x^-beta, N = x^-29
#   d=2: s = x^-alpha L^-gamma, b = a x^-beta, N = x^-19
#   d=1: N = x^-alpha, b = a x^-beta, dc = a x^-delta
PARAM_NAMES = {3: ("alpha", "beta", "delta"), 2: ("alpha", "beta", "gamma"), 1: ("alpha", "beta", "delta")}
N_POWER = {3: 29, 2: 19}

REFERENCE_EXPONENTS = {
    3: {"alpha": F(6, 7), "beta": F(1, 3), "delta": F(3)},
    2: {"alpha": F(4, 7), "beta": F(1, 2), "gamma": F(10, 7)},
    1: {"alpha": F(33, 13), "beta": F(9, 13), "delta": F(24, 13)},
}
LATTICE = {3: (84, 84, 4), 2: (28, 28, 7), 1: (13, 13, 13)}
SEARCH_BOX = {3: (2, 2, 10), 2: (2, 2, 6), 1: (4, 3, 4)}


def signature(term: Term, d: int) -> tuple[tuple, tuple]:
    """Affine forms (c0, c1, c2, c3) for the x-exponent and the log power.

    The value is ``rho^base * x^(c0 + c1 p1 + c2 p2 + c3 p3) * L^(l0 + ...)``
    with ``(p1, p2, p3)`` the dimension's parameters.
    """
    P = term.powers
    e = [P.get("rho", 0) - BASE_POWER[d], F(0), F(0), F(0)]
    lg = [P.get("Lb", 0) + P.get("LN", 0) + P.get("L", 0), F(0), F(0), F(0)]
    e[2] -= P.get("b", 0)
    if d in (2, 3):
        e[1] -= P.get("s", 0)
        lg[3] -= P.get("s", 0)
        e[0] -= N_POWER[d] * P.get("N", 0)
    else:
        e[1] -= P.get("N", 0)
        e[3] -= P.get("dc", 0)
    return tuple(e), tuple(lg)


@dataclass
class EnergyBudget:
    d: int
    inputs: dict
    leading: dict
    terms: list = field(default_factory=list)
    exponents: dict = field(default_factory=dict)
    gamma: Fraction | float | None = None
    log_power: Fraction | float | None = None

    def dominant(self) -> dict:
        return max(self.terms, key=lambda t: t["value"])


def _evaluate_exponents(d: int, params: dict) -> list[tuple]:
    p = [params[n] for n in PARAM_NAMES[d]]
    out = []
    for t in BUDGET_TERMS[d]:
        e, lg = signature(t, d)
        out.append((e[0] + sum(c * x for c, x in zip(e[1:], p)), lg[0] + sum(c * x for c, x in zip(lg[1:], p))))
    return out


def gamma_at(d: int, params: dict) -> tuple:
    """Smallest error exponent and its largest log power at the given parameters."""
    ex = _evaluate_exponents(d, params)
    g = min(e for e, _ in ex)
    return g, max(lg for e, lg in ex if e == g)


def error_budget(rho: float, a: float, b: float, s: float, N: float, d: int = 3,
                 a0: float | None = None, R0: float | None = None, dc: float | None = None,
                 exponents: dict | None = None) -> EnergyBudget:
    """Numerical values of all error terms, constants set to 1.

    ``exponents`` (the tuning parameters) are inferred from the inputs when
    omitted, ignoring logarithmic factors.
    """
    if min(rho, a, b, s, N) <= 0:
        raise PreconditionError("inputs must be positive")
    x = a ** d * rho
    L = abs(math.log(x))
    inputs = {"rho": rho, "a": a, "a0": a if a0 is None else a0, "R0": a if R0 is None else R0,
              "b": b, "s": s, "N": N, "dc": dc if dc is not None else b,
              "Lb": math.log(b / a) if b > a else 0.0, "LN": math.log(N), "L": L}
    if exponents is None:
        if d == 1:
            exponents = {"alpha": math.log(N) / L, "beta": math.log(b / a) / L,
                         "delta": math.log(inputs["dc"] / a) / L}
        else:
            exponents = {"alpha": math.log(s) / L, "beta": math.log(b / a) / L, PARAM_NAMES[d][2]: 0.0}
    terms = []
    for t, (e, lg) in zip(BUDGET_TERMS[d], _evaluate_exponents(d, exponents)):
        terms.append({"label": t.label, "value": t.value(inputs), "exponent": e, "log_power": lg})
    cf = closed_form_bound(rho, a, inputs["a0"], d)
    g, lp = gamma_at(d, exponents)
    return EnergyBudget(d=d, inputs=inputs, leading=cf, terms=terms, exponents=dict(exponents),
                        gamma=g, log_power=lp)


def optimize_exponents(d: int = 3) -> dict:
    """Leximin optimum of the error exponents over a rational lattice.

    Each candidate's (exponent, -log power) pairs are sorted ascending and
    candidates are compared lexicographically: first maximize the smallest
    exponent, then minimize its log power, then move to the next term.
    """
    dens = LATTICE[d]
    box = SEARCH_BOX[d]
    scale = math.lcm(*dens, *(sig.denominator for t in BUDGET_TERMS[d] for form in signature(t, d)
                              for sig in form))
    axes = [np.arange(0, box[i] * dens[i] + 1) for i in range(3)]
    P = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    # integer-scaled exponents: value * scale
    E = np.empty((len(P), len(BUDGET_TERMS[d])), dtype=np.int64)
    Lg = np.empty_like(E)
    for j, t in enumerate(BUDGET_TERMS[d]):
        e, lg = signature(t, d)
        E[:, j] = int(e[0] * scale)
        Lg[:, j] = int(lg[0] * scale)
        for i in range(3):
            E[:, j] += (P[:, i] * int(e[i + 1] * scale)) // dens[i]
            Lg[:, j] += (P[:, i] * int(lg[i + 1] * scale)) // dens[i]
    # encode (exponent ascending, log power descending) into one sortable key
    span = int(Lg.max() - Lg.min()) + 1
    key = E * span + (Lg.max() - Lg)
    key.sort(axis=1)
    order = np.lexsort(key.T[::-1])
    best = order[-1]
    ties = np.all(key == key[best], axis=1).sum()
    names = PARAM_NAMES[d]
    params = {names[i]: Fraction(int(P[best, i]), dens[i]) for i in range(3)}
    g, lp = gamma_at(d, params)
    return {"params": params, "gamma": g, "log_power": lp, "unique": bool(ties == 1),
            "lattice": dens}


# --- Ding-Zhang comparison curve -------------------------------------------------------------

def ding_zhang_curve(kFa_list: Sequence[float], Reff_over_a: float = 5 / 18,
                     csv_path: str | Path | None = None) -> list[dict]:
    """``e / (rho kF^2)`` from the low-density expansion with effective range."""
    rows = []
    c4 = (2066 - 312 * math.log(2)) / (10395 * math.pi ** 2)
    for t in kFa_list:
        if t < 0:
            raise PreconditionError("kFa must be nonnegative")
        inv = 0.0 if t == 0 else 1.0 / Reff_over_a
        e2 = 2 / (5 * math.pi) * t ** 3
        e3 = -inv / (35 * math.pi) * t ** 5
        e4 = c4 * t ** 6
        rows.append({"kFa": t, "free": 0.6, "e2": e2, "e3": e3, "e4": e4, "value": 0.6 + e2 + e3 + e4})
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return rows


def ding_zhang_mp(kFa, Reff_over_a, dps: int = 50):
    """High-precision re-evaluation of the same expansion."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(kFa)
        c4 = (2066 - 312 * mpmath.log(2)) / (10395 * mpmath.pi ** 2)
        return (mpmath.mpf(3) / 5 + 2 / (5 * mpmath.pi) * t ** 3
                - 1 / (35 * mpmath.pi) / mpmath.mpf(Reff_over_a) * t ** 5 + c4 * t ** 6)


# --- box method ------------------------------------------------------------------------------

CORRIDOR_CONSTANT = 6.0


def box_method_density(rho: float, ell: float, dc: float, b: float, d: int = 3,
                       e_box: float | None = None, a: float = 0.0, a0: float | None = None) -> dict:
    """Density and energy bound of the periodically glued box construction.

    A box of side ``ell`` holds ``n = rho ell^d`` particles; neighbouring boxes
    are separated by corridors of width ``dc`` plus the interaction range ``b``.
    The Dirichlet cutoff in the corridors costs ``6 n / dc^2`` per box.
    """
    if not (ell > 0 and rho > 0):
        raise GeometryInvalid("need ell > 0 and rho > 0")
    if not (0 <= dc < ell / 2 and 0 <= b < ell):
        raise GeometryInvalid(f"need 0 <= dc < ell/2 and 0 <= b < ell (dc={dc}, b={b}, ell={ell})")
    n = rho * ell ** d
    if e_box is None:
        e_box = closed_form_bound(rho, a, a0, d)["total"] * ell ** d
    cell = (ell + 2 * dc + b) ** d
    corridor = CORRIDOR_CONSTANT * n / dc ** 2 if dc > 0 else 0.0
    rho_t = n / cell
    return {"rho_tilde": rho_t, "e_bound": (e_box + corridor) / cell,
            "box_term": e_box / cell, "corridor_term": CORRIDOR_CONSTANT * rho / dc ** 2 if dc > 0 else 0.0,
            "n": n, "cell_side": ell + 2 * dc + b}
