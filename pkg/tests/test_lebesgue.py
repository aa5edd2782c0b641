import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fermigas.errors import GridAliased, InvalidConfig
from fermigas.fermi_surface import PolyhedronSpec, build_polyhedron
from fermigas.lebesgue import KernelSpec, kernel_l1, one_d_power_kernel_l1, scaling_study


@pytest.fixture(scope="module")
def poly48():
    return build_polyhedron(PolyhedronSpec(d=3, s=48, Q=10 ** 6))


def test_single_point_is_one():
    assert kernel_l1(KernelSpec(np.zeros((1, 3), int))).value == pytest.approx(1.0, abs=1e-14)


def test_interval_matches_power_kernel():
    M0 = 12
    spec = KernelSpec(np.arange(M0 + 1)[:, None], M=2 ** 16, refine=False)
    # kernel_l1 is normalized by 2 pi
    assert 2 * math.pi * kernel_l1(spec).value == pytest.approx(one_d_power_kernel_l1(M0, 0), abs=1e-6)


def test_power_kernel_against_adaptive_quadrature():
    M = 7

    def integrand(x):
        k = np.arange(M + 1)
        return abs(np.sum(k * np.exp(1j * k * x)))

    ref = 2 * integrate.quad(integrand, 0, math.pi, limit=500, epsabs=1e-12)[0]
    assert one_d_power_kernel_l1(M, 1) == pytest.approx(ref, rel=1e-8)


def test_power_kernel_base_case():
    assert abs(one_d_power_kernel_l1(1, 0) - 8) <= 1e-8


def test_power_kernel_growth():
    Ms = [8, 64, 512, 4096]
    r1 = [one_d_power_kernel_l1(M, 1) / (M * math.log(M)) for M in Ms]
    r2 = [one_d_power_kernel_l1(M, 2) / (M ** 2 * math.log(M)) for M in Ms[:-1] + [1024]]
    assert max(r1) <= 20
    assert max(r2) <= 20


def test_ball_linear_growth():
    rows = scaling_study("ball", [4, 8, 16])["rows"]
    ratios = [r["value"] / r["R"] for r in rows]
    assert max(ratios) / min(ratios) <= 10


def test_polyhedron_log_cubed(poly48):
    rows = scaling_study(poly48, [4, 8, 16])["rows"]
    ratios = [r["bound_ratio"] for r in rows]
    assert ratios[-1] <= ratios[0]


def test_polyhedron_derivative_weight(poly48):
    rows = scaling_study(poly48, [4, 8, 16], weights=(1, 0, 0))["rows"]
    assert max(r["bound_ratio"] for r in rows) <= 1.0


def test_polyhedron_beats_ball_eventually(poly48):
    ball = scaling_study("ball", [4, 8, 16])["rows"]
    poly = scaling_study(poly48, [4, 8, 16])["rows"]
    smaller = [p["value"] < b["value"] for p, b in zip(poly, ball)]
    # once the polyhedron is cheaper it stays cheaper
    first = smaller.index(True)
    assert all(smaller[first:])


def test_aliased_grid_rejected():
    with pytest.raises(GridAliased):
        KernelSpec(np.arange(10)[:, None], M=8)


def test_weight_degree_limit():
    with pytest.raises(InvalidConfig):
        KernelSpec(np.zeros((1, 3), int), weights=(1, 1, 1))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=8, unique=True), st.integers(-20, 20))
def test_translation_invariance_1d(pts, shift):
    a = kernel_l1(KernelSpec(np.array(pts)[:, None], M=64, refine=False)).value
    b = kernel_l1(KernelSpec(np.array(pts)[:, None] + shift, M=64, refine=False)).value
    assert a == pytest.approx(b, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=10, unique=True))
def test_l1_between_sup_norm_bounds(pts):
    # |sum| <= #points pointwise, and the L1 norm dominates the L2 norm squared over the sup
    n = len(pts)
    v = kernel_l1(KernelSpec(np.array(pts)[:, None], M=64, refine=False)).value
    assert 1 - 1e-12 <= v <= n + 1e-12
