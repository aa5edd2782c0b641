import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermigas.errors import GridAliased
from fermigas.fermi_surface import MomentumSet, PolyhedronSpec, build_polyhedron, enumerate_momenta
from fermigas.slater import (DiscreteTorus, OneBodyKernel, grid_marginal, rho2_small_separation_fit,
                             rho3_quartic_bound_check, rho_p)


@pytest.fixture(scope="module")
def ball12():
    return OneBodyKernel(enumerate_momenta("ball", 12, d=3))


@pytest.fixture(scope="module")
def small_ball():
    return OneBodyKernel(enumerate_momenta("ball", 3, d=3))


def test_one_point_density(small_ball):
    rng = np.random.default_rng(1)
    for x in rng.uniform(0, 2 * np.pi, (5, 3)):
        assert rho_p(small_ball, [x]) == pytest.approx(small_ball.rho, rel=1e-13)


def test_coincident_pair_vanishes(small_ball):
    x = np.array([0.3, 1.1, 2.0])
    assert abs(rho_p(small_ball, [x, x])) <= 1e-12 * small_ball.rho ** 2
    assert abs(rho_p(small_ball, [x, x, x + 0.4])) <= 1e-12 * small_ball.rho ** 3


def test_permutation_symmetry(small_ball):
    pts = np.random.default_rng(2).uniform(0, 2 * np.pi, (3, 3))
    a = rho_p(small_ball, pts)
    assert rho_p(small_ball, pts[[2, 0, 1]]) == pytest.approx(a, rel=1e-12, abs=1e-14)


def test_more_points_than_particles_vanish():
    K = OneBodyKernel(MomentumSet.from_points([[0], [1]], L=1.0))
    assert rho_p(K, [[0.1], [0.2], [0.3]]) == 0.0


@pytest.mark.parametrize("p", [1, 2, 3])
def test_wick_matches_grid_marginal_1d(p):
    ms = MomentumSet.from_points([[-1], [0], [1], [2]], L=1.0)
    torus = DiscreteTorus(1, 1.0, 16)
    pts = np.random.default_rng(p).uniform(0, 1, (p, 1))
    assert grid_marginal(ms, torus, pts) == pytest.approx(rho_p(OneBodyKernel(ms), pts), abs=1e-12)


def test_alias_check():
    ms = MomentumSet.from_points([[-3], [0], [3]], L=1.0)
    with pytest.raises(GridAliased):
        grid_marginal(ms, DiscreteTorus(1, 1.0, 6), [[0.0]])


def test_grid_orthonormality():
    ms = MomentumSet.from_points([[0, 0], [1, 0], [0, -2], [1, 1]], L=2.0)
    G = DiscreteTorus(2, 2.0, 8).gram(ms)
    assert np.allclose(G, np.eye(4), atol=1e-14)


def test_small_separation_coefficients(ball12):
    fit = rho2_small_separation_fit(ball12)
    assert 0.98 <= fit["c2_ratio"] <= 1.02
    assert 0.9 <= fit["c4_ratio"] <= 1.1


def test_polyhedron_c2_deviation_falls_with_s():
    devs = []
    for s, Q in ((48, 10 ** 6), (96, 10 ** 8), (192, 10 ** 12)):
        ms = enumerate_momenta(build_polyhedron(PolyhedronSpec(d=3, s=s, Q=Q)), 12)
        devs.append(abs(rho2_small_separation_fit(OneBodyKernel(ms))["c2_ratio"] - 1))
    assert devs[0] > devs[1] > devs[2]


def test_quartic_bound(ball12):
    out = rho3_quartic_bound_check(ball12, samples=1000)
    assert out["max_ratio"] <= 100


def test_derivative_matches_finite_difference(small_ball):
    x = np.array([[0.2, -0.4, 0.9]])
    h = 1e-5
    e = np.array([[h, 0, 0]])
    fd = (small_ball(x + e) - small_ball(x - e)) / (2 * h)
    assert small_ball.derivative(x, (1, 0, 0))[0] == pytest.approx(fd[0], rel=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3))
def test_kernel_invariants(x):
    K = OneBodyKernel(enumerate_momenta("ball", 3, d=3))
    x = np.array(x)
    assert K(x) == pytest.approx(K(-x), abs=1e-12)
    assert abs(K(x)) <= K.rho * (1 + 1e-12)
    assert K.one_minus(x) == pytest.approx(K.rho - K(x), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_two_point_density_nonnegative(seed):
    K = OneBodyKernel(enumerate_momenta("ball", 2, d=3))
    pts = np.random.default_rng(seed).uniform(0, 2 * np.pi, (2, 3))
    assert rho_p(K, pts) >= -1e-12 * K.rho ** 2
    assert rho_p(K, pts) <= K.rho ** 2 * (1 + 1e-12)
