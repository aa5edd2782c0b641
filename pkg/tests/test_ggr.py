import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import gaussian_g
from fermigas.errors import CapExceeded, PreconditionError, UnknownId
from fermigas.fermi_surface import MomentumSet
from fermigas.ggr import (CATALOG, Diagram, GGraph, GProfile, catalog_json, convergence_parameter,
                          diagram_value, direct_oracle, enumerate_graphs, expansion_report,
                          linked_log_series, normalization_series, rho_jas_series, rho_tensor,
                          small_diagram_catalog, tree_graph_check, truncated_correlation)
from fermigas.slater import DiscreteTorus, OneBodyKernel, rho_p


def test_graph_counts():
    assert enumerate_graphs(0, 0) == [] and enumerate_graphs(1, 0) == []
    assert [g.edges for g in enumerate_graphs(2, 0)] == [((1, 2),)]
    assert {g.edges for g in enumerate_graphs(1, 2)} == {((1, 3),), ((2, 3),), ((1, 3), (2, 3))}


def test_graph_counts_frozen():
    # internal-only graphs without isolated vertices, counted independently by inclusion-exclusion
    def no_isolated(n):
        return sum((-1) ** k * math.comb(n, k) * 2 ** math.comb(n - k, 2) for k in range(n + 1))

    assert [len(enumerate_graphs(p, 0)) for p in range(2, 6)] == [no_isolated(p) for p in range(2, 6)]


def test_graph_cap():
    with pytest.raises(CapExceeded):
        enumerate_graphs(6, 2)


def test_external_edge_rejected():
    with pytest.raises(PreconditionError):
        GGraph(2, 1, ((1, 2),))


def test_single_external_vertex(torus_1d, kernel3):
    assert rho_tensor(kernel3, torus_1d, 0, [[0.3]]) == pytest.approx(kernel3.rho, rel=1e-13)


def test_type_c_against_direct_sum(torus_1d, kernel4, gprofile):
    ext = np.array([[0.13], [0.41]])
    G = GGraph(2, 1, ((1, 3), (2, 3)))
    total = sum(diagram_value(Diagram(G, p), kernel4, gprofile, ext)
                for p in itertools.permutations((1, 2, 3)))
    ref = sum(gprofile(ext[0] - y) * gprofile(ext[1] - y) * rho_p(kernel4, [ext[0], ext[1], y])
              for y in torus_1d.nodes) * torus_1d.h
    assert total == pytest.approx(ref, abs=1e-12)


def test_disconnected_diagram_factorizes(kernel4, gprofile):
    dg = CATALOG["three_two_component"]
    ext = np.array([[0.13], [0.41], [0.77]])
    parts = dg.components()
    assert len(parts) == 2
    prod = math.prod(diagram_value(c, kernel4, gprofile, ext[[i - 1 for i in e]]) for e, c in parts)
    assert diagram_value(dg, kernel4, gprofile, ext) == pytest.approx(prod, abs=1e-12)


def test_truncated_single_cluster(kernel4):
    pts = np.array([[0.1], [0.35], [0.8]])
    out = truncated_correlation([[0, 1, 2]], pts, kernel4, check=False)
    assert out["value"] == pytest.approx(rho_p(kernel4, pts), abs=1e-12)


def test_truncated_two_singletons(kernel4):
    pts = np.array([[0.1], [0.35]])
    out = truncated_correlation([[0], [1]], pts, kernel4)
    assert out["value"] == pytest.approx(-abs(kernel4(pts[0] - pts[1])) ** 2, abs=1e-12)


def test_truncated_two_cluster_identity(kernel4):
    rng = np.random.default_rng(5)
    for _ in range(10):
        pts = rng.uniform(0, 1, (3, 1))
        out = truncated_correlation([[0, 2], [1]], pts, kernel4)
        assert out["value"] == pytest.approx(out["identity"], abs=1e-12)


def test_normalization_trivial(torus_1d, kernel3):
    gp = GProfile(torus_1d, g=lambda r: 0.0 * np.asarray(r))
    assert normalization_series(kernel3, gp) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("pts", [[[0], [1]], [[-1], [0], [1]], [[-1], [0], [1], [2]]])
def test_normalization_matches_oracle(torus_1d, gprofile, pts):
    K = OneBodyKernel(MomentumSet.from_points(pts, L=1.0))
    assert normalization_series(K, gprofile) == pytest.approx(direct_oracle(K, gprofile)["norm"], abs=1e-12)


def test_jastrow_density_free(torus_1d, kernel3):
    gp = GProfile(torus_1d, g=lambda r: 0.0 * np.asarray(r))
    ext = np.array([[0.2], [0.7]])
    assert rho_jas_series(kernel3, gp, ext)["rho_jas"] == pytest.approx(rho_p(kernel3, ext), abs=1e-13)


def test_jastrow_density_identity(kernel3, gprofile):
    rng = np.random.default_rng(11)
    for ext in rng.uniform(0, 1, (5, 2, 1)):
        series = rho_jas_series(kernel3, gprofile, ext)["rho_jas"]
        assert series == pytest.approx(direct_oracle(kernel3, gprofile, 2, ext)["rho_jas"], abs=1e-10)


def test_jastrow_density_coincident(kernel3, gprofile):
    ext = np.array([[0.3], [0.3]])
    assert abs(rho_jas_series(kernel3, gprofile, ext)["rho_jas"]) <= 1e-12


def test_jastrow_one_point_constant_on_nodes(torus_1d, kernel3, gprofile):
    vals = [rho_jas_series(kernel3, gprofile, [x])["rho_jas"] for x in torus_1d.nodes[::3]]
    assert np.ptp(vals) <= 1e-10


def test_linked_series_approaches_log(torus_1d, kernel4):
    gp = GProfile(torus_1d, g=gaussian_g()).scaled(0.1)
    exact = math.log(direct_oracle(kernel4, gp)["norm"])
    errs = [abs(s - exact) for s in linked_log_series(kernel4, gp, 4)]
    assert errs[-1] < errs[0]
    assert errs[-1] <= 1e-5


def test_expansion_report_rows(kernel4, gprofile):
    rows = expansion_report(kernel4, gprofile.scaled(0.1), P=3)
    assert [r["p"] for r in rows] == [2, 3]
    assert all(r["n_diagrams"] > 0 and r["tree_bound"] > 0 for r in rows)


def test_convergence_parameter():
    out = convergence_parameter(100, 1.0, 1e-6, 100.0, 1e6)
    assert round(out["value"], 1) == 1.2
    assert not out["ok"]
    assert convergence_parameter(100, 0.0, 1e-6, 100.0, 1e6)["value"] == 0
    twice = convergence_parameter(200, 1.0, 1e-6, 100.0, 1e6)["value"]
    assert twice == pytest.approx(2 * out["value"])


def test_tree_graph_small_cases():
    g = -0.4 * np.ones((2, 2))
    out = tree_graph_check(2, g)
    assert out["lhs"] == pytest.approx(out["rhs"]) == pytest.approx(0.4)
    out = tree_graph_check(3, -np.ones((3, 3)))
    assert out["lhs"] == 2 and out["rhs"] == 3 and out["ok"]
    assert out["n_connected"] == 4 and out["n_trees"] == 3


def test_cayley_counts():
    for n in range(2, 7):
        out = tree_graph_check(n, -0.5 * np.ones((n, n)))
        assert out["n_trees"] == out["cayley"] == n ** (n - 2)


def test_catalog_closed_forms(kernel4, gprofile, torus_1d):
    ext = torus_1d.nodes[[2, 9]]
    for cid in ("A", "B1", "B2", "C", "1D_A1", "1D_A2", "1D_B1"):
        out = small_diagram_catalog(cid, kernel4, gprofile, ext, tol=1e-10)
        assert out["value"] == pytest.approx(out["generic"], abs=1e-10)


def test_catalog_coincident_type_c(kernel4, gprofile):
    out = small_diagram_catalog("C", kernel4, gprofile, [[0.25], [0.25]])
    assert abs(out["value"]) <= 1e-14


def test_catalog_a2_bound(kernel4, gprofile):
    out = small_diagram_catalog("1D_A2", kernel4, gprofile, [[0.13], [0.41]])
    assert np.isfinite(out["bound_constant"]) and out["bound_constant"] > 0


def test_catalog_preconditions(kernel4, gprofile):
    with pytest.raises(PreconditionError):
        small_diagram_catalog("B1", kernel4, gprofile, [[0.13], [0.41]])
    with pytest.raises(UnknownId):
        small_diagram_catalog("Z", kernel4, gprofile, [[0.0], [0.5]])
    assert "three_linked" in catalog_json()


diagrams = st.integers(1, 4).flatmap(lambda p: st.tuples(
    st.just(p), st.sampled_from(range(len(enumerate_graphs(p, 1)))), st.permutations(range(1, p + 2))))


@settings(max_examples=60, deadline=None)
@given(diagrams)
def test_class_indices_partition_internal_vertices(item):
    p, gi, perm = item
    dg = Diagram(enumerate_graphs(p, 1)[gi], tuple(perm))
    k, nu, nu_star = dg.class_indices
    assert 2 * k + nu + nu_star == p
    assert nu >= 0 and nu_star >= 0
    assert dg.linked == (len(dg.components()) == 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1))
def test_tree_graph_inequality_random(n, seed):
    g = -np.random.default_rng(seed).uniform(0, 1, (n, n))
    assert tree_graph_check(n, g)["ok"]
