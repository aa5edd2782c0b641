import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermigas.energy import (BUDGET_TERMS, REFERENCE_EXPONENTS, box_method_density, closed_form_bound,
                             ding_zhang_curve, energy_assembled, error_budget, gamma_at,
                             interaction_routes, optimize_exponents, pair_kernel, residual_slope)
from fermigas.errors import GeometryInvalid
from fermigas.fermi_surface import enumerate_momenta, kinetic_sums

C3 = (6 * math.pi ** 2) ** (2 / 3)


def test_free_gas_3d():
    assert closed_form_bound(1.0, 0.0)["total"] == pytest.approx(0.6 * C3, rel=1e-15)


def test_one_dimensional_bound():
    out = closed_form_bound(1.0, 0.01, d=1)
    assert out["e_free"] == pytest.approx(math.pi ** 2 / 3)
    assert out["e_interaction"] == pytest.approx(2 * math.pi ** 2 / 3 * 0.01)


def test_interaction_coefficient_assembly():
    # 12 pi a^3 from the scattering integral times the quadratic coefficient of rho2
    assembled = 12 * math.pi * C3 / 5
    with pytest.warns(UserWarning):
        val = closed_form_bound(1.0, 1.0, 0.0)["e_interaction"]
    assert val == pytest.approx(assembled, rel=1e-14)


def test_dilute_warning():
    with pytest.warns(UserWarning):
        closed_form_bound(1.0, 1.0)


def test_pair_kernel_limits():
    rho = 0.3
    assert pair_kernel(0.0, rho) == pytest.approx(0.0, abs=1e-15)
    assert pair_kernel(1e4, rho) == pytest.approx(rho ** 2, rel=1e-3)
    r = 1e-3
    assert pair_kernel(r, rho) == pytest.approx(C3 / 5 * rho ** (8 / 3) * r * r, rel=1e-4)


def test_two_routes_agree():
    out = interaction_routes(1e-2)
    assert 0.99 <= out["ratio"] <= 1.01


def test_free_assembly_is_kinetic():
    ms = enumerate_momenta("ball", 5, d=3)
    out = energy_assembled(ms, None)
    assert out["total"] == kinetic_sums(ms).S2 / ms.L ** 3


def test_residual_slope():
    out = residual_slope([3e-3, 1e-2, 3e-2])
    assert abs(out["relative_error"]) <= 0.1


def test_exponents_3d():
    out = optimize_exponents(3)
    assert out["params"] == REFERENCE_EXPONENTS[3]
    assert out["gamma"] == Fraction(12, 7)
    assert out["unique"]


def test_exponents_1d():
    out = optimize_exponents(1)
    assert out["params"] == REFERENCE_EXPONENTS[1]
    assert out["gamma"] == Fraction(22, 13)


def test_exponents_2d():
    out = optimize_exponents(2)
    assert out["params"] == REFERENCE_EXPONENTS[2]


def test_gamma_at_reference_choice():
    assert gamma_at(3, REFERENCE_EXPONENTS[3])[0] == Fraction(12, 7)


def test_budget_without_interaction():
    b = error_budget(1e-3, 1e-12, 10.0, 10.0, 1e12)
    assert b.dominant()["label"] == "s^-2 rho^5/3"
    assert len(b.terms) == len(BUDGET_TERMS[3])


def test_ding_zhang_free():
    rows = ding_zhang_curve([0.0, 0.3, 1.0])
    assert rows[0]["value"] == 0.6
    assert all(r["free"] == 0.6 for r in rows)


def test_ding_zhang_substitution():
    t = 0.4
    row = ding_zhang_curve([t], 5 / 18)[0]
    assert row["e3"] == pytest.approx(-18 / (5 * 35 * math.pi) * t ** 5, rel=1e-14)


def test_ding_zhang_high_precision():
    with mpmath.workdps(50):
        t = mpmath.mpf("0.2")
        pi = mpmath.pi
        ref = (mpmath.mpf(3) / 5 + 2 * t ** 3 / (5 * pi) - mpmath.mpf(18) / 5 * t ** 5 / (35 * pi)
               + (2066 - 312 * mpmath.log(2)) / (10395 * pi ** 2) * t ** 6)
    assert ding_zhang_curve([0.2])[0]["value"] == pytest.approx(float(ref), abs=1e-12)


def test_box_degenerate_corridor():
    e_box = 3.7
    out = box_method_density(0.2, 5.0, 0.0, 0.0, e_box=e_box)
    assert out["rho_tilde"] == pytest.approx(0.2, rel=1e-15)
    assert out["e_bound"] == pytest.approx(e_box / 125.0, rel=1e-15)


def test_box_corridor_scaling():
    a = box_method_density(0.2, 50.0, 2.0, 1.0, a=0.1)["corridor_term"]
    b = box_method_density(0.2, 50.0, 4.0, 1.0, a=0.1)["corridor_term"]
    assert b == pytest.approx(a / 4)


def test_box_dilute_choice():
    x, a = 1e-3, 1.0
    rho = x / a ** 3
    out = box_method_density(rho, a * x ** -10, a * x ** -5, 0.0, a=a)
    corr = -closed_form_bound(rho, a)["e_correction"]
    assert out["corridor_term"] <= 10 * rho * x ** 10
    assert out["corridor_term"] < corr
    assert 1 - out["rho_tilde"] / rho <= 10 * x ** 5


def test_box_geometry():
    with pytest.raises(GeometryInvalid):
        box_method_density(0.2, 5.0, 3.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-6, 1e-4), st.floats(0.5, 2.0))
def test_closed_form_monotone_in_a(rho, a):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lo = closed_form_bound(rho, a)["total"]
        hi = closed_form_bound(rho, a * 1.1)["total"]
    assert hi >= lo


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-4, 10.0), st.floats(1e-3, 10.0))
def test_pair_kernel_bounds(rho, r):
    val = float(pair_kernel(r, rho))
    assert -1e-12 * rho ** 2 <= val <= rho ** 2 * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.fractions(0, 2, max_denominator=84), st.fractions(0, 2, max_denominator=84),
       st.fractions(0, 10, max_denominator=4))
def test_reference_choice_is_optimal_3d(alpha, beta, delta):
    g, _ = gamma_at(3, {"alpha": alpha, "beta": beta, "delta": delta})
    assert g <= Fraction(12, 7)
