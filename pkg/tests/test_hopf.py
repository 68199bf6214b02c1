from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kappa_snyder import hopf
from kappa_snyder.momentum import compose
from kappa_snyder.numerics import I, DeformParams, RealizationSpec
from kappa_snyder.weyl import WeylAlgebra

MAG, UNIT = RealizationSpec.maggiore(), RealizationSpec.unit()
SNYDER2 = DeformParams([0, 0], Fraction(1, 10))
KAPPA3 = DeformParams([Fraction(1, 5), Fraction(1, 10), 0], 0)
MIXED3 = DeformParams([Fraction(1, 5), Fraction(1, 10), Fraction(-1, 20)], Fraction(1, 10))

vec3 = st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3).map(np.array)


def test_plane_waves_multiply_phases():
    zero = DeformParams([0, 0, 0], 0)
    k, q = np.array([0.1, 0.2, 0.3]), np.array([0.3, -0.1, 0.0])
    w = hopf.star_plane_waves(MAG, zero, hopf.PlaneWave(k, 2.0), hopf.PlaneWave(q, 0.5j))
    assert np.allclose(w.momentum, k + q) and w.amplitude == 1j
    w = hopf.star_plane_waves(MAG, MIXED3, hopf.PlaneWave(k), hopf.PlaneWave(np.zeros(3)))
    assert np.linalg.norm(w.momentum - k) <= 1e-12


def test_plane_wave_paths_agree():
    k, q = np.array([0.1, 0.2, 0.3]), np.array([0.3, -0.1, 0.0])
    exact = hopf.star_plane_waves(MAG, MIXED3, hopf.PlaneWave(k), hopf.PlaneWave(q)).momentum
    ode = hopf.star_plane_waves(MAG, MIXED3, hopf.PlaneWave(k), hopf.PlaneWave(q), method="ode").momentum
    assert np.linalg.norm(exact - ode) <= 1e-9


@settings(max_examples=10, deadline=None)
@given(vec3, vec3, vec3)
def test_kappa_law_is_associative(p, k, q):
    assert np.linalg.norm(hopf.associator_defect(MAG, KAPPA3, p, k, q)) <= 1e-12


def test_collinear_snyder_triple_is_associative():
    # along a single line the composition is a one-parameter group law
    w = np.array([0.0, 0.5])
    for spec in (MAG, UNIT):
        assert np.linalg.norm(hopf.associator_defect(spec, SNYDER2, w, w, w)) <= 1e-13


@pytest.mark.parametrize("spec,anchor", [(MAG, 0.003363383638440998), (UNIT, 0.0035547561813602012)],
                         ids=["maggiore", "unit"])
def test_snyder_associator_anchor(spec, anchor):
    p, k, q = np.array([0.0, 0.5]), np.array([0.3, 0.1]), np.array([-0.2, 0.4])
    value = np.linalg.norm(hopf.associator_defect(spec, SNYDER2, p, k, q))
    assert value == pytest.approx(anchor, rel=1e-8)


def test_nested_brackets_differ_by_associator():
    ms = [np.array([0.1, 0.2, 0.0]), np.array([-0.2, 0.1, 0.3]), np.array([0.3, 0.0, -0.1])]
    right = hopf.compose_nested(MAG, MIXED3, ms, "right")
    left = hopf.compose_nested(MAG, MIXED3, ms, "left")
    assert np.linalg.norm((right - left) - hopf.associator_defect(MAG, MIXED3, *ms)) <= 1e-13
    assert np.array_equal(hopf.compose_nested(MAG, MIXED3, ms), right)
    assert np.array_equal(hopf.compose_nested(MAG, MIXED3, ms, ((0, 1), 2)), left)


def test_nested_compositions_edge_cases():
    ms = [np.array([0.1, 0.2, 0.0]), np.array([-0.2, 0.1, 0.3])]
    assert np.array_equal(hopf.compose_nested(MAG, MIXED3, ms), compose(MAG, MIXED3, *ms).value)
    zero = DeformParams([0, 0, 0], 0)
    four = ms + ms
    assert np.allclose(hopf.compose_nested(UNIT, zero, four, "left"), sum(four))
    with pytest.raises(ValueError):
        hopf.compose_nested(MAG, MIXED3, ms[:1])


K3, Q3 = np.array([0.3, -0.2, 0.4]), np.array([-0.1, 0.5, 0.2])


@pytest.mark.parametrize("params", [DeformParams([0, 0, 0], Fraction(1, 10)), KAPPA3],
                         ids=["snyder", "kappa"])
def test_lorentz_leibniz_pure_cases(params):
    worst = max(hopf.lorentz_leibniz_defect(params, K3, Q3, m, v) for m in range(3) for v in range(m + 1, 3))
    assert worst <= 1e-9


def test_lorentz_leibniz_counit_legs():
    for m, v in ((0, 1), (1, 2)):
        assert hopf.lorentz_leibniz_defect(MIXED3, np.zeros(3), Q3, m, v) <= 1e-12
        assert hopf.lorentz_leibniz_defect(MIXED3, K3, np.zeros(3), m, v) <= 1e-12


def test_lorentz_leibniz_mixed_defect_is_third_order():
    # with both a and s switched on the rule fails at eps^3: halving eps divides it by 8
    base = DeformParams([Fraction(1, 2), Fraction(1, 5), 0], Fraction(2, 5))
    d = [max(hopf.lorentz_leibniz_defect(base.scaled(e), K3, Q3, 0, v) for v in (1, 2))
         for e in (Fraction(1, 5), Fraction(1, 10))]
    assert d[1] > 1e-7
    assert 6 <= d[0] / d[1] <= 10


def test_lorentz_leibniz_exact_polynomial_check():
    assert hopf.lorentz_leibniz_exact(DeformParams([Fraction(1, 5), Fraction(1, 10)], 0), 3, 3) == {}
    assert hopf.lorentz_leibniz_exact(DeformParams([0, 0], Fraction(1, 10)), 3, 3) == {}
    mixed = hopf.lorentz_leibniz_exact(DeformParams([Fraction(1, 5), Fraction(1, 10)], Fraction(1, 10)), 3, 3)
    assert set(mixed) == {3}
    assert mixed[3] == pytest.approx(0.09, rel=1e-12)


W2 = WeylAlgebra(2, 2)
U_VALUES = [Fraction(0), Fraction(1, 2), Fraction(1)]
PARAMS2 = DeformParams([Fraction(1, 3), Fraction(-1, 4)], Fraction(1, 5))


def test_star_with_constant_is_ordinary_product():
    f = W2.X[0] * W2.X[1] + W2.X[1] * 3
    c = W2.scalar(Fraction(2, 3))
    for u in U_VALUES:
        assert hopf.star_poly(c, f, u, PARAMS2) == f * Fraction(2, 3)
        assert hopf.star_poly(f, c, u, PARAMS2) == f * Fraction(2, 3)


@pytest.mark.parametrize("u", U_VALUES, ids=str)
def test_star_commutator_of_coordinates(u):
    X, a = W2.X, PARAMS2.a
    comm = hopf.star_poly(X[0], X[1], u, PARAMS2) - hopf.star_poly(X[1], X[0], u, PARAMS2)
    assert comm == ((X[1] * a[0] - X[0] * a[1]) * I).graded(1)


@pytest.mark.parametrize("u", U_VALUES, ids=str)
def test_star_matches_action_oracle_on_mixed_polynomials(u):
    X = W2.X
    f = X[0] * X[0] * X[1] + X[1] * Fraction(1, 2)
    g = X[1] * X[1] - X[0] * X[1] * X[1]
    assert hopf.star_poly(f, g, u, PARAMS2) == hopf.star_poly_oracle(f, g, u, PARAMS2)


def test_star_poly_rejects_bad_input():
    W4 = WeylAlgebra(2, 4)
    with pytest.raises(ValueError):
        hopf.star_poly(W4.X[0], W4.X[1], 0, PARAMS2)
    with pytest.raises(ValueError):
        hopf.star_poly(W2.D[0], W2.X[1], 0, PARAMS2)


def test_monomials_enumeration():
    monos = hopf.monomials(2, 3)
    assert len(monos) == 10 and monos[0] == (0, 0)
    assert [sum(m) for m in monos] == sorted(sum(m) for m in monos)
