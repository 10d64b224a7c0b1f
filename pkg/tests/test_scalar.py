import numpy as np
import pytest

import harmomorph as hm
from harmomorph import scalar as sc
from harmomorph.errors import DimensionMismatch, DivisionByZero

from oracles import fd_jet, jet_agreement


def test_monomial_value_and_wirtinger():
    # z1 * zbar4 on C^6 at z = (1, 0, 0, i, 0, 0)
    f = sc.z(1) * sc.zbar(4)
    p = np.zeros(12)
    p[0] = 1.0  # z1 = 1
    p[7] = 1.0  # z4 = i
    jet = hm.evaluate_jet2(f, p)
    assert jet.value == pytest.approx(-1j)
    w = hm.wirtinger_view(jet, 6)
    assert w.dz[0] == pytest.approx(-1j)  # d/dz1 = zbar4
    assert np.allclose(np.delete(w.dz, 0), 0.0)


def test_inner_square_jet():
    # <z,z> on C^2 at z = (1, i): value 2, real gradient 2 * coords
    f = sc.inner_square(2)
    p = np.array([1.0, 0.0, 0.0, 1.0])
    jet = hm.evaluate_jet2(f, p)
    assert jet.value == pytest.approx(2.0)
    assert np.allclose(jet.grad, 2.0 * p)
    assert np.allclose(jet.hess, 2.0 * np.eye(4))


def test_quotient_on_sphere_point_matches_fd():
    f = sc.z(1) * sc.zbar(2) / sc.inner_square(2)
    p = np.array([2**-0.5, 0.0, 2**-0.5, 0.0])
    jet = hm.evaluate_jet2(f, p)
    assert jet.value == pytest.approx(0.5)
    assert jet_agreement(f, p, jet) <= 1e-9


def test_wirtinger_coordinate_deltas():
    # d z_j / d z_k = delta_jk and d z_j / d zbar_k = 0
    p = np.random.default_rng(0).standard_normal(8)
    for j in range(1, 5):
        w = hm.wirtinger_view(hm.evaluate_jet2(sc.z(j), p), 4)
        expect = np.zeros(4, dtype=complex)
        expect[j - 1] = 1.0
        assert np.allclose(w.dz, expect) and np.allclose(w.dzbar, 0.0)
        wb = hm.wirtinger_view(hm.evaluate_jet2(sc.zbar(j), p), 4)
        assert np.allclose(wb.dzbar, expect) and np.allclose(wb.dz, 0.0)


def test_wirtinger_abs_square_flat_tau():
    # |z1|^2 has d^2/dz1 dzbar1 = 1, so the flat Laplacian is 4
    f = sc.z(1) * sc.zbar(1)
    p = np.array([0.3, -0.7, 1.1, 0.2])
    w = hm.wirtinger_view(hm.evaluate_jet2(f, p), 2)
    assert w.dzdzbar[0, 0] == pytest.approx(1.0)
    assert 4 * np.trace(w.dzdzbar) == pytest.approx(4.0)


def test_product_rule_leibniz():
    rng = np.random.default_rng(2)
    f = sc.z(1) * sc.zbar(2) + 2.5 * sc.z(2) ** 2
    g = sc.inner_square(2) / (sc.z(1) + 3.0)
    for _ in range(50):
        p = rng.standard_normal(4)
        jf = hm.evaluate_jet2(f, p)
        jg = hm.evaluate_jet2(g, p)
        combined = jf * jg
        direct = hm.evaluate_jet2(f * g, p)
        assert abs(combined.value - direct.value) <= 1e-12 * (1 + abs(direct.value))
        assert np.max(np.abs(combined.grad - direct.grad)) <= 1e-12 * (1 + np.max(np.abs(direct.grad)))
        assert np.max(np.abs(combined.hess - direct.hess)) <= 1e-12 * (1 + np.max(np.abs(direct.hess)))


def test_conjugation_symmetry():
    rng = np.random.default_rng(3)
    f = (sc.z(1) * sc.zbar(2) + (1 + 2j) * sc.z(2)) / sc.inner_square(2)
    fc = hm.conjugate(f)
    for _ in range(20):
        p = rng.standard_normal(4)
        a = hm.evaluate_jet2(f, p).conjugated()
        b = hm.evaluate_jet2(fc, p)
        assert abs(a.value - b.value) == 0.0
        assert np.array_equal(a.grad, b.grad)
        assert np.array_equal(a.hess, b.hess)


def test_hessian_exactly_symmetric():
    rng = np.random.default_rng(4)
    f = (sc.z(1) ** 3 * sc.zbar(2) + sc.z(2)) / (sc.inner_square(2) + 1.0)
    for _ in range(10):
        p = rng.standard_normal(4)
        h = hm.evaluate_jet2(f, p).hess
        assert np.array_equal(h, h.T)


def test_division_by_zero_raises():
    f = sc.z(1) / sc.z(2)
    p = np.array([1.0, 0.0, 0.0, 0.0])
    with pytest.raises(DivisionByZero):
        hm.evaluate_jet2(f, p)
    with pytest.raises(DivisionByZero):
        sc.evaluate_value(f, p)
    with pytest.raises(DivisionByZero):
        sc.evaluate_jet1(f, p)


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        hm.evaluate_jet2(sc.z(1), np.zeros(3))
    with pytest.raises(DimensionMismatch):
        hm.evaluate_jet2(sc.z(5), np.zeros(4))
    with pytest.raises(DimensionMismatch):
        hm.evaluate_jet2(sc.inner_square(3), np.zeros(4))


def test_power_and_negative_exponent_rules():
    with pytest.raises(ValueError):
        sc.Power(sc.z(1), 0)
    f = sc.z(1) ** 3
    p = np.array([2.0, 0.0, 0.0, 0.0])
    jet = hm.evaluate_jet2(f, p)
    assert jet.value == pytest.approx(8.0)
    assert jet.grad[0] == pytest.approx(12.0)
    assert jet.hess[0, 0] == pytest.approx(12.0)


def test_jet1_and_value_paths_agree_with_jet2():
    rng = np.random.default_rng(5)
    f = (sc.z(1) * sc.zbar(2) + 2.0) ** 2 / sc.inner_square(2)
    for _ in range(20):
        p = rng.standard_normal(4)
        jet = hm.evaluate_jet2(f, p)
        v1, g1 = sc.evaluate_jet1(f, p)
        assert v1 == pytest.approx(jet.value, rel=1e-14)
        assert np.allclose(g1, jet.grad, rtol=1e-13, atol=1e-13)
        assert sc.evaluate_value(f, p) == pytest.approx(jet.value, rel=1e-14)


def test_fd_agreement_representative_fields():
    # one member per space kind, a handful of points each; the full-catalog
    # sweep at 100 points per field lives in the acceptance suite
    rng = np.random.default_rng(6)
    for kind in hm.SpaceKind:
        space = hm.AmbientSpace(kind, 2, 4)
        member = hm.catalog(space).members[0]
        for _ in range(5):
            p = hm.random_point(space, rng)
            jet = hm.evaluate_jet2(member, p)
            assert jet_agreement(member, p, jet) <= 1e-7


def test_fd_jet_oracle_on_known_polynomial():
    # oracle sanity: exact quadratic jets must be reproduced to ~1e-9
    f = sc.z(1) * sc.zbar(2)
    p = np.array([0.4, -0.2, 0.9, 1.3])
    v, g, h = fd_jet(f, p)
    jet = hm.evaluate_jet2(f, p)
    assert abs(v - jet.value) <= 1e-12
    assert np.max(np.abs(g - jet.grad)) <= 1e-9
    assert np.max(np.abs(h - jet.hess)) <= 1e-9
