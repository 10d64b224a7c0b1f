import numpy as np
import pytest

import harmomorph as hm
from harmomorph.errors import ActionMismatch, OffManifold, RetractUndefined
from harmomorph.spaces import (
    constraint_residual,
    from_complex,
    inner,
    random_group,
    to_complex,
)

ALL_KINDS = list(hm.SpaceKind)


def all_spaces(n=2):
    return [hm.AmbientSpace(kind, n, 2 * n) for kind in ALL_KINDS]


def unit_real_vector(space, complex_index):
    v = np.zeros(space.embedding_dim)
    v[2 * (complex_index - 1)] = 1.0
    return v


def test_signature_examples():
    # e1 in flat C^6: +1; e1 in C^6_1: -1; z21 direction in quaternionic C^{2x6}_1: -1
    flat = hm.AmbientSpace.flat_complex(3)
    e1 = unit_real_vector(flat, 1)
    assert inner(flat, e1, e1) == 1.0

    flat1 = hm.AmbientSpace.flat_complex_indefinite(3)
    assert inner(flat1, e1, e1) == -1.0

    quat1 = hm.AmbientSpace.flat_quaternionic_indefinite(6)
    z21 = unit_real_vector(quat1, quat1.ncols + 1)  # row 2, column 1
    assert inner(quat1, z21, z21) == -1.0
    z22 = unit_real_vector(quat1, quat1.ncols + 2)  # row 2, column 2
    assert inner(quat1, z22, z22) == 1.0


def test_random_point_constraints_and_determinism():
    for space in all_spaces():
        p1 = hm.random_point(space, 7)
        p2 = hm.random_point(space, 7)
        assert np.array_equal(p1, p2)
        if space.is_sphere:
            assert abs(inner(space, p1, p1) - 1.0) <= 1e-14
        elif space.is_pseudosphere:
            assert abs(inner(space, p1, p1) + 1.0) <= 1e-14
        elif space.is_indefinite:
            assert inner(space, p1, p1) < 0


def test_tangent_project_sphere():
    space = hm.AmbientSpace.sphere_complex(2)
    p = hm.random_point(space, 1)
    tv = hm.tangent_project(space, p, p)
    assert np.max(np.abs(tv.dir)) <= 1e-14

    rng = np.random.default_rng(2)
    v = rng.standard_normal(space.embedding_dim)
    v -= inner(space, v, p) * p
    tv = hm.tangent_project(space, p, v)
    assert np.max(np.abs(tv.dir - v)) <= 1e-12


def test_tangent_project_pseudosphere_radial_kill():
    space = hm.AmbientSpace.pseudosphere_complex(2)
    p = hm.random_point(space, 3)
    tv = hm.tangent_project(space, p, p)
    assert np.max(np.abs(tv.dir)) <= 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_tangent_project_idempotent_and_orthogonal(kind):
    space = hm.AmbientSpace(kind, 2, 4)
    rng = np.random.default_rng(11)
    for _ in range(100):
        p = hm.random_point(space, rng)
        v = rng.standard_normal(space.embedding_dim)
        tv = hm.tangent_project(space, p, v)
        twice = hm.tangent_project(space, p, tv.dir)
        assert np.max(np.abs(twice.dir - tv.dir)) <= 1e-10
        if space.is_curved:
            # metric-orthogonal to the constraint gradient (2 eta p)
            assert abs(inner(space, tv.dir, p)) <= 1e-10 * max(1.0, np.linalg.norm(v))


def test_tangent_project_off_manifold():
    space = hm.AmbientSpace.sphere_complex(2)
    with pytest.raises(OffManifold):
        hm.tangent_project(space, 1.5 * hm.random_point(space, 0), np.ones(8))


def test_retract_examples():
    sphere = hm.AmbientSpace.sphere_complex(2)
    x = np.zeros(8)
    x[0] = 2.0
    assert np.allclose(hm.retract(sphere, x), x / 2.0)

    pseudo = hm.AmbientSpace.pseudosphere_complex(2)
    p = hm.random_point(pseudo, 5)
    assert np.allclose(hm.retract(pseudo, 2.0 * p), p)
    with pytest.raises(RetractUndefined):
        bad = np.zeros(8)
        bad[2] = 1.0  # <<x,x>> = +1
        hm.retract(pseudo, bad)
    with pytest.raises(RetractUndefined):
        hm.retract(sphere, np.zeros(8))

    flat = hm.AmbientSpace.flat_complex(2)
    v = np.arange(8.0)
    assert np.array_equal(hm.retract(flat, v), v)


@pytest.mark.parametrize("kind", [hm.SpaceKind.SPHERE_COMPLEX, hm.SpaceKind.PSEUDOSPHERE_COMPLEX])
def test_retract_second_order_along_tangents(kind):
    space = hm.AmbientSpace(kind, 2, 4)
    rng = np.random.default_rng(13)
    for _ in range(20):
        p = hm.random_point(space, rng)
        v = rng.standard_normal(space.embedding_dim)
        x = hm.tangent_project(space, p, v).dir
        norm = np.linalg.norm(x)
        if norm < 1e-8:
            continue
        x = x / norm
        for eps in (1e-3, 1e-4):
            moved = hm.retract(space, p + eps * x)
            defect = np.linalg.norm(moved - (p + eps * x))
            assert defect <= 10 * eps**2


def test_group_act_s1():
    space = hm.AmbientSpace.sphere_complex(2)
    p = hm.random_point(space, 17)
    assert np.allclose(hm.group_act(space, hm.GroupElement.s1(0.0), p), p)
    flipped = hm.group_act(space, hm.GroupElement.s1(np.pi), p)
    assert np.max(np.abs(flipped + p)) <= 1e-12
    assert abs(inner(space, flipped, flipped) - 1.0) <= 1e-12


def test_group_act_s3_norm_preservation():
    space = hm.AmbientSpace.sphere_quaternionic(2)
    rng = np.random.default_rng(19)
    for _ in range(50):
        p = hm.random_point(space, rng)
        g = random_group(space, rng)
        q = hm.group_act(space, g, p)
        assert abs(inner(space, q, q) - inner(space, p, p)) <= 1e-12


@pytest.mark.parametrize(
    "kind",
    [
        hm.SpaceKind.SPHERE_COMPLEX,
        hm.SpaceKind.PSEUDOSPHERE_COMPLEX,
        hm.SpaceKind.SPHERE_QUATERNIONIC,
        hm.SpaceKind.PSEUDOSPHERE_QUATERNIONIC,
    ],
)
def test_group_act_preserves_inner(kind):
    space = hm.AmbientSpace(kind, 2, 4)
    rng = np.random.default_rng(23)
    for _ in range(25):
        v = rng.standard_normal(space.embedding_dim)
        w = rng.standard_normal(space.embedding_dim)
        g = random_group(space, rng)
        gv = hm.group_act(space, g, v)
        gw = hm.group_act(space, g, w)
        assert abs(inner(space, gv, gw) - inner(space, v, w)) <= 1e-12 * max(
            1.0, abs(inner(space, v, w))
        )


def test_group_action_mismatches():
    sphere_q = hm.AmbientSpace.sphere_quaternionic(2)
    with pytest.raises(ActionMismatch):
        hm.group_act(sphere_q, hm.GroupElement.s1(0.3), hm.random_point(sphere_q, 0))
    sphere_c = hm.AmbientSpace.sphere_complex(2)
    with pytest.raises(ActionMismatch):
        hm.group_act(sphere_c, hm.GroupElement.s3([1, 0, 0, 0]), hm.random_point(sphere_c, 0))
    flat = hm.AmbientSpace.flat_complex(2)
    with pytest.raises(ActionMismatch):
        hm.group_act(flat, hm.GroupElement.s1(0.3), hm.random_point(flat, 0))


def test_unit_quaternion_invariant():
    with pytest.raises(ValueError):
        hm.GroupElement.s3([1.0, 1.0, 0.0, 0.0])
    g = hm.GroupElement.s3(np.array([0.5, 0.5, 0.5, 0.5]))
    assert abs(np.linalg.norm(g.quat) - 1.0) <= 1e-12


def test_complex_view_roundtrip():
    x = np.arange(8.0)
    assert np.array_equal(from_complex(to_complex(x)), x)


def test_constraint_residual_flat_is_zero():
    flat = hm.AmbientSpace.flat_complex(2)
    assert constraint_residual(flat, np.ones(8)) == 0.0


def test_dual_pairing_is_involution():
    for space in all_spaces():
        assert space.dual().dual() == space
        assert space.dual().kind != space.kind
        assert space.dual().m == space.m
