import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraslant.ambient import canonical_paracosymplectic
from paraslant.diffcalc import central_difference
from paraslant.errors import RankDeficient
from paraslant.report import PASS
from paraslant.submanifold import (FrameField, Immersion, TN_split, check_extrinsic, lie_bracket, mean_curvature,
                                   point_data, second_fundamental_form, shape_operator, t1n1_decompose,
                                   tn_decompose, umbilicity)

AMB2 = canonical_paracosymplectic(2)
E5 = np.eye(5)


def _flat(components, params=("p", "q", "r"), frame=None, u=(0.1, 0.2, 0.3)):
    imm = Immersion(AMB2, params, components)
    return point_data(imm, frame or FrameField.coordinate(params), np.array(u, dtype=float))


def test_coordinate_plane_normals_are_remaining_directions():
    pd = _flat(["p", "q", "0", "0", "r"])            # x1, x2, t tangent
    span = np.vstack([pd.E, pd.normals])
    assert np.linalg.matrix_rank(span) == 5
    assert np.allclose(np.abs(pd.normals) @ np.ones(5), 1.0)
    assert set(np.flatnonzero(np.abs(pd.normals).sum(axis=0))) == {2, 3}


def test_affine_plane_is_totally_geodesic():
    pd = _flat(["p + 2*q", "q - r", "0", "3*r", "1 + p"], u=(0.4, -1.0, 2.0))
    for i in range(3):
        for j in range(3):
            assert np.array_equal(second_fundamental_form(pd, i, j), np.zeros(5))
    for zeta in pd.normals:
        assert np.allclose(shape_operator(pd, zeta, 0), 0.0)
    assert np.array_equal(mean_curvature(pd), np.zeros(5))


def test_anti_invariant_direction_has_zero_t():
    pd = _flat(["p", "q", "0", "0", "r"])
    t, n = tn_decompose(pd, 0)
    assert np.array_equal(t, np.zeros(5))
    assert np.allclose(n, E5[2])


def test_phi_of_normal_landing_in_tangent_space():
    pd = _flat(["p", "q", "0", "0", "r"])
    t1, n1 = t1n1_decompose(pd, E5[2])
    assert np.allclose(t1, E5[0]) and np.array_equal(n1, np.zeros(5))


def test_tn_split_is_zero_in_the_canonical_ambient():
    pd = _flat(["p", "q^2", "sin(r)", "p*q", "r"])
    T, N = TN_split(pd, pd.vec(0), pd.vec(2))
    assert not T.any() and not N.any()


def test_coordinate_frame_brackets_vanish():
    pd = _flat(["p", "q^2", "sin(r)", "p*q", "r"])
    assert np.array_equal(lie_bracket(pd, 0, 1), np.zeros(5))


def test_twisted_frame_bracket():
    # frame {d_p, p d_r + d_q, d_r}: [d_p, p d_r + d_q] = d_r
    frame = FrameField(["A", "B", "C"], [["1", "0", "0"], ["0", "1", "p"], ["0", "0", "1"]], ("p", "q", "r"))
    pd = _flat(["p", "q", "0", "0", "r"], frame=frame)
    assert np.allclose(lie_bracket(pd, 0, 1), pd.J @ [0, 0, 1.0])


def test_rank_deficient_immersion_is_rejected():
    with pytest.raises(RankDeficient):
        _flat(["p + q", "p + q", "0", "0", "r"])


def test_first_example_gram_matches_expansion():
    from paraslant.scenario import load_source

    sc = load_source("builtin:example-4.1")
    for v in (1.5, 2.0, 2.9):
        pd = point_data(sc.immersion, sc.frame, [v, 0.3, -0.5, 1.0])
        assert np.allclose(pd.G, np.diag([2, -v * v, -v * v, 1]), atol=1e-12)


def test_umbilical_sphere_like_surface():
    # x1^2 + x2^2 + t^2 = 1 graph over (p, q) is umbilical along its position normal
    pd = _flat(["p", "q", "0", "0", "sqrt(1 - p^2 - q^2)"], params=("p", "q"), u=(0.2, 0.1))
    nu = pd.x.copy()
    _, res = umbilicity(pd, nu)
    assert res <= 1e-12


# -- Weingarten against finite differences of a genuine normal field --------------------


def _curved(c):
    return Immersion(AMB2, ("p", "q", "r"),
                     ["p", "q", f"{c[0]}*p^2 + {c[1]}*q*r", f"{c[2]}*sin(p) + {c[3]}*r*q", "r"])


def test_weingarten_tangential_part():
    imm = _curved([0.3, -0.2, 0.25, 0.1])
    frame = FrameField.coordinate(("p", "q", "r"))
    u0 = np.array([0.2, -0.1, 0.3])
    pd = point_data(imm, frame, u0)
    c = np.array([0.3, -0.7, 1.0, 0.4, 0.2])

    def zeta(u):
        return point_data(imm, frame, u).normal(c)

    dz = central_difference(zeta, u0, 1e-5)             # 5 x 3, flat ambient
    for k in range(3):
        w = pd.tangential(dz[:, k])
        assert np.allclose(w, -pd.A(zeta(u0), k), atol=1e-8)


def test_second_fundamental_form_against_finite_differences():
    imm = _curved([0.4, 0.3, -0.2, 0.5])
    frame = FrameField.coordinate(("p", "q", "r"))
    u0 = np.array([0.1, 0.2, -0.3])
    pd = point_data(imm, frame, u0)
    dJ = central_difference(lambda u: point_data(imm, frame, u).J, u0, 1e-5)   # 5 x 3 x 3
    for i in range(3):
        for j in range(3):
            assert np.allclose(pd.h(i, j), pd.normal(dJ[:, j, i]), atol=1e-8)


# -- properties ---------------------------------------------------------------------

coeffs = st.lists(st.floats(-0.4, 0.4, allow_nan=False), min_size=4, max_size=4)
params = st.lists(st.floats(-0.5, 0.5, allow_nan=False), min_size=3, max_size=3)


@settings(max_examples=40, deadline=None)
@given(coeffs, params, st.integers(0, 1000))
def test_extrinsic_identities_hold_on_curved_immersions(c, u, seed):
    pd = point_data(_curved(c), FrameField.coordinate(("p", "q", "r")), np.array(u))
    rep = check_extrinsic([pd], np.random.default_rng(seed), tol=1e-9, pairs=50)
    assert {r.check_id for r in rep.rows} >= {"sub-h-sym", "sub-shape", "sub-t-antisym", "sub-split", "sub-TN",
                                             "sub-mean"}
    assert all(r.status == PASS for r in rep.rows)


@settings(max_examples=40, deadline=None)
@given(coeffs, params, st.lists(st.floats(-5, 5), min_size=5, max_size=5))
def test_split_reassembles_exactly(c, u, w):
    pd = point_data(_curved(c), FrameField.coordinate(("p", "q", "r")), np.array(u))
    t, n = pd.split(w)
    assert np.max(np.abs(t + n - np.asarray(w))) <= 1e-12
    assert np.max(np.abs(pd.E @ pd.amb.g @ n)) <= 1e-10 * max(1.0, np.max(np.abs(w)))
