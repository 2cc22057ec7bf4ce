import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraslant.report import NA, PASS, clean
from paraslant.scenario import load_source
from paraslant.submanifold import FrameField, Immersion, point_data
from paraslant.theorems import (CONSISTENCY_TOL, Roles, T_X_tX, check_section5, check_thm31, combination_thm52,
                                integrability_check, lemma_terms, residual_lemma51, residual_lemma52,
                                residual_thm31, residual_thm32, residual_thm51, residual_thm52, residual_thm53,
                                totally_geodesic_foliation_check)
from paraslant.warped import WarpData, detect_warped_structure

from conftest import builtin_run

GOLDEN = Path(__file__).parent / "golden" / "example41_point.json"
PIN = [2.0, 0.3, -0.5, 1.0]          # (v, alpha, beta, t)


def _pinned():
    sc = load_source("builtin:example-4.1")
    pd = point_data(sc.immersion, sc.frame, PIN)
    w = sc.warp
    det = detect_warped_structure(sc.immersion, sc.frame, w.base, w.fiber, [PIN], w.reference, w.f_reference)
    warp = WarpData(w.base, w.fiber, "detected", base_params=tuple(w.base), detection=det)
    return sc, pd, warp


def compute_pinned() -> dict:
    """Residual sides at the pinned point of the first example, keyed by identity and probe."""
    sc, pd, warp = _pinned()
    lam = sc.lam
    zl = warp.frame_derivatives(pd)
    out = {"zlnf": zl, "gram": pd.G}
    for x in warp.fiber:
        for z in warp.base:
            key = f"X={pd.frame_names[x]},Z={pd.frame_names[z]}"
            a, b = residual_lemma51(pd, lam, zl[z], x, z)
            out[f"lem-5.1a {key}"] = list(a)
            out[f"lem-5.1b {key}"] = list(b)
            out[f"lem-5.2 {key}"] = list(residual_lemma52(pd, x, z))
            out[f"thm-5.1 {key}"] = list(residual_thm51(pd, lam, zl[z], x, z))
            out[f"thm-5.2 {key}"] = list(residual_thm52(pd, lam, zl[z], x, z))
            lhs, rhs = residual_thm53(pd, lam, zl[z], x, z)
            out[f"thm-5.3 {key}"] = [lhs, rhs]
    rep = integrability_check([pd], sc.D_lambda, "D_lambda")
    out["integrability D_lambda"] = [r.residual for r in rep.sorted_rows()]
    return clean(out)


def test_pinned_point_matches_golden_file():
    got = compute_pinned()
    want = json.loads(GOLDEN.read_text())
    assert set(got) == set(want)
    for key in want:
        assert np.allclose(np.asarray(got[key], float), np.asarray(want[key], float), rtol=1e-9, atol=1e-12), key


def test_pinned_point_closed_forms():
    sc, pd, warp = _pinned()
    zl = warp.frame_derivatives(pd)
    assert zl == pytest.approx([0.5, 0.0, 0.0, 0.0], abs=1e-12)     # Z1(ln |v|) = 1/v
    a, _ = residual_lemma51(pd, 0.5, zl[0], 1, 0)
    assert (a.lhs, a.rhs) == pytest.approx((0.0, 1.0), abs=1e-12)
    assert residual_thm51(pd, 0.5, zl[0], 1, 0).rhs == pytest.approx(-2 / 3, abs=1e-12)
    assert residual_thm52(pd, 0.5, zl[0], 1, 0).rhs == pytest.approx(-1 / 3, abs=1e-12)


def test_thm32_on_xi_directions_of_first_example():
    sc, pd, _ = _pinned()
    r = residual_thm32(pd, 3, 3, 1)
    assert r.lhs == pytest.approx(0.0, abs=1e-14) and r.rhs == pytest.approx(0.0, abs=1e-14)


def test_thm51_along_xi_reduces_to_the_xi_component():
    sc, pd, warp = _pinned()
    zl = warp.frame_derivatives(pd)
    assert zl[sc.xi] == 0.0
    for x in warp.fiber:
        r = residual_thm51(pd, sc.lam, zl[sc.xi], x, sc.xi)
        assert r.rhs == 0.0
        assert abs(r.value) == pytest.approx(abs(pd.ip(T_X_tX(pd, x), pd.E[sc.xi])), abs=1e-15)


def test_thm31_with_equal_arguments_is_finite():
    sc, pd, _ = _pinned()
    r = residual_thm31(pd, 0.5, 1, 1, 3)
    assert np.isfinite(r.value)


def test_section5_gating_on_first_example():
    sc, rep, pds = builtin_run("example-4.1")
    pre = [r for r in rep.by_check("thm-5.2") if r.probe_index == 0]
    assert pre and all(r.status in (PASS, NA) for r in pre)
    for cid in ("lem-5.1a", "lem-5.2", "thm-5.1", "thm-5.3"):
        assert all(r.status == NA for r in rep.by_check(cid))
    assert all(r.status == PASS for r in rep.by_check("cons-5.1"))


def test_section5_without_warp_data():
    sc, rep, pds = builtin_run("synthetic-slant")
    rows = check_section5(pds, None, 2.0).rows
    assert {r.check_id for r in rows} == {"lem-5.1a", "lem-5.1b", "lem-5.2", "thm-5.1", "thm-5.2", "thm-5.3",
                                          "cons-5.1"}
    assert all(r.status == NA for r in rows)


def test_precondition_failure_marks_thm52_not_applicable():
    # first example with its own detected warp: h(X, Z) does not vanish on the fiber/base pairs
    sc, pd, warp = _pinned()
    rows = check_section5([pd], warp, sc.lam).rows
    pre = [r for r in rows if r.check_id == "thm-5.2" and r.probe_index == 0][0]
    body = [r for r in rows if r.check_id == "thm-5.2" and r.probe_index > 0]
    if pre.status == NA:
        assert all(r.status == NA for r in body)
    else:
        assert pre.residual <= pre.tol


def _twisted():
    amb = load_source("builtin:product-tg").ambient
    imm = Immersion(amb, ("s", "q", "u", "w"), ["u", "sqrt(2)*w", "0", "2*w", "0", "q", "s"])
    frame = FrameField(["A", "B", "C", "D"],
                       [["1", "0", "0", "0"], ["0", "0", "1", "0"], ["0", "1", "0", "u"], ["0", "0", "0", "1"]],
                       ("s", "q", "u", "w"))
    return point_data(imm, frame, [0.1, 0.2, 0.3, 0.4])


def test_integrability_of_coordinate_and_twisted_frames():
    sc, rep, pds = builtin_run("product-tg")
    assert integrability_check(pds[:3], [2, 3], "D").passed
    pd = _twisted()
    # [d_u, u d_w + d_q] = d_w lies outside span{d_u, u d_w + d_q}
    r = integrability_check([pd], [1, 2], "twisted")
    assert r.max_residual() > 0.1
    assert r.rows[0].status == "FLAGGED"


def test_direct_product_foliations():
    sc, rep, pds = builtin_run("product-tg")
    for dist in (sc.D_lambda, (1, 0)):
        assert totally_geodesic_foliation_check(pds[:3], dist, "d").passed


def test_thm31_rows_are_gated():
    sc, rep, pds = builtin_run("product-tg")
    r = check_thm31(pds[:2], Roles(sc.D_perp, sc.D_lambda, sc.xi, 2.0), gate="D_lambda not integrable")
    assert all(row.status == NA for row in r.rows)


# -- properties -----------------------------------------------------------------

weights4 = st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4)


def _curved_pd(c, u):
    amb = load_source("builtin:product-tg").ambient
    imm = Immersion(amb, ("s", "q", "u", "w"),
                    ["u", f"sqrt(2)*w + {c[0]}*u^2", f"{c[1]}*q*w", "2*w", f"{c[2]}*sin(u)", "q", "s"])
    return point_data(imm, FrameField.coordinate(("s", "q", "u", "w")), u)


coeff3 = st.lists(st.floats(-0.3, 0.3, allow_nan=False), min_size=3, max_size=3)
pts4 = st.lists(st.floats(-0.5, 0.5, allow_nan=False), min_size=4, max_size=4)


@settings(max_examples=40, deadline=None)
@given(coeff3, pts4, weights4, weights4, st.floats(0.1, 3.0), st.floats(-2, 2))
def test_lemma_parts_reproduce_the_combination(c, u, wx, wz, lam, zlnf):
    pd = _curved_pd(c, u)
    a, b = residual_lemma51(pd, lam, zlnf, wx, wz)
    comb = combination_thm52(pd, lam, zlnf, wx, wz)
    scale = max(1.0, *(abs(v) for v in (*a, *b, *comb)))
    assert abs((a.value + b.value) - comb.value) <= CONSISTENCY_TOL * scale


@settings(max_examples=30, deadline=None)
@given(coeff3, pts4, weights4, weights4, weights4)
def test_residuals_are_invariant_under_negated_probes(c, u, wx, wy, wz):
    pd = _curved_pd(c, u)
    nx, ny, nz = (-np.asarray(w) for w in (wx, wy, wz))
    # Z(ln f) is linear in Z, so it changes sign with Z
    pairs = [
        (residual_thm31(pd, 2.0, wx, wy, wz).value, residual_thm31(pd, 2.0, nx, ny, nz).value),
        (residual_thm32(pd, wz, wy, wx).value, residual_thm32(pd, nz, ny, nx).value),
        (residual_lemma52(pd, wx, wz).value, residual_lemma52(pd, nx, nz).value),
        (residual_thm52(pd, 2.0, 0.3, wx, wz).value, residual_thm52(pd, 2.0, -0.3, nx, nz).value),
    ]
    for p, q in pairs:
        assert abs(abs(p) - abs(q)) <= 1e-10 * max(1.0, abs(p))
    for a, b in zip(lemma_terms(pd, wx, wz, 2.0, 0.3).values(), lemma_terms(pd, nx, nz, 2.0, -0.3).values()):
        assert abs(abs(a) - abs(b)) <= 1e-10 * max(1.0, abs(a))
