"""Acceptance gate: one test per numbered criterion, each printed as a pass/fail line in the summary."""

import io
import subprocess
import sys
from contextlib import redirect_stdout

import numpy as np
import pytest

from paraslant import cli
from paraslant.ambient import (canonical_paracosymplectic, check_axioms, check_killing_xi,
                               check_nearly_para_sasakian, check_nearly_paracosymplectic)
from paraslant.diffcalc import christoffels
from paraslant.report import FAIL, FLAGGED, NA, PASS
from paraslant.runner import run_scenario
from paraslant.scenario import BUILTINS, load, load_source
from paraslant.slant import check_prop31, check_prop32, slant_coefficient, slant_ratio
from paraslant.submanifold import TN_split, point_data
from paraslant.warped import WarpedSpec, build_warped_metric, check_prop41
from paraslant.warped import implied_zlnf

from conftest import builtin_run

AXIOM_IDS = ("ax-phi2", "ax-phixi", "ax-metric", "ax-eta-dual", "ax-antisym")


def claim_row(report, quantity):
    (row,) = [r for r in report.rows if r.check_id == f"claim:{quantity}"]
    return row


def test_structure_axioms(acceptance):
    acceptance(1, "canonical structure axioms, n = 1..3, 200 points, residual <= 1e-12")
    rng = np.random.default_rng(2024)
    for n in (1, 2, 3):
        s = canonical_paracosymplectic(n)
        pts = rng.uniform(-5, 5, size=(200, 2 * n + 1))
        rep = check_axioms(s, pts, tol=1e-12, rng=n)
        assert {r.check_id for r in rep.rows} == set(AXIOM_IDS)
        assert all(r.status == PASS for r in rep.rows)
        assert rep.max_residual() <= 1e-12


def test_nearly_paracosymplectic_and_killing(acceptance):
    acceptance(2, "nearly paracosymplectic and Killing pass; nearly para-Sasakian fails with residual >= 1")
    s = canonical_paracosymplectic(2)
    pts = np.random.default_rng(5).uniform(-3, 3, size=(20, 5))
    npc = check_nearly_paracosymplectic(s, pts, tol=1e-12, rng=1)
    kil = check_killing_xi(s, pts, tol=1e-12, rng=2)
    for rep in (npc, kil):
        assert all(r.status == PASS for r in rep.rows)
        assert rep.max_residual() == pytest.approx(0.0, abs=1e-12)
    nps = check_nearly_para_sasakian(s, pts, tol=1e-12, rng=3)
    first = [r for r in nps.rows if r.probe_index == 0]
    assert first and all(r.status == FAIL for r in first)
    assert all(r.lhs == 0.0 and r.rhs == pytest.approx(2.0) and r.residual >= 1.0 for r in first)


def _plane(a, b):
    return load({
        "schema": 1, "name": "plane", "ambient": {"canonical": {"n": 2}},
        "immersion": {"params": ["p", "q"], "components": ["p", "b*q", "a*q", "0", "0"],
                      "constants": {"a": a, "b": b}},
        "sampling": {"mode": "random", "seed": 1, "count": 5, "bounds": {"p": [-2, 2], "q": [-2, 2]}},
    })


def test_slant_closed_form(acceptance):
    acceptance(3, "synthetic plane: lambda_hat = a^2/(a^2-b^2) within 1e-9, slant identities <= 1e-8")
    rng = np.random.default_rng(3)
    done = 0
    while done < 20:
        b = rng.uniform(0.5, 3.0) * rng.choice([-1, 1])
        a = rng.uniform(0.5, 3.0) * rng.choice([-1, 1])
        if not abs(b) + 0.05 < abs(a):
            continue
        sc = _plane(float(a), float(b))
        pds = [point_data(sc.immersion, sc.frame, u) for u, _ in zip(sc.sampling.draw(), range(5))]
        rep = slant_coefficient(pds, (0, 1), rng=done)
        want = a * a / (a * a - b * b)
        assert rep.is_slant
        assert rep.lambda_hat == pytest.approx(want, abs=1e-9)
        for chk in (check_prop31, check_prop32):
            r = chk(pds, (0, 1), rep.lambda_hat, rng=done)
            assert all(row.status == PASS for row in r.rows)
            assert r.max_residual() <= 1e-8
        done += 1


def test_example_41_reconstruction(acceptance):
    acceptance(4, "first example: Gram, direction ratios, t^2 spectrum, flagged slant claim")
    sc, rep, pds = builtin_run("example-4.1")
    assert len(pds) == 50
    for pd in pds:
        v = pd.point_dict()["v"]
        assert np.allclose(pd.G, np.diag([2.0, -v * v, -v * v, 1.0]), atol=1e-9, rtol=0)
        assert slant_ratio(pd, pd.vec(0)) == pytest.approx(1.0, abs=1e-9)
        assert slant_ratio(pd, pd.vec(1)) == pytest.approx(0.5, abs=1e-9)
        assert slant_ratio(pd, pd.vec(2)) == pytest.approx(0.5, abs=1e-9)
    sl = slant_coefficient(pds, sc.D_lambda)
    for ev in sl.eigenvalues:
        assert np.allclose(sorted(ev), [0.0, 1.0, 1.0], atol=1e-8)
    row = claim_row(rep, "slant_lambda")
    assert row.status == FLAGGED and row.lhs == 0.5


def test_example_41_warp_detection(acceptance):
    acceptance(5, "first example: warp detection, mixed <= 1e-10, f = |v|, flagged warping claim")
    sc, rep, pds = builtin_run("example-4.1")
    det = rep.measurements["warp_detection"]
    assert det["mixed_residual"] <= 1e-10
    assert det["f_reference"] == 2.0 and det["reference"][0] == 2.0
    for p, f in zip(rep.measurements["points"], det["f_values"]):
        assert f == pytest.approx(abs(p["v"]), abs=1e-8)
    row = claim_row(rep, "warping_function")
    assert row.status == FLAGGED
    src = [c["source"] for c in rep.reference_claims if c["quantity"] == "warping_function"]
    assert src == ["with $f=v^{2}$"]


def test_example_42_reconstruction(acceptance):
    acceptance(6, "second example: G13 = 1, ratios 1/3 and 1/2, claimed split has mixed residual >= 0.99")
    sc, rep, pds = builtin_run("example-4.2")
    for pd in pds:
        assert pd.G[0, 2] == pytest.approx(1.0, abs=1e-10)
        assert slant_ratio(pd, pd.vec(0)) == pytest.approx(1 / 3, abs=1e-9)
        assert slant_ratio(pd, pd.vec(1)) == pytest.approx(0.5, abs=1e-9)
    assert claim_row(rep, "orthogonal_distributions").status == FLAGGED
    assert rep.measurements["warp_detection"]["mixed_residual"] >= 0.99


def _random_warps(rng, k):
    out = []
    for _ in range(k):
        c = rng.uniform(0.2, 1.5, size=4)
        templates = [
            f"exp({c[0]:.6f}*s)*({c[1]:.6f} + v^2)",
            f"{c[0]:.6f} + cosh({c[1]:.6f}*s) + {c[2]:.6f}*v^2",
            f"sqrt({c[0]:.6f} + v^2 + {c[1]:.6f}*s^2)",
            f"({c[0]:.6f} + sin({c[1]:.6f}*s)^2)*exp({c[2]:.6f}*v)",
            f"v^3 + {c[3]:.6f}*exp(-s)",
        ]
        out.append(templates[int(rng.integers(len(templates)))])
    return out


def test_prop41_intrinsic(acceptance):
    acceptance(7, "built warped metrics satisfy the connection formulas <= 1e-6; f = e^s gives 1 to 1e-9")
    rng = np.random.default_rng(77)
    warps = ["1", "v", "exp(s)"] + _random_warps(rng, 10)
    g_B = [["1", "0.1*v"], ["0.1*v", "2"]]
    g_F = [["-1", "0"], ["0", "-(1 + alpha^2)"]]
    for f in warps:
        spec = WarpedSpec(("s", "v"), g_B, ("alpha", "beta"), g_F, f)
        pts = np.column_stack([rng.uniform(-1, 1, 50), rng.uniform(0.5, 2.5, 50),
                               rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50)])
        rep = check_prop41(spec, pts, tol=1e-6)
        assert all(r.status == PASS for r in rep.rows), f
        assert rep.max_residual() <= 1e-6
        if f == "exp(s)":
            metric = build_warped_metric(spec)
            for p in pts:
                gam = christoffels(metric, spec.coords, p)
                assert gam[2, 0, 2] == pytest.approx(1.0, abs=1e-9)
                assert gam[3, 0, 3] == pytest.approx(1.0, abs=1e-9)


SECTION_IDS = ("prop-3.1", "prop-3.2", "thm-3.1", "thm-3.2", "lem-5.1a", "lem-5.1b", "lem-5.2", "thm-5.1",
               "thm-5.2", "thm-5.3")


def test_product_scenario(acceptance):
    acceptance(8, "totally geodesic product: h = 0, every theorem residual <= 1e-10, foliations pass")
    sc, rep, pds = builtin_run("product-tg")
    for pd in pds:
        for i in range(pd.m):
            for j in range(pd.m):
                assert np.linalg.norm(pd.h(i, j)) <= 1e-10
    for cid in SECTION_IDS:
        rows = rep.by_check(cid)
        assert rows, cid
        assert all(r.status == PASS and r.residual <= 1e-10 for r in rows), cid
    for cid in ("integrability", "tg-foliation"):
        rows = rep.by_check(cid)
        assert all(r.status == PASS for r in rows)
        assert {r.probe.split(":")[0] for r in rows} == {"D_lambda", "D_perp+xi"}
    for pd in pds:
        for z in range(pd.m):
            if z != sc.xi:
                assert implied_zlnf(pd, z, sc.xi) == pytest.approx(0.0, abs=1e-12)
    assert rep.passed


def test_internal_consistency(acceptance):
    acceptance(9, "lemma parts reproduce the combination <= 1e-9; T/N split vanishes in the canonical ambient")
    ran = 0
    for name in BUILTINS:
        sc, rep, pds = builtin_run(name)
        rows = [r for r in rep.by_check("cons-5.1") if r.status != NA]
        ran += len(rows)
        assert all(r.residual <= 1e-9 and r.status == PASS for r in rows), name
        for pd in pds:
            for i in range(pd.m):
                for j in range(pd.m):
                    T, N = TN_split(pd, pd.vec(i), pd.vec(j))
                    assert np.linalg.norm(T) <= 1e-9 and np.linalg.norm(N) <= 1e-9
    assert ran > 0


def _cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def test_determinism_and_exit_codes(acceptance, tmp_path):
    acceptance(10, "byte-identical JSON across runs and thread counts; exit codes 0/1/2")
    for name in BUILTINS:
        sc = load_source(f"builtin:{name}")
        a = run_scenario(sc).to_json()
        b = run_scenario(load_source(f"builtin:{name}")).to_json()
        c = run_scenario(sc, jobs=4).to_json()
        assert a == b == c, name
    code, out = _cli(["run", "builtin:product-tg"])
    assert code == 0
    proc = subprocess.run([sys.executable, "-m", "paraslant", "run", "builtin:product-tg"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == out
    bad = tmp_path / "bad-phi.json"
    bad.write_text("""{"schema": 1, "name": "bad-phi", "ambient": {"explicit": {"coords": ["x", "y", "t"],
      "phi": [["0","1","0"],["1","0","0"],["0","0","0"]], "g": [["1","0","0"],["0","1","0"],["0","0","1"]],
      "xi": ["0","0","1"], "eta": ["0","0","1"]}},
      "immersion": {"params": ["a","b","c"], "components": ["a","b","c"]},
      "sampling": {"mode": "explicit", "points": [[0,0,0]]}}""")
    assert _cli(["run", str(bad)])[0] == 1
    broken = tmp_path / "broken.json"
    broken.write_text('{"schema": 1, "ambient": {"canonical": {"n": 1}}, "immersion": {"params": ["a","b","c"],'
                      ' "components": ["a+", "b", "c"]}, "sampling": {"mode": "explicit", "points": [[0,0,0]]}}')
    proc = subprocess.run([sys.executable, "-m", "paraslant", "run", str(broken)], capture_output=True, text=True,
                          check=False)
    assert proc.returncode == 2
    assert "offset 2" in proc.stderr
