"""Execute a scenario: sample points, run every check, assemble a deterministic report."""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import ambient as amb_checks
from . import slant as sl
from . import theorems as th
from . import warped as wp
from .catalog import BY_ID
from .diffcalc import eval_values
from .errors import NoAdmissiblePoints, ToolkitError
from .report import FAIL, FLAGGED, NA, PASS, CheckReport, Row, judged, with_tol
from .scenario import Scenario
from .submanifold import check_extrinsic, point_data

AXIOM_IDS = {"ax-phi2", "ax-phixi", "ax-metric", "ax-eta-dual", "ax-antisym", "def-pc", "def-npc", "def-nps",
             "prop-2.2"}
THEOREM_IDS = {"prop-3.1", "prop-3.2", "thm-3.1", "thm-3.2", "lem-5.1a", "lem-5.1b", "lem-5.2", "thm-5.1",
               "thm-5.2", "thm-5.3"}
# ambient classifications: failing one describes the structure, it is not a defect
CLASSIFICATIONS = {"def-pc": "paracosymplectic", "def-npc": "nearly paracosymplectic",
                   "def-nps": "nearly para-Sasakian"}
MAX_DRAWS_FACTOR = 20


def _seed(seed: int, group: str) -> list:
    return [int(seed), zlib.crc32(group.encode())]


def _point_dict(names, u) -> dict:
    return {n: float(x) for n, x in zip(names, u)}


@dataclass
class Prepared:
    """Admissible points (with their point data) and the rejected candidates."""

    points: list
    pds: list
    rejected: list


class Executor:
    def __init__(self, jobs: int):
        self.jobs = max(1, int(jobs))
        self.pool = ThreadPoolExecutor(max_workers=self.jobs) if self.jobs > 1 else None

    def map(self, fn, items):
        items = list(items)
        if self.pool is None:
            return [fn(x) for x in items]
        return list(self.pool.map(fn, items))

    def run(self, tasks: dict) -> dict:
        keys = sorted(tasks)
        results = self.map(lambda k: tasks[k](), keys)
        return dict(zip(keys, results))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def prepare_points(sc: Scenario, ex: Executor, seed: Optional[int] = None, count: Optional[int] = None) -> Prepared:
    s = sc.sampling
    names = s.names

    def attempt(u):
        try:
            if sc.immersion is not None:
                return point_data(sc.immersion, sc.frame, u), None
            sc.warped_spec.f_value(u)
            return None, None
        except ToolkitError as exc:
            return None, f"{type(exc).__name__}: {exc}"

    accepted, pds, rejected = [], [], []
    if s.mode == "explicit":
        cands = list(s.draw(count=count))
        for u, (pd, err) in zip(cands, ex.map(attempt, cands)):
            if err:
                rejected.append({"point": _point_dict(names, u), "reason": err})
            else:
                accepted.append(u)
                pds.append(pd)
    else:
        want = s.count if count is None else int(count)
        stream = s.draw(seed=seed)
        drawn = 0
        while len(accepted) < want and drawn < MAX_DRAWS_FACTOR * want:
            batch = [next(stream) for _ in range(want - len(accepted))]
            drawn += len(batch)
            for u, (pd, err) in zip(batch, ex.map(attempt, batch)):
                if err:
                    rejected.append({"point": _point_dict(names, u), "reason": err})
                else:
                    accepted.append(u)
                    pds.append(pd)
    if not accepted:
        raise NoAdmissiblePoints(f"{sc.name}: no admissible sample point ({len(rejected)} rejected)")
    return Prepared(accepted, pds, rejected)


class _Tols:
    def __init__(self, sc: Scenario, override: Optional[float]):
        self.sc, self.override = sc, override

    def __call__(self, cid: str) -> float:
        if self.override is not None:
            return float(self.override)
        per = (self.sc.checks or {}).get(cid)
        if per is not None:
            return per
        if cid in AXIOM_IDS:
            return self.sc.tolerances["axiom"]
        if cid in THEOREM_IDS:
            return self.sc.tolerances["theorem"]
        return self.sc.tolerances["default"]

    def explicit(self, cid: str) -> bool:
        return self.override is not None or (self.sc.checks or {}).get(cid) is not None


def _gate(*reasons) -> Optional[str]:
    parts = [r for r in reasons if r]
    return "; ".join(parts) if parts else None


def _classify_ambient_rows(rows: list) -> list:
    out = []
    for r in rows:
        kind = CLASSIFICATIONS.get(r.check_id)
        if kind and r.status == FAIL:
            r = replace(r, status=NA, note=_gate(r.note, f"structure is not {kind}"))
        out.append(r)
    return out


def _warp_data(sc: Scenario, det) -> Optional[wp.WarpData]:
    w = sc.warp
    if w is None:
        return None
    if w.mode == "declared":
        return wp.WarpData(w.base, w.fiber, "declared", f=w.f, constants=dict(sc.immersion.constants))
    base_params = w.base_params if w.base_params is not None else w.base
    return wp.WarpData(w.base, w.fiber, "detected", base_params=tuple(base_params), detection=det)


def _claims(sc: Scenario, prep: Prepared, slant, status, det, warp_ok: bool, tol: float):
    rows, entries = [], []
    for k, c in enumerate(sc.claims):
        q, claimed = c["quantity"], c["claimed"]
        note = ""
        if q == "slant_lambda":
            measured = None if slant is None else slant.lambda_hat
            ok = slant is not None and slant.is_slant and abs(float(claimed) - slant.lambda_hat) <= slant.eps_class
            res = float("nan") if slant is None else abs(float(claimed) - slant.lambda_hat)
            if slant is not None:
                ratios = {n: list(slant.ratio_spread(n)) for n in slant.dist}
                note = f"classification {slant.classification}; ratio range per field {ratios}"
                measured = {"lambda_hat": slant.lambda_hat, "classification": slant.classification,
                            "ratios": ratios, "t2_eigenvalues": slant.eigenvalues[0]}
        elif q == "warping_function":
            measured, ok, res = _compare_warp(sc, prep, claimed, det, warp_ok)
            note = "" if warp_ok else "no warped structure detected"
        elif q == "orthogonal_distributions":
            measured = None if status is None else status.orthogonal
            ok = measured is not None and bool(claimed) == measured
            res = 0.0 if ok else 1.0
        elif q == "pr_anti_slant_proper":
            measured = None if status is None else bool(status.valid and status.proper)
            ok = measured is not None and bool(claimed) == measured
            res = 0.0 if ok else 1.0
        else:  # warped_product
            measured = warp_ok
            ok = bool(claimed) == warp_ok
            res = 0.0 if ok else 1.0
        st = PASS if ok else FLAGGED
        rows.append(Row(f"claim:{q}", -1, k, f"reference claim {q} = {claimed!r}", claimed,
                        measured if not isinstance(measured, dict) else None, res, tol, st, note=note))
        entries.append({"quantity": q, "claimed": claimed, "measured": measured, "status": st,
                        "source": c["source"]})
    return rows, entries


def _compare_warp(sc: Scenario, prep: Prepared, claimed, det, warp_ok: bool):
    from .expr import parse

    e = parse(str(claimed))
    names = sc.sampling.names
    consts = sc.immersion.constants if sc.immersion else {}
    if det is not None:
        ref = np.asarray(det.reference)
        c_ref = float(eval_values([e], names, ref, consts)[0])
        measured_f = det.f_values
        claimed_f = [det.f_reference * float(eval_values([e], names, u, consts)[0]) / c_ref for u in prep.points]
    elif sc.warp is not None and sc.warp.mode == "declared":
        measured_f = [float(eval_values([sc.warp.f], names, u, consts)[0]) for u in prep.points]
        claimed_f = [float(eval_values([e], names, u, consts)[0]) for u in prep.points]
    else:
        return None, False, float("nan")
    rel = [abs(a - b) / max(abs(a), 1e-300) for a, b in zip(measured_f, claimed_f)]
    res = max(rel) if rel else float("nan")
    measured = {"f_values": measured_f[:5], "claimed_values_normalized": claimed_f[:5]}
    return measured, bool(warp_ok and res <= 1e-8), res


def run_scenario(sc: Scenario, *, seed: Optional[int] = None, points: Optional[int] = None,
                 tol: Optional[float] = None, jobs: int = 1) -> CheckReport:
    ex = Executor(jobs)
    try:
        return _run(sc, ex, seed, points, tol)
    finally:
        ex.close()


def _run(sc: Scenario, ex: Executor, seed, count, tol_override) -> CheckReport:
    base_seed = sc.seed if seed is None else int(seed)
    tols = _Tols(sc, tol_override)
    prep = prepare_points(sc, ex, seed, count)
    pds = prep.pds
    report = CheckReport(scenario=sc.name, digest=sc.digest, seed=base_seed)
    meas = report.measurements
    meas["points"] = [_point_dict(sc.sampling.names, u) for u in prep.points]
    meas["rejected_points"] = prep.rejected
    if tol_override is not None or count is not None or seed is not None:
        meas["overrides"] = {"seed": seed, "points": count, "tol": tol_override}

    if sc.immersion is None:
        _run_spec_only(sc, prep, report, tols)
        return _finish(sc, report, tols)

    s = sc.ambient
    amb_pts = [pd.x for pd in pds]
    rng = lambda group: np.random.default_rng(_seed(base_seed, group))  # noqa: E731
    roles_anti = tuple(list(sc.D_perp) + ([sc.xi] if sc.xi is not None and sc.xi not in sc.D_perp else []))

    # stage 1: independent computations
    stage1 = {
        "axioms": lambda: amb_checks.check_axioms(s, amb_pts, tols("ax-phi2"), rng("axioms")),
        "npc": lambda: amb_checks.check_nearly_paracosymplectic(s, amb_pts, tols("def-npc"), rng("def-npc")),
        "pc": lambda: amb_checks.check_paracosymplectic(s, amb_pts, tols("def-pc")),
        "nps": lambda: amb_checks.check_nearly_para_sasakian(s, amb_pts, tols("def-nps"), rng("def-nps")),
        "killing": lambda: amb_checks.check_killing_xi(s, amb_pts, tols("prop-2.2"), rng("prop-2.2")),
        "slant": lambda: (sl.slant_coefficient(pds, sc.D_lambda, rng("def-2.2")) if sc.D_lambda else None),
        "int_lambda": lambda: th.integrability_check(pds, sc.D_lambda, "D_lambda", tols("integrability")),
        "int_anti": lambda: th.integrability_check(pds, roles_anti, "D_perp+xi", tols("integrability")),
        "detect": lambda: (wp.detect_warped_structure(
            sc.immersion, sc.frame, sc.warp.base, sc.warp.fiber, prep.points, sc.warp.reference,
            sc.warp.f_reference, sc.warp.base_params, sc.warp.fiber_params)
            if sc.warp is not None and sc.warp.mode == "detect" else None),
    }
    r1 = ex.run(stage1)
    npc_rep: CheckReport = r1["npc"]
    npc_gate = None if not npc_rep.failed else "ambient is not nearly paracosymplectic"
    slant = r1["slant"]
    det = r1["detect"]
    warp_ok = sc.warp is not None and (sc.warp.mode == "declared" or det.ok(tols("def-warped")))
    warp = _warp_data(sc, det)
    lam = sc.lam if sc.lam is not None else (slant.lambda_hat if slant is not None else float("nan"))

    pr_rep, status = (sl.validate_pr_anti_slant(pds, sc.D_perp, sc.D_lambda, sc.xi, slant, tol=tols("def-pr"),
                                                lam=lam) if pds else (CheckReport(), None))
    pr_gate = None
    if status is None or not (status.valid and status.proper):
        bad = [k for k, v in (status.as_dict().items() if status else []) if v is False and k not in
               ("mixed_totally_geodesic",)]
        pr_gate = "not a proper PR-anti-slant submanifold" + (f" ({', '.join(sorted(bad))})" if bad else "")
    slant_gate = None if (slant is not None and slant.is_slant) else "distribution is not slant"
    int_l = th.distribution_ok(r1["int_lambda"])
    int_a = th.distribution_ok(r1["int_anti"])

    # stage 2: checks that depend on the gates
    warp_gate = None if warp_ok else "warped structure not established"
    sec5_gate = _gate(npc_gate, pr_gate, warp_gate,
                      None if (sc.warp and sc.xi in sc.warp.base) else "xi is not tangent to the base",
                      None if (sc.warp and set(sc.warp.fiber) == set(sc.D_lambda)
                               and set(sc.warp.base) == set(roles_anti))
                      else "warp split differs from the distributions")
    roles = th.Roles(tuple(sc.D_perp), tuple(sc.D_lambda), sc.xi, lam)
    stage2 = {
        "extrinsic": lambda: check_extrinsic(pds, rng("sub"), tols("sub-h-sym"), tn_gate=npc_gate),
        "prop31": lambda: (sl.check_prop31(pds, sc.D_lambda, lam, rng("prop-3.1"), tol=tols("prop-3.1"),
                                           gate=slant_gate) if sc.D_lambda else CheckReport()),
        "prop32": lambda: (sl.check_prop32(pds, sc.D_lambda, lam, rng("prop-3.2"), tol=tols("prop-3.2"),
                                           gate=slant_gate) if sc.D_lambda else CheckReport()),
        "tg_lambda": lambda: th.totally_geodesic_foliation_check(
            pds, sc.D_lambda, "D_lambda", tols("tg-foliation"), gate=None if int_l else "not integrable"),
        "tg_anti": lambda: th.totally_geodesic_foliation_check(
            pds, roles_anti, "D_perp+xi", tols("tg-foliation"), gate=None if int_a else "not integrable"),
        "thm31": lambda: th.check_thm31(pds, roles, rng("thm-3.1"), tols("thm-3.1"),
                                        gate=_gate(npc_gate, pr_gate, None if int_l else "D_lambda not integrable")),
        "prop41": lambda: (wp.check_prop41_induced(pds, warp, tols("prop-4.1"), gate=warp_gate)
                           if warp is not None else CheckReport()),
        "prop42": lambda: (wp.check_nonexistence_xi_in_fiber(pds, sc.xi, warp.base, warp.fiber, tols("prop-4.2"))
                           if warp is not None else CheckReport()),
        "sec5": lambda: th.check_section5(pds, warp, lam, rng("section5"), tols("thm-5.1"), gates={"*": sec5_gate},
                                          anti=roles_anti),
    }
    r2 = ex.run(stage2)
    tg_a = r2["tg_anti"]
    thm32_gate = _gate(npc_gate, pr_gate, None if th.distribution_ok(tg_a) else
                       "D_perp+xi is not a totally geodesic foliation")
    thm32 = th.check_thm32(pds, roles, rng("thm-3.2"), tols("thm-3.2"), gate=thm32_gate)

    for key in ("axioms", "npc", "pc", "nps", "killing", "int_lambda", "int_anti"):
        report.extend(_classify_ambient_rows(r1[key].rows))
    if slant is not None:
        report.extend(sl.slant_rows(slant, pds, sc.lam))
    report.extend(pr_rep.rows)
    for key in sorted(r2):
        report.extend(r2[key].rows)
    report.extend(thm32.rows)
    if det is not None:
        report.extend(wp.detection_rows(det, tols("def-warped")))
    rows, entries = _claims(sc, prep, slant, status, det, warp_ok, tols("def-2.2"))
    report.extend(rows)
    report.reference_claims.extend(entries)

    meas["gram"] = [pd.G for pd in pds]
    meas["lambda_declared"] = sc.lam
    if slant is not None:
        meas["slant"] = slant.as_dict()
    if status is not None:
        meas["pr_anti_slant"] = status.as_dict()
    if det is not None:
        meas["warp_detection"] = det.as_dict()
    meas["warp_established"] = warp_ok
    meas["gates"] = {"ambient": npc_gate, "pr_anti_slant": pr_gate, "slant": slant_gate, "section5": sec5_gate,
                     "thm-3.2": thm32_gate}
    return _finish(sc, report, tols)


def _spec_points(sc: Scenario, prep: Prepared) -> list:
    return [np.asarray(u, float) for u in prep.points]


def _run_spec_only(sc: Scenario, prep: Prepared, report: CheckReport, tols: _Tols) -> None:
    spec = sc.warped_spec
    pts = _spec_points(sc, prep)
    report.merge(wp.check_prop41(spec, pts, tols("prop-4.1")))
    ref = pts[0]
    det = wp.detect_in_spec(spec, pts, ref, spec.f_value(ref))
    report.extend(wp.detection_rows(det, tols("def-warped")))
    truth = [spec.f_value(u) for u in pts]
    res = max(abs(a - b) / b for a, b in zip(det.f_values, truth))
    report.append(judged("def-warped", -1, 4, "recovered f against the declared f", None, None, res,
                         tols("def-warped")))
    report.measurements["warp_detection"] = det.as_dict()
    report.measurements["f_declared"] = truth


def _finish(sc: Scenario, report: CheckReport, tols: _Tols) -> CheckReport:
    rows = report.rows
    if sc.checks is not None:
        keep = set(sc.checks)
        rows = [r for r in rows if r.check_id in keep or r.check_id.startswith("claim:")]
    rows = [with_tol(r, tols(r.check_id)) if tols.explicit(r.check_id) and r.check_id in BY_ID else r
            for r in rows]
    report.rows = rows
    return report
