"""Slant distributions: the operator t^2, the coefficient lambda and PR-anti-slant validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import numlin
from .errors import NoAdmissiblePoints
from .report import FLAGGED, NA, PASS, CheckReport, Row, judged
from .submanifold import NULL_TOL, PointData

EPS_CLASS = 1e-6
SLANT_TOL = 1e-8
N_RANDOM_PROBES = 10

INVARIANT = "invariant"
ANTI_INVARIANT = "anti-invariant"
PROPER_SLANT = "proper-slant"
NOT_SLANT = "not-slant"


def t_of(pd: PointData, w) -> np.ndarray:
    """t w = tangential part of phi w."""
    return pd.tangential(pd.phi(w))


def t_squared(pd: PointData, w) -> np.ndarray:
    return t_of(pd, t_of(pd, w))


def t_squared_matrix(pd: PointData, dist: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Matrix M with t^2 Z_a = sum_b M[b, a] Z_b + leakage_a for a, b in ``dist``.

    Returns ``(M, leakage)`` where ``leakage[a]`` is the Euclidean norm of the
    part of t^2 Z_a spanned by frame vectors outside the distribution.
    """
    dist = list(dist)
    if not dist:
        return np.zeros((0, 0)), np.zeros(0)
    cols = np.array([pd.frame_coeffs(t_squared(pd, pd.E[a])) for a in dist]).T  # m x k
    M = cols[dist, :]
    outside = np.ones(pd.m, dtype=bool)
    outside[dist] = False
    leak = np.linalg.norm((cols * outside[:, None]).T @ pd.E, axis=1)
    return M, leak


def slant_ratio(pd: PointData, w) -> Optional[float]:
    """g(tX,tX) / g(phiX,phiX); None for (near-)null phiX."""
    pw = pd.phi(w)
    den = pd.ip(pw, pw)
    if abs(den) < NULL_TOL:
        return None
    tw = pd.tangential(pw)
    return pd.ip(tw, tw) / den


def _probe_weights(pd: PointData, dist: Sequence[int], rng, n_random: int) -> list[tuple[str, np.ndarray]]:
    probes = []
    for a in dist:
        w = np.zeros(pd.m)
        w[a] = 1.0
        probes.append((pd.frame_names[a], w))
    for k in range(n_random):
        c = rng.standard_normal(len(dist))
        c /= np.linalg.norm(c)
        w = np.zeros(pd.m)
        w[list(dist)] = c
        probes.append((f"random combination {k}", w))
    return probes


@dataclass
class SlantReport:
    dist: tuple
    lambda_hat: float
    residual: float
    variance: float
    classification: str
    ratios: dict                      # name -> list of per-point ratios (None for null)
    t2_matrices: list
    eigenvalues: list                 # per point, sorted real parts
    eigen_imag: float
    leakage: float
    per_point_lambda: list
    lambda_nonnegative: bool
    tol: float = SLANT_TOL
    eps_class: float = EPS_CLASS
    notes: list = field(default_factory=list)

    @property
    def is_slant(self) -> bool:
        return self.classification != NOT_SLANT

    def ratio_spread(self, name: str) -> tuple[float, float]:
        vals = [r for r in self.ratios[name] if r is not None]
        return (min(vals), max(vals)) if vals else (float("nan"), float("nan"))

    def as_dict(self) -> dict:
        return {
            "distribution": list(self.dist),
            "lambda_hat": self.lambda_hat,
            "residual": self.residual,
            "per_point_variance": self.variance,
            "classification": self.classification,
            "lambda_nonnegative": self.lambda_nonnegative,
            "ratios": {k: [min(v2 for v2 in v if v2 is not None) if any(x is not None for x in v) else None,
                           max(v2 for v2 in v if v2 is not None) if any(x is not None for x in v) else None]
                       for k, v in self.ratios.items()},
            "t2_eigenvalues_first_point": self.eigenvalues[0] if self.eigenvalues else [],
            "t2_matrix_first_point": self.t2_matrices[0].tolist() if self.t2_matrices else [],
            "leakage": self.leakage,
        }


def classify(lambda_hat: float, residual: float, eps_class: float = EPS_CLASS, tol: float = SLANT_TOL) -> str:
    if residual > tol:
        return NOT_SLANT
    if abs(lambda_hat) <= eps_class:
        return ANTI_INVARIANT
    if abs(lambda_hat - 1.0) <= eps_class:
        return INVARIANT
    return PROPER_SLANT


def slant_coefficient(pds: Sequence[PointData], dist: Sequence[int], rng=0, *,
                      n_random: int = N_RANDOM_PROBES, tol: float = SLANT_TOL,
                      eps_class: float = EPS_CLASS) -> SlantReport:
    """Least-squares fit of t^2 X = lambda (X - eta(X) xi) over probes in ``dist``."""
    if not pds:
        raise NoAdmissiblePoints("slant coefficient needs at least one admissible point")
    dist = list(dist)
    if not dist:
        raise ValueError("empty distribution")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    names = [pds[0].frame_names[a] for a in dist]
    ratios: dict = {n: [] for n in names}
    mats, eigs, per_point, samples = [], [], [], []
    imag = leak_max = 0.0
    num = den = 0.0
    for pd in pds:
        M, leak = t_squared_matrix(pd, dist)
        ev = np.linalg.eigvals(M)
        imag = max(imag, float(np.max(np.abs(ev.imag))))
        mats.append(M)
        eigs.append(sorted(float(x) for x in ev.real))
        leak_max = max(leak_max, float(np.max(leak)))
        for n, a in zip(names, dist):
            ratios[n].append(slant_ratio(pd, pd.E[a]))
        pnum = pden = 0.0
        for _, w in _probe_weights(pd, dist, rng, n_random):
            X = pd.vec(w)
            PX = X - (pd.amb.eta @ X) * pd.amb.xi
            T2 = t_squared(pd, X)
            pnum += float(T2 @ PX)
            pden += float(PX @ PX)
            samples.append((X, PX, T2))
        per_point.append(pnum / pden if pden > 0 else float("nan"))
        num += pnum
        den += pden
    lam = num / den if den > 0 else float("nan")
    residual = max(float(np.linalg.norm(T2 - lam * PX) / max(np.linalg.norm(X), 1e-300))
                   for X, PX, T2 in samples)
    finite = [p for p in per_point if np.isfinite(p)]
    variance = float(np.var(finite)) if finite else float("nan")
    cls = classify(lam, residual, eps_class, tol)
    if cls != NOT_SLANT and variance > tol:
        cls = NOT_SLANT
    return SlantReport(tuple(names), lam, residual, variance, cls, ratios, mats, eigs, imag,
                       leak_max, per_point, bool(lam >= -eps_class), tol, eps_class)


def _pairs(pd: PointData, dist, rng, n_random):
    probes = _probe_weights(pd, dist, rng, n_random)
    frame = [p for p in probes if not p[0].startswith("random")]
    rand = [p for p in probes if p[0].startswith("random")]
    out = []
    for i, (na, wa) in enumerate(frame):
        for nb, wb in frame[i:]:
            out.append((f"X={na}, Y={nb}", wa, wb))
    for k in range(0, len(rand) - 1, 2):
        out.append((f"random pair {k // 2}", rand[k][1], rand[k + 1][1]))
    return out


def check_prop31(pds: Sequence[PointData], dist: Sequence[int], lam: float, rng=0, *,
                 tol: float = 1e-8, n_random: int = 4, gate: Optional[str] = None) -> CheckReport:
    """g(tX,tY) = lambda g(phiX,phiY) and g(nX,nY) = (1 - lambda) g(phiX,phiY)."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    rep = CheckReport()
    for pi, pd in enumerate(pds):
        pt = pd.point_dict()
        qi = 0
        for label, wa, wb in _pairs(pd, dist, rng, n_random):
            X, Y = pd.vec(wa), pd.vec(wb)
            (tX, nX), (tY, nY) = pd.split(pd.phi(X)), pd.split(pd.phi(Y))
            gpp = pd.ip(pd.phi(X), pd.phi(Y))
            l1, r1 = pd.ip(tX, tY), lam * gpp
            l2, r2 = pd.ip(nX, nY), (1.0 - lam) * gpp
            rep.append(judged("prop-3.1", pi, qi, f"g(tX,tY) = lambda g(phiX,phiY), {label}",
                              l1, r1, abs(l1 - r1), tol, gate=gate, point=pt))
            rep.append(judged("prop-3.1", pi, qi + 1, f"g(nX,nY) = (1-lambda) g(phiX,phiY), {label}",
                              l2, r2, abs(l2 - r2), tol, gate=gate, point=pt))
            qi += 2
    return rep


def prop32_vectors(pd: PointData, X, lam: float):
    """(t'nX, (1-lambda)(X - eta(X)xi), n'nX, -ntX)."""
    nX = pd.normal(pd.phi(X))
    t1, n1 = pd.split(pd.phi(nX))
    tX = pd.tangential(pd.phi(X))
    ntX = pd.normal(pd.phi(tX))
    target = (1.0 - lam) * (X - (pd.amb.eta @ X) * pd.amb.xi)
    return t1, target, n1, -ntX


def check_prop32(pds: Sequence[PointData], dist: Sequence[int], lam: float, rng=0, *,
                 tol: float = 1e-8, n_random: int = 4, gate: Optional[str] = None) -> CheckReport:
    """t'nX = (1 - lambda)(X - eta(X)xi) and n'nX = -ntX."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    rep = CheckReport()
    for pi, pd in enumerate(pds):
        pt = pd.point_dict()
        for qi, (label, w) in enumerate(_probe_weights(pd, dist, rng, n_random)):
            X = pd.vec(w)
            t1, target, n1, mntX = prop32_vectors(pd, X, lam)
            rep.append(judged("prop-3.2", pi, 2 * qi, f"t'nX = (1-lambda)(X - eta(X)xi), X={label}",
                              float(np.linalg.norm(t1)), float(np.linalg.norm(target)),
                              np.linalg.norm(t1 - target), tol, gate=gate, point=pt))
            rep.append(judged("prop-3.2", pi, 2 * qi + 1, f"n'nX = -ntX, X={label}",
                              float(np.linalg.norm(n1)), float(np.linalg.norm(mntX)),
                              np.linalg.norm(n1 - mntX), tol, gate=gate, point=pt))
    return rep


def slant_rows(report: SlantReport, pds: Sequence[PointData], declared: Optional[float] = None) -> list:
    """Rows for the slant definition; failure to be slant is FLAGGED, never FAIL."""
    rows = []
    rows.append(judged("def-2.2", -1, 0, f"t^2 = lambda(Id - eta(x)xi) on {{{', '.join(report.dist)}}}",
                       report.lambda_hat, declared, report.residual, report.tol, on_fail=FLAGGED,
                       note=f"classification {report.classification}"))
    rows.append(judged("def-2.2", -1, 1, "lambda constant across points (variance)",
                       report.variance, 0.0, report.variance, report.tol, on_fail=FLAGGED))
    rows.append(Row("def-2.2", -1, 2, "lambda >= 0", report.lambda_hat, 0.0,
                    max(0.0, -report.lambda_hat), report.eps_class,
                    PASS if report.lambda_nonnegative else FLAGGED))
    for pi, pd in enumerate(pds):
        ev = report.eigenvalues[pi]
        rows.append(Row("def-2.2", pi, 0, "t^2 eigenvalues on the distribution", ev, None,
                        float(np.ptp(ev)) if ev else 0.0, report.tol,
                        PASS if (not ev or np.ptp(ev) <= report.tol) else FLAGGED,
                        pd.point_dict(), "equal eigenvalues required for a slant distribution"))
        for qi, name in enumerate(report.dist):
            r = report.ratios[name][pi]
            if r is None:
                rows.append(Row("def-2.2", pi, qi + 1, f"ratio g(tX,tX)/g(phiX,phiX), X={name}", None,
                                report.lambda_hat, float("nan"), report.tol, NA, pd.point_dict(),
                                "null direction"))
                continue
            rows.append(judged("def-2.2", pi, qi + 1, f"ratio g(tX,tX)/g(phiX,phiX), X={name}", r,
                               report.lambda_hat, abs(r - report.lambda_hat), report.tol,
                               on_fail=FLAGGED, point=pd.point_dict()))
    return rows


@dataclass
class PRStatus:
    orthogonal: bool
    nondegenerate: bool
    anti_invariant: bool
    xi_tangent: bool
    direct_sum: bool
    slant: bool
    proper: bool
    mixed_totally_geodesic: bool

    @property
    def valid(self) -> bool:
        return all((self.orthogonal, self.nondegenerate, self.anti_invariant, self.xi_tangent,
                    self.direct_sum, self.slant))

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["valid"] = self.valid
        return d


def validate_pr_anti_slant(pds: Sequence[PointData], D_perp: Sequence[int], D_lambda: Sequence[int],
                           xi: Optional[int], slant: Optional[SlantReport], *, tol: float = 1e-9,
                           lam: Optional[float] = None) -> tuple[CheckReport, PRStatus]:
    """Rows for the PR-anti-slant conditions; failures are FLAGGED.

    ``D_perp`` may contain the xi field, in which case the anti-invariant part
    proper is ``D_perp`` without it.
    """
    rep = CheckReport()
    m = pds[0].m if pds else 0
    perp_eff = [a for a in D_perp if a != xi]
    lam_used = lam if lam is not None else (slant.lambda_hat if slant else float("nan"))

    groups = [("D_perp", perp_eff), ("D_lambda", list(D_lambda))]
    if xi is not None:
        groups.append(("xi", [xi]))
    ok = dict(orthogonal=True, nondegenerate=True, anti_invariant=True, xi_tangent=True, mixed=True)
    idx = set(perp_eff) | set(D_lambda) | ({xi} if xi is not None else set())
    disjoint = not (set(perp_eff) & set(D_lambda)) and xi not in D_lambda
    direct_sum = disjoint and len(idx) == m and len(perp_eff) + len(D_lambda) + (xi is not None) == m
    rep.append(Row("def-pr", -1, 0, "TM = D_perp + D_lambda + <xi> (direct, complete)",
                   len(perp_eff) + len(D_lambda) + (xi is not None), m, 0.0 if direct_sum else 1.0, 0.5,
                   PASS if direct_sum else FLAGGED,
                   note="" if disjoint else "index sets overlap"))
    for pi, pd in enumerate(pds):
        pt = pd.point_dict()
        cross = 0.0
        for gi in range(len(groups)):
            for gj in range(gi + 1, len(groups)):
                for a in groups[gi][1]:
                    for b in groups[gj][1]:
                        if a != b:
                            cross = max(cross, abs(pd.G[a, b]))
        row = judged("def-pr", pi, 1, "D_perp, D_lambda, <xi> mutually orthogonal", cross, 0.0, cross, tol,
                     on_fail=FLAGGED, point=pt)
        ok["orthogonal"] &= row.status == PASS
        rep.append(row)
        for qi, (gname, members) in enumerate(groups[:2]):
            if not members:
                rep.append(Row("def-pr", pi, 2 + qi, f"{gname} non-degenerate", None, None, 0.0, 0.0,
                               PASS, pt, "empty distribution"))
                continue
            sub = pd.G[np.ix_(members, members)]
            det = float(np.linalg.det(sub))
            thr = numlin.degeneracy_threshold(sub)
            good = thr > 0 and abs(det) >= thr
            ok["nondegenerate"] &= good
            rep.append(Row("def-pr", pi, 2 + qi, f"{gname} non-degenerate", det, thr, 0.0 if good else 1.0,
                           0.5, PASS if good else FLAGGED, pt))
        anti = max((float(np.linalg.norm(pd.tangential(pd.phi(pd.E[a])))) for a in D_perp), default=0.0)
        row = judged("def-pr", pi, 4, "phi(D_perp) normal to M", anti, 0.0, anti, tol, on_fail=FLAGGED,
                     point=pt, note="" if perp_eff else "vacuous: D_perp has no vector besides xi")
        ok["anti_invariant"] &= row.status == PASS
        rep.append(row)
        if xi is not None:
            d = float(np.linalg.norm(pd.E[xi] - pd.amb.xi))
            row = judged("def-pr", pi, 5, "frame field xi equals the structure vector field", d, 0.0, d, tol,
                         on_fail=FLAGGED, point=pt)
            ok["xi_tangent"] &= row.status == PASS
            rep.append(row)
        else:
            # xi tangent is required by the definition
            ok["xi_tangent"] = False
        mixed = max((float(np.linalg.norm(pd.h(a, b))) for a in D_lambda
                     for b in list(perp_eff) + ([xi] if xi is not None else [])), default=0.0)
        ok["mixed"] &= mixed <= tol
        rep.append(Row("def-pr", pi, 6, "mixed totally geodesic: max |h(X,Z)|", mixed, 0.0, mixed, tol,
                       PASS if mixed <= tol else NA, pt, "" if mixed <= tol else "property absent"))
    if xi is None:
        rep.append(Row("def-pr", -1, 1, "xi tangent to M", None, None, 1.0, 0.5, FLAGGED,
                       note="no frame field designated as xi"))
    is_slant = bool(slant and slant.is_slant)
    rep.append(Row("def-pr", -1, 2, "D_lambda slant", slant.lambda_hat if slant else None, lam,
                   slant.residual if slant else float("nan"), slant.tol if slant else 0.0,
                   PASS if is_slant else FLAGGED,
                   note=f"classification {slant.classification}" if slant else "no slant report"))
    eps = slant.eps_class if slant else 1e-6
    proper = (bool(perp_eff) and bool(D_lambda) and np.isfinite(lam_used)
              and abs(lam_used) > eps and abs(lam_used - 1.0) > eps)
    why = []
    if not perp_eff:
        why.append("D_perp reduces to <xi>" if D_perp else "D_perp empty")
    if not D_lambda:
        why.append("D_lambda empty")
    if np.isfinite(lam_used) and (abs(lam_used) <= eps or abs(lam_used - 1.0) <= eps):
        why.append("lambda in {0, 1}")
    rep.append(Row("def-pr", -1, 3, "proper: D_perp != 0, D_lambda != 0, lambda not in {0,1}",
                   lam_used, None, 0.0 if proper else 1.0, 0.5, PASS if proper else FLAGGED,
                   note="; ".join(why)))
    status = PRStatus(ok["orthogonal"], ok["nondegenerate"], ok["anti_invariant"], ok["xi_tangent"],
                      direct_sum, is_slant, bool(proper), ok["mixed"])
    rep.measurements["pr_anti_slant"] = status.as_dict()
    return rep, status
