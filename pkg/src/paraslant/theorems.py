"""Residuals of the integrability, foliation and warped-product identities.

Every identity is evaluated as a signed ``lhs - rhs`` (or a vector difference)
from frame data at one point. Vector arguments are frame weights, so a probe
``X`` is the constant-coefficient combination ``sum_a w_a Z_a``; this keeps
``nabla~_X Y`` meaningful.

Conventions: ``|X|^2`` is the signed value ``g(X, X)`` and every ``A_zeta``
pairing is read as ``g(A_zeta U, V) = g(h(U, V), zeta)``, so zeta need not be
normal (its tangential part drops out).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .report import FAIL, FLAGGED, NA, PASS, CheckReport, Row, judged
from .submanifold import PointData, TN_split, component_inside, component_outside, lie_bracket
from .warped import WarpData

CONSISTENCY_TOL = 1e-9


class Residual(NamedTuple):
    lhs: float
    rhs: float

    @property
    def value(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class Roles:
    """Frame indices of the distributions and the declared slant coefficient."""

    D_perp: tuple
    D_lambda: tuple
    xi: Optional[int]
    lam: float

    @property
    def anti(self) -> tuple:
        """D_perp together with xi."""
        out = list(self.D_perp)
        if self.xi is not None and self.xi not in out:
            out.append(self.xi)
        return tuple(out)


# -- building blocks -----------------------------------------------------------------


def _t(pd: PointData, v) -> np.ndarray:
    return pd.tangential(pd.phi(v))


def _n(pd: PointData, v) -> np.ndarray:
    return pd.normal(pd.phi(v))


def g_shape(pd: PointData, zeta, U, V) -> float:
    """g(A_zeta U, V) for ambient tangent vectors U, V, through h."""
    return pd.ip(pd.h(pd.frame_coeffs(U), pd.frame_coeffs(V)), zeta)


def g_shape_solved(pd: PointData, zeta, U, V) -> float:
    """Same pairing computed by solving for A_zeta U first."""
    return pd.ip(pd.A(zeta, pd.frame_coeffs(U)), V)


def lemma_terms(pd: PointData, wx, wz, lam: float, zlnf: float) -> dict:
    """The four scalars shared by the warped-product identities.

    A1 = g(A_ntX X, Z), B = g(A_phiZ X, tX), Cn = g(A_nX Z, tX),
    k = (Z ln f) lambda g(X, X).
    """
    X, Z = pd.vec(wx), pd.vec(wz)
    tX = _t(pd, X)
    return {
        "A1": g_shape(pd, _n(pd, tX), X, Z),
        "B": g_shape(pd, pd.phi(Z), X, tX),
        "Cn": g_shape(pd, _n(pd, X), Z, tX),
        "k": zlnf * lam * pd.ip(X, X),
    }


# -- residual functions ------------------------------------------------------------


def residual_thm31(pd: PointData, lam: float, wx, wy, wz) -> Residual:
    """2 lambda g(nabla~_X Y, Z) against the four shape-operator terms."""
    X, Y, Z = pd.vec(wx), pd.vec(wy), pd.vec(wz)
    tX, tY = _t(pd, X), _t(pd, Y)
    lhs = 2.0 * lam * pd.ip(pd.ambient_derivative(pd.field(wx), pd.field(wy)), Z)
    phiZ = pd.phi(Z)
    rhs = (g_shape(pd, _n(pd, tY), X, Z) + g_shape(pd, _n(pd, tX), Y, Z)
           - g_shape(pd, phiZ, tY, X) - g_shape(pd, phiZ, tX, Y))
    return Residual(lhs, rhs)


def residual_thm32(pd: PointData, wz, ww, wx) -> Residual:
    Z, W, X = pd.vec(wz), pd.vec(ww), pd.vec(wx)
    tX = _t(pd, X)
    lhs = 2.0 * g_shape(pd, _n(pd, tX), Z, W)
    rhs = g_shape(pd, pd.phi(W), Z, tX) + g_shape(pd, pd.phi(Z), W, tX)
    return Residual(lhs, rhs)


def residual_lemma51(pd: PointData, lam: float, zlnf: float, wx, wz) -> tuple[Residual, Residual]:
    c = lemma_terms(pd, wx, wz, lam, zlnf)
    a = Residual(2.0 * c["A1"], c["B"] + c["Cn"] - c["k"])
    b = Residual(c["Cn"], 2.0 * c["B"] - c["A1"])
    return a, b


def combination_thm52(pd: PointData, lam: float, zlnf: float, wx, wz) -> Residual:
    """3 g(A_ntX X, Z) against 3 g(A_phiZ X, tX) - (Z ln f) lambda g(X,X), via solved shape operators."""
    X, Z = pd.vec(wx), pd.vec(wz)
    tX = _t(pd, X)
    A1 = g_shape_solved(pd, _n(pd, tX), X, Z)
    B = g_shape_solved(pd, pd.phi(Z), X, tX)
    return Residual(3.0 * A1, 3.0 * B - zlnf * lam * pd.ip(X, X))


def T_X_tX(pd: PointData, wx) -> np.ndarray:
    X = pd.vec(wx)
    return TN_split(pd, X, _t(pd, X))[0]


def residual_lemma52(pd: PointData, wx, wz) -> Residual:
    c = lemma_terms(pd, wx, wz, 0.0, 0.0)
    return Residual(pd.ip(T_X_tX(pd, wx), pd.vec(wz)), c["A1"] - c["Cn"])


def residual_thm51(pd: PointData, lam: float, zlnf: float, wx, wz) -> Residual:
    X = pd.vec(wx)
    return Residual(pd.ip(T_X_tX(pd, wx), pd.vec(wz)), (2.0 / 3.0) * zlnf * lam * pd.ip(X, X))


def residual_thm52(pd: PointData, lam: float, zlnf: float, wx, wz) -> Residual:
    c = lemma_terms(pd, wx, wz, lam, zlnf)
    return Residual(c["B"], c["k"] / 3.0)


def residual_thm53(pd: PointData, lam: float, zmu: float, wx, wz) -> tuple[np.ndarray, np.ndarray]:
    """(A_ntX Z - A_phiZ tX, -(1/3) lambda Z(mu) X) as ambient vectors."""
    X, Z = pd.vec(wx), pd.vec(wz)
    tX = _t(pd, X)
    lhs = pd.A(_n(pd, tX), wz) - pd.A(pd.phi(Z), pd.frame_coeffs(tX))
    return lhs, -(1.0 / 3.0) * lam * zmu * X


def h_lambda(pd: PointData, wx, wy, anti: Sequence[int]) -> np.ndarray:
    """Component of nabla_X Y (induced connection) along the anti-invariant side."""
    nab = pd.induced_connection(pd.field(wx), pd.field(wy))
    return component_inside(pd, nab, anti)


# -- probes ------------------------------------------------------------------------


def probes(pd: PointData, idx: Sequence[int], rng, n_random: int) -> list[tuple[str, np.ndarray]]:
    """Frame vectors of ``idx`` then random combinations inside their span."""
    out = []
    for a in idx:
        w = np.zeros(pd.m)
        w[a] = 1.0
        out.append((pd.frame_names[a], w))
    if len(idx) > 1:
        for k in range(n_random):
            w = np.zeros(pd.m)
            w[list(idx)] = rng.standard_normal(len(idx))
            out.append((f"rnd{k}", w))
    return out


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


# -- distribution checks -----------------------------------------------------------


def integrability_check(pds: Sequence[PointData], dist: Sequence[int], label: str, tol: float = 1e-9
                        ) -> CheckReport:
    """Leakage of [Z_i, Z_j] outside the distribution; absence of the property is FLAGGED."""
    rep = CheckReport()
    dist = list(dist)
    for pi, pd in enumerate(pds):
        qi = 0
        for i_, i in enumerate(dist):
            for j in dist[i_ + 1:]:
                leak = float(np.linalg.norm(component_outside(pd, lie_bracket(pd, i, j), dist)))
                rep.append(judged("integrability", pi, qi,
                                  f"{label}: [{pd.frame_names[i]},{pd.frame_names[j]}] outside", leak, 0.0, leak,
                                  tol, on_fail=FLAGGED, point=pd.point_dict()))
                qi += 1
        if qi == 0:
            rep.append(Row("integrability", pi, 0, f"{label}: rank <= 1", 0.0, 0.0, 0.0, tol, PASS,
                           pd.point_dict(), "a line field is always integrable"))
    return rep


def totally_geodesic_foliation_check(pds: Sequence[PointData], dist: Sequence[int], label: str,
                                     tol: float = 1e-9, gate: Optional[str] = None) -> CheckReport:
    """Leakage of nabla_{Z_i} Z_j (induced connection) outside the distribution."""
    rep = CheckReport()
    dist = list(dist)
    for pi, pd in enumerate(pds):
        qi = 0
        for i in dist:
            for j in dist:
                nab = pd.induced_connection(pd.field(i), pd.field(j))
                leak = float(np.linalg.norm(component_outside(pd, nab, dist)))
                rep.append(judged("tg-foliation", pi, qi,
                                  f"{label}: nabla_{pd.frame_names[i]} {pd.frame_names[j]} outside", leak, 0.0,
                                  leak, tol, on_fail=FLAGGED, gate=gate, point=pd.point_dict()))
                qi += 1
    return rep


def distribution_ok(rep: CheckReport) -> bool:
    return all(r.status == PASS for r in rep.rows)


# -- theorem checks ----------------------------------------------------------------


def check_thm31(pds, roles: Roles, rng=0, tol: float = 1e-9, gate: Optional[str] = None,
                n_random: int = 2) -> CheckReport:
    rng = _rng(rng)
    rep = CheckReport()
    for pi, pd in enumerate(pds):
        px = probes(pd, roles.D_lambda, rng, n_random)
        pz = probes(pd, roles.anti, rng, 1)
        qi = 0
        for lx, wx in px:
            for ly, wy in px:
                for lz, wz in pz:
                    r = residual_thm31(pd, roles.lam, wx, wy, wz)
                    rep.append(judged("thm-3.1", pi, qi, f"X={lx}, Y={ly}, Z={lz}", r.lhs, r.rhs, abs(r.value),
                                      tol, gate=gate, point=pd.point_dict()))
                    qi += 1
    return rep


def check_thm32(pds, roles: Roles, rng=0, tol: float = 1e-9, gate: Optional[str] = None,
                n_random: int = 1) -> CheckReport:
    rng = _rng(rng)
    rep = CheckReport()
    for pi, pd in enumerate(pds):
        pz = probes(pd, roles.anti, rng, n_random)
        px = probes(pd, roles.D_lambda, rng, 2)
        qi = 0
        for lz, wz in pz:
            for lw, ww in pz:
                for lx, wx in px:
                    r = residual_thm32(pd, wz, ww, wx)
                    rep.append(judged("thm-3.2", pi, qi, f"Z={lz}, W={lw}, X={lx}", r.lhs, r.rhs, abs(r.value),
                                      tol, gate=gate, point=pd.point_dict()))
                    qi += 1
    return rep


def _warp_pairs(pd, warp: WarpData, rng, nx: int = 2, nz: int = 1):
    return probes(pd, warp.fiber, rng, nx), probes(pd, warp.base, rng, nz)


def mixed_geodesic_residual(pd: PointData, left: Sequence[int], right: Sequence[int]) -> float:
    return max((float(np.linalg.norm(pd.h(a, b))) for a in left for b in right), default=0.0)


def check_section5(pds, warp: Optional[WarpData], lam: float, rng=0, tol: float = 1e-9,
                   gates: Optional[dict] = None, anti: Sequence[int] = ()) -> CheckReport:
    """lem-5.1a, lem-5.1b, lem-5.2, thm-5.1, thm-5.2, thm-5.3 and cons-5.1.

    ``gates`` maps a check id to a reason string when its hypotheses fail;
    the key ``"*"`` applies to all of them. The consistency row always runs.
    """
    rng = _rng(rng)
    gates = dict(gates or {})
    rep = CheckReport()
    if warp is None:
        for cid in ("lem-5.1a", "lem-5.1b", "lem-5.2", "thm-5.1", "thm-5.2", "thm-5.3", "cons-5.1"):
            rep.append(Row(cid, -1, 0, "warping data", None, None, float("nan"), tol, NA,
                           note="no warp declared or detected"))
        return rep

    def gate(cid):
        parts = [g for g in (gates.get("*"), gates.get(cid)) if g]
        return "; ".join(parts) or None

    anti = list(anti) or list(warp.base)
    for pi, pd in enumerate(pds):
        pt = pd.point_dict()
        zl = warp.frame_derivatives(pd)
        px, pz = _warp_pairs(pd, warp, rng)
        mixed = mixed_geodesic_residual(pd, warp.fiber, warp.base)
        rep.append(Row("thm-5.2", pi, 0, "precondition: mixed totally geodesic, max |h(X,Z)|", mixed, 0.0, mixed,
                       tol, PASS if mixed <= tol else NA, pt, "" if mixed <= tol else "precondition fails"))
        g52 = gate("thm-5.2") or (None if mixed <= tol else "not mixed totally geodesic")
        qi = 0
        base_leak = 0.0
        for lx, wx in px:
            base_leak = max(base_leak, float(np.linalg.norm(component_inside(pd, T_X_tX(pd, wx), warp.base))))
            for lz, wz in pz:
                zlnf = float(pd.weights(wz) @ zl)
                label = f"X={lx}, Z={lz}"
                ra, rb = residual_lemma51(pd, lam, zlnf, wx, wz)
                rep.append(judged("lem-5.1a", pi, qi, label, ra.lhs, ra.rhs, abs(ra.value), tol,
                                  gate=gate("lem-5.1a"), point=pt))
                rep.append(judged("lem-5.1b", pi, qi, label, rb.lhs, rb.rhs, abs(rb.value), tol,
                                  gate=gate("lem-5.1b"), point=pt))
                comb = combination_thm52(pd, lam, zlnf, wx, wz)
                diff = abs((ra.value + rb.value) - comb.value)
                rep.append(judged("cons-5.1", pi, qi, f"(a)+(b) against 3A1 - 3B + k, {label}",
                                  ra.value + rb.value, comb.value, diff, CONSISTENCY_TOL, point=pt))
                r = residual_lemma52(pd, wx, wz)
                rep.append(judged("lem-5.2", pi, qi, label, r.lhs, r.rhs, abs(r.value), tol,
                                  gate=gate("lem-5.2"), point=pt))
                r = residual_thm51(pd, lam, zlnf, wx, wz)
                rep.append(judged("thm-5.1", pi, 1 + qi, label, r.lhs, r.rhs, abs(r.value), tol,
                                  gate=gate("thm-5.1"), point=pt))
                r = residual_thm52(pd, lam, zlnf, wx, wz)
                rep.append(judged("thm-5.2", pi, 1 + qi, label, r.lhs, r.rhs, abs(r.value), tol,
                                  gate=g52, point=pt))
                lhs, rhs = residual_thm53(pd, lam, zlnf, wx, wz)
                rep.append(judged("thm-5.3", pi, 1 + qi, label, float(np.linalg.norm(lhs)),
                                  float(np.linalg.norm(rhs)), np.linalg.norm(lhs - rhs), tol,
                                  gate=gate("thm-5.3"), point=pt))
                qi += 1
        # product iff T_X tX tangent to the fiber
        const_f = float(np.max(np.abs(zl[list(warp.base)]), initial=0.0)) <= tol
        tangent = base_leak <= tol
        rep.append(Row("thm-5.1", pi, 0, "f constant on the base iff T_X tX tangent to the fiber",
                       const_f, tangent, base_leak, tol,
                       NA if gate("thm-5.1") else (PASS if const_f == tangent else FAIL),
                       pt, gate("thm-5.1") or ""))
        # h_lambda companion: component of nabla_X Y along the base against -(1/3) g(X,Y) grad mu
        grad = component_inside(pd, warp.gradient(pd), warp.base)
        for k, (lx, wx) in enumerate(px):
            for ly, wy in px[k:]:
                got = h_lambda(pd, wx, wy, warp.base)
                want = -(1.0 / 3.0) * pd.ip(pd.vec(wx), pd.vec(wy)) * grad
                rep.append(judged("thm-5.3", pi, 1000 + qi, f"h_lambda(X,Y) = -(1/3) g(X,Y) grad mu, X={lx}, Y={ly}",
                                  float(np.linalg.norm(got)), float(np.linalg.norm(want)),
                                  np.linalg.norm(got - want), tol, gate=gate("thm-5.3"), point=pt))
                qi += 1
    return rep
