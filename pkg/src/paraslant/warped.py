"""Warped product metrics: construction, the connection formulas, detection of f in induced metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import numlin
from .diffcalc import christoffels, eval_jet1, eval_values
from .errors import MissingWarpData, NonPositiveWarp
from .expr import Expr, Num, Pow, BinOp, as_expr, free_vars
from .report import FLAGGED, NA, PASS, CheckReport, Row, judged
from .submanifold import FrameField, Immersion, PointData, point_data


def _matrix(entries) -> tuple:
    return tuple(tuple(as_expr(e) for e in row) for row in entries)


@dataclass(frozen=True)
class WarpedSpec:
    """g = g_B + f^2 g_F on base x fiber coordinates; f depends on base coordinates only."""

    base_coords: tuple
    g_B: tuple
    fiber_coords: tuple
    g_F: tuple
    f: Expr
    constants: Mapping[str, float]

    def __init__(self, base_coords, g_B, fiber_coords, g_F, f, constants=None):
        object.__setattr__(self, "base_coords", tuple(base_coords))
        object.__setattr__(self, "g_B", _matrix(g_B))
        object.__setattr__(self, "fiber_coords", tuple(fiber_coords))
        object.__setattr__(self, "g_F", _matrix(g_F))
        object.__setattr__(self, "f", as_expr(f))
        object.__setattr__(self, "constants", dict(constants or {}))
        nb, nf = len(self.base_coords), len(self.fiber_coords)
        if len(self.g_B) != nb or any(len(r) != nb for r in self.g_B):
            raise ValueError("g_B must be square over the base coordinates")
        if len(self.g_F) != nf or any(len(r) != nf for r in self.g_F):
            raise ValueError("g_F must be square over the fiber coordinates")
        consts = set(self.constants)
        stray = free_vars(self.f) - set(self.base_coords) - consts
        if stray:
            raise ValueError(f"warping function depends on non-base names {sorted(stray)}")
        for row in self.g_F:
            for e in row:
                if free_vars(e) & set(self.base_coords):
                    raise ValueError("fiber metric must not depend on base coordinates")
        for row in self.g_B:
            for e in row:
                if free_vars(e) & set(self.fiber_coords):
                    raise ValueError("base metric must not depend on fiber coordinates")

    @property
    def coords(self) -> tuple:
        return self.base_coords + self.fiber_coords

    def f_value(self, point) -> float:
        """f at a full product point (base coordinates first)."""
        nb = len(self.base_coords)
        val = float(eval_values([self.f], self.base_coords, np.asarray(point, float)[:nb], self.constants)[0])
        if not val > 0:
            raise NonPositiveWarp(f"warping function is {val!r} at base point {list(np.asarray(point)[:nb])}")
        return val


def build_warped_metric(spec: WarpedSpec, points: Optional[Sequence] = None) -> tuple:
    """Expression matrix of g_B + f^2 g_F on ``spec.coords``.

    The positivity of f is checked at the given sample points.
    """
    for p in (() if points is None else points):
        spec.f_value(p)
    nb, nf = len(spec.base_coords), len(spec.fiber_coords)
    f2 = Pow(spec.f, 2)
    rows = []
    for i in range(nb + nf):
        row = []
        for j in range(nb + nf):
            if i < nb and j < nb:
                row.append(spec.g_B[i][j])
            elif i >= nb and j >= nb:
                row.append(BinOp("*", f2, spec.g_F[i - nb][j - nb]))
            else:
                row.append(Num(0.0))
        rows.append(tuple(row))
    return tuple(rows)


def grad_ln_f(spec: WarpedSpec, point) -> tuple[np.ndarray, np.ndarray]:
    """(d ln f, its g_B-gradient) on the base coordinates at a product or base point."""
    nb = len(spec.base_coords)
    ub = np.asarray(point, float)[:nb]
    vals, grads = eval_jet1([spec.f], spec.base_coords, ub, spec.constants)
    if not vals[0] > 0:
        raise NonPositiveWarp(f"warping function is {vals[0]!r} at base point {list(ub)}")
    d = grads[0] / vals[0]
    gB = eval_values([e for row in spec.g_B for e in row], spec.base_coords, ub, spec.constants).reshape(nb, nb)
    return d, numlin.solve(0.5 * (gB + gB.T), d)


def check_prop41(spec: WarpedSpec, points: Sequence, tol: float = 1e-6) -> CheckReport:
    """Levi-Civita connection of the built metric against the warped-product formulas."""
    metric = build_warped_metric(spec, points)
    coords = spec.coords
    nb = len(spec.base_coords)
    d = len(coords)
    rep = CheckReport()
    for pi, p in enumerate(points):
        p = np.asarray(p, float)
        pt = {c: float(x) for c, x in zip(coords, p)}
        gam = christoffels(metric, coords, p, spec.constants)
        dlnf, _ = grad_ln_f(spec, p)
        qi = 0
        for i in range(nb):
            for j in range(i, nb):
                leak = float(np.linalg.norm(gam[nb:, i, j]))
                rep.append(judged("prop-4.1", pi, qi, f"fiber part of nabla_X Y, X=d_{coords[i]}, Y=d_{coords[j]}",
                                  leak, 0.0, leak, tol, point=pt))
                qi += 1
        for i in range(nb):
            for a in range(nb, d):
                want = np.zeros(d)
                want[a] = dlnf[i]
                got = gam[:, i, a]
                rep.append(judged("prop-4.1", pi, qi,
                                  f"nabla_X Z = X(ln f) Z, X=d_{coords[i]}, Z=d_{coords[a]}",
                                  float(got[a]), float(dlnf[i]), np.linalg.norm(got - want), tol, point=pt))
                qi += 1
    return rep


# -- detection in induced metrics ----------------------------------------------


@dataclass
class WarpDetection:
    base: tuple
    fiber: tuple
    mixed_residual: float
    f_consistency_residual: float
    base_residual: float
    f_values: list
    points: list
    reference: list
    f_reference: float
    nonpositive: bool = False

    def ok(self, tol: float = 1e-8) -> bool:
        return (not self.nonpositive and self.mixed_residual <= tol
                and self.f_consistency_residual <= tol and self.base_residual <= tol)

    def as_dict(self) -> dict:
        return {
            "base": list(self.base),
            "fiber": list(self.fiber),
            "mixed_residual": self.mixed_residual,
            "f_consistency_residual": self.f_consistency_residual,
            "base_residual": self.base_residual,
            "f_values": self.f_values,
            "reference": self.reference,
            "f_reference": self.f_reference,
            "nonpositive_scale": self.nonpositive,
        }


def _frozen(u, source, idx) -> np.ndarray:
    out = np.array(u, dtype=float)
    out[list(idx)] = np.asarray(source, float)[list(idx)]
    return out


def _scale(A: np.ndarray, B: np.ndarray) -> float:
    """Least-squares s with A ~ s B (Frobenius)."""
    return float(np.sum(A * B) / np.sum(B * B))


def detect_from_gram(gram_fn, base: Sequence[int], fiber: Sequence[int], base_params: Sequence[int],
                     fiber_params: Sequence[int], points: Sequence, reference, f_reference: float = 1.0
                     ) -> WarpDetection:
    """Test whether a Gram field has the form diag(G_B(u_B), f(u_B)^2 C(u_F)).

    ``gram_fn(u)`` returns the Gram matrix at parameter point ``u``; base and
    fiber index the frame, base_params and fiber_params index ``u``.
    """
    base, fiber = list(base), list(fiber)
    ref = np.asarray(reference, float)
    G_ref = gram_fn(ref)
    B = G_ref[np.ix_(fiber, fiber)]
    mixed = cons = bres = 0.0
    fvals, nonpos = [], False
    for u in points:
        u = np.asarray(u, float)
        G = gram_fn(u)
        mixed = max(mixed, float(np.max(np.abs(G[np.ix_(base, fiber)]), initial=0.0)))
        Gff = G[np.ix_(fiber, fiber)]
        # base variation only: fiber coordinates frozen at the reference
        s = _scale(gram_fn(_frozen(u, ref, fiber_params))[np.ix_(fiber, fiber)], B)
        # fiber variation only: base coordinates frozen at the reference
        C = gram_fn(_frozen(u, ref, base_params))[np.ix_(fiber, fiber)]
        scale = max(float(np.linalg.norm(Gff)), 1e-300)
        cons = max(cons, float(np.linalg.norm(Gff - s * C)) / scale)
        Gbb = G[np.ix_(base, base)]
        Gbb_frozen = gram_fn(_frozen(u, ref, fiber_params))[np.ix_(base, base)]
        bres = max(bres, float(np.linalg.norm(Gbb - Gbb_frozen)) / max(float(np.linalg.norm(Gbb)), 1e-300))
        if s > 0:
            fvals.append(f_reference * float(np.sqrt(s)))
        else:
            nonpos = True
            fvals.append(float("nan"))
    return WarpDetection(tuple(base), tuple(fiber), mixed, cons, bres, fvals,
                         [list(map(float, p)) for p in points], ref.tolist(), float(f_reference), nonpos)


def default_param_split(frame: FrameField, base: Sequence[int], fiber: Sequence[int]):
    """For a coordinate-like frame, field a differentiates parameter a."""
    return list(base), list(fiber)


def detect_warped_structure(imm: Immersion, frame: FrameField, base: Sequence[int], fiber: Sequence[int],
                            points: Sequence, reference, f_reference: float = 1.0,
                            base_params: Optional[Sequence[int]] = None,
                            fiber_params: Optional[Sequence[int]] = None) -> WarpDetection:
    if base_params is None or fiber_params is None:
        bp, fp = default_param_split(frame, base, fiber)
        base_params = bp if base_params is None else base_params
        fiber_params = fp if fiber_params is None else fiber_params
    return detect_from_gram(lambda u: point_data(imm, frame, u).G, base, fiber, base_params, fiber_params,
                            points, reference, f_reference)


def detect_in_spec(spec: WarpedSpec, points: Sequence, reference, f_reference: float = 1.0) -> WarpDetection:
    """Round trip: detection applied to the built metric itself (coordinate frame)."""
    metric = build_warped_metric(spec)
    flat = [e for row in metric for e in row]
    d = len(spec.coords)
    nb = len(spec.base_coords)

    def gram(u):
        G = eval_values(flat, spec.coords, u, spec.constants).reshape(d, d)
        return 0.5 * (G + G.T)

    base, fiber = list(range(nb)), list(range(nb, d))
    return detect_from_gram(gram, base, fiber, base, fiber, points, reference, f_reference)


# -- warping data on a submanifold ----------------------------------------------


@dataclass(frozen=True)
class WarpData:
    """How Z(ln f) is obtained at a point of an immersion.

    ``declared``: f is an expression over the immersion parameters.
    ``detected``: d ln f is read off the fiber block of the induced Gram,
    restricted to the base parameters.
    """

    base: tuple
    fiber: tuple
    mode: str
    f: Optional[Expr] = None
    constants: Mapping[str, float] = field(default_factory=dict)
    base_params: tuple = ()
    detection: Optional[WarpDetection] = None

    def dlnf(self, pd: PointData) -> np.ndarray:
        """d ln f as a covector on the parameter directions."""
        if self.mode == "declared":
            if self.f is None:
                raise MissingWarpData("declared warp without a warping function")
            consts = dict(self.constants)
            vals, grads = eval_jet1([self.f], pd.params, pd.u, consts)
            if not vals[0] > 0:
                raise NonPositiveWarp(f"warping function is {vals[0]!r} at {pd.point_dict()}")
            return grads[0] / vals[0]
        if self.mode == "detected":
            fib = list(self.fiber)
            Gff = pd.G[np.ix_(fib, fib)]
            dGff = pd.dG[np.ix_(fib, fib)]
            d = 0.5 * np.einsum("ab,abi->i", Gff, dGff) / float(np.sum(Gff * Gff))
            mask = np.zeros(pd.m, dtype=bool)
            mask[list(self.base_params)] = True
            return np.where(mask, d, 0.0)
        raise MissingWarpData(f"unknown warp mode {self.mode!r}")

    def frame_derivatives(self, pd: PointData) -> np.ndarray:
        """Z_a(ln f) for each frame field."""
        return pd.C @ self.dlnf(pd)

    def derivative(self, pd: PointData, w) -> float:
        return float(pd.weights(w) @ self.frame_derivatives(pd))

    def gradient(self, pd: PointData) -> np.ndarray:
        """grad(ln f) on M as an ambient vector."""
        return (pd.Ginv @ self.frame_derivatives(pd)) @ pd.E


def check_prop41_induced(pds: Sequence[PointData], warp: WarpData, tol: float = 1e-8,
                         gate: Optional[str] = None) -> CheckReport:
    """The warped-product connection formulas for the induced connection of M."""
    rep = CheckReport()
    base, fiber = list(warp.base), list(warp.fiber)
    for pi, pd in enumerate(pds):
        pt = pd.point_dict()
        zl = warp.frame_derivatives(pd)
        names = pd.frame_names
        qi = 0
        for i in base:
            for j in base:
                nab = pd.induced_connection(pd.field(i), pd.field(j))
                c = pd.frame_coeffs(nab)
                leak = float(np.linalg.norm(c[fiber]))
                rep.append(judged("prop-4.1", pi, qi, f"fiber part of nabla_X Y, X={names[i]}, Y={names[j]}",
                                  leak, 0.0, leak, tol, gate=gate, point=pt))
                qi += 1
        for i in base:
            for a in fiber:
                want = zl[i] * pd.E[a]
                for lbl, (P, Q) in (("nabla_X Z", (i, a)), ("nabla_Z X", (a, i))):
                    got = pd.induced_connection(pd.field(P), pd.field(Q))
                    rep.append(judged("prop-4.1", pi, qi, f"{lbl} = X(ln f) Z, X={names[i]}, Z={names[a]}",
                                      float(np.linalg.norm(got)), float(np.linalg.norm(want)),
                                      np.linalg.norm(got - want), tol, gate=gate, point=pt))
                    qi += 1
    return rep


def implied_zlnf(pd: PointData, z: int, xi: int) -> float:
    """xi-coefficient of the tangential part of nabla~_Z xi, i.e. the Z(ln f) forced when xi lies in the fiber."""
    nab = pd.tangential(pd.ambient_derivative(pd.field(z), pd.field(xi)))
    X = pd.E[xi]
    return pd.ip(nab, X) / pd.ip(X, X)


def check_nonexistence_xi_in_fiber(pds: Sequence[PointData], xi: Optional[int], base: Sequence[int],
                                   fiber: Sequence[int], tol: float = 1e-9) -> CheckReport:
    """Implied Z(ln f) from nabla~_Z xi; it must vanish, otherwise the scenario is flagged."""
    rep = CheckReport()
    if xi is None:
        rep.append(Row("prop-4.2", -1, 0, "implied Z(ln f) from nabla~_Z xi", None, 0.0, float("nan"), tol, NA,
                       note="no frame field designated as xi"))
        return rep
    in_fiber = xi in fiber
    zs = list(base) if in_fiber else [a for a in range(pds[0].m if pds else 0) if a != xi]
    note = "" if in_fiber else "xi assigned to the base; mechanism evaluated over all other frame fields"
    for pi, pd in enumerate(pds):
        for qi, z in enumerate(zs):
            val = implied_zlnf(pd, z, xi)
            rep.append(judged("prop-4.2", pi, qi, f"implied Z(ln f), Z={pd.frame_names[z]}", val, 0.0, abs(val),
                              tol, on_fail=FLAGGED, point=pd.point_dict(), note=note))
    return rep


def detection_rows(det: WarpDetection, tol: float = 1e-8) -> list:
    rows = [
        judged("def-warped", -1, 0, "mixed Gram block G(base, fiber) = 0", det.mixed_residual, 0.0,
               det.mixed_residual, tol, on_fail=FLAGGED),
        judged("def-warped", -1, 1, "fiber block = f(base)^2 C(fiber)", det.f_consistency_residual, 0.0,
               det.f_consistency_residual, tol, on_fail=FLAGGED),
        judged("def-warped", -1, 2, "base block independent of fiber coordinates", det.base_residual, 0.0,
               det.base_residual, tol, on_fail=FLAGGED),
    ]
    if det.nonpositive:
        rows.append(Row("def-warped", -1, 3, "fiber scale positive", None, None, 1.0, 0.5, FLAGGED,
                        note="fiber block changes sign relative to the reference"))
    else:
        rows.append(Row("def-warped", -1, 3, "fiber scale positive", None, None, 0.0, 0.5, PASS))
    return rows
