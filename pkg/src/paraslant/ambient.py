"""Almost paracontact metric structures (phi, xi, eta, g) on R^{2n+1}."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import numlin
from .diffcalc import christoffels_from, eval_jet1
from .expr import Expr, as_expr, free_vars
from .report import CheckReport, judged

CONSTANT_TOL = 1e-12
EXPRESSION_TOL = 1e-8


@dataclass(frozen=True)
class AmbientPoint:
    """Numeric structure tensors and their first derivatives at one point.

    Derivative arrays carry the differentiation index last, e.g.
    ``dphi[k, j, l] = d_l phi^k_j``.
    """

    x: np.ndarray
    phi: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    g: np.ndarray
    dphi: np.ndarray
    dxi: np.ndarray
    deta: np.ndarray
    dg: np.ndarray
    gamma: np.ndarray

    def ip(self, a, b) -> float:
        return float(np.asarray(a) @ self.g @ np.asarray(b))

    def connection(self, X, Y) -> np.ndarray:
        """Gamma term of the covariant derivative of a coordinate-constant field Y along X."""
        return np.einsum("kij,i,j->k", self.gamma, X, Y)

    def nabla_phi_tensor(self) -> np.ndarray:
        """T[k, j, i] = ((nabla_{e_i} phi) e_j)^k."""
        t = self.dphi.copy()
        t += np.einsum("kil,lj->kji", self.gamma, self.phi)
        t -= np.einsum("kl,lij->kji", self.phi, self.gamma)
        return t

    def nabla_phi(self, X, Y) -> np.ndarray:
        return np.einsum("kji,i,j->k", self.nabla_phi_tensor(), X, Y)

    def nabla_xi(self) -> np.ndarray:
        """D[k, i] = (nabla_{e_i} xi)^k."""
        return self.dxi + np.einsum("kil,l->ki", self.gamma, self.xi)

    def nabla_eta(self) -> np.ndarray:
        """D[i, j] = (nabla_{e_i} eta)_j."""
        return self.deta.T - np.einsum("lij,l->ij", self.gamma, self.eta)


@dataclass(frozen=True)
class AmbientStructure:
    coords: tuple
    phi: tuple
    xi: tuple
    eta: tuple
    g: tuple
    constants: Mapping[str, float]
    name: str = "explicit"

    def __init__(self, coords: Sequence[str], phi, xi, eta, g,
                 constants: Optional[Mapping[str, float]] = None, name: str = "explicit"):
        d = len(coords)
        if d < 3 or d % 2 == 0:
            raise ValueError(f"ambient dimension must be odd and >= 3, got {d}")

        def mat(rows):
            rows = tuple(tuple(as_expr(e) for e in r) for r in rows)
            if len(rows) != d or any(len(r) != d for r in rows):
                raise ValueError(f"expected a {d}x{d} matrix of expressions")
            return rows

        def vec(entries):
            entries = tuple(as_expr(e) for e in entries)
            if len(entries) != d:
                raise ValueError(f"expected {d} expressions")
            return entries

        object.__setattr__(self, "coords", tuple(coords))
        object.__setattr__(self, "phi", mat(phi))
        object.__setattr__(self, "xi", vec(xi))
        object.__setattr__(self, "eta", vec(eta))
        object.__setattr__(self, "g", mat(g))
        object.__setattr__(self, "constants", dict(constants or {}))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_frozen_point", self._evaluate(np.zeros(d)) if self.is_constant else None)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def n(self) -> int:
        return (self.dim - 1) // 2

    def _all_exprs(self) -> list[Expr]:
        out: list[Expr] = []
        for r in self.phi + self.g:
            out.extend(r)
        out.extend(self.xi)
        out.extend(self.eta)
        return out

    @property
    def is_constant(self) -> bool:
        coords = set(self.coords)
        return not any(free_vars(e) & coords for e in self._all_exprs())

    @property
    def default_tol(self) -> float:
        return CONSTANT_TOL if self.is_constant else EXPRESSION_TOL

    def _evaluate(self, x) -> AmbientPoint:
        d = self.dim
        vals, grads = eval_jet1(self._all_exprs(), self.coords, x, self.constants)
        nn = d * d
        phi, g = vals[:nn].reshape(d, d), vals[nn:2 * nn].reshape(d, d)
        dphi, dg = grads[:nn].reshape(d, d, d), grads[nn:2 * nn].reshape(d, d, d)
        xi, eta = vals[2 * nn:2 * nn + d], vals[2 * nn + d:]
        dxi, deta = grads[2 * nn:2 * nn + d], grads[2 * nn + d:]
        g = 0.5 * (g + g.T)
        dg = 0.5 * (dg + dg.transpose(1, 0, 2))
        gamma = christoffels_from(g, dg)
        return AmbientPoint(np.asarray(x, dtype=float), phi, xi, eta, g, dphi, dxi, deta, dg, gamma)

    def at(self, x) -> AmbientPoint:
        x = np.asarray(x, dtype=float)
        frozen = self._frozen_point
        if frozen is not None:
            return AmbientPoint(x, frozen.phi, frozen.xi, frozen.eta, frozen.g, frozen.dphi,
                                frozen.dxi, frozen.deta, frozen.dg, frozen.gamma)
        return self._evaluate(x)


def canonical_coords(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)] + ["t"]


def canonical_paracosymplectic(n: int) -> AmbientStructure:
    """phi swaps d/dx_i and d/dy_i, kills d/dt; xi = d/dt, eta = dt,
    g = sum dx_i^2 - sum dy_i^2 + dt^2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = 2 * n + 1
    phi = [["0"] * d for _ in range(d)]
    for i in range(n):
        phi[n + i][i] = "1"
        phi[i][n + i] = "1"
    g = [["0"] * d for _ in range(d)]
    for i in range(n):
        g[i][i] = "1"
        g[n + i][n + i] = "-1"
    g[d - 1][d - 1] = "1"
    xi = ["0"] * (d - 1) + ["1"]
    return AmbientStructure(canonical_coords(n), phi, xi, list(xi), g, name=f"canonical-{n}")


# -- checks -------------------------------------------------------------------


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _point_dict(s: AmbientStructure, x) -> dict:
    return {c: float(v) for c, v in zip(s.coords, x)}


def phi_rank(phi: np.ndarray) -> int:
    return numlin.rank(phi, 1e-9)


def check_axioms(s: AmbientStructure, points, tol: Optional[float] = None, rng=0,
                 pairs: int = 20) -> CheckReport:
    """Pointwise structure identities, each maximised over random vector pairs."""
    tol = s.default_tol if tol is None else tol
    rng = _rng(rng)
    d, n = s.dim, s.n
    rep = CheckReport()
    for pi, x in enumerate(points):
        a = s.at(x)
        pd = _point_dict(s, x)
        X = rng.standard_normal((pairs, d))
        Y = rng.standard_normal((pairs, d))
        phi2 = a.phi @ a.phi
        target = np.eye(d) - np.outer(a.xi, a.eta)
        eta_xi = float(a.eta @ a.xi)
        rep.extend([
            judged("ax-phi2", pi, 0, "phi^2 = Id - eta(x)xi", None, None,
                   np.max(np.abs(phi2 - target)), tol, point=pd),
            judged("ax-phi2", pi, 1, "eta(xi) = 1", eta_xi, 1.0, abs(eta_xi - 1.0), tol, point=pd),
        ])
        r = phi_rank(a.phi)
        rep.extend([
            judged("ax-phixi", pi, 0, "phi xi = 0", None, 0.0, np.max(np.abs(a.phi @ a.xi)), tol, point=pd),
            judged("ax-phixi", pi, 1, "eta o phi = 0", None, 0.0, np.max(np.abs(a.eta @ a.phi)), tol, point=pd),
            judged("ax-phixi", pi, 2, "rank(phi) = 2n", r, 2 * n, abs(r - 2 * n), 0.5, point=pd),
        ])
        gXY = np.einsum("pi,ij,pj->p", X, a.g, Y)
        gphi = np.einsum("pi,ij,pj->p", X @ a.phi.T, a.g, Y @ a.phi.T)
        compat = gXY + gphi - (X @ a.eta) * (Y @ a.eta)
        sig = numlin.signature(a.g)
        rep.extend([
            judged("ax-metric", pi, 0, f"g(X,Y) = -g(phiX,phiY) + eta(X)eta(Y), {pairs} pairs",
                   None, None, np.max(np.abs(compat)), tol, point=pd),
            judged("ax-metric", pi, 1, "signature (n+1, n)", list(sig), [n + 1, n, 0],
                   abs(sig[0] - n - 1) + abs(sig[1] - n) + sig[2], 0.5, point=pd),
        ])
        dual = X @ a.g @ a.xi - X @ a.eta
        rep.append(judged("ax-eta-dual", pi, 0, f"g(X,xi) = eta(X), {pairs} vectors", None, None,
                          np.max(np.abs(dual)), tol, point=pd))
        anti = np.einsum("pi,ij,pj->p", X @ a.phi.T, a.g, Y) + np.einsum("pi,ij,pj->p", X, a.g, Y @ a.phi.T)
        Phi_xy = np.einsum("pi,ij,pj->p", X, a.g, Y @ a.phi.T)
        Phi_yx = np.einsum("pi,ij,pj->p", Y, a.g, X @ a.phi.T)
        rep.extend([
            judged("ax-antisym", pi, 0, f"g(phiX,Y) = -g(X,phiY), {pairs} pairs", None, None,
                   np.max(np.abs(anti)), tol, point=pd),
            judged("ax-antisym", pi, 1, f"Phi(X,Y) = -Phi(Y,X), {pairs} pairs", None, None,
                   np.max(np.abs(Phi_xy + Phi_yx)), tol, point=pd),
        ])
    return rep


def nabla_phi(s: AmbientStructure, p, X, Y) -> np.ndarray:
    """(nabla_X phi)Y at p for coordinate-constant extensions of X and Y."""
    return s.at(p).nabla_phi(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))


def killing_symmetrization(a: AmbientPoint, X, Y) -> np.ndarray:
    return a.nabla_phi(X, Y) + a.nabla_phi(Y, X)


def nearly_paracosymplectic_residual(a: AmbientPoint) -> float:
    """Largest entry of the symmetrised tensor (nabla_{e_i} phi) e_j + (nabla_{e_j} phi) e_i."""
    t = a.nabla_phi_tensor()
    return float(np.max(np.abs(t + t.transpose(0, 2, 1))))


def check_nearly_paracosymplectic(s: AmbientStructure, points, tol: Optional[float] = None, rng=0,
                                  pairs: int = 20) -> CheckReport:
    tol = s.default_tol if tol is None else tol
    rng = _rng(rng)
    rep = CheckReport()
    for pi, x in enumerate(points):
        a = s.at(x)
        X = rng.standard_normal((pairs, s.dim))
        Y = rng.standard_normal((pairs, s.dim))
        res = max(float(np.linalg.norm(killing_symmetrization(a, X[k], Y[k]))) for k in range(pairs))
        rep.append(judged("def-npc", pi, 0, f"(nabla_X phi)Y + (nabla_Y phi)X = 0, {pairs} pairs",
                          None, 0.0, res, tol, point=_point_dict(s, x)))
    return rep


def check_paracosymplectic(s: AmbientStructure, points, tol: Optional[float] = None) -> CheckReport:
    tol = s.default_tol if tol is None else tol
    rep = CheckReport()
    for pi, x in enumerate(points):
        a = s.at(x)
        pd = _point_dict(s, x)
        rep.extend([
            judged("def-pc", pi, 0, "nabla phi = 0", None, 0.0,
                   np.max(np.abs(a.nabla_phi_tensor())), tol, point=pd),
            judged("def-pc", pi, 1, "nabla eta = 0", None, 0.0,
                   np.max(np.abs(a.nabla_eta())), tol, point=pd),
        ])
    return rep


def para_sasakian_residual(a: AmbientPoint, X, Y) -> tuple[float, float, float]:
    lhs = killing_symmetrization(a, X, Y)
    rhs = 2.0 * a.ip(X, Y) * a.xi + (a.eta @ X) * Y + (a.eta @ Y) * X
    return float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)), float(np.linalg.norm(lhs - rhs))


def check_nearly_para_sasakian(s: AmbientStructure, points, tol: Optional[float] = None, rng=0,
                               pairs: int = 20) -> CheckReport:
    tol = s.default_tol if tol is None else tol
    rng = _rng(rng)
    rep = CheckReport()
    e0 = np.eye(s.dim)[0]
    for pi, x in enumerate(points):
        a = s.at(x)
        pd = _point_dict(s, x)
        probes = [(f"X = Y = d/d{s.coords[0]}", e0, e0), ("X = Y = xi", a.xi, a.xi)]
        for k in range(pairs):
            probes.append((f"random pair {k}", rng.standard_normal(s.dim), rng.standard_normal(s.dim)))
        for qi, (label, X, Y) in enumerate(probes):
            lhs, rhs, res = para_sasakian_residual(a, X, Y)
            rep.append(judged("def-nps", pi, qi, label, lhs, rhs, res, tol, point=pd))
    return rep


def killing_residual(a: AmbientPoint, X, Y) -> float:
    D = a.nabla_xi()
    return a.ip(D @ X, Y) + a.ip(D @ Y, X)


def check_killing_xi(s: AmbientStructure, points, tol: Optional[float] = None, rng=0,
                     pairs: int = 20) -> CheckReport:
    """xi is Killing; the identity is only required where phi is Killing."""
    tol = s.default_tol if tol is None else tol
    rng = _rng(rng)
    rep = CheckReport()
    for pi, x in enumerate(points):
        a = s.at(x)
        pd = _point_dict(s, x)
        npc = nearly_paracosymplectic_residual(a)
        gate = None if npc <= tol else f"ambient not nearly paracosymplectic here (residual {npc:.2e})"
        X = rng.standard_normal((pairs, s.dim))
        Y = rng.standard_normal((pairs, s.dim))
        res = max(abs(killing_residual(a, X[k], Y[k])) for k in range(pairs))
        D = a.nabla_xi()
        xixi = a.ip(D @ a.xi, a.xi)
        rep.extend([
            judged("prop-2.2", pi, 0, f"g(nabla_X xi,Y) + g(nabla_Y xi,X) = 0, {pairs} pairs",
                   None, 0.0, res, tol, gate=gate, point=pd),
            judged("prop-2.2", pi, 1, "g(nabla_xi xi, xi) = 0", xixi, 0.0, abs(xixi), tol, point=pd),
        ])
    return rep
