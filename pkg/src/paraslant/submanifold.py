"""Extrinsic geometry of an immersion into an almost paracontact metric manifold.

Tangent vectors are handled in three forms:

* frame weights ``w`` (length m): the vector ``sum_a w_a Z_a``;
* parameter components (length m): ``sum_k v^k d/du_k``;
* ambient vectors (length 2n+1), i.e. pushforwards.

Frame fields carry expression coefficients, so a constant-weight combination
of them is a genuine vector field and ``nabla~_X Y`` is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import numlin
from .ambient import AmbientPoint, AmbientStructure
from .diffcalc import JetMap, eval_jet1
from .errors import RankDeficient
from .expr import as_expr

NULL_TOL = 1e-8

Direction = Union[int, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class Immersion:
    ambient: AmbientStructure
    params: tuple
    components: tuple
    constants: Mapping[str, float]

    def __init__(self, ambient: AmbientStructure, params: Sequence[str], components,
                 constants: Optional[Mapping[str, float]] = None):
        if len(components) != ambient.dim:
            raise ValueError(f"immersion needs {ambient.dim} components, got {len(components)}")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "params", tuple(params))
        object.__setattr__(self, "components", tuple(as_expr(c) for c in components))
        object.__setattr__(self, "constants", dict(constants or {}))
        object.__setattr__(self, "map", JetMap(self.components, self.params, self.constants))

    @property
    def m(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class FrameField:
    """``m`` tangent fields; row ``a`` holds the parameter components of field ``a``."""

    names: tuple
    coeffs: tuple
    params: tuple
    constants: Mapping[str, float]

    def __init__(self, names: Sequence[str], coeffs, params: Sequence[str],
                 constants: Optional[Mapping[str, float]] = None):
        m = len(params)
        rows = tuple(tuple(as_expr(c) for c in r) for r in coeffs)
        if len(names) != m or len(rows) != m or any(len(r) != m for r in rows):
            raise ValueError(f"frame must have {m} named rows of {m} coefficients")
        if len(set(names)) != m:
            raise ValueError("frame names must be distinct")
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "coeffs", rows)
        object.__setattr__(self, "params", tuple(params))
        object.__setattr__(self, "constants", dict(constants or {}))

    @classmethod
    def coordinate(cls, params: Sequence[str], names: Optional[Sequence[str]] = None) -> "FrameField":
        m = len(params)
        rows = [["1" if i == j else "0" for j in range(m)] for i in range(m)]
        return cls(names or [f"d_{p}" for p in params], rows, params)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @property
    def is_coordinate(self) -> bool:
        m = len(self.params)
        for a in range(m):
            for k in range(m):
                e = self.coeffs[a][k]
                want = 1.0 if a == k else 0.0
                if not (hasattr(e, "value") and e.value == want):
                    return False
        return True

    def jets(self, u, constants=None):
        m = len(self.params)
        consts = dict(constants or {})
        consts.update(self.constants)
        flat = [self.coeffs[a][k] for a in range(m) for k in range(m)]
        vals, grads = eval_jet1(flat, self.params, u, consts)
        return vals.reshape(m, m), grads.reshape(m, m, m)


@dataclass(frozen=True)
class LocalField:
    """First-order data of a tangent field at a point: parameter components and their derivatives.

    ``jac[k, i] = d_i X^k``.
    """

    value: np.ndarray
    jac: np.ndarray

    def derivative_along(self, X: "LocalField") -> np.ndarray:
        return self.jac @ X.value


@dataclass(frozen=True)
class PointData:
    u: np.ndarray
    x: np.ndarray
    J: np.ndarray        # N x m pushforward of coordinate directions
    H: np.ndarray        # N x m x m second derivatives of the immersion
    C: np.ndarray        # frame coefficients, C[a, k]
    dC: np.ndarray       # dC[a, k, i] = d_i C[a, k]
    E: np.ndarray        # pushed-forward frame, rows are ambient vectors
    G: np.ndarray        # induced Gram in the frame
    Ginv: np.ndarray
    dG: np.ndarray       # dG[a, b, i] = d_i G[a, b]
    amb: AmbientPoint
    Ptan: np.ndarray     # ambient tangential projector (acts on column vectors)
    K: np.ndarray        # K[i, j] = ambient derivative of d_j along d_i (coordinate fields)
    hF: np.ndarray       # hF[a, b] = h(Z_a, Z_b)
    normals: np.ndarray  # completion of the tangent frame, rows are normal vectors
    params: tuple
    frame_names: tuple

    @property
    def m(self) -> int:
        return self.J.shape[1]

    @property
    def g(self) -> np.ndarray:
        return self.amb.g

    def point_dict(self) -> dict:
        return {p: float(v) for p, v in zip(self.params, self.u)}

    def ip(self, a, b) -> float:
        return float(np.asarray(a) @ self.amb.g @ np.asarray(b))

    # -- conversions --------------------------------------------------------
    def weights(self, X: Direction) -> np.ndarray:
        if isinstance(X, (int, np.integer)):
            w = np.zeros(self.m)
            w[int(X)] = 1.0
            return w
        w = np.asarray(X, dtype=float)
        if w.shape != (self.m,):
            raise ValueError(f"frame weights must have length {self.m}")
        return w

    def vec(self, X: Direction) -> np.ndarray:
        return self.weights(X) @ self.E

    def field(self, X: Direction) -> LocalField:
        w = self.weights(X)
        return LocalField(w @ self.C, np.einsum("a,aki->ki", w, self.dC))

    def frame_coeffs(self, w) -> np.ndarray:
        """Frame coefficients of the tangential part of the ambient vector ``w``."""
        return self.Ginv @ (self.E @ self.amb.g @ np.asarray(w, dtype=float))

    def tangential(self, w) -> np.ndarray:
        return self.Ptan @ np.asarray(w, dtype=float)

    def normal(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return w - self.Ptan @ w

    def split(self, w) -> tuple[np.ndarray, np.ndarray]:
        w = np.asarray(w, dtype=float)
        t = self.Ptan @ w
        return t, w - t

    def param_coeffs(self, w) -> np.ndarray:
        """Parameter components of the tangential part of ``w``."""
        return self.frame_coeffs(w) @ self.C

    # -- derivatives --------------------------------------------------------
    def ambient_derivative(self, X: LocalField, Y: LocalField) -> np.ndarray:
        """nabla~_X (F_* Y) along the immersion."""
        return np.einsum("i,j,ijA->A", X.value, Y.value, self.K) + self.J @ Y.derivative_along(X)

    def induced_connection(self, X: LocalField, Y: LocalField) -> np.ndarray:
        return self.tangential(self.ambient_derivative(X, Y))

    def h(self, X: Direction, Y: Direction) -> np.ndarray:
        return np.einsum("a,b,abA->A", self.weights(X), self.weights(Y), self.hF)

    def shape_frame_matrix(self, zeta) -> np.ndarray:
        """S[b, a]: frame coefficient b of A_zeta Z_a."""
        B = np.einsum("abA,A->ab", self.hF, self.amb.g @ np.asarray(zeta, dtype=float))
        return self.Ginv @ B

    def A(self, zeta, X: Direction) -> np.ndarray:
        """A_zeta X as an ambient vector."""
        w = self.weights(X)
        b = np.einsum("a,abA,A->b", w, self.hF, self.amb.g @ np.asarray(zeta, dtype=float))
        return (self.Ginv @ b) @ self.E

    def gA(self, zeta, X: Direction, Y: Direction) -> float:
        """g(A_zeta X, Y) = g(h(X,Y), zeta)."""
        return self.ip(self.h(X, Y), zeta)

    def phi(self, w) -> np.ndarray:
        return self.amb.phi @ np.asarray(w, dtype=float)


def _normal_completion(Ptan: np.ndarray, count: int, g: np.ndarray) -> np.ndarray:
    """Normal parts of ambient coordinate directions, greedily keeping independent ones.

    When the greedy pick spans the normal space but its Gram is close to
    degenerate, an SVD basis of the same space is used instead; the normal
    space of a non-degenerate tangent space is itself non-degenerate.
    """
    N = Ptan.shape[0]
    cand = np.eye(N) - Ptan.T  # row A = normal part of e_A
    order = sorted(range(N), key=lambda A: (-round(float(np.linalg.norm(cand[A])), 12), A))
    chosen: list[np.ndarray] = []
    for A in order:
        if len(chosen) == count:
            break
        trial = np.array(chosen + [cand[A]])
        if numlin.rank(trial, 1e-8) == len(trial):
            chosen.append(cand[A])
    if len(chosen) != count:
        raise RankDeficient(len(chosen), count, "normal completion")
    basis = np.array(chosen).reshape(count, N)
    if count and not numlin.is_nondegenerate(numlin.gram(basis, g)):
        basis = np.linalg.svd(cand)[2][:count]
    return basis


def point_data(imm: Immersion, frame: FrameField, u) -> PointData:
    u = np.asarray(u, dtype=float)
    m, N = imm.m, imm.ambient.dim
    x, J, H = imm.map.jets(u)
    r = numlin.rank(J)
    if r != m:
        raise RankDeficient(r, m, "pushforward")
    C, dC = frame.jets(u, imm.constants)
    r = numlin.rank(C)
    if r != m:
        raise RankDeficient(r, m, "frame")
    amb = imm.ambient.at(x)
    g = amb.g
    E = C @ J.T
    G = numlin.gram(E, g)
    numlin.check_nondegenerate(G, "induced metric")
    Ginv = np.linalg.inv(G)
    Ptan = E.T @ Ginv @ E @ g

    K = H.transpose(1, 2, 0) + np.einsum("Abc,bi,cj->ijA", amb.gamma, J, J)
    hc = K - np.einsum("AB,ijB->ijA", Ptan, K)
    hF = np.einsum("ai,bj,ijA->abA", C, C, hc)

    dE = np.einsum("aki,Ak->aAi", dC, J) + np.einsum("ak,Aki->aAi", C, H)
    dg = np.einsum("abB,Bi->abi", amb.dg, J)
    dG = (np.einsum("aAi,AB,bB->abi", dE, g, E) + np.einsum("aA,AB,bBi->abi", E, g, dE)
          + np.einsum("aA,ABi,bB->abi", E, dg, E))

    normals = _normal_completion(Ptan, N - m, g)
    if N > m:
        numlin.check_nondegenerate(numlin.gram(normals, g), "normal metric")
    return PointData(u, x, J, H, C, dC, E, G, Ginv, dG, amb, Ptan, K, hF, normals,
                     imm.params, frame.names)


# -- operations on point data ---------------------------------------------------


def second_fundamental_form(pd: PointData, X: Direction, Y: Direction) -> np.ndarray:
    return pd.h(X, Y)


def shape_operator(pd: PointData, zeta, X: Direction) -> np.ndarray:
    return pd.A(zeta, X)


def tn_decompose(pd: PointData, X: Direction) -> tuple[np.ndarray, np.ndarray]:
    """phi X = tX + nX."""
    return pd.split(pd.phi(pd.vec(X)))


def t1n1_decompose(pd: PointData, zeta) -> tuple[np.ndarray, np.ndarray]:
    """phi zeta = t'zeta + n'zeta for a normal vector zeta."""
    return pd.split(pd.phi(zeta))


def TN_split(pd: PointData, X, Y) -> tuple[np.ndarray, np.ndarray]:
    """Tangential and normal parts of (nabla~_X phi) Y; X, Y ambient tangent vectors."""
    return pd.split(pd.amb.nabla_phi(np.asarray(X, dtype=float), np.asarray(Y, dtype=float)))


def mean_curvature(pd: PointData) -> np.ndarray:
    return np.einsum("ab,abA->A", pd.Ginv, pd.hF) / pd.m


def umbilicity(pd: PointData, zeta) -> tuple[float, float]:
    """(delta, residual) with A_zeta ~ delta Id; residual is the largest deviation."""
    S = pd.shape_frame_matrix(zeta)
    delta = float(np.trace(S)) / pd.m
    return delta, float(np.max(np.abs(S - delta * np.eye(pd.m))))


def bracket(X: LocalField, Y: LocalField) -> np.ndarray:
    """Parameter components of [X, Y]."""
    return Y.jac @ X.value - X.jac @ Y.value


def lie_bracket(pd: PointData, i: Direction, j: Direction) -> np.ndarray:
    """[Z_i, Z_j] pushed forward to an ambient vector."""
    return pd.J @ bracket(pd.field(i), pd.field(j))


def component_outside(pd: PointData, w, keep: Sequence[int]) -> np.ndarray:
    """Ambient vector formed by the frame components of the tangent vector ``w`` outside ``keep``."""
    c = pd.frame_coeffs(w)
    mask = np.ones(pd.m, dtype=bool)
    mask[list(keep)] = False
    return (c * mask) @ pd.E


def component_inside(pd: PointData, w, keep: Sequence[int]) -> np.ndarray:
    c = pd.frame_coeffs(w)
    mask = np.zeros(pd.m, dtype=bool)
    mask[list(keep)] = True
    return (c * mask) @ pd.E


# -- identity checks -------------------------------------------------------------


def _random_weights(rng, m: int, count: int) -> np.ndarray:
    return rng.standard_normal((count, m))


def check_extrinsic(pds: Sequence[PointData], rng, tol: float = 1e-9, pairs: int = 50,
                    tn_gate: Optional[str] = None):
    """Rows for the pointwise identities of h, A, t, T and N over random pairs.

    Ids: sub-h-sym, sub-shape, sub-t-antisym, sub-TN, sub-mean, sub-split.
    The T/N antisymmetry needs a nearly paracosymplectic ambient; ``tn_gate``
    carries the reason when that is not the case. The duality of T holds for
    any almost paracontact metric ambient.
    """
    from .report import CheckReport, judged

    rep = CheckReport()
    for pi, pd in enumerate(pds):
        pt = pd.point_dict()
        W = _random_weights(rng, pd.m, 3 * pairs)
        hs = sh = ta = tn = td = sp = 0.0
        for k in range(pairs):
            wx, wy, wz = W[3 * k], W[3 * k + 1], W[3 * k + 2]
            X, Y, Z = pd.vec(wx), pd.vec(wy), pd.vec(wz)
            hs = max(hs, float(np.linalg.norm(pd.h(wx, wy) - pd.h(wy, wx))))
            zeta = pd.normals.T @ rng.standard_normal(len(pd.normals)) if len(pd.normals) else np.zeros_like(X)
            sh = max(sh, abs(pd.ip(pd.A(zeta, wx), Y) - pd.ip(X, pd.A(zeta, wy))))
            sh = max(sh, abs(pd.ip(pd.A(zeta, wx), Y) - pd.gA(zeta, wx, wy)))
            tX, nX = pd.split(pd.phi(X))
            tY = pd.tangential(pd.phi(Y))
            ta = max(ta, abs(pd.ip(X, tY) + pd.ip(tX, Y)))
            sp = max(sp, float(np.max(np.abs(tX + nX - pd.phi(X)))), abs(pd.ip(nX, Y)))
            TXY, NXY = TN_split(pd, X, Y)
            TYX, NYX = TN_split(pd, Y, X)
            tn = max(tn, float(np.linalg.norm(TXY + TYX)), float(np.linalg.norm(NXY + NYX)))
            TXZ = TN_split(pd, X, Z)[0]
            td = max(td, abs(pd.ip(TXY, Z) + pd.ip(Y, TXZ)))
        rep.append(judged("sub-h-sym", pi, 0, f"|h(X,Y) - h(Y,X)|, {pairs} random pairs", hs, 0.0, hs, tol, point=pt))
        rep.append(judged("sub-shape", pi, 0, "g(A_zeta X, Y) = g(X, A_zeta Y) = g(h(X,Y), zeta)", sh, 0.0, sh,
                          tol, point=pt))
        rep.append(judged("sub-t-antisym", pi, 0, "g(X, tY) + g(tX, Y) = 0", ta, 0.0, ta, tol, point=pt))
        rep.append(judged("sub-split", pi, 0, "phi X = tX + nX with nX normal", sp, 0.0, sp, tol, point=pt))
        rep.append(judged("sub-TN", pi, 0, "T_X Y + T_Y X = 0 and N_X Y + N_Y X = 0", tn, 0.0, tn, tol, point=pt,
                          gate=tn_gate))
        rep.append(judged("sub-TN", pi, 1, "g(T_X Y, W) + g(Y, T_X W) = 0", td, 0.0, td, tol, point=pt))
        H = mean_curvature(pd)
        mr = 0.0
        for zeta in pd.normals:
            direct = float(np.einsum("ab,ab->", pd.Ginv, np.einsum("abA,A->ab", pd.hF, pd.g @ zeta)))
            mr = max(mr, abs(pd.m * pd.ip(H, zeta) - direct))
        rep.append(judged("sub-mean", pi, 0, "m g(H, zeta) = trace of g(h(.,.), zeta)", float(np.linalg.norm(H)),
                          None, mr, tol, point=pt))
    return rep
