"""Jacobians, Hessians and Christoffel symbols of expression-defined maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import numlin
from .expr import Expr, as_expr, evaluate
from .jet import Jet1, Jet2, scalar


def _bindings(names: Sequence[str], u, constants: Mapping[str, float], carrier):
    k = len(names)
    b: dict[str, object] = {c: float(v) for c, v in constants.items()}
    for i, n in enumerate(names):
        b[n] = float(u[i]) if carrier is None else carrier.variable(float(u[i]), i, k)
    return b


def _grad(x, k: int) -> np.ndarray:
    return x.grad if hasattr(x, "grad") else np.zeros(k)


def _hess(x, k: int) -> np.ndarray:
    return x.hess if hasattr(x, "hess") else np.zeros((k, k))


def eval_values(exprs: Sequence[Expr], names: Sequence[str], u, constants=None) -> np.ndarray:
    b = _bindings(names, u, constants or {}, None)
    return np.array([float(evaluate(e, b)) for e in exprs])


def eval_jet1(exprs: Sequence[Expr], names: Sequence[str], u, constants=None):
    """Values (n,) and gradients (n, k) of each expression."""
    k = len(names)
    b = _bindings(names, u, constants or {}, Jet1)
    out = [evaluate(e, b) for e in exprs]
    return np.array([scalar(x) for x in out]), np.array([_grad(x, k) for x in out]).reshape(len(out), k)


def eval_jet2(exprs: Sequence[Expr], names: Sequence[str], u, constants=None):
    """Values (n,), gradients (n, k) and Hessians (n, k, k)."""
    k = len(names)
    b = _bindings(names, u, constants or {}, Jet2)
    out = [evaluate(e, b) for e in exprs]
    vals = np.array([scalar(x) for x in out])
    grads = np.array([_grad(x, k) for x in out]).reshape(len(out), k)
    hess = np.array([_hess(x, k) for x in out]).reshape(len(out), k, k)
    return vals, grads, hess


@dataclass(frozen=True)
class JetMap:
    """A map R^m -> R^N whose components are expressions in ``names``."""

    components: tuple
    names: tuple
    constants: Mapping[str, float] = field(default_factory=dict)

    def __init__(self, components, names, constants=None):
        object.__setattr__(self, "components", tuple(as_expr(c) for c in components))
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "constants", dict(constants or {}))

    def value(self, u) -> np.ndarray:
        return eval_values(self.components, self.names, u, self.constants)

    def jets(self, u):
        """(value, jacobian N x m, hessian N x m x m) in one pass."""
        v, J, H = eval_jet2(self.components, self.names, u, self.constants)
        return v, J, 0.5 * (H + H.transpose(0, 2, 1))


def jacobian(f: JetMap, u) -> np.ndarray:
    return eval_jet1(f.components, f.names, u, f.constants)[1]


def hessian(f: JetMap, u) -> np.ndarray:
    return f.jets(u)[2]


def christoffels_from(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma[k, i, j] from the metric and dg[a, b, l] = d_l g_ab."""
    # first-kind symbols indexed [l, i, j]
    d_i_gjl = np.einsum("jli->lij", dg)
    d_j_gil = np.einsum("ilj->lij", dg)
    d_l_gij = np.einsum("ijl->lij", dg)
    lower = 0.5 * (d_i_gjl + d_j_gil - d_l_gij)
    gamma = np.einsum("kl,lij->kij", numlin.solve(g, np.eye(g.shape[0])), lower)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def metric_jets(entries: Sequence[Sequence[Expr]], names: Sequence[str], u, constants=None):
    """Metric matrix and its coordinate derivatives dg[a, b, l]."""
    d = len(entries)
    flat = [as_expr(entries[a][b]) for a in range(d) for b in range(d)]
    vals, grads = eval_jet1(flat, names, u, constants)
    g = vals.reshape(d, d)
    dg = grads.reshape(d, d, len(names))
    return 0.5 * (g + g.T), 0.5 * (dg + dg.transpose(1, 0, 2))


def christoffels(entries: Sequence[Sequence[Expr]], names: Sequence[str], u, constants=None) -> np.ndarray:
    """Levi-Civita symbols Gamma[k, i, j] of an expression metric at ``u``."""
    g, dg = metric_jets(entries, names, u, constants)
    return christoffels_from(g, dg)


def central_difference(fn, u, h: float = 1e-5) -> np.ndarray:
    """Finite-difference Jacobian of a vector function; cross-check oracle only."""
    u = np.asarray(u, dtype=float)
    f0 = np.asarray(fn(u), dtype=float)
    out = np.empty(f0.shape + u.shape)
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = h
        out[..., i] = (np.asarray(fn(u + e)) - np.asarray(fn(u - e))) / (2 * h)
    return out
