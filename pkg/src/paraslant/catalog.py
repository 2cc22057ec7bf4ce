"""Stable check identifiers with the statement each one verifies and a short source anchor."""

from __future__ import annotations

from typing import NamedTuple


class CheckInfo(NamedTuple):
    check_id: str
    statement: str
    anchor: str


CHECKS: tuple[CheckInfo, ...] = (
    CheckInfo("ax-phi2", "phi^2 = Id - eta(x)xi and eta(xi) = 1", "where $Id$ is the identity transformation"),
    CheckInfo("ax-phixi", "phi xi = 0, eta o phi = 0, rank(phi) = 2n", "it can be easily deduced"),
    CheckInfo("ax-metric", "g(X,Y) = -g(phiX,phiY) + eta(X)eta(Y), signature (n+1,n)",
              "a non-degenerate pseudo-Riemannian metric"),
    CheckInfo("ax-eta-dual", "g(X,xi) = eta(X)", "metrically dual to"),
    CheckInfo("ax-antisym", "g(phiX,Y) = -g(X,phiY); Phi(X,Y) = g(X,phiY) is skew", "the fundamental $2$-form $\\Phi$"),
    CheckInfo("def-pc", "nabla phi = 0 and nabla eta = 0 (paracosymplectic)", "forms $\\eta$ and $\\varphi$ are parallel"),
    CheckInfo("def-npc", "(nabla_X phi)Y + (nabla_Y phi)X = 0 (nearly paracosymplectic)",
              "nearly paracosymplectic if $\\varphi$ is killing"),
    CheckInfo("def-nps", "(nabla_X phi)Y + (nabla_Y phi)X = 2g(X,Y)xi + eta(X)Y + eta(Y)X",
              "nearly para Sasakian if"),
    CheckInfo("prop-2.2", "xi is a Killing vector field on a nearly paracosymplectic manifold",
              "the vector field $\\xi$ is killing"),
    CheckInfo("sub-h-sym", "h(X,Y) = h(Y,X)", "Gauss and Weingarten formulas are given"),
    CheckInfo("sub-shape", "g(A_zeta X, Y) = g(h(X,Y), zeta) = g(X, A_zeta Y)",
              "the shape operator $A_{\\zeta}$ associated"),
    CheckInfo("sub-t-antisym", "g(X,tY) = -g(tX,Y)", "g(X,tY)=-g(tX,Y)"),
    CheckInfo("sub-split", "phi X = tX + nX with nX normal", "tangential (resp., normal) part of"),
    CheckInfo("sub-TN", "T_XY + T_YX = 0, N_XY + N_YX = 0, g(T_XY,W) = -g(Y,T_XW)",
              "the property of $\\mathcal{T}$ and $\\mathcal{N}$"),
    CheckInfo("sub-mean", "H = (1/m) trace h", "The mean curvature vector $H$"),
    CheckInfo("def-2.2", "t^2 = lambda(Id - eta(x)xi) with constant lambda >= 0 on the distribution",
              "there exists a constant $\\lambda \\geq 0$"),
    CheckInfo("prop-3.1", "g(tX,tY) = lambda g(phiX,phiY), g(nX,nY) = (1-lambda) g(phiX,phiY)",
              "Let $M$ be a slant submanifold"),
    CheckInfo("prop-3.2", "t'nX = (1-lambda)(X - eta(X)xi) and n'nX = -ntX", "$t'nX=(1-\\lambda)(X-\\eta(X)\\xi)$"),
    CheckInfo("def-pr", "TM = D_perp + D_lambda + <xi>, orthogonal, non-degenerate, anti-invariant, slant, proper",
              "pair of non-degenerate orthogonal distribution"),
    CheckInfo("integrability", "[X,Y] stays in the distribution", "is integrable if and only if"),
    CheckInfo("tg-foliation", "nabla_X Y stays in the distribution", "defines a totally geodesic foliation"),
    CheckInfo("thm-3.1", "2 lambda g(nabla~_X Y, Z) = g(A_ntY X,Z) + g(A_ntX Y,Z) - g(A_phiZ tY,X) - g(A_phiZ tX,Y)",
              "is integrable if and only if"),
    CheckInfo("thm-3.2", "2 g(A_ntX Z, W) = g(A_phiW Z, tX) + g(A_phiZ W, tX)",
              "defines a totally geodesic foliation if and only if"),
    CheckInfo("def-warped", "induced metric = g_B + f^2 g_F with f on the base", "said to be \\textit{warped product} if"),
    CheckInfo("prop-4.1", "nabla_X Y in TB and nabla_X Z = nabla_Z X = X(ln f) Z",
              "we obtain on warped product manifold"),
    CheckInfo("prop-4.2", "xi tangent to the fiber forces Z(ln f) = 0", "There do not exist a"),
    CheckInfo("lem-5.1a", "2g(A_ntX X,Z) = g(A_phiZ X,tX) + g(A_nX Z,tX) - (Z ln f) lambda |X|^2",
              "for all $X$ tangent to $N_{\\lambda}$"),
    CheckInfo("lem-5.1b", "g(A_nX Z,tX) = 2g(A_phiZ X,tX) - g(A_ntX X,Z)", "for all $X$ tangent to $N_{\\lambda}$"),
    CheckInfo("lem-5.2", "g(T_X tX, Z) = g(A_ntX X,Z) - g(A_nX Z,tX)", "for all $X$ is tangent to"),
    CheckInfo("thm-5.1", "g(T_X tX, Z) = (2/3)(Z ln f) lambda |X|^2; product iff T_X tX tangent to the fiber",
              "(Z\\ln f)\\lambda\\vert\\vert X \\vert\\vert^{2}"),
    CheckInfo("thm-5.2", "mixed totally geodesic: g(A_phiZ X, tX) = (1/3)(Z ln f) lambda |X|^2",
              "mixed totally geodesic"),
    CheckInfo("thm-5.3", "A_ntX Z - A_phiZ tX = -(1/3) lambda Z(mu) X; h_lambda(X,Y) = -(1/3) g(X,Y) grad mu",
              "shape operator of $M$ satisfies"),
    CheckInfo("cons-5.1", "lem-5.1a + lem-5.1b residuals equal the thm-5.2 combination (solved shape operators)",
              "From formula-$(a)$ and formula-$(b)$"),
)

BY_ID = {c.check_id: c for c in CHECKS}


def list_checks() -> list[CheckInfo]:
    return list(CHECKS)


def format_table(checks=CHECKS) -> str:
    w = max(len(c.check_id) for c in checks)
    lines = [f"{'check_id':<{w}}  statement  |  anchor"]
    lines += [f"{c.check_id:<{w}}  {c.statement}  |  \"{c.anchor}\"" for c in checks]
    return "\n".join(lines) + "\n"
