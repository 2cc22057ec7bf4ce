"""Linear algebra for indefinite symmetric forms.

Nothing here orthonormalizes: with indefinite metrics Gram-Schmidt breaks down
near null directions, so every projection goes through a Gram solve.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DegenerateMetric

SYMMETRY_TOL = 1e-12
DEGENERACY_FACTOR = 1e-10
SIGNATURE_TOL = 1e-9


def symform(a) -> np.ndarray:
    """Validate and return a symmetric matrix (a bilinear form at a point)."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"a symmetric form must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("form has non-finite entries")
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(a))):
        raise ValueError("form is not symmetric")
    return a


def signature(G, tol: float = SIGNATURE_TOL) -> tuple[int, int, int]:
    """Counts of eigenvalues (> tol, < -tol, within +-tol)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ev = np.linalg.eigvalsh(np.asarray(G, dtype=float))
    p = int(np.sum(ev > tol))
    q = int(np.sum(ev < -tol))
    return p, q, len(ev) - p - q


def degeneracy_threshold(G) -> float:
    G = np.asarray(G, dtype=float)
    r = float(np.max(np.linalg.norm(G, axis=1))) if G.size else 0.0
    return DEGENERACY_FACTOR * r ** G.shape[0]


def check_nondegenerate(G, what: str = "bilinear form") -> None:
    G = np.asarray(G, dtype=float)
    det = float(np.linalg.det(G))
    thr = degeneracy_threshold(G)
    # a zero matrix gives thr == 0, which must still count as degenerate
    if thr == 0.0 or abs(det) < thr:
        raise DegenerateMetric(det, thr, what)


def is_nondegenerate(G) -> bool:
    try:
        check_nondegenerate(G)
    except DegenerateMetric:
        return False
    return True


def solve(G, b) -> np.ndarray:
    """Solve ``G c = b`` after the degeneracy gate; ``b`` may carry extra columns."""
    G = np.asarray(G, dtype=float)
    check_nondegenerate(G)
    return np.linalg.solve(G, np.asarray(b, dtype=float))


def gram(vectors: Sequence, g) -> np.ndarray:
    """G_ij = g(v_i, v_j) for the rows ``vectors``."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    G = V @ np.asarray(g, dtype=float) @ V.T
    return 0.5 * (G + G.T)


def project(v, basis: Sequence, g) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split ``v`` into a part in span(basis) and a g-orthogonal remainder.

    Returns ``(coeffs, tangential, normal)`` with ``tangential = coeffs @ basis``
    and ``normal = v - tangential``.
    """
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)
    coeffs = solve(gram(B, g), B @ g @ v)
    tangential = coeffs @ B
    return coeffs, tangential, v - tangential


def rank(a, rel_tol: float = 1e-9) -> int:
    s = np.linalg.svd(np.atleast_2d(np.asarray(a, dtype=float)), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
