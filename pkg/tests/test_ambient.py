import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraslant.ambient import (AmbientStructure, canonical_paracosymplectic, check_axioms, check_killing_xi,
                               check_nearly_para_sasakian, check_nearly_paracosymplectic,
                               check_paracosymplectic, nabla_phi, para_sasakian_residual)
from paraslant.report import FAIL, PASS


def _canonical_matrices(n):
    s = canonical_paracosymplectic(n)
    a = s.at(np.zeros(s.dim))
    return s, a


def test_canonical_structure_in_five_dimensions():
    s, a = _canonical_matrices(2)
    assert s.coords == ("x1", "x2", "y1", "y2", "t")
    assert np.array_equal(a.g, np.diag([1.0, 1, -1, -1, 1]))
    assert np.array_equal(a.phi @ np.eye(5)[0], np.eye(5)[2])
    assert np.array_equal(a.phi @ np.eye(5)[3], np.eye(5)[1])
    assert np.array_equal(a.xi, np.eye(5)[4]) and np.array_equal(a.eta, np.eye(5)[4])


def test_canonical_structure_in_seven_dimensions():
    s, a = _canonical_matrices(3)
    assert s.dim == 7 and s.n == 3
    assert np.linalg.matrix_rank(a.phi) == 6


def test_dimension_must_be_odd():
    with pytest.raises(ValueError):
        AmbientStructure(["x", "y"], [["0", "1"], ["1", "0"]], ["0", "1"], ["0", "1"], [["1", "0"], ["0", "1"]])
    with pytest.raises(ValueError):
        canonical_paracosymplectic(0)


def test_axioms_pass_for_canonical_structure():
    s = canonical_paracosymplectic(2)
    rep = check_axioms(s, np.random.default_rng(0).normal(size=(10, 5)), tol=1e-12)
    assert rep.passed


def test_doubled_eta_term_breaks_compatibility_along_xi():
    # g(xi, xi) = 2 while -g(phi xi, phi xi) + eta(xi)^2 = 1
    g = [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "2"]]
    phi = [["0", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]]
    s = AmbientStructure(["x", "y", "t"], phi, ["0", "0", "1"], ["0", "0", "1"], g)
    a = s.at([0.0, 0.0, 0.0])
    xi = a.xi
    compat = a.ip(xi, xi) - (-a.ip(a.phi @ xi, a.phi @ xi) + (a.eta @ xi) ** 2)
    assert compat == pytest.approx(1.0)
    rep = check_axioms(s, [[0.0, 0.0, 0.0]], tol=1e-12)
    statuses = {r.check_id: r.status for r in rep.rows if r.probe_index == 0}
    assert statuses["ax-metric"] == FAIL and statuses["ax-eta-dual"] == FAIL
    assert statuses["ax-phi2"] == PASS


def test_nabla_phi_vanishes_on_canonical_structure():
    s = canonical_paracosymplectic(2)
    rng = np.random.default_rng(1)
    for _ in range(10):
        p, X, Y = rng.normal(size=(3, 5))
        assert np.array_equal(nabla_phi(s, p, X, Y), np.zeros(5))
        assert np.array_equal(nabla_phi(s, p, X, X), np.zeros(5))


def _perturbed(eps):
    # coordinates (x1, y1, t); phi swaps x1 and y1, one entry picks up eps * x1
    phi = [["0", f"1 + {eps}*x1", "0"], ["1", "0", "0"], ["0", "0", "0"]]
    g = [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]]
    return AmbientStructure(["x1", "y1", "t"], phi, ["0", "0", "1"], ["0", "0", "1"], g)


@pytest.mark.parametrize("eps", [1e-3, 1e-2, 1e-1])
def test_perturbed_phi_is_detected_with_residual_of_order_eps(eps):
    pts = [[0.0, 0.0, 0.0], [0.5, -0.2, 1.0]]
    rep = check_nearly_paracosymplectic(_perturbed(eps), pts, tol=1e-12, rng=4)
    assert all(r.status == FAIL for r in rep.rows)
    assert all(0.01 * eps <= r.residual <= 100 * eps for r in rep.rows)


def test_perturbation_residual_is_linear_in_eps():
    pts = [[0.3, 0.1, 0.0]]
    r1 = check_nearly_paracosymplectic(_perturbed(1e-3), pts, tol=1.0, rng=4).max_residual()
    r2 = check_nearly_paracosymplectic(_perturbed(2e-3), pts, tol=1.0, rng=4).max_residual()
    assert r2 / r1 == pytest.approx(2.0, rel=1e-9)


def test_para_sasakian_probes_on_canonical_structure():
    s = canonical_paracosymplectic(2)
    rep = check_nearly_para_sasakian(s, [np.zeros(5)], tol=1e-12, rng=0)
    first, xi_row = rep.by_check("def-nps")[:2]
    assert (first.lhs, first.rhs, first.residual) == (0.0, 2.0, 2.0)
    assert xi_row.probe == "X = Y = xi" and xi_row.status == FAIL
    a = s.at(np.zeros(5))
    # null X with eta(X) = 0: the right side vanishes, so the residual is |LHS| = 0
    X = np.array([1.0, 0, 1.0, 0, 0])
    assert a.ip(X, X) == 0.0
    assert para_sasakian_residual(a, X, X) == (0.0, 0.0, 0.0)


def test_killing_xi_on_canonical_structure():
    s = canonical_paracosymplectic(3)
    rep = check_killing_xi(s, np.random.default_rng(2).normal(size=(5, 7)), tol=1e-12)
    assert rep.passed and rep.max_residual() == 0.0


def test_killing_check_is_gated_off_a_nearly_paracosymplectic_ambient():
    rep = check_killing_xi(_perturbed(0.1), [[0.2, 0.0, 0.0]], tol=1e-12)
    assert rep.by_check("prop-2.2")[0].status == "NOT-APPLICABLE"


# -- properties -----------------------------------------------------------------


def _transformed(n, A):
    """The canonical structure written in linear coordinates y = A x."""
    s, a = _canonical_matrices(n)
    Ainv = np.linalg.inv(A)
    phi = A @ a.phi @ Ainv
    g = Ainv.T @ a.g @ Ainv
    xi = A @ a.xi
    eta = a.eta @ Ainv
    txt = lambda M: [[repr(float(v)) for v in row] for row in M]  # noqa: E731
    return AmbientStructure(s.coords, txt(phi), [repr(float(v)) for v in xi], [repr(float(v)) for v in eta],
                            txt(0.5 * (g + g.T)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_axioms_are_coordinate_independent(n, seed):
    rng = np.random.default_rng(seed)
    d = 2 * n + 1
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    A = Q @ np.diag(rng.uniform(0.7, 1.5, d))
    s = _transformed(n, A)
    pts = rng.normal(size=(5, d))
    assert check_axioms(s, pts, tol=1e-9, rng=seed, pairs=100).passed
    # paracosymplectic implies nearly paracosymplectic
    assert check_paracosymplectic(s, pts, tol=1e-9).passed
    assert check_nearly_paracosymplectic(s, pts, tol=1e-9, rng=seed).passed


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_canonical_axioms_at_random_points(n, seed):
    pts = np.random.default_rng(seed).uniform(-10, 10, size=(200, 2 * n + 1))
    rep = check_axioms(canonical_paracosymplectic(n), pts, tol=1e-12, rng=seed, pairs=100)
    assert rep.passed and rep.max_residual() <= 1e-12
