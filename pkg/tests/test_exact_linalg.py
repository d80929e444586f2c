from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from perfectforms import exact_linalg as el


def small_matrices(n_max=4, lo=-5, hi=5):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n))


def symmetrize(M):
    n = len(M)
    return [[M[i][j] + M[j][i] for j in range(n)] for i in range(n)]


def test_ldlt_identity():
    res = el.ldlt(el.identity(3))
    assert res.pivots == (1, 1, 1)
    assert res.unit_lower == el.identity(3)
    assert res.complete


def test_ldlt_a2_pivots():
    res = el.ldlt([[2, -1], [-1, 2]])
    assert res.pivots == (2, Fr(3, 2))
    assert el.ldlt_reconstruct(res) == el.frac_matrix([[2, -1], [-1, 2]])


def test_ldlt_mixed_signs():
    assert sorted(el.ldlt([[1, 0], [0, -1]]).pivots) == [-1, 1]


def test_ldlt_rejects_asymmetric():
    with pytest.raises(el.AsymmetricMatrixError) as info:
        el.ldlt([[1, 2], [3, 4]])
    assert info.value.pair in ((0, 1), (1, 0))


@given(small_matrices())
def test_ldlt_reconstructs_when_complete(M):
    S = symmetrize(M)
    res = el.ldlt(S)
    if res.complete:
        n = len(S)
        P = [[S[res.perm[i]][res.perm[j]] for j in range(n)] for i in range(n)]
        assert el.ldlt_reconstruct(res) == el.frac_matrix(P)


def test_definiteness_examples():
    assert el.definiteness([[2, -1], [-1, 2]]).kind == "positive-definite"
    psd = el.definiteness([[1, 1], [1, 1]])
    assert psd.kind == "positive-semidefinite" and psd.witness == (1, -1)
    ind = el.definiteness([[1, 0], [0, -1]])
    assert ind.kind == "indefinite" and ind.witness == (0, 1)


@given(small_matrices())
def test_definiteness_witnesses_are_exact(M):
    S = symmetrize(M)
    res = el.definiteness(S)
    if res.kind == "positive-semidefinite":
        assert any(res.witness)
        assert all(x == 0 for x in el.matvec(S, res.witness))
    elif res.kind == "indefinite":
        assert el.quad(S, res.witness) < 0
    else:
        assert el.determinant(S) > 0


def test_solve_examples():
    sol = el.solve([[1, 1]], [2])
    assert sol.feasible and sol.particular == (2, 0) and sol.kernel == [(-1, 1)]
    assert not el.solve([[1, 1], [1, 1]], [1, 2]).feasible


@given(small_matrices(), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_solutions_and_certificates(M, b):
    b = b[: len(M)]
    sol = el.solve(M, b)
    if sol.feasible:
        assert list(el.matvec(M, sol.particular)) == b
        for k in sol.kernel:
            assert all(x == 0 for x in el.matvec(M, k))
        assert len(sol.kernel) == len(M[0]) - el.rank(M)
    else:
        y = sol.certificate
        assert all(x == 0 for x in el.matvec(el.transpose(el.frac_matrix(M)), y))
        assert el.dot(y, b) != 0


@given(small_matrices())
def test_inverse_and_determinant(M):
    if el.determinant(M) != 0:
        assert el.matmul(M, el.inverse(M)) == el.identity(len(M))


def test_lp_examples():
    out = el.lp_solve([1], A_ub=[[1]], b_ub=[1])
    assert out.status == "optimal" and out.value == 1 and out.solution == (1,)
    un = el.lp_solve([1], A_ub=[[-1]], b_ub=[0])
    assert un.status == "unbounded" and un.certificate == (1,)
    inf = el.lp_solve([0], A_eq=[[1]], b_eq=[-1])
    assert inf.status == "infeasible"


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(-4, 6), min_size=4, max_size=4),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_lp_outcomes_are_certified(A, b, c):
    b = b[: len(A)]
    # box the variables so that unboundedness comes only from the objective sign
    out = el.lp_solve(c, A_ub=A, b_ub=b)
    if out.status == "optimal":
        x = out.solution
        assert all(v >= 0 for v in x)
        assert all(el.dot(row, x) <= bi for row, bi in zip(A, b))
        assert el.dot(c, x) == out.value
        y = out.certificate
        # dual feasibility and strong duality
        assert all(v >= 0 for v in y)
        assert el.dot(y, b) == out.value
        for j in range(3):
            assert sum(y[i] * A[i][j] for i in range(len(A))) >= c[j]
    elif out.status == "infeasible":
        y = out.certificate
        assert all(v >= 0 for v in y)
        for j in range(3):
            assert sum(y[i] * A[i][j] for i in range(len(A))) >= 0
        assert el.dot(y, b) < 0
    else:
        r = out.certificate
        assert all(v >= 0 for v in r) and el.dot(c, r) > 0
        assert all(el.dot(row, r) <= 0 for row in A)


def test_integer_kernel_and_rank():
    rows = [(1, 2, 3), (2, 4, 6)]
    assert el.integer_rank(rows) == 1
    ker = el.integer_kernel(rows, 3)
    assert len(ker) == 2
    for k in ker:
        assert all(el.dot(r, k) == 0 for r in rows)
