"""Arithmetic equivalence and automorphism groups of positive definite forms.

Both problems are solved by a basis backtrack: look for integer vectors
x_0..x_{d-1} (taken among the short vectors of A) whose Gram matrix under A
equals the target B.  The matrix P with columns x_j then satisfies
P^T A P = B, and det P = ±1 follows from det A = det B.  Automorphism groups
are built level by level along the stabilizer chain of the standard basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .. import exact_linalg as el
from ..qform import QuadraticForm, reduce_form, vectors_up_to
from .permgroup import PermutationGroup


def _int_scale(*forms: QuadraticForm) -> list[list[list[int]]]:
    den = 1
    for F in forms:
        for row in F.gram:
            for x in row:
                den = el.lcm(den, x.denominator)
    return [[[int(x * den) for x in row] for row in F.gram] for F in forms]


def _mat_vec(M, v):
    return tuple(sum(a * b for a, b in zip(row, v)) for row in M)


def _columns_to_matrix(cols) -> tuple:
    d = len(cols)
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def _int_matrix(M) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in M)


class _Backtrack:
    """Search for bases with prescribed Gram matrix ``target`` under ``A``."""

    def __init__(self, A: list, target: list, candidates: Sequence[tuple]):
        self.A = A
        self.T = target
        self.d = len(target)
        self.Av = {v: _mat_vec(A, v) for v in candidates}
        by_norm: dict = {}
        for v, av in self.Av.items():
            by_norm.setdefault(sum(a * b for a, b in zip(v, av)), []).append(v)
        self.levels = [by_norm.get(target[j][j], []) for j in range(self.d)]

    def consistent(self, j: int, chosen: list) -> list:
        T = self.T
        out = []
        for x in self.levels[j]:
            ax = self.Av.get(x) or _mat_vec(self.A, x)
            if all(sum(a * b for a, b in zip(ax, y)) == T[k][j] for k, y in enumerate(chosen)):
                out.append(x)
        return out

    def extend(self, chosen: list):
        j = len(chosen)
        if j == self.d:
            return list(chosen)
        for x in self.consistent(j, chosen):
            res = self.extend(chosen + [x])
            if res is not None:
                return res
        return None


def _both_signs(vectors) -> list:
    out = []
    for v in vectors:
        out.append(v)
        out.append(tuple(-x for x in v))
    return out


def arithmetic_equivalence(A: QuadraticForm, B: QuadraticForm):
    """Unimodular integer P with P^T A P = B, or None."""
    if A.dim != B.dim:
        raise ValueError("forms have different dimensions")
    A.require_pd()
    B.require_pd()
    if A.determinant != B.determinant:
        return None
    Bred, Q = reduce_form(B)
    bound = max(Bred.gram[i][i] for i in range(B.dim))
    short_a = vectors_up_to(A, bound)
    short_b = vectors_up_to(Bred, bound)
    if sorted(n for _, n in short_a) != sorted(n for _, n in short_b):
        return None
    Ai, Bi = _int_scale(A, Bred)
    bt = _Backtrack(Ai, Bi, _both_signs(v for v, _ in short_a))
    cols = bt.extend([])
    if cols is None:
        return None
    P1 = el.frac_matrix(_columns_to_matrix(cols))
    P = el.matmul(P1, el.inverse(el.frac_matrix(Q)))
    P = _int_matrix(P)
    if A.transform(P) != B or abs(el.determinant(P)) != 1:
        raise AssertionError("equivalence failed exact verification")
    return P


@dataclass(frozen=True)
class FormAutomorphisms:
    order: int
    matrices: tuple          # generators P with P^T A P = A
    min_vectors: tuple       # Min(A)/± representatives, the permutation domain
    permutations: tuple      # permutations[k]: action of matrices[k] on min_vectors

    @property
    def group(self) -> PermutationGroup:
        return PermutationGroup(len(self.min_vectors), self.permutations)


def line_permutation(P, vectors: Sequence[tuple]) -> tuple:
    """Action of an integer matrix on vectors taken up to sign."""
    index = {v: i for i, v in enumerate(vectors)}
    out = []
    for v in vectors:
        w = el.canonical_sign(_mat_vec(P, v))
        out.append(index[w])
    return tuple(out)


def _matrix_orbit(start: tuple, gens) -> set:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for g in gens:
            y = _mat_vec(g, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def aut_group(A: QuadraticForm) -> FormAutomorphisms:
    """Aut(A) = {P in GL_d(Z) : P^T A P = A} with its action on Min(A)/±."""
    A.require_pd()
    d = A.dim
    Ared, R = reduce_form(A)
    Ai, = _int_scale(Ared)
    bound = max(Ared.gram[i][i] for i in range(d))
    bt = _Backtrack(Ai, Ai, _both_signs(v for v, _ in vectors_up_to(Ared, bound)))
    basis = [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
    gens: list[tuple] = []
    order = 1
    for i in reversed(range(d)):
        lower = list(gens)
        prefix = basis[:i]
        orbit = _matrix_orbit(basis[i], gens)
        failed: set = set()
        for x in bt.consistent(i, prefix):
            if x in orbit or x in failed:
                continue
            cols = bt.extend(prefix + [x])
            if cols is None:
                failed |= _matrix_orbit(x, lower)
            else:
                gens.append(_columns_to_matrix(cols))
                orbit = _matrix_orbit(basis[i], gens)
        order *= len(orbit)
    Rf = el.frac_matrix(R)
    Rinv = el.inverse(Rf)
    mats = []
    for g in gens:
        M = _int_matrix(el.matmul(Rf, el.matmul(el.frac_matrix(g), Rinv)))
        if A.transform(M) != A:
            raise AssertionError("automorphism failed exact verification")
        mats.append(M)
    mins = A.minimal_vectors.vectors
    perms = tuple(line_permutation(M, mins) for M in mats)
    return FormAutomorphisms(order, tuple(mats), mins, perms)
