"""Vector families, their characteristic graphs, and restricted
isomorphisms / automorphisms (linear maps permuting a family)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .. import exact_linalg as el
from .canon import CanonicalLabeling, canonical_labeling
from .permgroup import PermutationGroup


class RankDeficientFamilyError(ValueError):
    pass


@dataclass(frozen=True)
class VectorFamily:
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in v) for v in self.vectors)
        if not vecs:
            raise RankDeficientFamilyError("empty family")
        d = len(vecs[0])
        if any(len(v) != d for v in vecs):
            raise ValueError("vectors of unequal length")
        if len(set(vecs)) != len(vecs):
            raise ValueError("family contains duplicate vectors")
        if el.integer_rank(vecs) != d:
            raise RankDeficientFamilyError(f"family does not span R^{d}")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return len(self.vectors[0])

    def __len__(self):
        return len(self.vectors)

    def antipodal(self) -> "VectorFamily":
        """The family closed under v -> -v (v_i first, then -v_i)."""
        return VectorFamily(self.vectors + tuple(tuple(-x for x in v) for v in self.vectors))

    @cached_property
    def graph(self) -> "CharacteristicGraph":
        return characteristic_graph(self)

    @cached_property
    def labeling(self) -> CanonicalLabeling:
        return canonical_labeling(self.graph.weights)

    def basis_indices(self) -> tuple:
        chosen: list[int] = []
        rows: list = []
        for i, v in enumerate(self.vectors):
            if el.integer_rank(rows + [v]) > len(rows):
                chosen.append(i)
                rows.append(v)
                if len(rows) == self.dim:
                    break
        return tuple(chosen)


@dataclass(frozen=True)
class CharacteristicGraph:
    """Weights c_ij = v_i^T Q^{-1} v_j with Q = sum v v^T."""

    weights: tuple

    @property
    def size(self) -> int:
        return len(self.weights)

    def trace(self) -> Fraction:
        return sum((self.weights[i][i] for i in range(self.size)), Fraction(0))


def _weights(vectors, Q) -> tuple:
    """Rows v_i^T Q^{-1} v_j using the integer adjugate of the integer Q."""
    d = len(Q)
    det = el.determinant(Q)
    inv = el.inverse(Q)
    adj = [[int(inv[i][j] * det) for j in range(d)] for i in range(d)]
    det = int(det)
    w = [tuple(sum(adj[r][c] * v[c] for c in range(d)) for r in range(d)) for v in vectors]
    out = []
    for a in w:
        out.append(tuple(Fraction(sum(x * y for x, y in zip(a, v)), det) for v in vectors))
    return tuple(out)


def characteristic_graph(family: VectorFamily) -> CharacteristicGraph:
    d = family.dim
    Q = [[sum(v[i] * v[j] for v in family.vectors) for j in range(d)] for i in range(d)]
    return CharacteristicGraph(_weights(family.vectors, Q))


def canonical_key(graph: CharacteristicGraph) -> tuple[bytes, tuple]:
    lab = canonical_labeling(graph.weights)
    return lab.key, lab.order


def _solve_map(f1: VectorFamily, f2: VectorFamily, sigma: Sequence[int]):
    """The unique matrix M with M v_i = w_{sigma(i)} on a basis of f1, if it
    maps the whole family onto f2 accordingly; else None."""
    basis = f1.basis_indices()
    V = [[Fraction(f1.vectors[i][r]) for i in basis] for r in range(f1.dim)]
    Wt = [[Fraction(f2.vectors[sigma[i]][r]) for i in basis] for r in range(f1.dim)]
    M = el.matmul(Wt, el.inverse(V))
    for i, v in enumerate(f1.vectors):
        if tuple(el.matvec(M, v)) != f2.vectors[sigma[i]]:
            return None
    return M


def restricted_isomorphism(f1: VectorFamily, f2: VectorFamily):
    """(M, sigma) with M v_i = w_sigma(i) for all i, or None."""
    if len(f1) != len(f2) or f1.dim != f2.dim:
        return None
    l1, l2 = f1.labeling, f2.labeling
    if l1.key != l2.key:
        return None
    sigma = [0] * len(f1)
    for a, b in zip(l1.order, l2.order):
        sigma[a] = b
    # equal canonical graphs determine the map uniquely on a spanning family
    M = _solve_map(f1, f2, sigma)
    if M is None:
        return None
    return M, tuple(sigma)


@dataclass(frozen=True)
class RestrictedAutomorphisms:
    group: PermutationGroup
    matrices: tuple  # matrices[k] realizes group.generators[k]


def restricted_automorphism_group(family: VectorFamily, antipodal: bool = False) -> RestrictedAutomorphisms:
    """Linear maps permuting the family.  With ``antipodal`` the family is
    read as a set of lines: maps may send v_i to -v_j, and the group acts on
    the N line indices."""
    n = len(family)
    work = family.antipodal() if antipodal else family
    lab = work.labeling
    perms, mats = [], []
    for g in lab.automorphisms:
        M = _solve_map(work, work, g)
        if M is None:  # cannot happen for a full-rank family; keep it honest
            raise AssertionError("graph automorphism did not extend linearly")
        p = tuple(x % n for x in g[:n]) if antipodal else g
        if p not in perms and any(i != j for i, j in enumerate(p)):
            perms.append(p)
            mats.append(M)
    return RestrictedAutomorphisms(PermutationGroup(n, perms), tuple(mats))
