"""Positive definite quadratic forms over Z^d: minima, minimal vectors,
perfection, eutaxy, the Hermite invariant and a small catalog of root
lattice Gram matrices.

A form is identified with its symmetric Gram matrix; ``q(x) = x^T A x``.
Minimal vector sets keep one vector per antipodal pair, signed so that the
first nonzero coordinate is positive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import isqrt
from pathlib import Path
from typing import Iterable, Sequence

import gmpy2

from . import exact_linalg as el


class NotPositiveDefiniteError(ValueError):
    def __init__(self, witness, kind):
        super().__init__(f"form is not positive definite ({kind}); witness vector {list(witness)}")
        self.witness = witness
        self.kind = kind


class FormFileError(ValueError):
    pass


@dataclass(frozen=True)
class MinimalVectorSet:
    minimum: Fraction
    vectors: tuple  # tuple of integer tuples, antipodally reduced, sorted

    @property
    def kissing_number(self) -> int:
        return 2 * len(self.vectors)


@dataclass(frozen=True, eq=True)
class QuadraticForm:
    gram: tuple

    def __post_init__(self):
        object.__setattr__(self, "gram", el.symmetric_matrix(self.gram))

    @classmethod
    def from_rows(cls, rows) -> "QuadraticForm":
        return cls(el.symmetric_matrix(rows))

    @property
    def dim(self) -> int:
        return len(self.gram)

    def __call__(self, v) -> Fraction:
        return el.quad(self.gram, v)

    def inner(self, u, v) -> Fraction:
        return el.bilinear(self.gram, u, v)

    def transform(self, P) -> "QuadraticForm":
        """P^T A P."""
        P = el.frac_matrix(P)
        return QuadraticForm(el.matmul(el.transpose(P), el.matmul(self.gram, P)))

    def scaled(self, c) -> "QuadraticForm":
        return QuadraticForm(el.scale_matrix(c, self.gram))

    @cached_property
    def definiteness(self) -> el.Definiteness:
        return el.definiteness(self.gram)

    def require_pd(self) -> None:
        d = self.definiteness
        if not d.positive_definite:
            raise NotPositiveDefiniteError(d.witness, d.kind)

    @cached_property
    def determinant(self) -> Fraction:
        return el.determinant(self.gram)

    @cached_property
    def minimal_vectors(self) -> MinimalVectorSet:
        return arithmetical_minimum(self)

    @property
    def minimum(self) -> Fraction:
        return self.minimal_vectors.minimum

    def integral_primitive(self) -> "QuadraticForm":
        """The positive multiple with integer entries of content 1."""
        return self.scaled(el.integer_content_scale(self.gram))

    def int_rows(self) -> list[list[int]]:
        rows = []
        for r in self.gram:
            if any(x.denominator != 1 for x in r):
                raise ValueError("form is not integral")
            rows.append([int(x) for x in r])
        return rows


# ---------------------------------------------------------------- enumeration

def lll_reduce(A: QuadraticForm, delta=Fraction(3, 4)) -> tuple["QuadraticForm", tuple]:
    """Exact LLL reduction on the Gram matrix.  Returns (P^T A P, P) with P
    unimodular; the columns of P are the reduced basis."""
    A.require_pd()
    d = A.dim
    Ag = [[gmpy2.mpq(x.numerator, x.denominator) for x in row] for row in A.gram]
    G = [row[:] for row in Ag]
    basis = [[int(i == j) for i in range(d)] for j in range(d)]  # basis[j] = column j
    delta = gmpy2.mpq(delta.numerator, delta.denominator)

    def gso():
        mu = [[gmpy2.mpq(0)] * d for _ in range(d)]
        bstar = [gmpy2.mpq(0)] * d
        for i in range(d):
            for j in range(i):
                acc = G[i][j]
                for l in range(j):
                    acc -= mu[j][l] * mu[i][l] * bstar[l]
                mu[i][j] = acc / bstar[j]
            acc = G[i][i]
            for l in range(i):
                acc -= mu[i][l] * mu[i][l] * bstar[l]
            bstar[i] = acc
        return mu, bstar

    def recompute_row(k):
        bk = basis[k]
        for i in range(d):
            bi = basis[i]
            val = gmpy2.mpq(0)
            for r in range(d):
                if bk[r]:
                    for c in range(d):
                        if bi[c]:
                            val += bk[r] * Ag[r][c] * bi[c]
            G[k][i] = G[i][k] = val

    k = 1
    while k < d:
        mu, bstar = gso()
        for j in reversed(range(k)):
            q = int(gmpy2.floor(mu[k][j] + gmpy2.mpq(1, 2)))
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[j])]
                recompute_row(k)
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            recompute_row(k)
            recompute_row(k - 1)
            k = max(k - 1, 1)
    P = tuple(tuple(basis[j][i] for j in range(d)) for i in range(d))
    return A.transform(P), P


def _ldl_data(A: QuadraticForm):
    A.require_pd()
    res = el.ldlt(A.gram)
    n = A.dim
    mq = lambda x: gmpy2.mpq(x.numerator, x.denominator)
    # mu[k] = list of (i, L[i][k]) for i > k with nonzero coefficient
    mu = [[(i, mq(res.unit_lower[i][k])) for i in range(k + 1, n) if res.unit_lower[i][k]] for k in range(n)]
    return res.perm, [mq(x) for x in res.pivots], mu


def _enumerate(A: QuadraticForm, bound: Fraction, shrink: bool):
    """Lattice points with y^T A y <= bound, one per antipodal pair.

    The form is LLL-reduced first; enumeration is depth-first in the LDL^T
    pivot order of the reduced form (last pivot outermost).  With ``shrink``
    the bound decreases to the best norm found so far and only vectors
    attaining it are kept.
    """
    red, P = lll_reduce(A)
    perm, D, mu = _ldl_data(red)
    n = A.dim
    y = [0] * n
    best = [gmpy2.mpq(bound.numerator, bound.denominator)]
    found: list = []

    def candidates(k, center, budget):
        r2 = budget / D[k]
        s = int(gmpy2.isqrt(gmpy2.floor(r2))) + 1
        c_floor = int(gmpy2.floor(center))
        for val in range(-c_floor - s - 1, -c_floor + s + 2):
            z = val + center
            t = D[k] * z * z
            if t <= budget:
                yield val, t

    def rec(k, used, all_zero_above):
        budget = best[0] - used
        if budget < 0:
            return
        center = gmpy2.mpq(0)
        for i, lik in mu[k]:
            if y[i]:
                center += lik * y[i]
        for val, t in candidates(k, center, budget):
            if all_zero_above and val < 0:
                continue
            y[k] = val
            norm = used + t
            if norm > best[0]:
                continue
            if k == 0:
                if all_zero_above and val == 0:
                    continue
                if shrink and norm < best[0]:
                    best[0] = norm
                    found.clear()
                found.append((norm, tuple(y)))
            else:
                rec(k - 1, norm, all_zero_above and val == 0)
        y[k] = 0

    rec(n - 1, gmpy2.mpq(0), True)
    if shrink:
        found = [(nm, v) for nm, v in found if nm == best[0]]
    out = []
    for nm, yv in found:
        w = [0] * n
        for idx, p in enumerate(perm):
            w[p] = yv[idx]
        x = [sum(P[r][c] * w[c] for c in range(n)) for r in range(n)]
        out.append((Fraction(int(nm.numerator), int(nm.denominator)), el.canonical_sign(x)))
    b = best[0]
    return Fraction(int(b.numerator), int(b.denominator)), out


def arithmetical_minimum(A: QuadraticForm) -> MinimalVectorSet:
    """Exact minimum and antipodally reduced minimal vectors (Fincke-Pohst
    with a shrinking radius started at the least diagonal entry)."""
    start = min(A.gram[i][i] for i in range(A.dim))
    A.require_pd()
    lam, found = _enumerate(A, start, shrink=True)
    return MinimalVectorSet(lam, tuple(sorted(v for _, v in found)))


def vectors_up_to(A: QuadraticForm, bound) -> list[tuple[tuple[int, ...], Fraction]]:
    """All (v, v^T A v) with 0 < v^T A v <= bound, one per antipodal pair,
    sorted by norm then lexicographically."""
    _, found = _enumerate(A, el.as_fraction(bound), shrink=False)
    return sorted(((v, nm) for nm, v in found), key=lambda p: (p[1], p[0]))


def minimal_vectors_below(A: QuadraticForm, bound) -> tuple[Fraction | None, tuple]:
    """Minimum and minimal vectors among vectors of norm <= bound, or
    (None, ()) when no nonzero vector is that short."""
    found = vectors_up_to(A, bound)
    if not found:
        return None, ()
    lam = found[0][1]
    return lam, tuple(sorted(v for v, nm in found if nm == lam))


# ---------------------------------------------------------------- symmetric coordinates

def sym_index_pairs(d: int) -> list[tuple[int, int]]:
    return [(i, i) for i in range(d)] + [(i, j) for i in range(d) for j in range(i + 1, d)]


def rank_one_coordinates(v: Sequence[int]) -> tuple[int, ...]:
    """Coordinates of v v^T pairing with matrix coordinates (F_ii; F_ij)
    as v^T F v: (v_i^2; 2 v_i v_j)."""
    d = len(v)
    return tuple(v[i] * v[i] for i in range(d)) + tuple(2 * v[i] * v[j] for i in range(d) for j in range(i + 1, d))


def flatten(M: Sequence[Sequence]) -> tuple:
    d = len(M)
    return tuple(M[i][i] for i in range(d)) + tuple(M[i][j] for i in range(d) for j in range(i + 1, d))


def unflatten(x: Sequence, d: int) -> tuple:
    M = [[Fraction(0)] * d for _ in range(d)]
    for k, (i, j) in enumerate(sym_index_pairs(d)):
        M[i][j] = M[j][i] = el.as_fraction(x[k])
    return tuple(tuple(r) for r in M)


def sym_dim(d: int) -> int:
    return d * (d + 1) // 2


# ---------------------------------------------------------------- properties

def is_perfect(A: QuadraticForm) -> bool:
    vecs = A.minimal_vectors.vectors
    m = sym_dim(A.dim)
    if len(vecs) < m:
        return False
    return el.integer_rank([rank_one_coordinates(v) for v in vecs]) == m


@dataclass(frozen=True)
class EutaxyCertificate:
    eutactic: bool
    optimum: Fraction | None
    coefficients: tuple  # lambda_v per stored minimal vector (when feasible)


def eutaxy(A: QuadraticForm) -> EutaxyCertificate:
    """max t subject to sum_v lambda_v v v^T = A^{-1}, lambda_v >= t, over the
    antipodally reduced minimal vectors (lambda_v = t + s_v with s_v >= 0)."""
    vecs = A.minimal_vectors.vectors
    d = A.dim
    pairs = sym_index_pairs(d)
    inv = el.inverse(A.gram)
    n = len(vecs)
    # variables: s_0..s_{n-1} >= 0, t free
    A_eq = [[v[i] * v[j] for v in vecs] + [sum(v[i] * v[j] for v in vecs)] for (i, j) in pairs]
    b_eq = [inv[i][j] for (i, j) in pairs]
    out = el.lp_solve([0] * n + [1], A_eq, b_eq, free=[n])
    if out.status != "optimal":
        return EutaxyCertificate(False, None, ())
    t = out.solution[n]
    return EutaxyCertificate(t > 0, t, tuple(s + t for s in out.solution[:n]))


def is_eutactic(A: QuadraticForm) -> bool:
    return eutaxy(A).eutactic


def is_extreme(A: QuadraticForm) -> bool:
    return is_perfect(A) and is_eutactic(A)


def hermite_power(A: QuadraticForm) -> Fraction:
    """gamma(A)^d = lambda(A)^d / det(A), exact."""
    return A.minimum ** A.dim / A.determinant


def normalize_scale(A: QuadraticForm) -> QuadraticForm:
    """Rescale so the arithmetical minimum equals 2."""
    return A.scaled(Fraction(2) / A.minimum)


# ---------------------------------------------------------------- catalog

def _cartan(n: int, edges: Iterable[tuple[int, int]]) -> tuple:
    M = [[0] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = 2
    for i, j in edges:
        M[i][j] = M[j][i] = -1
    return tuple(tuple(r) for r in M)


def catalog_form(name: str) -> QuadraticForm:
    """Gram matrices of A_n, D_n, E6, E7, E8 (minimum 2) and Identity_n."""
    m = re.fullmatch(r"\s*([A-Za-z]+)_?(\d+)\s*", name)
    if not m:
        raise ValueError(f"unknown catalog form {name!r}")
    fam, n = m.group(1), int(m.group(2))
    fam_u = fam.upper()
    if fam_u == "A" and n >= 1:
        return QuadraticForm(_cartan(n, [(i, i + 1) for i in range(n - 1)]))
    if fam_u == "D" and n >= 3:
        return QuadraticForm(_cartan(n, [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]))
    if fam_u == "E" and n in (6, 7, 8):
        return QuadraticForm(_cartan(n, [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]))
    if fam.lower() == "identity" and n >= 1:
        return QuadraticForm(el.identity(n))
    raise ValueError(f"unknown catalog form {name!r}")


def catalog_names(d: int) -> list[str]:
    names = [f"A{d}"]
    if d >= 4:
        names.append(f"D{d}")
    if d in (6, 7, 8):
        names.append(f"E{d}")
    return names


# ---------------------------------------------------------------- reduction

def _is_primitive_system(rows: list[tuple[int, ...]]) -> bool:
    """True when the integer vectors extend to a basis of Z^d
    (gcd of maximal minors equals 1)."""
    from math import gcd
    k = len(rows)
    d = len(rows[0])
    g = 0
    for cols in combinations(range(d), k):
        sub = [[r[c] for c in cols] for r in rows]
        g = gcd(g, int(el.determinant(sub)))
        if g == 1:
            return True
    return False


def reduce_form(A: QuadraticForm) -> tuple[QuadraticForm, tuple]:
    """Greedy short-basis change of variables: pick vectors in increasing
    norm while they extend to a basis of Z^d.  Returns (P^T A P, P) with P
    unimodular whose columns are the chosen vectors."""
    d = A.dim
    bound = A.minimum
    maxdiag = max(A.gram[i][i] for i in range(d))
    while True:
        chosen: list[tuple[int, ...]] = []
        for v, _ in vectors_up_to(A, bound):
            trial = chosen + [v]
            if el.integer_rank(trial) == len(trial) and _is_primitive_system(trial):
                chosen = trial
                if len(chosen) == d:
                    break
        if len(chosen) == d:
            break
        if bound >= maxdiag:
            raise AssertionError("short basis search failed to reach the diagonal bound")
        bound = min(2 * bound, maxdiag)
    P = tuple(tuple(chosen[j][i] for j in range(d)) for i in range(d))
    return A.transform(P), P


# ---------------------------------------------------------------- file format

def parse_form_text(text: str) -> QuadraticForm:
    lines = [ln for ln in text.splitlines()]
    content = [(no + 1, ln) for no, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not content:
        raise FormFileError("empty form file")
    no, first = content[0]
    try:
        d = int(first.strip())
    except ValueError:
        raise FormFileError(f"line {no}, column 1: expected the dimension, got {first.strip()!r}")
    if d <= 0:
        raise FormFileError(f"line {no}, column 1: dimension must be positive")
    if len(content) < d + 1:
        raise FormFileError(f"expected {d} matrix rows, found {len(content) - 1}")
    rows = []
    for no, ln in content[1:d + 1]:
        toks = ln.split()
        if len(toks) != d:
            raise FormFileError(f"line {no}: expected {d} entries, found {len(toks)}")
        row = []
        col = 1
        for tok in toks:
            col = ln.index(tok, col - 1) + 1
            try:
                row.append(Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise FormFileError(f"line {no}, column {col}: cannot parse rational {tok!r}")
            col += len(tok)
        rows.append(row)
    try:
        return QuadraticForm(rows)
    except el.AsymmetricMatrixError as exc:
        i, j = exc.pair
        raise FormFileError(f"matrix is not symmetric: entry ({i + 1},{j + 1}) = {rows[i][j]} "
                            f"but entry ({j + 1},{i + 1}) = {rows[j][i]}") from None


def read_form(path) -> QuadraticForm:
    return parse_form_text(Path(path).read_text())


def format_form(A: QuadraticForm) -> str:
    out = [str(A.dim)]
    for r in A.gram:
        out.append(" ".join(str(x) for x in r))
    return "\n".join(out) + "\n"
