"""Exact rational linear algebra: LDL^T, definiteness witnesses, linear
systems, integer rank/kernels and a small dense simplex solver.

Matrices are tuples of row tuples of :class:`fractions.Fraction` (or ints,
which are promoted on entry).  Nothing in here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from gmpy2 import mpq

Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


class AsymmetricMatrixError(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"matrix is not symmetric: entry ({i},{j}) != entry ({j},{i})")
        self.pair = (i, j)


# ---------------------------------------------------------------- helpers

def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def frac_matrix(rows: Sequence[Sequence]) -> Matrix:
    rows = tuple(tuple(as_fraction(x) for x in r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def symmetric_matrix(rows: Sequence[Sequence]) -> Matrix:
    M = frac_matrix(rows)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("symmetric matrix must be square")
    for i in range(n):
        for j in range(i + 1, n):
            if M[i][j] != M[j][i]:
                raise AsymmetricMatrixError(i, j)
    return M


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M)) if M else ()


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = tuple(zip(*B))
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def matvec(A: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def quad(A: Sequence[Sequence], v: Sequence):
    """v^T A v."""
    n = len(v)
    s = 0
    for i in range(n):
        vi = v[i]
        if vi:
            row = A[i]
            s += vi * sum(row[j] * v[j] for j in range(n) if v[j])
    return s


def bilinear(A: Sequence[Sequence], u: Sequence, v: Sequence):
    return sum(u[i] * sum(A[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))


def scale_matrix(c, M: Sequence[Sequence]) -> Matrix:
    c = as_fraction(c)
    return tuple(tuple(c * x for x in r) for r in M)


def add_matrices(A: Sequence[Sequence], B: Sequence[Sequence], c=1) -> Matrix:
    """A + c*B."""
    c = as_fraction(c)
    return tuple(tuple(a + c * b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else (a or b)


def primitive_integer_vector(v: Sequence) -> tuple[int, ...]:
    """Clear denominators and divide out the content; sign is preserved."""
    fr = [as_fraction(x) for x in v]
    den = 1
    for x in fr:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def canonical_sign(v: Sequence[int]) -> tuple[int, ...]:
    """Flip so the first nonzero coordinate is positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def integer_content_scale(M: Sequence[Sequence]) -> Fraction:
    """Positive c such that c*M is integral with content 1."""
    den = 1
    for r in M:
        for x in r:
            den = lcm(den, as_fraction(x).denominator)
    g = 0
    for r in M:
        for x in r:
            g = gcd(g, int(as_fraction(x) * den))
    return Fraction(den, g) if g else Fraction(1)


# ---------------------------------------------------------------- LDL^T

@dataclass(frozen=True)
class LdltResult:
    """Pivoted LDL^T.  With ``P`` the permutation (row ``k`` of the permuted
    matrix is row ``perm[k]`` of the input), ``M[perm][:, perm] = L D L^T``
    restricted to the first ``rank`` pivots, plus ``residual`` (the Schur
    complement of the remaining block).
    """

    pivots: tuple
    unit_lower: Matrix
    perm: tuple
    rank: int
    residual: Matrix
    blocked: bool = False

    @property
    def complete(self) -> bool:
        return self.rank == len(self.perm)


def ldlt(M: Sequence[Sequence]) -> LdltResult:
    """Symmetric elimination with greatest-|diagonal| pivoting.

    Stops when the remaining Schur complement has a zero diagonal; it is then
    either identically zero (semidefinite rank deficiency) or ``blocked``
    (a nonzero off-diagonal entry with zero diagonal: indefinite).
    """
    S = [list(r) for r in symmetric_matrix(M)]
    n = len(S)
    perm = list(range(n))
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    pivots = []
    k = 0
    blocked = False
    while k < n:
        best, best_val = None, Fraction(0)
        for i in range(k, n):
            if abs(S[i][i]) > best_val:
                best, best_val = i, abs(S[i][i])
        if best is None:
            blocked = any(S[i][j] for i in range(k, n) for j in range(k, n))
            break
        if best != k:
            S[k], S[best] = S[best], S[k]
            for row in S:
                row[k], row[best] = row[best], row[k]
            perm[k], perm[best] = perm[best], perm[k]
            L[k][:k], L[best][:k] = L[best][:k], L[k][:k]
        p = S[k][k]
        pivots.append(p)
        for i in range(k + 1, n):
            L[i][k] = S[i][k] / p
        for i in range(k + 1, n):
            lik = L[i][k]
            if lik:
                for j in range(k + 1, i + 1):
                    S[i][j] -= lik * S[k][j]
                    S[j][i] = S[i][j]
        for i in range(k + 1, n):
            S[i][k] = S[k][i] = Fraction(0)
        k += 1
    residual = tuple(tuple(S[i][j] for j in range(k, n)) for i in range(k, n))
    return LdltResult(tuple(pivots), tuple(tuple(r) for r in L), tuple(perm), k, residual, blocked)


def ldlt_reconstruct(res: LdltResult) -> Matrix:
    """L D L^T + (0 ⊕ residual): equals the permuted input exactly."""
    n = len(res.perm)
    L = res.unit_lower
    r = res.rank
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = sum((L[i][t] * res.pivots[t] * L[j][t] for t in range(r)), Fraction(0))
            if i >= r and j >= r:
                s += res.residual[i - r][j - r]
            out[i][j] = s
    return tuple(tuple(row) for row in out)


def _solve_unit_upper_transpose(L: Matrix, z: Sequence) -> list:
    """Solve L^T x = z for unit lower triangular L."""
    n = len(L)
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = as_fraction(z[i])
        for j in range(i + 1, n):
            s -= L[j][i] * x[j]
        x[i] = s
    return x


@dataclass(frozen=True)
class Definiteness:
    kind: str  # "positive-definite" | "positive-semidefinite" | "indefinite"
    witness: tuple | None = None

    @property
    def positive_definite(self) -> bool:
        return self.kind == "positive-definite"


def definiteness(M: Sequence[Sequence]) -> Definiteness:
    """Classify a symmetric matrix; non-PD verdicts carry an integer witness
    (content 1, first nonzero coordinate positive): a kernel vector for the
    semidefinite case, a vector of negative norm for the indefinite case."""
    res = ldlt(M)
    n = len(res.perm)
    r = res.rank
    z = None
    for t, p in enumerate(res.pivots):
        if p < 0:
            z = [0] * n
            z[t] = 1
            break
    if z is None and res.blocked:
        R = res.residual
        for a in range(len(R)):
            for b in range(len(R)):
                if a != b and R[a][b]:
                    z = [0] * n
                    z[r + a] = 1
                    z[r + b] = -1 if R[a][b] > 0 else 1
                    break
            if z is not None:
                break
    if z is not None:
        x = _solve_unit_upper_transpose(res.unit_lower, z)
        return Definiteness("indefinite", _unpermute(res.perm, x))
    if r == n:
        return Definiteness("positive-definite")
    z = [0] * n
    z[r] = 1
    x = _solve_unit_upper_transpose(res.unit_lower, z)
    return Definiteness("positive-semidefinite", _unpermute(res.perm, x))


def _unpermute(perm, x) -> tuple[int, ...]:
    out = [Fraction(0)] * len(perm)
    for k, p in enumerate(perm):
        out[p] = x[k]
    return canonical_sign(primitive_integer_vector(out))


def is_positive_definite(M: Sequence[Sequence]) -> bool:
    return definiteness(M).positive_definite


def determinant(M: Sequence[Sequence]):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [list(map(as_fraction, r)) for r in M]
    n = len(A)
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse(M: Sequence[Sequence]) -> Matrix:
    n = len(M)
    aug = [list(map(as_fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return tuple(tuple(r[n:]) for r in aug)


# ---------------------------------------------------------------- linear systems

def rref(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    A = [list(map(as_fraction, r)) for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        if p != 1:
            A[r] = [x / p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def kernel_basis(M: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Rational basis of {x : M x = 0}, one vector per free column."""
    if not M:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    R, pivots = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


@dataclass(frozen=True)
class AffineSolution:
    feasible: bool
    particular: tuple | None = None
    kernel: list = field(default_factory=list)
    certificate: tuple | None = None  # y with y^T M = 0 and y^T b != 0


def solve(M: Sequence[Sequence], b: Sequence) -> AffineSolution:
    """All x with M x = b, or an infeasibility certificate."""
    M = frac_matrix(M)
    rows = len(M)
    cols = len(M[0]) if rows else 0
    b = [as_fraction(x) for x in b]
    if len(b) != rows:
        raise ValueError("dimension mismatch")
    aug = [list(M[i]) + [b[i]] + [Fraction(int(i == j)) for j in range(rows)] for i in range(rows)]
    R, pivots = rref([r for r in aug]) if rows else ([], [])
    # pivots beyond the coefficient block reveal the structure
    coef_piv = [(i, c) for i, c in enumerate(pivots) if c < cols]
    bad = next((i for i, c in enumerate(pivots) if c == cols), None)
    if bad is not None:
        y = tuple(R[bad][cols + 1:])
        return AffineSolution(False, certificate=y)
    x = [Fraction(0)] * cols
    for i, c in coef_piv:
        x[c] = R[i][cols]
    return AffineSolution(True, tuple(x), kernel_basis(M, cols))


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    A = [list(r) for r in rows if any(r)]
    if not A:
        return 0
    ncols = len(A[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, len(A)):
            f = A[i][c]
            if f:
                A[i] = [p * a - f * b for a, b in zip(A[i], A[r])]
                g = 0
                for a in A[i]:
                    g = gcd(g, a)
                if g > 1:
                    A[i] = [a // g for a in A[i]]
        r += 1
        if r == len(A):
            break
    return r


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Integer (primitive) basis vectors of the rational kernel."""
    return [primitive_integer_vector(v) for v in kernel_basis(rows, ncols)]


# ---------------------------------------------------------------- simplex

@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    solution: tuple | None = None
    value: Fraction | None = None
    certificate: tuple | None = None


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class _Tableau:
    """Dense tableau [B^-1 A | B^-1 b] with a maintained reduced-cost row."""

    def __init__(self, rows, rhs, ncols):
        self.m = len(rows)
        self.ncols = ncols
        self.T = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.basis = [ncols - self.m + i for i in range(self.m)]
        self.in_basis = set(self.basis)
        self.z = None

    def set_objective(self, cost):
        # reduced costs r_j = c_j - c_B B^-1 A_j ; last entry = -objective value
        z = list(cost) + [mpq(0)]
        for i, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb:
                row = self.T[i]
                z = [a - cb * b for a, b in zip(z, row)]
        self.z = z

    def pivot(self, i, j):
        row = self.T[i]
        p = row[j]
        if p != 1:
            row = [x / p for x in row]
            self.T[i] = row
        nz = [k for k, x in enumerate(row) if x]
        for k in range(self.m):
            if k != i:
                other = self.T[k]
                f = other[j]
                if f:
                    for c in nz:
                        other[c] -= f * row[c]
        f = self.z[j]
        if f:
            for c in nz:
                self.z[c] -= f * row[c]
        self.in_basis.discard(self.basis[i])
        self.basis[i] = j
        self.in_basis.add(j)

    def run(self, allowed):
        """Bland's rule; returns None at optimum or the entering column of an
        unbounded ray."""
        z = self.z
        while True:
            enter = next((j for j in range(self.ncols) if z[j] > 0 and allowed(j) and j not in self.in_basis), None)
            if enter is None:
                return None
            leave, best = None, None
            for i in range(self.m):
                a = self.T[i][enter]
                if a > 0:
                    ratio = self.T[i][-1] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                return enter
            self.pivot(leave, enter)
            z = self.z

    def duals(self, cost, first_art):
        # y_i = c_B B^-1 e_i, read from the artificial (initial identity) columns
        return [cost[first_art + i] - self.z[first_art + i] for i in range(self.m)]


def lp_solve(objective: Sequence,
             A_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
             A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
             free: Sequence[int] = ()) -> LpOutcome:
    """Maximize ``objective . x`` subject to ``A_eq x = b_eq``,
    ``A_ub x <= b_ub`` and ``x_j >= 0`` for every ``j`` not in ``free``.

    Two-phase dense tableau simplex over the rationals with Bland's rule.
    On ``optimal`` the certificate is the dual vector (one entry per
    equality row, then per inequality row).  On ``infeasible`` it is a
    Farkas vector ``y`` over the same rows with ``y^T [A_eq; A_ub] >= 0`` on
    sign-constrained columns, ``= 0`` on free columns, ``y_ub >= 0`` and
    ``y^T b < 0``.  On ``unbounded`` it is a recession direction ``r`` of
    the original variables with positive objective slope.
    """
    n = len(objective)
    if len(A_eq) != len(b_eq) or len(A_ub) != len(b_ub):
        raise ValueError("constraint rows and right-hand sides differ in length")
    if any(len(r) != n for r in list(A_eq) + list(A_ub)):
        raise ValueError("constraint width does not match objective length")
    free = sorted(set(free))
    if any(j < 0 or j >= n for j in free):
        raise ValueError("free index out of range")

    q = lambda x: mpq(as_fraction(x))  # noqa: E731
    c = [q(x) for x in objective]
    neg_cols = {j: n + k for k, j in enumerate(free)}
    n_slack = len(A_ub)
    nstd = n + len(free) + n_slack
    rows, rhs = [], []
    for k, (r, bi) in enumerate(list(zip(A_eq, b_eq)) + list(zip(A_ub, b_ub))):
        r = [q(x) for x in r]
        row = r + [-r[j] for j in free] + [mpq(0)] * n_slack
        if k >= len(A_eq):
            row[n + len(free) + k - len(A_eq)] = mpq(1)
        rows.append(row)
        rhs.append(q(bi))
    m = len(rows)
    row_sign = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
            row_sign.append(-1)
        else:
            row_sign.append(1)
    total = nstd + m
    rows = [r + [mpq(int(t == i)) for t in range(m)] for i, r in enumerate(rows)]
    tab = _Tableau(rows, rhs, total)

    phase1 = [mpq(0)] * nstd + [mpq(-1)] * m
    tab.set_objective(phase1)
    tab.run(lambda j: True)
    if tab.z[-1] != 0:  # -(phase-1 optimum) = total artificial mass
        y = tab.duals(phase1, nstd)
        return LpOutcome("infeasible", certificate=tuple(_to_fraction(v * s) for v, s in zip(y, row_sign)))
    for i in range(m):
        if tab.basis[i] >= nstd:
            j = next((j for j in range(nstd) if tab.T[i][j] != 0 and j not in tab.in_basis), None)
            if j is not None:
                tab.pivot(i, j)
    cstd = c + [-c[j] for j in free] + [mpq(0)] * n_slack + [mpq(0)] * m
    tab.set_objective(cstd)
    enter = tab.run(lambda j: j < nstd)
    if enter is not None:
        direction = [mpq(0)] * total
        direction[enter] = mpq(1)
        for i in range(m):
            direction[tab.basis[i]] -= tab.T[i][enter]
        r = [direction[j] - (direction[neg_cols[j]] if j in neg_cols else 0) for j in range(n)]
        return LpOutcome("unbounded", certificate=tuple(_to_fraction(v) for v in r))
    xstd = [mpq(0)] * total
    for i in range(m):
        xstd[tab.basis[i]] = tab.T[i][-1]
    x = tuple(_to_fraction(xstd[j] - (xstd[neg_cols[j]] if j in neg_cols else 0)) for j in range(n))
    value = sum((as_fraction(ci) * xi for ci, xi in zip(objective, x)), Fraction(0))
    y = tab.duals(cstd, nstd)
    return LpOutcome("optimal", x, value, tuple(_to_fraction(v * s) for v, s in zip(y, row_sign)))
