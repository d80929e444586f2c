"""Exact polyhedral cones: double description, facets of facets, the
gift-wrapping step across a ridge and Balinski's stopping rule.

Rays and facet functionals are integer vectors with content 1.  Incidence
sets are frozensets of ray indices into the cone's ray list.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Sequence

from . import exact_linalg as el


class DegenerateConeError(ValueError):
    """Raised for cones that are not full-dimensional or not pointed.

    ``witness`` is a functional vanishing on every ray (not full-dimensional)
    or a ray whose negative also lies in the cone (not pointed)."""

    def __init__(self, message, witness):
        super().__init__(f"{message}; witness {list(witness)}")
        self.witness = witness


class RidgeError(ValueError):
    pass


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def _idot(f, r) -> int:
    return sum(a * b for a, b in zip(f, r) if a and b)


@dataclass(frozen=True)
class ConeV:
    rays: tuple

    def __post_init__(self):
        rays = []
        seen = set()
        for r in self.rays:
            p = primitive(el.primitive_integer_vector(r))
            if not any(p):
                raise ValueError("zero ray")
            if p in seen:
                raise ValueError(f"duplicate ray {list(p)}")
            seen.add(p)
            rays.append(p)
        if rays and len({len(r) for r in rays}) != 1:
            raise ValueError("rays of different lengths")
        object.__setattr__(self, "rays", tuple(rays))

    @property
    def dim(self) -> int:
        return len(self.rays[0]) if self.rays else 0

    def __len__(self):
        return len(self.rays)


@dataclass(frozen=True)
class ConeH:
    dim: int
    facets: tuple


@dataclass(frozen=True)
class Face:
    incidence: frozenset
    functional: tuple

    @property
    def incidence_number(self) -> int:
        return len(self.incidence)

    def sorted_incidence(self) -> tuple:
        return tuple(sorted(self.incidence))


def incidence_number(face: Face) -> int:
    return len(face.incidence)


def balinski_stop(m: int, unfinished_facets: int) -> bool:
    """True when the facets left in unfinished orbits are fewer than m - 1,
    so by (m-1)-connectivity of the facet-ridge graph none of them can be
    adjacent to an undiscovered facet."""
    return unfinished_facets < m - 1


def zero_set(cone: ConeV, f) -> frozenset:
    return frozenset(i for i, r in enumerate(cone.rays) if _idot(f, r) == 0)


def check_full_dimensional(cone: ConeV) -> None:
    m = cone.dim
    if el.integer_rank(cone.rays) < m:
        w = el.integer_kernel(cone.rays, m)[0]
        raise DegenerateConeError("cone is not full-dimensional", w)


def check_pointed(cone: ConeV) -> None:
    """Pointed iff some functional is >= 1 on every ray (LP feasibility)."""
    m = cone.dim
    A_ub = [[-x for x in r] for r in cone.rays]
    out = el.lp_solve([0] * m, A_ub=A_ub, b_ub=[-1] * len(cone.rays), free=range(m))
    if out.status == "infeasible":
        y = out.certificate
        k = next(i for i, v in enumerate(y) if v > 0)
        raise DegenerateConeError("cone is not pointed", cone.rays[k])


def _insertion_order(rays) -> list[int]:
    return sorted(range(len(rays)), key=lambda i: (sum(rays[i]), rays[i]))


def dual_description(cone: ConeV, check: bool = True) -> ConeH:
    """All facets of a full-dimensional pointed cone by the incremental
    double description method; facets sorted lexicographically."""
    if check:
        check_full_dimensional(cone)
        check_pointed(cone)
    facets = _double_description(cone.rays, cone.dim)
    return ConeH(cone.dim, tuple(sorted(f for f, _ in facets)))


def facets_with_incidence(cone: ConeV) -> list[Face]:
    """Facets as Face records, in the order of ``dual_description``."""
    facets = _double_description(cone.rays, cone.dim)
    out = []
    for f, mask in sorted(facets):
        out.append(Face(frozenset(i for i in range(len(cone.rays)) if mask >> i & 1), f))
    return out


def _double_description(rays, m):
    N = len(rays)
    order = _insertion_order(rays)
    # initial simplicial cone on the first m independent rays in insertion order
    basis = []
    for i in order:
        trial = [rays[j] for j in basis] + [rays[i]]
        if el.integer_rank(trial) == len(trial):
            basis.append(i)
            if len(basis) == m:
                break
    if len(basis) < m:
        raise DegenerateConeError("cone is not full-dimensional", el.integer_kernel(rays, m)[0])
    B = [rays[i] for i in basis]
    Binv = el.inverse(B)  # columns: dual basis
    facets = []
    for j in range(m):
        f = primitive(el.primitive_integer_vector([Binv[k][j] for k in range(m)]))
        mask = 0
        for i in basis:
            if _idot(f, rays[i]) == 0:
                mask |= 1 << i
        facets.append((f, mask))
    done = set(basis)
    for i in order:
        if i in done:
            continue
        r = rays[i]
        bit = 1 << i
        pos, neg, zero = [], [], []
        for f, mask in facets:
            v = _idot(f, r)
            if v > 0:
                pos.append((f, mask, v))
            elif v < 0:
                neg.append((f, mask, v))
            else:
                zero.append((f, mask | bit))
        if not neg:
            facets = [(f, mask) for f, mask, _ in pos] + zero
            done.add(i)
            continue
        all_masks = [mask for _, mask in facets]
        new = []
        need = m - 2
        for fp, mp, vp in pos:
            for fn, mn, vn in neg:
                common = mp & mn
                if common.bit_count() < need:
                    continue
                adjacent = True
                for other in all_masks:
                    if other & common == common and other != mp and other != mn:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                g = primitive([vp * b - vn * a for a, b in zip(fp, fn)])
                new.append((g, common | bit))
        facets = [(f, mask) for f, mask, _ in pos] + zero + new
        done.add(i)
    return facets


def reverse_description(H: ConeH) -> ConeV:
    """Extreme rays from facets (the dual cone's facets)."""
    dual = ConeV(H.facets)
    return ConeV(dual_description(dual).facets)


# ---------------------------------------------------------------- faces

def _tighten(cone: ConeV, f) -> tuple:
    """Rotate a valid functional until its zero set spans a hyperplane."""
    m = cone.dim
    f = primitive(el.primitive_integer_vector(f))
    while True:
        Z = sorted(zero_set(cone, f))
        zr = [cone.rays[i] for i in Z]
        if (el.integer_rank(zr) if zr else 0) >= m - 1:
            return f
        ker = el.integer_kernel(zr, m) if zr else [tuple(int(i == j) for i in range(m)) for j in range(m)]
        g = next(k for k in ker if el.integer_rank([f, k]) == 2)
        for direction in (g, tuple(-x for x in g)):
            best = None
            for r in cone.rays:
                gr = _idot(direction, r)
                if gr > 0:
                    t = Fraction(_idot(f, r), gr)
                    if best is None or t < best:
                        best = t
            if best is not None:
                f = primitive(el.primitive_integer_vector([Fraction(a) - best * b for a, b in zip(f, direction)]))
                break
        else:
            raise DegenerateConeError("cone is not full-dimensional", g)


def initial_facet(cone: ConeV) -> Face:
    """A facet from a vertex of the LP {f : f(r_i) >= 0, sum_i f(r_i) = 1}
    minimizing a fixed generic objective; tightened if the vertex is not
    already a facet."""
    check_full_dimensional(cone)
    m = cone.dim
    rays = cone.rays
    total = [sum(r[k] for r in rays) for k in range(m)]
    objective = [-(k * k + 3 * k + 1) for k in range(m)]
    out = el.lp_solve(objective, A_eq=[total], b_eq=[1],
                      A_ub=[[-x for x in r] for r in rays], b_ub=[0] * len(rays), free=range(m))
    if out.status != "optimal":
        check_pointed(cone)
        raise AssertionError(f"initial facet LP returned {out.status}")
    f = _tighten(cone, out.solution)
    return Face(zero_set(cone, f), f)


def facet_subcone(cone: ConeV, face: Face) -> tuple[ConeV, tuple]:
    """Rays of the face in coordinates of its hyperplane.

    The hyperplane {x : f.x = 0} is parametrized by all coordinates except
    the first one where f is nonzero (an echelon basis), so the subcone is
    integral.  Returns (subcone, ray indices in cone order)."""
    f = face.functional
    k = next(i for i, x in enumerate(f) if x)
    idx = tuple(sorted(face.incidence))
    sub = [tuple(x for j, x in enumerate(cone.rays[i]) if j != k) for i in idx]
    return ConeV(tuple(primitive(r) for r in sub)), idx


def adjacent_facet(cone: ConeV, facet: Face, ridge) -> Face:
    """Gift-wrapping: the facet other than ``facet`` containing ``ridge``."""
    m = cone.dim
    ridge = sorted(ridge)
    if not set(ridge) <= facet.incidence:
        raise RidgeError("ridge is not contained in the facet")
    rows = [cone.rays[i] for i in ridge]
    if el.integer_rank(rows) != m - 2:
        raise RidgeError("ridge does not have codimension 2")
    f1 = facet.functional
    ker = el.integer_kernel(rows, m)
    f2 = next(k for k in ker if el.integer_rank([f1, k]) == 2)
    # orient f2 positive on the facet's rays outside the ridge
    rs = set(ridge)
    for i in facet.incidence:
        if i not in rs:
            v = _idot(f2, cone.rays[i])
            if v != 0:
                if v < 0:
                    f2 = tuple(-x for x in f2)
                break
    alpha = None
    for r in cone.rays:
        a = _idot(f1, r)
        if a > 0:
            t = Fraction(-_idot(f2, r), a)
            if alpha is None or t > alpha:
                alpha = t
    g = primitive(el.primitive_integer_vector([alpha * a + b for a, b in zip(f1, f2)]))
    return Face(zero_set(cone, g), g)


def ridges_of(cone: ConeV, facet: Face) -> list[frozenset]:
    """Ridges of the cone inside ``facet`` (facets of the facet), as
    incidence sets in the cone's ray indexing."""
    sub, idx = facet_subcone(cone, facet)
    out = []
    for face in facets_with_incidence(sub):
        out.append(frozenset(idx[i] for i in face.incidence))
    return out


def is_facet(cone: ConeV, face: Face) -> bool:
    f = face.functional
    if any(_idot(f, r) < 0 for r in cone.rays):
        return False
    Z = [cone.rays[i] for i in face.incidence]
    return bool(Z) and el.integer_rank(Z) == cone.dim - 1 and zero_set(cone, f) == face.incidence


# ---------------------------------------------------------------- file format

class ConeFileError(ValueError):
    pass


def parse_cone_text(text: str):
    lines = [(no + 1, ln.split()) for no, ln in enumerate(text.splitlines())
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ConeFileError("empty cone file")
    no, head = lines[0]
    if len(head) != 3 or head[0] not in ("V", "H"):
        raise ConeFileError(f"line {no}: expected header 'V m N' or 'H m M'")
    try:
        m, count = int(head[1]), int(head[2])
    except ValueError:
        raise ConeFileError(f"line {no}: header counts must be integers")
    body = lines[1:]
    if len(body) != count:
        raise ConeFileError(f"expected {count} vectors, found {len(body)}")
    vecs = []
    for no, toks in body:
        if len(toks) != m:
            raise ConeFileError(f"line {no}: expected {m} entries, found {len(toks)}")
        try:
            vecs.append(el.primitive_integer_vector([Fraction(t) for t in toks]))
        except (ValueError, ZeroDivisionError):
            raise ConeFileError(f"line {no}: cannot parse vector")
    if head[0] == "V":
        return ConeV(tuple(vecs))
    return ConeH(m, tuple(vecs))


def read_cone(path):
    return parse_cone_text(Path(path).read_text())


def format_cone(obj) -> str:
    if isinstance(obj, ConeV):
        head, vecs, m = "V", obj.rays, obj.dim
    else:
        head, vecs, m = "H", obj.facets, obj.dim
    out = [f"{head} {m} {len(vecs)}"]
    out += [" ".join(map(str, v)) for v in vecs]
    return "\n".join(out) + "\n"
