"""Permutation groups on {0..n-1}: Schreier-Sims stabilizer chains, orbits
on sets, and backtrack searches for set stabilizers and set transporters.

A permutation is a tuple ``p`` with ``p[i]`` the image of ``i``; products
compose as functions, ``mul(p, q)[i] == p[q[i]]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def mul(p: Sequence[int], q: Sequence[int]) -> tuple:
    return tuple(map(p.__getitem__, q))


def inverse_perm(p: Sequence[int]) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def is_identity(p: Sequence[int]) -> bool:
    return tuple(p) == tuple(range(len(p)))


def image_of_set(p: Sequence[int], s: Iterable[int]) -> frozenset:
    return frozenset(map(p.__getitem__, s))


def check_perm(p: Sequence[int], n: int) -> None:
    if len(p) != n or set(p) != set(range(n)):
        raise ValueError(f"not a permutation of {n} points")


def orbit_transversal(point: int, gens: Sequence[tuple], n: int) -> dict:
    """Breadth-first orbit of ``point`` with u[q](point) == q for each q."""
    u = {point: identity_perm(n)}
    queue = deque([point])
    while queue:
        p = queue.popleft()
        for s in gens:
            q = s[p]
            if q not in u:
                u[q] = mul(s, u[p])
                queue.append(q)
    return u


def orbit(point: int, gens: Sequence[tuple]) -> set:
    seen = {point}
    stack = [point]
    while stack:
        p = stack.pop()
        for s in gens:
            q = s[p]
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


@dataclass
class StabilizerChain:
    """Base, per-level strong generators and transversals (with inverses)."""

    n: int
    base: list
    strong: list
    trans: list = field(default_factory=list)
    trans_inv: list = field(default_factory=list)

    def level_gens(self, i: int) -> list:
        b = self.base[:i]
        return [g for g in self.strong if all(g[x] == x for x in b)]

    def rebuild(self, i: int) -> None:
        u = orbit_transversal(self.base[i], self.level_gens(i), self.n)
        self.trans[i] = u
        self.trans_inv[i] = {k: inverse_perm(v) for k, v in u.items()}

    def sift(self, g: tuple, start: int = 0) -> tuple[tuple, int]:
        for level in range(start, len(self.base)):
            beta = g[self.base[level]]
            inv = self.trans_inv[level].get(beta)
            if inv is None:
                return g, level
            g = mul(inv, g)
        return g, len(self.base)

    def level_orbit_ids(self, i: int) -> list:
        """Orbit labels of the pointwise stabilizer of base[:i]."""
        cache = self.__dict__.setdefault("_orbit_ids", {})
        ids = cache.get(i)
        if ids is None:
            gens = self.level_gens(i)
            ids = [-1] * self.n
            for p in range(self.n):
                if ids[p] < 0:
                    for q in orbit(p, gens):
                        ids[q] = p
            cache[i] = ids
        return ids

    def order(self) -> int:
        out = 1
        for t in self.trans:
            out *= len(t)
        return out


def schreier_sims(n: int, gens: Sequence[tuple], base_prefix: Sequence[int] = ()) -> StabilizerChain:
    """Deterministic Schreier-Sims.  The base starts with ``base_prefix``
    (kept even where a level is trivial) and is extended as needed."""
    strong = [tuple(g) for g in gens if not is_identity(g)]
    base = list(base_prefix)
    for g in strong:
        if all(g[b] == b for b in base):
            base.append(next(i for i in range(n) if g[i] != i))
    chain = StabilizerChain(n, base, strong, [None] * len(base), [None] * len(base))
    for i in range(len(base)):
        chain.rebuild(i)
    i = len(base) - 1
    while i >= 0:
        restart = None
        gi = chain.level_gens(i)
        u = chain.trans[i]
        for beta in sorted(u):
            ub = u[beta]
            for s in gi:
                gamma = s[beta]
                h = mul(chain.trans_inv[i][gamma], mul(s, ub))
                res, j = chain.sift(h, i + 1)
                if not is_identity(res):
                    chain.strong.append(res)
                    if j == len(chain.base):
                        chain.base.append(next(x for x in range(n) if res[x] != x))
                        chain.trans.append(None)
                        chain.trans_inv.append(None)
                    for level in range(i + 1, j + 1):
                        chain.rebuild(level)
                    restart = j
                    break
            if restart is not None:
                break
        if restart is not None:
            i = restart
        else:
            i -= 1
    return chain


class PermutationGroup:
    """A permutation group given by generators; stabilizer chains are built
    on demand and cached per requested base prefix."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = degree
        gens = []
        seen = set()
        for g in generators:
            g = tuple(g)
            check_perm(g, degree)
            if not is_identity(g) and g not in seen:
                seen.add(g)
                gens.append(g)
        self.generators = tuple(gens)
        self._chains: dict = {}

    def __repr__(self):
        return f"PermutationGroup(degree={self.degree}, order={self.order()})"

    def chain(self, base_prefix: Sequence[int] = ()) -> StabilizerChain:
        key = tuple(base_prefix)
        ch = self._chains.get(key)
        if ch is None:
            if len(self._chains) > 64:
                self._chains.clear()
            ch = schreier_sims(self.degree, self.generators, key)
            self._chains[key] = ch
        return ch

    def order(self) -> int:
        return self.chain().order()

    def __contains__(self, g) -> bool:
        res, _ = self.chain().sift(tuple(g))
        return is_identity(res)

    def is_subgroup_of(self, other: "PermutationGroup") -> bool:
        return all(g in other for g in self.generators)

    def join(self, other: "PermutationGroup") -> "PermutationGroup":
        return PermutationGroup(self.degree, self.generators + other.generators)

    def orbit(self, point: int) -> set:
        return orbit(point, self.generators)

    def elements(self):
        """All elements (small groups only)."""
        ch = self.chain()
        out = [identity_perm(self.degree)]
        for level in reversed(range(len(ch.base))):
            out = [mul(u, g) for u in ch.trans[level].values() for g in out]
        return out

    def set_orbit(self, s) -> dict:
        """Orbit of a set: image -> element mapping ``s`` onto it."""
        s = frozenset(s)
        out = {s: identity_perm(self.degree)}
        queue = deque([s])
        while queue:
            t = queue.popleft()
            for g in self.generators:
                img = image_of_set(g, t)
                if img not in out:
                    out[img] = mul(g, out[t])
                    queue.append(img)
        return out


def orbits_on_sets(G: PermutationGroup, sets: Sequence) -> list[list[int]]:
    """Partition ``sets`` (indices into the given list) into G-orbits by
    closure under the generators.  Each block lists its members in input
    order; the first member is the representative."""
    index = {}
    for i, s in enumerate(sets):
        index.setdefault(frozenset(s), []).append(i)
    assigned = set()
    blocks = []
    for i, s in enumerate(sets):
        if i in assigned:
            continue
        orb = G.set_orbit(s)
        members = sorted(j for t in orb for j in index.get(t, ()))
        assigned.update(members)
        blocks.append(members)
    return blocks


def set_transporter(G: PermutationGroup, s1, s2):
    """Some g in G with g(s1) == s2, or None.  Backtrack over a stabilizer
    chain whose base begins with the points of s1."""
    s1 = frozenset(s1)
    s2 = frozenset(s2)
    if len(s1) != len(s2):
        return None
    if not s1 or s1 == s2:
        return identity_perm(G.degree)
    ch = G.chain(sorted(s1))
    g = _map_set(ch, s1, s2, 0, identity_perm(G.degree))
    if g is not None:
        assert image_of_set(g, s1) == s2
    return g


def _orbit_profile(ids, s) -> dict:
    out: dict = {}
    for x in s:
        out[ids[x]] = out.get(ids[x], 0) + 1
    return out


def _map_set(ch: StabilizerChain, s1: frozenset, s2: frozenset, level: int, h: tuple):
    """Some h*g with g fixing base[:level] pointwise and h*g(s1) == s2, or
    None.  The base must begin with the points of s1.  A branch is cut when
    some orbit of the level stabilizer meets s1 and h^-1(s2) in different
    numbers of points."""
    depth = len(s1)
    profiles = {}

    def search(level, h):
        if level == depth:
            return h
        want = profiles.get(level)
        if want is None:
            want = profiles[level] = _orbit_profile(ch.level_orbit_ids(level), s1)
        hinv = inverse_perm(h)
        if _orbit_profile(ch.level_orbit_ids(level), [hinv[y] for y in s2]) != want:
            return None
        for gamma, u in ch.trans[level].items():
            if h[gamma] in s2:
                res = search(level + 1, mul(h, u))
                if res is not None:
                    return res
        return None

    return search(level, h)


def set_stabilizer(G: PermutationGroup, s) -> PermutationGroup:
    """Setwise stabilizer of ``s``: level-by-level search for generators of
    H_i = G_(b_0..b_{i-1}) ∩ G_{s} along a base that begins with ``s``."""
    s = frozenset(s)
    n = G.degree
    if not s or len(s) == n:
        return G
    prefix = sorted(s)
    ch = G.chain(prefix)
    depth = len(prefix)
    gens = list(ch.level_gens(depth))

    def complete(level, h):
        return _map_set(ch, s, s, level, h)

    for i in reversed(range(depth)):
        lower = list(gens)
        b = ch.base[i]
        current = orbit(b, gens)
        failed: set = set()
        for gamma in sorted(ch.trans[i]):
            if gamma in current or gamma in failed or gamma not in s:
                continue
            g = complete(i + 1, ch.trans[i][gamma])
            if g is None:
                failed |= orbit(gamma, lower)
            else:
                gens.append(g)
                current = orbit(b, gens)
    return PermutationGroup(n, gens)


def split_orbit_under_subgroup(G: PermutationGroup, U: PermutationGroup, rep) -> list[frozenset]:
    """Representatives of the U-orbits into which the G-orbit of ``rep``
    splits (equivalently the double cosets U g Stab_G(rep))."""
    if not U.is_subgroup_of(G):
        raise ValueError("U is not a subgroup of G")
    rep = frozenset(rep)
    g_orbit = G.set_orbit(rep)
    covered = set()
    reps = []
    # deterministic: breadth-first order of the G-orbit
    for t in g_orbit:
        if t in covered:
            continue
        reps.append(t)
        covered |= set(U.set_orbit(t))
    return reps
