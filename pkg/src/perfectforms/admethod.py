"""Facet enumeration up to symmetry: the adjacency decomposition method
(ADM), its recursive form on faces, and a bank of already computed face
descriptions.

Facet orbits are discovered by gift-wrapping across ridges.  Each orbit is
opened in ascending order of incidence; its ridges are obtained from a dual
description of the facet (plain double description, or ADM again when the
facet is large), reduced modulo the facet stabilizer, and wrapped to
neighbouring facets.  Once the facets in unfinished orbits number fewer than
m - 1, the (m-1)-connectivity of the facet graph guarantees that nothing is
left undiscovered (the Balinski stop).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

from . import polycone as pc
from .symmetry.families import VectorFamily, _solve_map, restricted_automorphism_group, restricted_isomorphism
from .symmetry.permgroup import (
    PermutationGroup,
    inverse_perm,
    mul,
    orbits_on_sets,
    set_stabilizer,
    set_transporter,
    split_orbit_under_subgroup,
)


log = logging.getLogger(__name__)


class GroupActionError(ValueError):
    pass


@dataclass
class AdmPolicy:
    recursion_threshold: Optional[int] = None  # incidence above which a facet is recursed into; None = 2m
    max_depth: int = 3
    use_bank: bool = True
    balinski: bool = True
    balinski_eager: bool = False   # test after every new orbit, not only before opening one
    full_aut_on_faces: bool = False

    def threshold(self, m: int) -> int:
        return 2 * m if self.recursion_threshold is None else self.recursion_threshold


@dataclass
class AdmCounters:
    dual_descriptions: int = 0
    bank_hits: int = 0
    bank_misses: int = 0
    balinski_stops: int = 0
    adjacency_steps: int = 0
    recursions: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class FacetOrbitRecord:
    representative: pc.Face
    stabilizer: PermutationGroup
    orbit_size: int
    status: str = "open"

    @property
    def incidence(self) -> int:
        return len(self.representative.incidence)


@dataclass
class BankEntry:
    key: bytes
    family: VectorFamily
    group: PermutationGroup       # acts on family indices
    orbits: list                  # facet representatives (index sets) modulo ``group``


@dataclass
class Bank:
    entries: dict = field(default_factory=dict)

    def __len__(self):
        return sum(len(v) for v in self.entries.values())

    def store(self, entry: BankEntry) -> None:
        self.entries.setdefault(entry.key, []).append(entry)


def bank_lookup(bank: Bank, family: VectorFamily):
    """(entry, sigma) with sigma mapping stored indices to ``family``
    indices through a verified linear isomorphism, or None."""
    for entry in bank.entries.get(family.labeling.key, ()):
        found = restricted_isomorphism(entry.family, family)
        if found is not None:
            return entry, found[1]
    return None


def check_group_action(cone: pc.ConeV, G: PermutationGroup) -> None:
    """Each generator must be induced by a linear map permuting the rays."""
    if G.degree != len(cone):
        raise GroupActionError("group degree differs from the number of rays")
    if not G.generators:
        return
    fam = VectorFamily(cone.rays)
    for g in G.generators:
        if _solve_map(fam, fam, g) is None:
            raise GroupActionError(f"generator {list(g)} is not induced by a linear map of the rays")


def restrict_to(G: PermutationGroup, idx: tuple) -> PermutationGroup:
    """Action of G (which must preserve the index set) on positions of idx."""
    pos = {v: k for k, v in enumerate(idx)}
    return PermutationGroup(len(idx), [tuple(pos[g[i]] for i in idx) for g in G.generators])


def _conjugate(G: PermutationGroup, sigma: tuple) -> PermutationGroup:
    inv = inverse_perm(sigma)
    return PermutationGroup(G.degree, [mul(sigma, mul(g, inv)) for g in G.generators])


def _point_orbit_ids(G: PermutationGroup) -> list[int]:
    ids = [-1] * G.degree
    for p in range(G.degree):
        if ids[p] < 0:
            for q in G.orbit(p):
                ids[q] = p
    return ids


def _integer_weights(family: VectorFamily) -> list[list[int]]:
    W = family.graph.weights
    den = 1
    for row in W:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    return [[int(x * den) for x in row] for row in W]


def _set_invariant(ids, W, s) -> tuple:
    """G-invariant of a ray subset: orbit labels plus the characteristic-graph
    weights restricted to it.  G acts linearly on the rays, so the weights
    (taken over the whole cone) are preserved."""
    s = sorted(s)
    diag = sorted(W[i][i] for i in s)
    off = sorted(W[i][j] for k, i in enumerate(s) for j in s[k + 1:])
    return (tuple(sorted(ids[i] for i in s)), hash((tuple(diag), tuple(off))))


def _face_orbit_reps(sub: pc.ConeV, U: PermutationGroup, bank: Optional[Bank],
                     policy: AdmPolicy, counters: AdmCounters, depth: int) -> list[frozenset]:
    """Facet representatives of ``sub`` modulo U (the recursive ADM step)."""
    m = sub.dim
    family = VectorFamily(sub.rays) if (bank is not None or policy.full_aut_on_faces) else None
    if bank is not None:
        hit = bank_lookup(bank, family)
        if hit is not None:
            counters.bank_hits += 1
            entry, sigma = hit
            # work in the stored coordinates so the entry's cached chain is reused
            Us = _conjugate(U, inverse_perm(sigma))
            if not Us.is_subgroup_of(entry.group):
                # enlarge the stored group and merge its orbits accordingly
                entry.group = entry.group.join(Us)
                entry.orbits = [entry.orbits[b[0]] for b in orbits_on_sets(entry.group, entry.orbits)]
            out = []
            for r in entry.orbits:
                for piece in split_orbit_under_subgroup(entry.group, Us, r):
                    out.append(frozenset(sigma[i] for i in piece))
            return out
        counters.bank_misses += 1
    W = U
    if policy.full_aut_on_faces and len(sub) > 1:
        W = restricted_automorphism_group(family).group.join(U)
    if len(sub) > policy.threshold(m) and depth < policy.max_depth and m > 2:
        counters.recursions += 1
        records = adm(sub, W, policy, bank=bank, counters=counters, depth=depth + 1, check=False,
                      family=family)
        reps = [rec.representative.incidence for rec in records]
    else:
        counters.dual_descriptions += 1
        faces = pc.facets_with_incidence(sub)
        sets = [f.incidence for f in faces]
        reps = [sets[b[0]] for b in orbits_on_sets(W, sets)]
    if bank is not None:
        bank.store(BankEntry(family.labeling.key, family, W, list(reps)))
    if W is U:
        return list(reps)
    out = []
    for r in reps:
        out.extend(split_orbit_under_subgroup(W, U, r))
    return out


def adm(cone: pc.ConeV, G: PermutationGroup, policy: Optional[AdmPolicy] = None, *,
        bank: Optional[Bank] = None, counters: Optional[AdmCounters] = None,
        depth: int = 0, check: bool = True, family: Optional[VectorFamily] = None) -> list[FacetOrbitRecord]:
    """One closed record per G-orbit of facets of ``cone``."""
    policy = policy or AdmPolicy()
    counters = counters if counters is not None else AdmCounters()
    if bank is None and policy.use_bank:
        bank = Bank()
    if not policy.use_bank:
        bank = None
    if check:
        pc.check_full_dimensional(cone)
        check_group_action(cone, G)
    m = cone.dim
    order = G.order()
    ids = _point_orbit_ids(G)
    weights = _integer_weights(family or VectorFamily(cone.rays))
    records: list[FacetOrbitRecord] = []
    by_invariant: dict = {}

    def insert(face: pc.Face) -> None:
        inv = _set_invariant(ids, weights, face.incidence)
        for rec in by_invariant.get(inv, ()):
            if set_transporter(G, rec.representative.incidence, face.incidence) is not None:
                return
        stab = set_stabilizer(G, face.incidence)
        rec = FacetOrbitRecord(face, stab, order // stab.order())
        records.append(rec)
        by_invariant.setdefault(inv, []).append(rec)

    def stop_now() -> bool:
        # the facets of closed orbits have all their neighbours discovered
        if not policy.balinski:
            return False
        open_recs = [r for r in records if r.status != "closed"]
        if len(open_recs) == len(records) or not open_recs:
            return False
        if pc.balinski_stop(m, sum(r.orbit_size for r in open_recs)):
            counters.balinski_stops += 1
            for r in open_recs:
                r.status = "closed"
            return True
        return False

    insert(pc.initial_facet(cone))
    while True:
        open_recs = [r for r in records if r.status == "open"]
        if not open_recs or stop_now():
            break
        # ascending incidence; ties in discovery order
        rec = min(open_recs, key=lambda r: r.incidence)
        rec.status = "active"
        log.debug("depth %d: open orbit %d/%d, incidence %d, %d rays, %d facets in unfinished orbits",
                  depth, records.index(rec), len(records), rec.incidence, len(cone),
                  sum(r.orbit_size for r in records if r.status != "closed"))
        sub, idx = pc.facet_subcone(cone, rec.representative)
        U = restrict_to(rec.stabilizer, idx)
        stopped = False
        for ridge in _face_orbit_reps(sub, U, bank, policy, counters, depth):
            counters.adjacency_steps += 1
            before = len(records)
            insert(pc.adjacent_facet(cone, rec.representative, frozenset(idx[i] for i in ridge)))
            if policy.balinski_eager and len(records) > before and stop_now():
                stopped = True
                break
        rec.status = "closed"
        if stopped:
            break
    return records


def expand_orbits(G: PermutationGroup, records) -> set:
    """All facet incidence sets in the orbits of the records."""
    out = set()
    for rec in records:
        out |= set(G.set_orbit(rec.representative.incidence))
    return out


def recursive_adm(cone: pc.ConeV, G: PermutationGroup, bank: Optional[Bank] = None,
                  policy: Optional[AdmPolicy] = None, counters: Optional[AdmCounters] = None) -> list[frozenset]:
    """Facet representatives of a face cone modulo G, consulting the bank."""
    policy = policy or AdmPolicy()
    counters = counters if counters is not None else AdmCounters()
    if policy.use_bank and bank is None:
        bank = Bank()
    return _face_orbit_reps(cone, G, bank if policy.use_bank else None, policy, counters, 0)
