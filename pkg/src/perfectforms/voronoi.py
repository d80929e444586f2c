"""Voronoi's classification of perfect forms: perfect domains, facet orbits
under Aut(A), the flip across a facet, and the resumable traversal."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import exact_linalg as el
from . import polycone as pc
from .admethod import AdmCounters, AdmPolicy, adm
from .qform import (
    QuadraticForm,
    catalog_form,
    catalog_names,
    eutaxy,
    hermite_power,
    is_perfect,
    normalize_scale,
    rank_one_coordinates,
    unflatten,
)
from .symmetry.families import VectorFamily
from .symmetry.forms import arithmetic_equivalence, aut_group
from .symmetry.permgroup import PermutationGroup, orbits_on_sets

STATE_VERSION = 1


class NotPerfectError(ValueError):
    pass


class FlipError(AssertionError):
    """The post-hoc facet-sharing check failed (an algorithm bug)."""


class StateFileError(ValueError):
    pass


# ---------------------------------------------------------------- domains

def perfect_domain(A: QuadraticForm) -> pc.ConeV:
    """Cone spanned by v v^T over Min(A)/±, one ray per antipodal pair, in
    the order of A.minimal_vectors.vectors."""
    if not is_perfect(A):
        raise NotPerfectError("form is not perfect; its domain is not full-dimensional")
    return pc.ConeV(tuple(rank_one_coordinates(v) for v in A.minimal_vectors.vectors))


@dataclass
class FacetOrbit:
    face: pc.Face
    orbit_size: int

    @property
    def incidence(self) -> int:
        return len(self.face.incidence)


@dataclass
class FacetPolicy:
    plain_dd_max_rays: int = 30
    adm: AdmPolicy = field(default_factory=AdmPolicy)


def facet_orbits(A: QuadraticForm, policy: Optional[FacetPolicy] = None,
                 counters: Optional[AdmCounters] = None, group: Optional[PermutationGroup] = None) -> list[FacetOrbit]:
    """Facet orbit representatives of Dom(A) under Aut(A), sorted by
    (incidence, sorted incidence set)."""
    policy = policy or FacetPolicy()
    cone = perfect_domain(A)
    G = group if group is not None else aut_group(A).group
    if len(cone) <= policy.plain_dd_max_rays:
        if counters is not None:
            counters.dual_descriptions += 1
        faces = pc.facets_with_incidence(cone)
        blocks = orbits_on_sets(G, [f.incidence for f in faces])
        out = [FacetOrbit(faces[b[0]], len(b)) for b in blocks]
    else:
        records = adm(cone, G, policy.adm, counters=counters)
        out = [FacetOrbit(r.representative, r.orbit_size) for r in records]
    out.sort(key=lambda o: (o.incidence, o.face.sorted_incidence()))
    return out


# ---------------------------------------------------------------- flip

def _direction(A: QuadraticForm, face: pc.Face) -> tuple:
    """Symmetric matrix F with v^T F v equal to the facet functional on v v^T;
    nonnegative on Min(A), zero exactly on Min_F(A)."""
    return unflatten(face.functional, A.dim)


def _lam(M) -> Optional[Fraction]:
    Q = QuadraticForm(M)
    if not Q.definiteness.positive_definite:
        return None
    return Q.minimum


def flip(A: QuadraticForm, face: pc.Face, verify: bool = True) -> QuadraticForm:
    """The perfect neighbour A' = A + l F across the facet ``face`` of Dom(A).

    Phase 1 brackets the critical parameter by doubling/halving with
    definiteness tests; phase 2 bisects and jumps to exact candidate values
    (lambda - A[v]) / F[v] read off the minimal vectors of A + gamma F."""
    cone = perfect_domain(A)
    if not pc.is_facet(cone, face):
        raise ValueError("the given face is not a facet of Dom(A)")
    lam = A.minimum
    F = _direction(A, face)
    at = lambda t: el.add_matrices(A.gram, F, t)

    l, u = Fraction(0), Fraction(1)
    while True:
        val = _lam(at(u))
        if val is None:
            u = (l + u) / 2
        elif val == lam:
            l, u = u, 2 * u
        else:
            break

    minA = set(A.minimal_vectors.vectors)

    def min_set(t):
        return set(QuadraticForm(at(t)).minimal_vectors.vectors)

    while min_set(l) <= minA:
        gamma = (l + u) / 2
        Mg = QuadraticForm(at(gamma))
        if Mg.minimum >= lam:
            l = gamma
        else:
            cands = [gamma]
            for v in Mg.minimal_vectors.vectors:
                fv = el.quad(F, v)
                if fv < 0:
                    cands.append((lam - A(v)) / fv)
            u = min(cands)
        if _lam(at(u)) == lam:
            l = u
    A2 = normalize_scale(QuadraticForm(at(l)))
    if verify:
        check_flip(A, face, A2)
    return A2


def check_flip(A: QuadraticForm, face: pc.Face, A2: QuadraticForm) -> None:
    """Dom(A') ∩ Dom(A) = F: A' is perfect, and minus the facet functional
    is nonnegative on Dom(A') and vanishes there exactly on Min_F(A)."""
    if not is_perfect(A2):
        raise FlipError("flip produced a non-perfect form")
    F = _direction(A, face)
    minA = A.minimal_vectors.vectors
    on_face = {minA[i] for i in face.incidence}
    zero = set()
    for v in A2.minimal_vectors.vectors:
        fv = el.quad(F, v)
        if fv > 0:
            raise FlipError(f"minimal vector {list(v)} of A' lies strictly inside Dom(A)'s side")
        if fv == 0:
            zero.add(v)
    if zero != on_face:
        raise FlipError("Dom(A') meets Dom(A) in something other than the facet")


def shared_facet(A: QuadraticForm, face: pc.Face, A2: QuadraticForm) -> pc.Face:
    """The facet of Dom(A2) shared with Dom(A) across ``face``."""
    mins = A2.minimal_vectors.vectors
    on_face = {A.minimal_vectors.vectors[i] for i in face.incidence}
    inc = frozenset(i for i, v in enumerate(mins) if v in on_face)
    return pc.Face(inc, tuple(-x for x in face.functional))


# ---------------------------------------------------------------- fingerprints

def fingerprint(A: QuadraticForm) -> dict:
    """Equivalence invariants: kissing number, Hermite power, and a digest of
    the weight multiset of Min(A)'s characteristic graph."""
    A = normalize_scale(A)
    fam = VectorFamily(A.minimal_vectors.vectors)
    W = fam.graph.weights
    diag = sorted(W[i][i] for i in range(len(W)))
    off = sorted(abs(W[i][j]) for i in range(len(W)) for j in range(i + 1, len(W)))
    digest = hashlib.sha256(repr((diag, off)).encode()).hexdigest()[:32]
    return {"kissing": 2 * len(fam), "hermite_power": str(hermite_power(A)), "weights": digest}


def fp_key(fp: dict) -> tuple:
    return (fp["kissing"], fp["hermite_power"], fp["weights"])


# ---------------------------------------------------------------- classification state

def _int_gram(A: QuadraticForm) -> list[list[int]]:
    return A.integral_primitive().int_rows()


@dataclass
class PerfectFormRecord:
    id: int
    gram: list                    # integer, content 1
    fingerprint: dict
    status: str = "open"
    name: Optional[str] = None
    aut_order: Optional[int] = None
    facet_orbits: list = field(default_factory=list)   # dicts: incidence, orbit_size, neighbor

    @property
    def form(self) -> QuadraticForm:
        """The lambda = 2 representative used for flips."""
        return normalize_scale(QuadraticForm(self.gram))

    def to_json(self) -> dict:
        return {"id": self.id, "gram": self.gram, "name": self.name, "status": self.status,
                "fingerprint": self.fingerprint, "aut_order": self.aut_order,
                "facet_orbits": self.facet_orbits}


@dataclass
class ClassificationState:
    dimension: int
    records: list = field(default_factory=list)
    contiguity: list = field(default_factory=list)   # [record, neighbor, facet-orbit index]
    counters: dict = field(default_factory=dict)

    @property
    def open(self) -> list[int]:
        return [r.id for r in self.records if r.status == "open"]

    @property
    def closed(self) -> list[int]:
        return [r.id for r in self.records if r.status == "closed"]

    @property
    def complete(self) -> bool:
        return bool(self.records) and not self.open

    def to_json(self) -> dict:
        return {"version": STATE_VERSION, "dimension": self.dimension, "complete": self.complete,
                "records": [r.to_json() for r in self.records],
                "open": self.open, "closed": self.closed,
                "contiguity": self.contiguity, "instrumentation": dict(sorted(self.counters.items()))}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(self.dumps())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "ClassificationState":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise StateFileError(f"cannot read state file {path}: {exc}") from exc
        if not isinstance(data, dict) or data.get("version") != STATE_VERSION:
            raise StateFileError(f"state file {path} has unsupported version {data.get('version') if isinstance(data, dict) else None}")
        try:
            st = cls(int(data["dimension"]), counters=dict(data.get("instrumentation", {})),
                     contiguity=[list(e) for e in data["contiguity"]])
            for k, r in enumerate(data["records"]):
                rec = PerfectFormRecord(int(r["id"]), [[int(x) for x in row] for row in r["gram"]],
                                        dict(r["fingerprint"]), r["status"], r.get("name"),
                                        r.get("aut_order"), list(r.get("facet_orbits", [])))
                if rec.id != k or rec.status not in ("open", "closed"):
                    raise StateFileError(f"record {k} is malformed")
                st.records.append(rec)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, StateFileError):
                raise
            raise StateFileError(f"state file {path} is malformed: {exc}") from exc
        for rec in st.records:
            A = QuadraticForm(rec.gram)
            if len(rec.gram) != st.dimension or not A.definiteness.positive_definite or not is_perfect(A):
                raise StateFileError(f"record {rec.id} is not a perfect form of dimension {st.dimension}")
            if fingerprint(A) != rec.fingerprint:
                raise StateFileError(f"record {rec.id} fingerprint does not match its Gram matrix")
        return st


@dataclass
class ClassifyLimits:
    max_forms: Optional[int] = None      # records to close in this invocation
    wall_clock: Optional[float] = None   # seconds


def _process(gram: list, policy: FacetPolicy) -> dict:
    """Pure per-record work: Aut(A), facet orbits, and the flipped neighbours."""
    A = normalize_scale(QuadraticForm(gram))
    aut = aut_group(A)
    counters = AdmCounters()
    orbits = facet_orbits(A, policy, counters, group=aut.group)
    neighbours = [_int_gram(flip(A, o.face)) for o in orbits]
    return {"aut_order": aut.order,
            "orbits": [(o.incidence, o.orbit_size) for o in orbits],
            "neighbours": neighbours, "counters": counters.as_dict()}


class _Index:
    """Fingerprint-bucketed record index with exact equivalence inside buckets."""

    def __init__(self, state: ClassificationState):
        self.state = state
        self.buckets: dict = {}
        for rec in state.records:
            self.buckets.setdefault(fp_key(rec.fingerprint), []).append(rec)
        d = state.dimension
        self.catalog = []
        for name in catalog_names(d):
            C = normalize_scale(catalog_form(name))
            if is_perfect(C):
                self.catalog.append((name, C, fp_key(fingerprint(C))))

    def find_or_insert(self, gram: list) -> tuple[int, bool]:
        A = QuadraticForm(gram)
        fp = fingerprint(A)
        key = fp_key(fp)
        An = normalize_scale(A)
        for rec in self.buckets.get(key, ()):
            if arithmetic_equivalence(rec.form, An) is not None:
                return rec.id, False
        name = None
        for cname, C, ckey in self.catalog:
            if ckey == key and arithmetic_equivalence(C, An) is not None:
                name = cname
                break
        rec = PerfectFormRecord(len(self.state.records), gram, fp, name=name)
        self.state.records.append(rec)
        self.buckets.setdefault(key, []).append(rec)
        return rec.id, True


def _bump(state: ClassificationState, counters: dict) -> None:
    for k, v in counters.items():
        state.counters[k] = state.counters.get(k, 0) + v


def classify(d: int, limits: Optional[ClassifyLimits] = None, state: Optional[ClassificationState] = None,
             policy: Optional[FacetPolicy] = None, workers: int = 1, state_path=None,
             progress=None) -> ClassificationState:
    """Voronoi's algorithm from the seed A_d.  Returns the (possibly partial)
    state; ``state.complete`` tells whether the traversal finished."""
    limits = limits or ClassifyLimits()
    policy = policy or FacetPolicy()
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if state is None:
        state = ClassificationState(d)
    if state.dimension != d:
        raise StateFileError(f"state is for dimension {state.dimension}, not {d}")
    index = _Index(state)
    if not state.records:
        index.find_or_insert(_int_gram(catalog_form(f"A{d}")))
        if state_path:
            state.save(state_path)
    start = time.monotonic()
    done = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while state.open:
            if limits.max_forms is not None and done >= limits.max_forms:
                break
            if limits.wall_clock is not None and time.monotonic() - start >= limits.wall_clock:
                break
            batch = state.open[: max(1, workers)]
            if limits.max_forms is not None:
                batch = batch[: limits.max_forms - done]
            grams = [state.records[i].gram for i in batch]
            if pool is None:
                results = [_process(g, policy) for g in grams]
            else:
                results = list(pool.map(_process, grams, [policy] * len(grams)))
            for rid, res in zip(batch, results):
                rec = state.records[rid]
                rec.aut_order = res["aut_order"]
                rec.facet_orbits = []
                for k, ((inc, size), ng) in enumerate(zip(res["orbits"], res["neighbours"])):
                    nid, _ = index.find_or_insert(ng)
                    rec.facet_orbits.append({"incidence": inc, "orbit_size": size, "neighbor": nid})
                    state.contiguity.append([rid, nid, k])
                rec.status = "closed"
                _bump(state, res["counters"])
                done += 1
                if progress:
                    progress(state, rec)
            if state_path:
                state.save(state_path)
    finally:
        if pool is not None:
            pool.shutdown()
    return state


# ---------------------------------------------------------------- reports

def record_report(rec: PerfectFormRecord) -> dict:
    A = rec.form
    cert = eutaxy(A)
    hp = hermite_power(A)
    return {"id": rec.id, "name": rec.name, "gram": rec.gram, "minimum": str(A.minimum),
            "kissing": A.minimal_vectors.kissing_number, "det": str(A.determinant),
            "hermite_power": str(hp), "hermite": f"{float(hp) ** (1 / A.dim):.6f}",
            "perfect": True, "eutactic": cert.eutactic, "extreme": cert.eutactic,
            "aut_order": rec.aut_order, "facet_orbits": len(rec.facet_orbits),
            "facets": sum(o["orbit_size"] for o in rec.facet_orbits)}


def contiguity_report(state: ClassificationState) -> dict:
    """For each class: neighbouring classes with the number of facet orbits
    leading to each."""
    table = {}
    for rec in state.records:
        mult: dict = {}
        for o in rec.facet_orbits:
            mult[o["neighbor"]] = mult.get(o["neighbor"], 0) + 1
        table[rec.id] = dict(sorted(mult.items()))
    return {"complete": state.complete, "neighbours": table}


def classification_report(state: ClassificationState) -> dict:
    rows = [record_report(r) for r in state.records]
    best = None
    for r, rec in zip(rows, state.records):
        hp = Fraction(r["hermite_power"])
        if best is None or hp > best[0]:
            best = (hp, rec)
    return {"version": STATE_VERSION, "dimension": state.dimension, "complete": state.complete,
            "perfect": len(rows), "extreme": sum(r["extreme"] for r in rows),
            "maximizer": None if best is None else {"id": best[1].id, "name": best[1].name,
                                                   "hermite_power": str(best[0])},
            "classes": rows, "contiguity": contiguity_report(state)["neighbours"],
            "instrumentation": dict(sorted(state.counters.items()))}
