import itertools
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from perfectforms import exact_linalg as el
from perfectforms.qform import QuadraticForm, catalog_form
from perfectforms.symmetry import (
    PermutationGroup, VectorFamily, arithmetic_equivalence, aut_group, canonical_key,
    canonical_labeling, characteristic_graph, orbits_on_sets, restricted_automorphism_group,
    restricted_isomorphism, set_stabilizer, set_transporter, split_orbit_under_subgroup,
)
from perfectforms.symmetry.families import RankDeficientFamilyError
from perfectforms.symmetry.permgroup import image_of_set, mul
from conftest import random_unimodular


def closure(n, gens):
    els = {tuple(range(n))}
    frontier = list(els)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mul(g, x)
            if y not in els:
                els.add(y)
                frontier.append(y)
    return els


perms = st.integers(3, 8).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.permutations(range(n)), min_size=1, max_size=3)))


# ---------------------------------------------------------------- permutation groups

@given(perms, st.data())
def test_order_and_stabilizer_vs_brute_force(spec, data):
    n, gens = spec
    gens = [tuple(g) for g in gens]
    G = PermutationGroup(n, gens)
    els = closure(n, gens)
    assert G.order() == len(els)
    s = frozenset(data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1)))
    stab = set_stabilizer(G, s)
    assert stab.order() == sum(1 for g in els if image_of_set(g, s) == s)
    assert len(G.set_orbit(s)) * stab.order() == G.order()
    t = frozenset(data.draw(st.sets(st.integers(0, n - 1), min_size=len(s), max_size=len(s))))
    g = set_transporter(G, s, t)
    reachable = any(image_of_set(h, s) == t for h in els)
    assert (g is not None) == reachable
    if g is not None:
        assert image_of_set(g, s) == t


def test_stabilizer_and_transporter_examples():
    S3 = PermutationGroup(3, [(1, 0, 2), (1, 2, 0)])
    S4 = PermutationGroup(4, [(1, 0, 2, 3), (1, 2, 3, 0)])
    assert set_stabilizer(S3, {0}).order() == 2
    assert set_stabilizer(S4, {0, 1}).order() == 4
    assert set_transporter(S3, {0}, {0}) == (0, 1, 2)
    C2 = PermutationGroup(3, [(1, 0, 2)])
    assert set_transporter(C2, {0}, {2}) is None
    g = set_transporter(S3, {0}, {1})
    assert g is not None and g[0] == 1


def test_orbits_on_sets_examples():
    trivial = PermutationGroup(3, [])
    sets = [{0}, {1}, {2}]
    assert orbits_on_sets(trivial, sets) == [[0], [1], [2]]
    C3 = PermutationGroup(3, [(1, 2, 0)])
    pairs = [set(p) for p in itertools.combinations(range(3), 2)]
    assert orbits_on_sets(C3, pairs) == [[0, 1, 2]]
    S3 = PermutationGroup(3, [(1, 0, 2), (1, 2, 0)])
    assert orbits_on_sets(S3, sets) == [[0, 1, 2]]


def test_split_orbit_examples():
    S3 = PermutationGroup(3, [(1, 0, 2), (1, 2, 0)])
    assert split_orbit_under_subgroup(S3, S3, {0}) == [frozenset({0})]
    assert len(split_orbit_under_subgroup(S3, PermutationGroup(3, []), {0})) == 3
    U = PermutationGroup(3, [(1, 0, 2)])
    reps = split_orbit_under_subgroup(S3, U, {0})
    assert sorted(sorted(U.set_orbit(r)) for r in reps) == sorted(
        [sorted([frozenset({0}), frozenset({1})], key=sorted), [frozenset({2})]], key=len, reverse=True) or \
        {frozenset(U.set_orbit(r)) for r in reps} == {frozenset({frozenset({0}), frozenset({1})}), frozenset({frozenset({2})})}
    with pytest.raises(ValueError):
        split_orbit_under_subgroup(U, S3, {0})


@pytest.mark.parametrize("seed", range(15))
def test_split_orbit_covers_and_is_irredundant(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 12)
    gens = [tuple(rng.sample(range(n), n)) for _ in range(2)]
    G = PermutationGroup(n, gens)
    U = PermutationGroup(n, [gens[0]])
    rep = frozenset(rng.sample(range(n), rng.randint(1, min(3, n - 1))))
    reps = split_orbit_under_subgroup(G, U, rep)
    seen = set()
    for r in reps:
        orb = set(U.set_orbit(r))
        assert not (orb & seen)
        seen |= orb
    assert seen == set(G.set_orbit(rep))


# ---------------------------------------------------------------- graphs and families

def test_characteristic_graph_examples():
    g = characteristic_graph(VectorFamily([(1, 0), (0, 1)]))
    assert g.weights == ((1, 0), (0, 1))
    a2 = VectorFamily(catalog_form("A2").minimal_vectors.vectors)
    cg = characteristic_graph(a2)
    assert all(cg.weights[i][i] == Fr(2, 3) for i in range(3)) and cg.trace() == 2
    assert characteristic_graph(VectorFamily([(2, 0), (0, 1)])).weights[0][0] == 1
    with pytest.raises(RankDeficientFamilyError):
        VectorFamily([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        VectorFamily([(1, 0), (1, 0), (0, 1)])


@pytest.mark.parametrize("name", ["A3", "D4", "E6", "E7"])
def test_trace_identity(name):
    fam = VectorFamily(catalog_form(name).minimal_vectors.vectors)
    assert characteristic_graph(fam).trace() == fam.dim


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=n, max_size=n),
    st.permutations(range(n)))))
def test_canonical_key_relabel_invariance(data):
    M, p = data
    n = len(M)
    W = [[M[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
    W2 = [[W[p[i]][p[j]] for j in range(n)] for i in range(n)]
    assert canonical_labeling(W).key == canonical_labeling(W2).key


@pytest.mark.parametrize("seed", range(150))
def test_canonical_key_decides_isomorphism(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    mk = lambda: [[0] * n for _ in range(n)]
    W1, W2 = mk(), mk()
    for W in (W1, W2):
        for i in range(n):
            for j in range(i, n):
                W[i][j] = W[j][i] = rng.randint(0, 1)
    iso = any(all(W1[q[i]][q[j]] == W2[i][j] for i in range(n) for j in range(n))
              for q in itertools.permutations(range(n)))
    assert iso == (canonical_labeling(W1).key == canonical_labeling(W2).key)
    autos = sum(all(W1[q[i]][q[j]] == W1[i][j] for i in range(n) for j in range(n))
                for q in itertools.permutations(range(n)))
    assert PermutationGroup(n, canonical_labeling(W1).automorphisms).order() == autos


def test_canonical_key_examples():
    assert canonical_labeling([[0, 1], [1, 0]]).key != canonical_labeling([[0, 2], [2, 0]]).key
    a3 = VectorFamily(catalog_form("A3").minimal_vectors.vectors)
    d4_vectors = catalog_form("D4").minimal_vectors.vectors
    chosen = []
    for v in d4_vectors:
        if el.integer_rank(chosen + [v]) > len(chosen):
            chosen.append(v)
    chosen += [v for v in d4_vectors if v not in chosen][: 6 - len(chosen)]
    d4 = VectorFamily(chosen)
    assert len(a3) == len(d4) == 6
    assert sorted(map(abs, sum(a3.graph.weights, ()))) != sorted(map(abs, sum(d4.graph.weights, ())))
    assert canonical_key(a3.graph)[0] != canonical_key(d4.graph)[0]


def _apply(P, v):
    return tuple(el.matvec(P, v))


def test_restricted_isomorphism_examples(rng):
    fam = VectorFamily(catalog_form("A2").minimal_vectors.vectors)
    permuted = VectorFamily(tuple(reversed(fam.vectors)))
    M, sigma = restricted_isomorphism(fam, permuted)
    assert all(_apply(M, v) == permuted.vectors[sigma[i]] for i, v in enumerate(fam.vectors))
    P = [[1, 1], [0, 1]]
    moved = VectorFamily([_apply(P, v) for v in fam.vectors])
    M, sigma = restricted_isomorphism(fam, moved)
    assert {_apply(M, v) for v in fam.vectors} == set(moved.vectors)
    square = VectorFamily(QuadraticForm([[2, 0], [0, 2]]).minimal_vectors.vectors)
    assert restricted_isomorphism(fam, square) is None


def brute_isomorphic(f1, f2):
    from perfectforms.symmetry.families import _solve_map
    return any(_solve_map(f1, f2, sigma) is not None for sigma in itertools.permutations(range(len(f1))))


@pytest.mark.parametrize("name", ["A2", "A3", "D4"])
def test_restricted_isomorphism_on_unimodular_images(name, rng):
    fam = VectorFamily(catalog_form(name).minimal_vectors.vectors).antipodal()
    for _ in range(5):
        P = random_unimodular(fam.dim, rng)
        img = [_apply(P, v) for v in fam.vectors]
        rng.shuffle(img)
        other = VectorFamily(img)
        assert fam.labeling.key == other.labeling.key
        M, sigma = restricted_isomorphism(fam, other)
        assert all(_apply(M, v) == other.vectors[sigma[i]] for i, v in enumerate(fam.vectors))


@pytest.mark.parametrize("seed", range(25))
def test_restricted_isomorphism_iff_equal_keys_small(seed):
    rng = random.Random(seed)
    d = rng.randint(2, 3)
    n = rng.randint(d, 5)

    def family():
        while True:
            vs = {tuple(rng.randint(-1, 1) for _ in range(d)) for _ in range(n)}
            vs.discard((0,) * d)
            if len(vs) == n and el.integer_rank(sorted(vs)) == d:
                return VectorFamily(sorted(vs))

    f1, f2 = family(), family()
    iso = brute_isomorphic(f1, f2)
    assert iso == (f1.labeling.key == f2.labeling.key)
    assert iso == (restricted_isomorphism(f1, f2) is not None)


def test_restricted_automorphism_examples():
    basis = VectorFamily([(1, 0), (0, 1)])
    res = restricted_automorphism_group(basis)
    assert res.group.order() == 2
    a2 = VectorFamily(catalog_form("A2").minimal_vectors.vectors)
    lines = restricted_automorphism_group(a2, antipodal=True)
    assert lines.group.order() == 6
    for g, M in zip(lines.group.generators, lines.matrices):
        for i, v in enumerate(a2.vectors):
            assert el.canonical_sign(_apply(M, v)) == a2.vectors[g[i]]


def brute_force_aut(A, bound=1):
    d = A.dim
    count = 0
    for entries in itertools.product(range(-bound, bound + 1), repeat=d * d):
        P = [list(entries[i * d:(i + 1) * d]) for i in range(d)]
        if abs(el.determinant(P)) == 1 and A.transform(P) == A:
            count += 1
    return count


def test_aut_group_examples():
    assert aut_group(QuadraticForm([[2, 0], [0, 2]])).order == 8 == brute_force_aut(QuadraticForm([[2, 0], [0, 2]]))
    A2 = catalog_form("A2")
    assert aut_group(A2).order == 12 == brute_force_aut(A2)


@pytest.mark.parametrize("name,order", [("A3", 48), ("D4", 1152), ("D5", 3840), ("E6", 103680),
                                        ("E7", 2903040), ("E8", 696729600)])
def test_aut_group_orders(name, order):
    A = catalog_form(name)
    aut = aut_group(A)
    assert aut.order == order
    assert aut.group.order() * 2 == order   # -I acts trivially on lines
    for M in aut.matrices:
        assert A.transform(M) == A and abs(el.determinant(M)) == 1


def test_e8_restricted_automorphisms_on_lines():
    fam = VectorFamily(catalog_form("E8").minimal_vectors.vectors)
    assert restricted_automorphism_group(fam, antipodal=True).group.order() == 348364800


@pytest.mark.parametrize("name", ["A2", "A3", "A4", "D4", "A5", "D5"])
def test_arithmetic_equivalence_random_conjugates(name, rng):
    A = catalog_form(name)
    assert arithmetic_equivalence(A, A) is not None
    for _ in range(4):
        B = A.transform(random_unimodular(A.dim, rng))
        P = arithmetic_equivalence(A, B)
        assert P is not None and A.transform(P) == B and abs(el.determinant(P)) == 1


def test_arithmetic_equivalence_negative():
    assert arithmetic_equivalence(catalog_form("A4"), catalog_form("D4")) is None
    with pytest.raises(ValueError):
        arithmetic_equivalence(catalog_form("A2"), catalog_form("A3"))
    # equal determinant, different forms
    assert arithmetic_equivalence(QuadraticForm([[1, 0], [0, 4]]), QuadraticForm([[2, 0], [0, 2]])) is None
