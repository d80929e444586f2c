"""Random cone generators shared by the ADM and acceptance tests."""

from perfectforms import exact_linalg as el
from perfectforms import polycone as pc
from perfectforms.symmetry import PermutationGroup


def _apply(pi, v):
    # coordinate permutation: (pi.v)[pi[i]] = v[i]
    out = [0] * len(v)
    for i, x in enumerate(v):
        out[pi[i]] = x
    return tuple(out)


def random_coordinate_symmetry(rng, m):
    """A permutation of coordinates 1..m-1 of order 2 or 3 (coordinate 0 fixed)."""
    while True:
        pi = list(range(m))
        rest = list(range(1, m))
        rng.shuffle(rest)
        if rng.random() < 0.5 or m < 4:
            pi[rest[0]], pi[rest[1]] = rest[1], rest[0]
            if m >= 5 and rng.random() < 0.5:
                pi[rest[2]], pi[rest[3]] = rest[3], rest[2]
        else:
            a, b, c = rest[:3]
            pi[a], pi[b], pi[c] = b, c, a
        return tuple(pi)


def symmetric_cone(rng, m, n_seeds, pi=None, lo=-3, hi=3, max_rays=12):
    """Pointed full-dimensional cone whose rays are closed under a coordinate
    permutation pi fixing the first coordinate.  Returns (cone, G) with G the
    induced action on ray indices."""
    pi = pi or random_coordinate_symmetry(rng, m)
    while True:
        rays = set()
        tries = 0
        while tries < n_seeds or (len(rays) < m and tries < 10 * m):
            tries += 1
            v = pc.primitive((rng.randint(1, 3),) + tuple(rng.randint(lo, hi) for _ in range(m - 1)))
            orb = []
            while v not in orb:
                orb.append(v)
                v = _apply(pi, v)
            if len(rays | set(orb)) <= max_rays:
                rays |= set(orb)
        rays = sorted(rays)
        if len(rays) < m or el.integer_rank(rays) < m:
            continue
        index = {r: i for i, r in enumerate(rays)}
        g = tuple(index[_apply(pi, r)] for r in rays)
        return pc.ConeV(tuple(rays)), PermutationGroup(len(rays), [g])
