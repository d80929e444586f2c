"""Canonical labeling of edge-weighted complete graphs.

Individualization-refinement with exhaustive backtracking: the key is the
lexicographically least relabeled weight-code matrix over all leaves, so two
graphs get equal keys exactly when they are isomorphic.  Automorphisms found
at equal leaves prune sibling branches (orbits of the automorphisms found so
far that fix the current individualized prefix).
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class CanonicalLabeling:
    key: bytes
    order: tuple          # order[i] = original vertex placed at canonical position i
    automorphisms: tuple  # generators found during the search (as permutations)


def _codes(weights: Sequence[Sequence]) -> tuple[list[list[int]], tuple]:
    values = sorted({w for row in weights for w in row})
    code = {w: k for k, w in enumerate(values)}
    return [[code[w] for w in row] for row in weights], tuple(values)


def _refine(W, cells: list[list[int]]) -> list[list[int]]:
    """Coarsest equitable refinement; subcells ordered by their signature."""
    n = len(W)
    while True:
        cell_of = [0] * n
        for ci, c in enumerate(cells):
            for v in c:
                cell_of[v] = ci
        new_cells = []
        changed = False
        for c in cells:
            if len(c) == 1:
                new_cells.append(c)
                continue
            groups: dict = {}
            for v in c:
                counts = Counter(zip(cell_of, W[v]))
                groups.setdefault(tuple(sorted(counts.items())), []).append(v)
            if len(groups) > 1:
                changed = True
                for sig in sorted(groups):
                    new_cells.append(groups[sig])
            else:
                new_cells.append(c)
        cells = new_cells
        if not changed:
            return cells


def _orbits_of(gens, n) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(i) for i in range(n)]


def canonical_labeling(weights: Sequence[Sequence]) -> CanonicalLabeling:
    """Canonical form of the complete graph with (symmetric) weight matrix
    ``weights``; diagonal entries act as vertex colors."""
    n = len(weights)
    W, values = _codes(weights)
    init: dict = {}
    for v in range(n):
        init.setdefault(W[v][v], []).append(v)
    cells = _refine(W, [init[k] for k in sorted(init)])

    best = None    # (code, order, prefix) of the least leaf so far
    first = None   # the first leaf reached
    autos: list[tuple] = []

    def leaf_code(order):
        return tuple(W[a][b] for a in order for b in order)

    def record_auto(order_a, order_b):
        g = [0] * n
        for a, b in zip(order_a, order_b):
            g[a] = b
        g = tuple(g)
        if any(i != j for i, j in enumerate(g)) and g not in autos:
            autos.append(g)

    def common(p, q):
        k = 0
        while k < len(p) and k < len(q) and p[k] == q[k]:
            k += 1
        return k

    def search(cells, prefix):
        """Returns the depth to jump back to (len(prefix) means carry on)."""
        nonlocal best, first
        depth = len(prefix)
        if all(len(c) == 1 for c in cells):
            order = tuple(c[0] for c in cells)
            code = leaf_code(order)
            if first is None:
                first = best = (code, order, prefix)
                return depth
            # an equivalent leaf makes the whole sibling subtree redundant
            if code == first[0]:
                record_auto(first[1], order)
                return common(prefix, first[2])
            if code == best[0]:
                record_auto(best[1], order)
                return common(prefix, best[2])
            if code < best[0]:
                best = (code, order, prefix)
            return depth
        target = min((i for i, c in enumerate(cells) if len(c) > 1),
                     key=lambda i: (len(cells[i]), i))
        processed: list[int] = []
        seen_autos = -1
        orb = None
        for v in sorted(cells[target]):
            if len(autos) != seen_autos:
                seen_autos = len(autos)
                orb = _orbits_of([g for g in autos if all(g[p] == p for p in prefix)], n)
            if any(orb[u] == orb[v] for u in processed):
                continue
            processed.append(v)
            rest = [u for u in cells[target] if u != v]
            child = cells[:target] + [[v], rest] + cells[target + 1:]
            back = search(_refine(W, child), prefix + (v,))
            if back < depth:
                return back
        return depth

    search(cells, ())
    digest = hashlib.sha256()
    digest.update(repr((n, values, best[0])).encode())
    return CanonicalLabeling(digest.digest(), best[1], tuple(autos))
