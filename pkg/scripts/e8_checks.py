"""Exact invariants of the E8 root lattice form, with timings."""

import time

from perfectforms.qform import arithmetical_minimum, catalog_form, eutaxy, hermite_power
from perfectforms.symmetry import aut_group
from perfectforms.voronoi import perfect_domain


def timed(label, fn):
    t = time.perf_counter()
    value = fn()
    print(f"{label:<34} {value!s:<14} {time.perf_counter() - t:7.2f}s")
    return value


def main():
    E8 = catalog_form("E8")
    timed("arithmetical minimum", lambda: arithmetical_minimum(E8).minimum)
    timed("minimal vectors", lambda: arithmetical_minimum(E8).kissing_number)
    timed("rays of the perfect domain", lambda: len(perfect_domain(E8)))
    aut = timed("|Aut(E8)|", lambda: aut_group(E8).order)
    timed("|Aut(E8)| acting on Min/+-1", lambda: aut_group(E8).group.order())
    timed("Hermite invariant^8", lambda: hermite_power(E8))
    timed("eutactic", lambda: eutaxy(E8).eutactic)
    assert aut == 696729600


if __name__ == "__main__":
    main()
