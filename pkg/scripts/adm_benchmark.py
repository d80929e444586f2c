"""Facet enumeration of perfect domains: plain double description against
ADM with and without the bank, reporting timings and instrumentation.

    python scripts/adm_benchmark.py --forms D4 D5 D6 E6
"""

import argparse
import time
from dataclasses import dataclass, field

from perfectforms import admethod as am
from perfectforms import polycone as pc
from perfectforms.qform import catalog_form
from perfectforms.symmetry import aut_group
from perfectforms.voronoi import perfect_domain


@dataclass
class BenchConfig:
    forms: list = field(default_factory=lambda: ["D4", "D5", "D6"])
    plain: bool = True
    recursion_threshold: int | None = None


def bench(name: str, cfg: BenchConfig) -> None:
    A = catalog_form(name)
    cone = perfect_domain(A)
    G = aut_group(A).group
    print(f"{name}: {len(cone)} rays, |G| = {G.order()}")
    if cfg.plain:
        t = time.perf_counter()
        n = len(pc.facets_with_incidence(cone))
        print(f"  plain DD            {n:>7} facets  {time.perf_counter() - t:8.2f}s")
    for bank in (True, False):
        c = am.AdmCounters()
        t = time.perf_counter()
        recs = am.adm(cone, G, am.AdmPolicy(recursion_threshold=cfg.recursion_threshold, use_bank=bank), counters=c)
        dt = time.perf_counter() - t
        total = sum(r.orbit_size for r in recs)
        print(f"  ADM bank={'on ' if bank else 'off'}        {total:>7} facets  {dt:8.2f}s  "
              f"{len(recs)} orbits  {c.as_dict()}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--forms", nargs="+", default=BenchConfig().forms)
    p.add_argument("--no-plain", dest="plain", action="store_false")
    p.add_argument("--recursion-threshold", type=int, default=None)
    cfg = BenchConfig(**vars(p.parse_args()))
    for name in cfg.forms:
        bench(name, cfg)


if __name__ == "__main__":
    main()
