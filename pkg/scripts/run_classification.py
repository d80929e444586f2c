"""Classify perfect forms in a range of dimensions and print the summary table.

    python scripts/run_classification.py --dims 2 3 4 5 6
    python scripts/run_classification.py --dims 7 --state-dir runs --wall-clock 3600

Each dimension keeps a resumable state file in --state-dir; rerunning the
script continues where the last run stopped.
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from perfectforms.admethod import AdmPolicy
from perfectforms.voronoi import ClassificationState, ClassifyLimits, FacetPolicy, classification_report, classify

# perfect and extreme counts known for d <= 7
EXPECTED = {2: (1, 1), 3: (1, 1), 4: (2, 2), 5: (3, 3), 6: (7, 6), 7: (33, 30)}


@dataclass
class RunConfig:
    dims: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    state_dir: str = "runs"
    workers: int = 1
    wall_clock: float | None = None
    verbose: bool = False
    recursion_threshold: int | None = None   # 32 is what d = 7 needs
    full_aut_on_faces: bool = False


def parse_args() -> RunConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=RunConfig().dims)
    p.add_argument("--state-dir", default=RunConfig.state_dir)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--wall-clock", type=float, default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--recursion-threshold", type=int, default=None)
    p.add_argument("--full-aut-on-faces", action="store_true")
    return RunConfig(**vars(p.parse_args()))


def run(cfg: RunConfig) -> list[dict]:
    out = Path(cfg.state_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    policy = FacetPolicy(adm=AdmPolicy(recursion_threshold=cfg.recursion_threshold,
                                       full_aut_on_faces=cfg.full_aut_on_faces))
    for d in cfg.dims:
        path = out / f"classify-d{d}.json"
        state = ClassificationState.load(path) if path.exists() else None
        t = time.monotonic()

        def progress(st, rec):
            if cfg.verbose:
                print(f"  d={d} closed {rec.id} ({rec.name or '-'}), {len(st.records)} known, "
                      f"{len(st.open)} open, {time.monotonic() - t:.0f}s", flush=True)

        st = classify(d, ClassifyLimits(wall_clock=cfg.wall_clock), state=state, workers=cfg.workers,
                      state_path=path, progress=progress, policy=policy)
        rep = classification_report(st)
        row = {"dim": d, "perfect": rep["perfect"], "extreme": rep["extreme"],
               "maximizer": (rep["maximizer"] or {}).get("name"), "complete": rep["complete"],
               "seconds": round(time.monotonic() - t, 1), "expected": EXPECTED.get(d)}
        rows.append(row)
        print(f"d={d}: {row['perfect']} perfect, {row['extreme']} extreme, maximizer {row['maximizer']}, "
              f"complete={row['complete']} ({row['seconds']}s; expected {row['expected']})", flush=True)
    (out / "summary.json").write_text(json.dumps({"config": asdict(cfg), "rows": rows}, indent=1) + "\n")
    return rows


if __name__ == "__main__":
    run(parse_args())
