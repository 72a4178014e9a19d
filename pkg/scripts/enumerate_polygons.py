"""Enumerate reflexive polygons for several box sizes and report class stability."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from polycert.corpus import enumerate_reflexive_polygons
from polycert.polytope import is_smooth, normalized_volume


@dataclass
class EnumConfig:
    bounds: list[int] = field(default_factory=lambda: [2, 3, 4])


def run(cfg: EnumConfig) -> None:
    previous = None
    for b in cfg.bounds:
        t0 = time.perf_counter()
        reps = enumerate_reflexive_polygons(b)
        dt = time.perf_counter() - t0
        smooth = sum(bool(is_smooth(P)) for P in reps)
        same = previous is not None and [P.vertices for P in reps] == previous
        print(f"bound {b}: {len(reps)} classes, {smooth} smooth ({dt:.1f}s)" + (", unchanged" if same else ""))
        previous = [P.vertices for P in reps]
    for P in reps:
        print(f"  {P.name}  volume {normalized_volume(P):2d}  {list(P.vertices)}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("bounds", nargs="*", type=int, default=[2, 3, 4])
    run(EnumConfig(ap.parse_args().bounds))


if __name__ == "__main__":
    main()
