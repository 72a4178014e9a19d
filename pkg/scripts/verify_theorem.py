"""Print a per-entry table of verdicts for the corpus and exit nonzero on any failure.

Columns: flags, affine verdict, linear verdict, bundle verdict, oracle agreement.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from polycert.bundle import polytope_bundle, stability_verdict
from polycert.concentration import Mode, agrees_with_oracle, brute_force_oracle, check
from polycert.corpus import compute_flags, corpus_dir, load_corpus, verify_entry


@dataclass
class VerifyConfig:
    directory: Path | None = None
    oracle: bool = True


def run(cfg: VerifyConfig) -> int:
    failures = 0
    for e in load_corpus(cfg.directory or corpus_dir(), verify=False):
        P = e.polytope
        flags = compute_flags(P)
        row = [e.name.ljust(16), "".join("RSC"[i] if v else "-" for i, v in enumerate(flags.values()))]
        for mode in (Mode.AFFINE, Mode.LINEAR):
            rep = check(P, mode)
            row.append(rep.overall.value)
            if cfg.oracle and not agrees_with_oracle(rep, brute_force_oracle(rep.normals, rep.volumes, mode)):
                row.append("ORACLE-MISMATCH")
                failures += 1
        row.append(stability_verdict(*polytope_bundle(P)[1:]).kind.value if flags["smooth"] else "-")
        problems = verify_entry(e)
        failures += bool(problems)
        print("  ".join(row))
        for p in problems:
            print(f"    FAIL {p}")
    print(f"{failures} failures")
    return 1 if failures else 0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", type=Path)
    ap.add_argument("--no-oracle", action="store_true")
    a = ap.parse_args()
    sys.exit(run(VerifyConfig(a.dir, not a.no_oracle)))


if __name__ == "__main__":
    main()
