"""Regenerate the bundled corpus: curated entries plus the enumerated polygons."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from polycert.corpus import DATA_DIR, builtin_corpus, enumerated_entries, write_corpus


@dataclass
class ExportConfig:
    out: Path = DATA_DIR
    bound: int = 3
    clean: bool = True


def run(cfg: ExportConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.clean:
        for old in cfg.out.glob("*.json"):
            old.unlink()
    return write_corpus(builtin_corpus() + enumerated_entries(cfg.bound), cfg.out)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ExportConfig.out)
    ap.add_argument("--bound", type=int, default=ExportConfig.bound)
    ap.add_argument("--keep", action="store_true", help="do not delete existing entries first")
    a = ap.parse_args()
    paths = run(ExportConfig(a.out, a.bound, not a.keep))
    print(f"wrote {len(paths)} entries to {a.out}")


if __name__ == "__main__":
    main()
