"""Empirical Khintchine constants over a grid of norms and lacunarity ratios.

Writes one CSV row per (spec, q) with A_hat, B_hat and, for even-integer
Lp norms, the explicit upper bound on B.
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, fields

from walshlab.khintchine import eq1_bound, scan_constants
from walshlab.norms import INF, Lp, format_spec, parse_spec


@dataclass
class ScanConfig:
    specs: str = "lp:1,lp:4,lp:6,mp:2,mp:1"
    ratios: str = "1.1,1.5,2,3"
    M: int = 8
    samples: int = 2000
    seed: int = 0
    search: str = "ascent"
    workers: int = 1


def parse_config(argv=None) -> ScanConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(ScanConfig):
        p.add_argument(f"--{f.name}", type=f.type if f.type in (int, str) else str, default=f.default)
    return ScanConfig(**vars(p.parse_args(argv)))


def main(argv=None):
    cfg = parse_config(argv)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["spec", "q", "M", "samples", "seed", "A_hat", "B_hat", "eq1_bound", "seconds"])
    for text in cfg.specs.split(","):
        spec = parse_spec(text)
        for q in cfg.ratios.split(","):
            start = time.perf_counter()
            try:
                rep = scan_constants(spec, q, cfg.M, cfg.samples, cfg.seed, cfg.search, cfg.workers)
            except ValueError as exc:
                print(f"skip {text} q={q}: {exc}", file=sys.stderr)
                continue
            bound = ""
            if isinstance(spec, Lp) and spec.p is not INF and spec.p % 2 == 0:
                bound = repr(eq1_bound(int(spec.p // 2), q))
            out.writerow([
                format_spec(spec), str(rep.q), cfg.M, cfg.samples, cfg.seed,
                repr(rep.A_hat), repr(rep.B_hat), bound, f"{time.perf_counter() - start:.2f}",
            ])
            sys.stdout.flush()


if __name__ == "__main__":
    main()
