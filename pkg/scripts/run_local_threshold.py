"""Heuristic thresholds N for local Khintchine inequalities on dyadic sets.

For each set E and ratio q, reports the first N in 1, 2, 4, ... for which all
sampled q-lacunary sums starting at or after N keep their local ratio inside
[floor, 1/floor]. A sampling estimate, not a proof of anything.
"""

import argparse
from dataclasses import dataclass

from walshlab.dyadic import DyadicSet
from walshlab.khintchine import find_local_N
from walshlab.norms import parse_spec


@dataclass
class LocalConfig:
    sets: str = "0/1;0/2,3/2;5/3;1/2,6/3"
    ratios: str = "1.2,1.5,2,3"
    spec: str = "lp:2"
    M: int = 4
    samples: int = 200
    floor: float = 0.5
    seed: int = 0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(LocalConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = LocalConfig(**vars(p.parse_args(argv)))

    spec = parse_spec(cfg.spec)
    print("set, measure, q, N")
    for text in cfg.sets.split(";"):
        E = DyadicSet.parse(text)
        for q in cfg.ratios.split(","):
            N = find_local_N(E, q, spec, cfg.M, cfg.samples, cfg.seed, cfg.floor)
            print(f"{E.format()}, {E.measure}, {q}, {N}")


if __name__ == "__main__":
    main()
