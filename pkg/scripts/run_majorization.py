"""Distributional majorization between lacunary Walsh sums and Rademacher sums.

For each ratio q, samples coefficient vectors and q-lacunary index sets and
records the smallest grid constant C with m_W(lam) <= C m_R(lam / C), and the
same for the reverse direction. The reverse direction has no known proof for
q < 2; its numbers are exploratory.
"""

import argparse
from collections import Counter
from dataclasses import dataclass

from walshlab.khintchine import majorization_constant, sample_lacunary, sample_rng


@dataclass
class MajorizationConfig:
    ratios: str = "1.1,1.3,1.5,1.8,2"
    M: int = 6
    samples: int = 200
    seed: int = 0


def summarize(values):
    found = [c for c in values if c is not None]
    missing = len(values) - len(found)
    worst = max(found) if found else None
    common = Counter(found).most_common(1)[0][0] if found else None
    return worst, common, missing


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(MajorizationConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    cfg = MajorizationConfig(**vars(p.parse_args(argv)))

    print("q, direction, worst C, most common C, no grid value")
    for q in cfg.ratios.split(","):
        forward, backward = [], []
        for i in range(cfg.samples):
            rng = sample_rng(cfg.seed, i)
            idx = sample_lacunary(rng, q, cfg.M)
            a = rng.standard_normal(cfg.M)
            forward.append(majorization_constant(a, idx))
            backward.append(majorization_constant(a, idx, reverse=True))
        for label, vals in (("W by R", forward), ("R by W (experimental)", backward)):
            worst, common, missing = summarize(vals)
            print(f"{q}, {label}, {worst}, {common}, {missing}")


if __name__ == "__main__":
    main()
