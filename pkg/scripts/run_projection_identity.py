"""Randomized exact checks of the sign-flip averaging identity for projections.

For each case a selected set of Walsh indices and a perturbed projection Q
with dyadic-rational entries are drawn, and the residual of
P = 2^-n sum_j T_j Q T_j is computed in exact arithmetic.
"""

import argparse
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from walshlab.projection import build_Qn, verify_averaging_identity


@dataclass
class IdentityConfig:
    cases: int = 200
    max_order: int = 8
    max_perturbations: int = 6
    seed: int = 0


def draw_case(rng, cfg: IdentityConfig):
    n = int(rng.integers(1, cfg.max_order + 1))
    size = 1 << n
    selected = sorted(int(m) for m in rng.choice(size, size=int(rng.integers(1, size)), replace=False))
    rest = [i for i in range(size) if i not in selected]
    pert = [
        (int(rng.choice(selected)), int(rng.choice(rest)),
         Fraction(int(rng.integers(-64, 65)), 1 << int(rng.integers(0, 10))))
        for _ in range(int(rng.integers(0, cfg.max_perturbations + 1)))
    ]
    return n, selected, pert


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cases", type=int, default=IdentityConfig.cases)
    p.add_argument("--max-order", type=int, default=IdentityConfig.max_order)
    p.add_argument("--seed", type=int, default=IdentityConfig.seed)
    args = p.parse_args(argv)
    cfg = IdentityConfig(args.cases, args.max_order, IdentityConfig.max_perturbations, args.seed)

    rng = np.random.default_rng(cfg.seed)
    worst, start = Fraction(0), time.perf_counter()
    per_order = {}
    for _ in range(cfg.cases):
        n, selected, pert = draw_case(rng, cfg)
        ok, residual = verify_averaging_identity(n, selected, build_Qn(n, selected, pert))
        worst = max(worst, residual)
        per_order[n] = per_order.get(n, 0) + 1
    print(f"cases: {cfg.cases}  orders: {dict(sorted(per_order.items()))}")
    print(f"max residual: {worst}  ({time.perf_counter() - start:.2f}s)")
    return 0 if worst == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
