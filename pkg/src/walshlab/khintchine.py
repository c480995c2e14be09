"""Empirical Khintchine constants for lacunary Walsh sums.

Nothing here proves an inequality. Scans report the smallest and largest
ratio ``||sum a_k w_{n_k}||_X / ||a||_2`` they happened to see, which bound
the true constants from inside.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .dyadic import DistributionTable, DyadicSet, DyadicStep, distribution
from .norms import Local, Lp, NormSpec, format_spec, norm, parse_spec
from .walsh import (
    as_fraction,
    l2_norm,
    lacunary_alpha,
    rademacher,
    synthesize,
    validate_lacunary,
)

__all__ = [
    "INDEX_CAP",
    "FIRST_INDEX_MAX",
    "ASCENT_ROUNDS",
    "ConstantsReport",
    "ratio",
    "sample_rng",
    "sample_lacunary",
    "canonical_lacunary",
    "corner_coefficients",
    "scan_constants",
    "eq1_bound",
    "check_bound_eq1",
    "rademacher_sum",
    "equidistribution_tables",
    "verify_equidistribution",
    "find_local_N",
    "majorization_constant",
    "DEFAULT_MAJORIZATION_GRID",
]

INDEX_CAP = 1 << 12
FIRST_INDEX_MAX = 1 << 6
JITTER = 2
ASCENT_ROUNDS = 100


def ratio(a: Sequence[float], indices: Sequence[int], spec: NormSpec) -> float:
    """``norm(sum a_k w_{n_k}, spec) / ||a||_2``."""
    scale = l2_norm(a)
    if scale == 0.0:
        raise ValueError("coefficients must not all vanish")
    return norm(synthesize(a, indices), spec) / scale


def sample_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for one sample; independent of how samples are scheduled."""
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    return np.random.default_rng([int(seed), *(int(s) for s in stream)])


def _next_index(n: int, q: Fraction) -> int:
    # ceil(q * n) in exact arithmetic
    return -((-q.numerator * n) // q.denominator)


def _chain_end(start: int, q: Fraction, length: int) -> int:
    n = start
    for _ in range(length - 1):
        n = _next_index(n, q)
    return n


@lru_cache(maxsize=None)
def _first_index_max(q: Fraction, M: int, low: int, high: int, cap: int) -> int:
    """Largest first index in [low, high] whose jitter-free chain stays under the cap."""
    best = low - 1
    for n1 in range(low, high + 1):
        if _chain_end(n1, q, M) > cap:
            break
        best = n1
    return best


def canonical_lacunary(q, M: int, start: int = 1) -> list[int]:
    """The jitter-free chain ``n_1 = start, n_{k+1} = ceil(q n_k)``."""
    qf = as_fraction(q)
    out = [int(start)]
    for _ in range(M - 1):
        out.append(_next_index(out[-1], qf))
    return out


def sample_lacunary(
    rng: np.random.Generator,
    q,
    M: int,
    low: int = 1,
    high: int = FIRST_INDEX_MAX,
    cap: int = INDEX_CAP,
) -> list[int]:
    """Random q-lacunary indices: ``n_1`` in ``[low, high]``, then ``ceil(q n_k) + jitter``.

    The jitter (0, 1 or 2) and the range of ``n_1`` are clipped so the whole
    chain stays below ``cap``; ``ValueError`` when even the tightest chain
    does not fit.
    """
    qf = as_fraction(q)
    if qf <= 1:
        raise ValueError(f"lacunarity ratio must exceed 1, got {q}")
    if M < 1:
        raise ValueError("need at least one index")
    top = _first_index_max(qf, M, low, high, cap)
    if top < low:
        raise ValueError(f"no {q}-lacunary chain of length {M} starting at {low} fits under {cap}")
    out = [int(rng.integers(low, top + 1))]
    for k in range(1, M):
        base = _next_index(out[-1], qf)
        jitter = int(rng.integers(0, JITTER + 1))
        while jitter > 0 and _chain_end(base + jitter, qf, M - k) > cap:
            jitter -= 1
        out.append(base + jitter)
    return out


def corner_coefficients(M: int) -> list[np.ndarray]:
    """Unit spikes, the flat vector and the alternating vector, all of unit length."""
    corners = [np.eye(M)[i] for i in range(M)]
    if M > 1:
        corners.append(np.ones(M) / math.sqrt(M))
        corners.append(np.array([(-1.0) ** k for k in range(M)]) / math.sqrt(M))
    return corners


def _unit_gaussian(rng: np.random.Generator, M: int) -> np.ndarray:
    while True:
        a = rng.standard_normal(M)
        s = l2_norm(a)
        if s > 0:
            return a / s


@dataclass(frozen=True)
class ConstantsReport:
    """Extremes of the Khintchine ratio seen by a scan, with their witnesses.

    ``indices_used`` holds the index sets of the two witnesses, in the order
    (argmin, argmax).
    """

    spec: NormSpec
    q: Fraction
    M: int
    samples: int
    seed: int
    search: str
    A_hat: float
    B_hat: float
    argmin_coeffs: tuple[float, ...]
    argmax_coeffs: tuple[float, ...]
    indices_used: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def argmin_indices(self) -> tuple[int, ...]:
        return self.indices_used[0]

    @property
    def argmax_indices(self) -> tuple[int, ...]:
        return self.indices_used[1]

    def to_dict(self) -> dict:
        return {
            "spec": format_spec(self.spec),
            "q": str(self.q),
            "M": self.M,
            "samples": self.samples,
            "seed": self.seed,
            "search": self.search,
            "A_hat": self.A_hat,
            "B_hat": self.B_hat,
            "argmin_coeffs": list(self.argmin_coeffs),
            "argmax_coeffs": list(self.argmax_coeffs),
            "indices_used": [list(ix) for ix in self.indices_used],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ConstantsReport:
        return cls(
            spec=parse_spec(data["spec"]),
            q=Fraction(data["q"]),
            M=int(data["M"]),
            samples=int(data["samples"]),
            seed=int(data["seed"]),
            search=data["search"],
            A_hat=float(data["A_hat"]),
            B_hat=float(data["B_hat"]),
            argmin_coeffs=tuple(float(x) for x in data["argmin_coeffs"]),
            argmax_coeffs=tuple(float(x) for x in data["argmax_coeffs"]),
            indices_used=tuple(tuple(int(i) for i in ix) for ix in data["indices_used"]),
        )


@dataclass
class _Extremes:
    # Positions order candidates: corners first (negative), then sample index.
    lo: tuple = field(default=(math.inf, math.inf, None, None))
    hi: tuple = field(default=(-math.inf, math.inf, None, None))

    def push(self, pos, r, a, idx):
        if (r, pos) < self.lo[:2]:
            self.lo = (r, pos, a, idx)
        if (-r, pos) < (-self.hi[0], self.hi[1]):
            self.hi = (r, pos, a, idx)

    def merge(self, other: _Extremes):
        for cand in (other.lo, other.hi):
            if cand[2] is not None:
                self.push(cand[1], cand[0], cand[2], cand[3])


def _sample_block(args):
    spec, q, M, seed, start, stop, want_trace = args
    ext = _Extremes()
    trace = []
    for i in range(start, stop):
        rng = sample_rng(seed, i)
        idx = tuple(sample_lacunary(rng, q, M))
        a = _unit_gaussian(rng, M)
        r = ratio(a, idx, spec)
        ext.push(i, r, a, idx)
        if want_trace:
            trace.append((i, r))
    return ext, trace


def _ascend(a: np.ndarray, idx, spec: NormSpec, best: float, sense: float, rounds: int):
    """Cyclic coordinate search on the unit sphere; only strict improvements move."""
    a = np.array(a, dtype=float)
    step = 0.5
    for _ in range(rounds):
        moved = False
        for i in range(a.size):
            for sign in (1.0, -1.0):
                cand = a.copy()
                cand[i] += sign * step
                s = l2_norm(cand)
                if s == 0.0:
                    continue
                cand /= s
                r = ratio(cand, idx, spec)
                if sense * (r - best) > 0:
                    a, best, moved = cand, r, True
        if not moved:
            step /= 2.0
    return a, best


def scan_constants(
    spec: NormSpec,
    q,
    M: int,
    samples: int,
    seed: int = 0,
    search: str = "random",
    workers: int = 1,
    trace: list | None = None,
    ascent_rounds: int = ASCENT_ROUNDS,
) -> ConstantsReport:
    """Estimate ``A(X, q)`` and ``B(X, q)`` by sampling lacunary sums of length ``M``.

    Sample ``i`` draws its index set and unit coefficient vector from
    ``sample_rng(seed, i)``; the corner vectors are also tried on the
    jitter-free chain starting at 1. With ``search="ascent"`` both extremes
    are then polished by coordinate ascent. If ``trace`` is a list, the
    ``(sample_index, ratio)`` pairs of the random phase are appended to it.
    """
    qf = as_fraction(q)
    if qf <= 1:
        raise ValueError(f"lacunarity ratio must exceed 1, got {q}")
    if M < 1 or samples < 1:
        raise ValueError("M and samples must be positive")
    if search not in ("random", "ascent"):
        raise ValueError(f"unknown search {search!r}")

    ext = _Extremes()
    base = tuple(canonical_lacunary(qf, M))
    if base[-1] > INDEX_CAP:
        raise ValueError(f"no {q}-lacunary chain of length {M} fits under {INDEX_CAP}")
    corners = corner_coefficients(M)
    for c, a in enumerate(corners):
        ext.push(c - len(corners), ratio(a, base, spec), a, base)

    want_trace = trace is not None
    if workers <= 1:
        blocks = [_sample_block((spec, qf, M, seed, 0, samples, want_trace))]
    else:
        size = -(-samples // workers)
        jobs = [
            (spec, qf, M, seed, s, min(s + size, samples), want_trace)
            for s in range(0, samples, size)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_sample_block, jobs))
    for block, block_trace in blocks:
        ext.merge(block)
        if want_trace:
            trace.extend(block_trace)

    lo_r, _, lo_a, lo_idx = ext.lo
    hi_r, _, hi_a, hi_idx = ext.hi
    if search == "ascent":
        lo_a, lo_r = _ascend(lo_a, lo_idx, spec, lo_r, -1.0, ascent_rounds)
        hi_a, hi_r = _ascend(hi_a, hi_idx, spec, hi_r, 1.0, ascent_rounds)

    return ConstantsReport(
        spec=spec,
        q=qf,
        M=M,
        samples=samples,
        seed=seed,
        search=search,
        A_hat=float(lo_r),
        B_hat=float(hi_r),
        argmin_coeffs=tuple(float(x) for x in lo_a),
        argmax_coeffs=tuple(float(x) for x in hi_a),
        indices_used=(tuple(lo_idx), tuple(hi_idx)),
    )


def eq1_bound(n: int, q) -> float:
    """Upper bound ``(1 + sqrt 2) (2 + 2 alpha)^(1/2n) sqrt(n)`` for ``B'(2n, q)``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    alpha = lacunary_alpha(q)
    return (1.0 + math.sqrt(2.0)) * (2.0 + 2.0 * alpha) ** (1.0 / (2 * n)) * math.sqrt(n)


def check_bound_eq1(n: int, q, report: ConstantsReport) -> bool:
    if report.spec != Lp(2 * n):
        raise ValueError(f"report is for {format_spec(report.spec)}, expected lp:{2 * n}")
    if as_fraction(q) != report.q:
        raise ValueError(f"report was scanned with q={report.q}, not {q}")
    return report.B_hat <= eq1_bound(n, q)


def rademacher_sum(a: Sequence[float], order: int | None = None) -> DyadicStep:
    """``sum_k a_k r_k``, accumulated in increasing ``k``."""
    M = len(a)
    if M == 0:
        raise ValueError("need at least one coefficient")
    order = M if order is None else order
    total = np.zeros(1 << order)
    for k, c in enumerate(a, start=1):
        total += float(c) * rademacher(k, order).values
    return DyadicStep(total)


def equidistribution_tables(
    a: Sequence[float], indices: Sequence[int]
) -> tuple[DistributionTable, DistributionTable]:
    """Distributions of the Walsh sum and of the Rademacher sum with the same coefficients."""
    ok, _ = validate_lacunary(indices, 2)
    if not ok:
        raise ValueError(f"indices {list(indices)} are not 2-lacunary")
    if len(a) != len(indices):
        raise ValueError(f"{len(a)} coefficients for {len(indices)} indices")
    return distribution(synthesize(a, indices)), distribution(rademacher_sum(a))


def verify_equidistribution(a: Sequence[float], indices: Sequence[int]) -> bool:
    """Exact multiset equality of the two distributions (no tolerance)."""
    walsh_table, rad_table = equidistribution_tables(a, indices)
    return walsh_table == rad_table


def find_local_N(
    E: DyadicSet,
    q,
    spec: NormSpec,
    M: int,
    samples: int,
    seed: int = 0,
    floor_A: float = 0.5,
    cap: int = INDEX_CAP,
) -> int | None:
    """Heuristic threshold ``N`` for the local Khintchine inequality on ``E``.

    Tries ``N = 1, 2, 4, ...`` and returns the first for which every sampled
    q-lacunary sum with ``n_1 >= N`` has local ratio in
    ``[floor_A, 1/floor_A]``. ``None`` once chains starting at ``N`` no
    longer fit under ``cap``. The corner coefficient vectors are tried on
    every jitter-free chain with first index in ``[N, N + 63]``, random
    samples on top of that. This is a sampling estimate only.
    """
    if E.measure == 0:
        raise ValueError("E must have positive measure")
    if not 0 <= floor_A <= 1:
        raise ValueError("floor_A must lie in [0, 1]")
    if isinstance(spec, Local):
        raise ValueError("pass the inner norm; localization to E is applied here")
    qf = as_fraction(q)
    if qf <= 1:
        raise ValueError(f"lacunarity ratio must exceed 1, got {q}")
    local = Local(E, spec)
    ceiling = math.inf if floor_A == 0 else 1.0 / floor_A
    corners = corner_coefficients(M)

    def admissible(a, idx) -> bool:
        r = ratio(a, idx, local)
        return floor_A <= r <= ceiling

    N = 1
    while _chain_end(N, qf, M) <= cap:
        top = _first_index_max(qf, M, N, N + FIRST_INDEX_MAX - 1, cap)
        chains = [canonical_lacunary(qf, M, start=s) for s in range(N, top + 1)]
        ok = all(admissible(a, base) for base in chains for a in corners)
        for i in range(samples):
            if not ok:
                break
            rng = sample_rng(seed, N, i)
            idx = sample_lacunary(rng, qf, M, low=N, high=N + FIRST_INDEX_MAX - 1, cap=cap)
            ok = admissible(_unit_gaussian(rng, M), idx)
        if ok:
            return N
        N *= 2
    return None


DEFAULT_MAJORIZATION_GRID = tuple(Fraction(k, 10) for k in range(11, 41))


def _measure_above(table: DistributionTable, lam: float, factor: float = 1.0) -> Fraction:
    return sum((mu for v, mu in table.atoms if factor * v > lam), Fraction(0))


def _majorized(top: DistributionTable, bottom: DistributionTable, C) -> bool:
    """``m_top(lam) <= C m_bottom(lam / C)`` for every ``lam > 0``.

    Both sides are right-continuous step functions of ``lam``, so checking
    at every jump point and once below the first jump covers all ``lam``.
    """
    c = float(C)
    cf = Fraction(C)
    jumps = sorted({v for v, _ in top.atoms} | {c * v for v, _ in bottom.atoms})
    jumps = [lam for lam in jumps if lam > 0]
    if not jumps:
        return True
    points = [jumps[0] / 2.0] + jumps
    return all(
        _measure_above(top, lam) <= cf * _measure_above(bottom, lam, c) for lam in points
    )


def majorization_constant(
    a: Sequence[float],
    indices: Sequence[int],
    grid: Sequence = DEFAULT_MAJORIZATION_GRID,
    reverse: bool = False,
):
    """Smallest grid ``C`` with ``m_W(lam) <= C m_R(lam / C)`` for all ``lam > 0``.

    ``W`` is the Walsh sum and ``R`` the Rademacher sum with the same
    coefficients. ``reverse=True`` swaps the roles; that direction is
    unresolved for ``1 < q < 2`` and the result is experimental evidence
    only. Returns ``None`` when no grid value works.
    """
    if len(a) != len(indices):
        raise ValueError(f"{len(a)} coefficients for {len(indices)} indices")
    cands = sorted(Fraction(c) if not isinstance(c, float) else Fraction(repr(c)) for c in grid)
    if any(c <= 1 for c in cands):
        raise ValueError("majorization constants must exceed 1")
    w_table = distribution(synthesize(a, indices))
    r_table = distribution(rademacher_sum(a))
    top, bottom = (r_table, w_table) if reverse else (w_table, r_table)
    for c in cands:
        if _majorized(top, bottom, c):
            return c
    return None
