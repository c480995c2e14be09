"""Paley-numbered Walsh functions, Rademacher functions and lacunary index sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence, Union

import numpy as np

from .config import check_order
from .dyadic import DyadicStep, UniformStep, integral, mul, refine

__all__ = [
    "paley_bits",
    "paley_order",
    "LacunarySeq",
    "SignMatrix",
    "as_fraction",
    "lacunary_alpha",
    "validate_lacunary",
    "walsh",
    "rademacher",
    "walsh_product_index",
    "theta_matrix",
    "synthesize",
    "analyze",
    "l2_norm",
]


def paley_bits(k: int) -> tuple[int, ...]:
    """Binary digits ``(a_1, ..., a_n)`` of ``k``, least significant first, minimal length."""
    if k < 0:
        raise ValueError(f"Walsh index must be nonnegative, got {k}")
    return tuple((k >> i) & 1 for i in range(k.bit_length()))


def paley_order(k: int) -> int:
    """Smallest ``n`` with ``k < 2**n``; ``w_k`` is constant on the order-``n`` cells."""
    if k < 0:
        raise ValueError(f"Walsh index must be nonnegative, got {k}")
    return int(k).bit_length()


def as_fraction(q) -> Fraction:
    """Exact rational for a ratio given as int, Fraction, decimal string or float.

    Floats go through their shortest decimal repr, so ``1.1`` means 11/10.
    """
    if isinstance(q, Rational):
        return Fraction(q)
    if isinstance(q, float):
        if not math.isfinite(q):
            raise ValueError(f"ratio must be finite, got {q}")
        return Fraction(repr(q))
    return Fraction(str(q).strip())


def lacunary_alpha(q) -> int:
    """0 when ``q >= 2``, otherwise the least integer ``alpha`` with ``q**alpha >= 2``."""
    qf = as_fraction(q)
    if qf <= 1:
        raise ValueError(f"lacunarity ratio must exceed 1, got {q}")
    if qf >= 2:
        return 0
    alpha, power = 1, qf
    while power < 2:
        alpha += 1
        power *= qf
    return alpha


def validate_lacunary(indices: Sequence[int], q) -> tuple[bool, int]:
    """Whether every consecutive ratio ``n_{k+1}/n_k`` is at least ``q``, plus ``alpha``.

    The comparison ``n_{k+1} >= q * n_k`` is done in exact rational arithmetic.
    """
    alpha = lacunary_alpha(q)
    qf = as_fraction(q)
    idx = [int(i) for i in indices]
    if any(i < 1 for i in idx):
        return False, alpha
    ok = all(b >= qf * a for a, b in zip(idx, idx[1:]))
    return ok, alpha


@dataclass(frozen=True)
class LacunarySeq:
    indices: tuple[int, ...]
    q: Fraction
    alpha: int

    @classmethod
    def build(cls, indices: Sequence[int], q) -> LacunarySeq:
        ok, alpha = validate_lacunary(indices, q)
        if not ok:
            raise ValueError(f"indices {list(indices)} are not {q}-lacunary")
        return cls(tuple(int(i) for i in indices), as_fraction(q), alpha)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


IndexList = Union[Sequence[int], LacunarySeq]


def _index_tuple(indices: IndexList) -> tuple[int, ...]:
    if isinstance(indices, LacunarySeq):
        return indices.indices
    out = tuple(int(i) for i in indices)
    if any(i < 0 for i in out):
        raise ValueError("Walsh indices must be nonnegative")
    return out


def _parity_table(k: int, n: int, cells: np.ndarray) -> np.ndarray:
    # Bit a_i of k pairs with bit b_{n+1-i} of the cell index j (b_1 least significant).
    parity = np.zeros(cells.shape, dtype=np.int64)
    for i, a in enumerate(paley_bits(k), start=1):
        if a:
            parity ^= (cells >> (n - i)) & 1
    return parity


@lru_cache(maxsize=8192)
def _walsh_values(k: int, n: int) -> np.ndarray:
    if paley_order(k) > n:
        raise ValueError(f"w_{k} is not constant on order-{n} cells (needs order {paley_order(k)})")
    check_order(n)
    values = (1 - 2 * _parity_table(k, n, np.arange(1 << n, dtype=np.int64))).astype(np.float64)
    values.setflags(write=False)
    return values


def walsh(k: int, n: int | None = None) -> DyadicStep:
    """``w_k`` as a step function of order ``n`` (default: the least admissible order)."""
    k = int(k)
    n = paley_order(k) if n is None else int(n)
    return DyadicStep(_walsh_values(k, n))


def rademacher(k: int, n: int | None = None) -> DyadicStep:
    """``r_k(t) = sign sin(2^k pi t)``: alternating signs on blocks of ``2^(n-k)`` cells."""
    k = int(k)
    if k < 1:
        raise ValueError(f"Rademacher index starts at 1, got {k}")
    n = k if n is None else int(n)
    if n < k:
        raise ValueError(f"r_{k} needs order at least {k}, got {n}")
    check_order(n)
    blocks = np.arange(1 << n) >> (n - k)
    return DyadicStep(np.where(blocks % 2 == 0, 1.0, -1.0))


def walsh_product_index(i: int, j: int) -> int:
    """Index of ``w_i * w_j`` (the dyadic group law is bitwise XOR)."""
    if i < 0 or j < 0:
        raise ValueError("Walsh indices must be nonnegative")
    return int(i) ^ int(j)


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """``entries[j, k]`` is the sign of ``w_k`` on the cell ``I^n_j``."""

    n: int
    entries: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.entries, other.entries)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))

    def gram(self) -> np.ndarray:
        """``theta @ theta.T`` in int64 arithmetic; equals ``2**n`` times the identity."""
        return self.entries @ self.entries.T


def theta_matrix(n: int) -> SignMatrix:
    check_order(n)
    size = 1 << n
    rows = np.arange(size, dtype=np.int64)
    entries = np.empty((size, size), dtype=np.int64)
    for k in range(size):
        entries[:, k] = 1 - 2 * _parity_table(k, n, rows)
    entries.setflags(write=False)
    return SignMatrix(n, entries)


def l2_norm(a: Sequence[float]) -> float:
    return math.hypot(*(float(x) for x in a)) if len(a) else 0.0


def synthesize(a: Sequence[float], indices: IndexList, n: int | None = None) -> DyadicStep:
    """``sum_k a_k w_{n_k}``, accumulated in increasing ``k``."""
    idx = _index_tuple(indices)
    coeffs = [float(x) for x in a]
    if len(coeffs) != len(idx):
        raise ValueError(f"{len(coeffs)} coefficients for {len(idx)} indices")
    need = max((paley_order(i) for i in idx), default=0)
    n = need if n is None else int(n)
    if n < need:
        raise ValueError(f"order {n} too small for index {max(idx)} (needs {need})")
    check_order(n)
    total = np.zeros(1 << n)
    for c, k in zip(coeffs, idx):
        total += c * _walsh_values(k, n)
    return DyadicStep(total)


def analyze(f: UniformStep, indices: IndexList) -> np.ndarray:
    """Walsh coefficients ``<w_{n_k}, f>`` for each listed index."""
    idx = _index_tuple(indices)
    if not isinstance(f, DyadicStep):
        raise ValueError("Walsh coefficients need a dyadic step function")
    need = max([f.order] + [paley_order(i) for i in idx])
    g = refine(f, need)
    return np.array([integral(mul(g, walsh(k, need))) for k in idx])
