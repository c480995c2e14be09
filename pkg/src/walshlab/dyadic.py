"""Step functions on equal partitions of [0, 1].

A :class:`DyadicStep` of order ``n`` stores the values taken on the open
intervals ``I^n_j = (j/2^n, (j+1)/2^n)``; endpoint values are ignored since
they live on a null set. Localizing a dyadic step to a set made of ``r``
cells gives ``r`` equal cells, which is a power of two only sometimes, so the
general container :class:`UniformStep` allows any cell count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .config import check_order

__all__ = [
    "UniformStep",
    "DyadicStep",
    "DyadicInterval",
    "DyadicSet",
    "DistributionTable",
    "refine",
    "combine",
    "add",
    "mul",
    "scale",
    "absolute",
    "integral",
    "distribution",
    "decreasing_rearrangement",
]


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("step values must be a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("step values must be finite")
    arr.setflags(write=False)
    return arr


class UniformStep:
    """Step function constant on ``len(values)`` equal cells of [0, 1]."""

    __slots__ = ("_values",)

    def __init__(self, values):
        self._values = _frozen(values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def cells(self) -> int:
        return self._values.size

    @property
    def cell_measure(self) -> Fraction:
        return Fraction(1, self.cells)

    def __len__(self) -> int:
        return self.cells

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniformStep):
            return NotImplemented
        return self.cells == other.cells and np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash((self.cells, self._values.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._values.tolist()!r})"

    def expand(self, cells: int) -> UniformStep:
        """Same function on ``cells`` equal cells (a multiple of the current count)."""
        if cells % self.cells:
            raise ValueError(f"{cells} cells is not a refinement of {self.cells}")
        return _wrap(np.repeat(self._values, cells // self.cells))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))

    def __mul__(self, other):
        if isinstance(other, UniformStep):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def __abs__(self):
        return absolute(self)


class DyadicStep(UniformStep):
    """Step function constant on the ``2**order`` dyadic intervals of that order."""

    __slots__ = ()

    def __init__(self, values):
        super().__init__(values)
        if not _is_power_of_two(self.cells):
            raise ValueError(f"a dyadic step needs 2**n values, got {self.cells}")
        check_order(self.order)

    @property
    def order(self) -> int:
        return self.cells.bit_length() - 1

    @classmethod
    def constant(cls, c: float, order: int = 0) -> DyadicStep:
        return cls(np.full(1 << check_order(order), float(c)))

    @classmethod
    def zero(cls, order: int = 0) -> DyadicStep:
        return cls.constant(0.0, order)

    def refine(self, order: int) -> DyadicStep:
        return refine(self, order)

    def to_dict(self) -> dict:
        return {"order": self.order, "values": [float(v) for v in self._values]}

    @classmethod
    def from_dict(cls, data: dict) -> DyadicStep:
        step = cls(data["values"])
        if step.order != int(data["order"]):
            raise ValueError("order does not match the number of values")
        return step


def _wrap(values) -> UniformStep:
    values = np.asarray(values, dtype=np.float64)
    if _is_power_of_two(values.size):
        return DyadicStep(values)
    return UniformStep(values)


def refine(f: DyadicStep, order: int) -> DyadicStep:
    """Represent ``f`` on the finer dyadic partition of the given order."""
    if order < f.order:
        raise ValueError(f"cannot refine order {f.order} down to {order}")
    check_order(order)
    if order == f.order:
        return f
    return DyadicStep(np.repeat(f.values, 1 << (order - f.order)))


def _common(f: UniformStep, g: UniformStep) -> tuple[np.ndarray, np.ndarray]:
    cells = math.lcm(f.cells, g.cells)
    if isinstance(f, DyadicStep) and isinstance(g, DyadicStep):
        check_order(cells.bit_length() - 1)
    return (
        np.repeat(f.values, cells // f.cells),
        np.repeat(g.values, cells // g.cells),
    )


def add(f: UniformStep, g: UniformStep) -> UniformStep:
    a, b = _common(f, g)
    return _wrap(a + b)


def mul(f: UniformStep, g: UniformStep) -> UniformStep:
    a, b = _common(f, g)
    return _wrap(a * b)


def scale(f: UniformStep, c: float) -> UniformStep:
    return _wrap(float(c) * f.values)


def absolute(f: UniformStep) -> UniformStep:
    return _wrap(np.abs(f.values))


def combine(f: UniformStep, g: UniformStep | None, op: str, c: float | None = None) -> UniformStep:
    """Pointwise operation by name: ``add``, ``mul``, ``scale`` or ``abs``."""
    if op == "add":
        return add(f, g)
    if op == "mul":
        return mul(f, g)
    if op == "scale":
        if c is None:
            raise ValueError("scale needs a constant c")
        return scale(f, c)
    if op == "abs":
        return absolute(f)
    raise ValueError(f"unknown operation {op!r}")


def integral(f: UniformStep) -> float:
    """Lebesgue integral over [0, 1]; the cell sum is correctly rounded."""
    return math.fsum(f.values) / f.cells


@dataclass(frozen=True)
class DistributionTable:
    """Atoms ``(|value|, measure)`` with strictly decreasing values summing to measure 1."""

    atoms: tuple[tuple[float, Fraction], ...]

    def __post_init__(self):
        vals = [v for v, _ in self.atoms]
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise ValueError("atom values must be strictly decreasing")
        if any(v < 0 for v in vals) or any(mu <= 0 for _, mu in self.atoms):
            raise ValueError("atoms need nonnegative values and positive measures")
        if sum((mu for _, mu in self.atoms), Fraction(0)) != 1:
            raise ValueError("atom measures must sum to 1")

    def measure_above(self, lam: float) -> Fraction:
        """``m({|f| > lam})``."""
        return sum((mu for v, mu in self.atoms if v > lam), Fraction(0))

    def to_list(self) -> list[list]:
        return [[v, str(mu)] for v, mu in self.atoms]


def _atoms(f: UniformStep) -> tuple[np.ndarray, np.ndarray]:
    """Distinct ``|values|`` in increasing order with their cell counts."""
    vals, counts = np.unique(np.abs(f.values), return_counts=True)
    return vals, counts


def distribution(f: UniformStep) -> DistributionTable:
    vals, counts = _atoms(f)
    n = f.cells
    atoms = tuple(
        (float(v), Fraction(int(c), n)) for v, c in zip(vals[::-1], counts[::-1])
    )
    return DistributionTable(atoms)


def decreasing_rearrangement(f: UniformStep) -> UniformStep:
    return _wrap(np.sort(np.abs(f.values))[::-1])


@dataclass(frozen=True)
class DyadicInterval:
    """The open interval ``(index/2^order, (index+1)/2^order)``."""

    order: int
    index: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        if not 0 <= self.index < (1 << self.order):
            raise ValueError(f"index {self.index} out of range for order {self.order}")

    @property
    def measure(self) -> Fraction:
        return Fraction(1, 1 << self.order)

    def indicator(self, order: int | None = None) -> DyadicStep:
        order = self.order if order is None else order
        if order < self.order:
            raise ValueError("indicator order below the interval order")
        values = np.zeros(1 << check_order(order))
        width = 1 << (order - self.order)
        values[self.index * width:(self.index + 1) * width] = 1.0
        return DyadicStep(values)


class DyadicSet:
    """Finite union of order-``s`` dyadic intervals, stored as a cell mask."""

    __slots__ = ("_mask",)

    def __init__(self, mask):
        arr = np.array(mask, dtype=bool)
        if arr.ndim != 1 or not _is_power_of_two(arr.size):
            raise ValueError("a dyadic set mask needs 2**s entries")
        check_order(arr.size.bit_length() - 1)
        arr.setflags(write=False)
        self._mask = arr

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def order(self) -> int:
        return self._mask.size.bit_length() - 1

    @property
    def measure(self) -> Fraction:
        return Fraction(int(self._mask.sum()), self._mask.size)

    @classmethod
    def full(cls, order: int = 0) -> DyadicSet:
        return cls(np.ones(1 << order, dtype=bool))

    @classmethod
    def from_intervals(cls, intervals: Iterable[DyadicInterval]) -> DyadicSet:
        intervals = list(intervals)
        if not intervals:
            raise ValueError("need at least one interval")
        order = max(iv.order for iv in intervals)
        mask = np.zeros(1 << check_order(order), dtype=bool)
        for iv in intervals:
            width = 1 << (order - iv.order)
            mask[iv.index * width:(iv.index + 1) * width] = True
        return cls(mask)

    @classmethod
    def parse(cls, text: str) -> DyadicSet:
        """Parse ``"j/s,j/s,..."`` where ``j/s`` is the interval of order s and index j."""
        intervals = []
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                j, s = token.split("/")
                intervals.append(DyadicInterval(int(s), int(j)))
            except ValueError as exc:
                raise ValueError(f"bad dyadic interval token {token!r}") from exc
        return cls.from_intervals(intervals)

    def format(self) -> str:
        return ",".join(f"{j}/{self.order}" for j in np.flatnonzero(self._mask))

    def refine(self, order: int) -> DyadicSet:
        if order < self.order:
            raise ValueError(f"cannot refine order {self.order} down to {order}")
        return DyadicSet(np.repeat(self._mask, 1 << (order - self.order)))

    def complement(self) -> DyadicSet:
        return DyadicSet(~self._mask)

    def union(self, other: DyadicSet) -> DyadicSet:
        order = max(self.order, other.order)
        return DyadicSet(self.refine(order).mask | other.refine(order).mask)

    def cells(self, order: int | None = None) -> np.ndarray:
        """Indices ``j`` of the order-``order`` cells contained in the set, increasing."""
        order = self.order if order is None else order
        return np.flatnonzero(self.refine(order).mask)

    def indicator(self, order: int | None = None) -> DyadicStep:
        order = self.order if order is None else order
        return DyadicStep(self.refine(order).mask.astype(np.float64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicSet):
            return NotImplemented
        order = max(self.order, other.order)
        return np.array_equal(self.refine(order).mask, other.refine(order).mask)

    def __hash__(self):
        return hash(self.measure)

    def __repr__(self) -> str:
        return f"DyadicSet({self.format()!r})"

