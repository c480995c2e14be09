"""Finite-dimensional operators on the span of the order-n dyadic indicators.

Matrices are kept exactly as rational numbers (object arrays of
``Fraction``). Exact identities are checked on integer numerators over a
common denominator, with int64 used only when the bounds make overflow
impossible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .config import check_order
from .dyadic import DyadicInterval, DyadicStep, UniformStep
from .khintchine import corner_coefficients, sample_rng
from .norms import INF, Lp, NormSpec, fundamental_function, norm
from .walsh import lacunary_alpha, synthesize, theta_matrix, walsh

__all__ = [
    "OperatorMatrix",
    "BasisConstantEstimate",
    "averaging",
    "sign_flip",
    "rademacher_projection",
    "averaging_operator",
    "sign_flip_operator",
    "projection_operator",
    "identity_operator",
    "build_Qn",
    "verify_averaging_identity",
    "operator_norm_estimate",
    "basis_constant_estimate",
]

BASES = ("interval", "walsh")
_INT64_SAFE = 1 << 62


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("operator entries must be finite")
        return Fraction(x)
    return Fraction(x)


def _fraction_array(entries) -> np.ndarray:
    rows = [[_to_fraction(x) for x in row] for row in entries]
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        out[i, :] = row
    return out


def _numerators(entries: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer matrix ``N`` and denominator ``D`` with ``entries == N / D``."""
    den = reduce(math.lcm, (x.denominator for x in entries.flat), 1)
    num = np.empty(entries.shape, dtype=object)
    for idx, x in np.ndenumerate(entries):
        num[idx] = x.numerator * (den // x.denominator)
    return num, den


def _max_abs(a: np.ndarray) -> int:
    return max((abs(int(x)) for x in a.flat), default=0)


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of integer matrices (int64 when it cannot overflow)."""
    bound = _max_abs(a) * _max_abs(b) * a.shape[1]
    if bound < _INT64_SAFE:
        return (a.astype(np.int64) @ b.astype(np.int64)).astype(object)
    return a.astype(object) @ b.astype(object)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A linear map on the order-``n`` step functions, written in one basis.

    In the ``"interval"`` basis column ``i`` holds the values of the image of
    the indicator of ``I^n_i``; in the ``"walsh"`` basis column ``i`` holds
    the Walsh coefficients of the image of ``w_i``.
    """

    n: int
    basis: str
    entries: np.ndarray

    def __post_init__(self):
        check_order(self.n)
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")
        ent = self.entries
        if not (isinstance(ent, np.ndarray) and ent.dtype == object):
            ent = _fraction_array(np.asarray(ent).tolist())
        size = 1 << self.n
        if ent.shape != (size, size):
            raise ValueError(f"expected a {size}x{size} matrix, got {ent.shape}")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        a, b = self.to_basis("walsh"), other.to_basis("walsh")
        return a.n == b.n and bool(np.all(a.entries == b.entries))

    __hash__ = None

    def numerators(self) -> tuple[np.ndarray, int]:
        return _numerators(self.entries)

    def to_basis(self, basis: str) -> OperatorMatrix:
        """Exact change of basis through the sign matrix."""
        if basis == self.basis:
            return self
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}")
        theta = theta_matrix(self.n).entries.astype(object)
        num, den = self.numerators()
        # theta is symmetric and theta @ theta = 2^n I, so each direction is
        # theta @ M @ theta divided by 2^n.
        product = _int_matmul(_int_matmul(theta, num), theta)
        scale = den << self.n
        out = np.empty(product.shape, dtype=object)
        for idx, x in np.ndenumerate(product):
            out[idx] = Fraction(int(x), scale)
        return OperatorMatrix(self.n, basis, out)

    def as_float(self, basis: str = "interval") -> np.ndarray:
        return self.to_basis(basis).entries.astype(np.float64)

    def compose(self, other: OperatorMatrix) -> OperatorMatrix:
        """``self @ other`` (apply ``other`` first), in this matrix's basis."""
        if other.n != self.n:
            raise ValueError("operators act on different orders")
        b = other.to_basis(self.basis)
        na, da = self.numerators()
        nb, db = b.numerators()
        product = _int_matmul(na, nb)
        out = np.empty(product.shape, dtype=object)
        for idx, x in np.ndenumerate(product):
            out[idx] = Fraction(int(x), da * db)
        return OperatorMatrix(self.n, self.basis, out)

    def is_projection(self) -> bool:
        num, den = self.numerators()
        return bool(np.all(_int_matmul(num, num) == num * den))

    def apply(self, f: DyadicStep) -> DyadicStep:
        if not isinstance(f, DyadicStep) or f.order != self.n:
            raise ValueError(f"operator acts on order-{self.n} step functions")
        return DyadicStep(self._float_interval() @ f.values)

    def _float_interval(self) -> np.ndarray:
        cache = self.__dict__.get("_float_cache")
        if cache is None:
            cache = self.as_float("interval")
            object.__setattr__(self, "_float_cache", cache)
        return cache

    def to_dict(self) -> dict:
        def entry(x: Fraction):
            f = float(x)
            return f if Fraction(f) == x else f"{x.numerator}/{x.denominator}"

        return {
            "n": self.n,
            "basis": self.basis,
            "entries": [[entry(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> OperatorMatrix:
        return cls(int(data["n"]), data["basis"], _fraction_array(data["entries"]))


def _order_of(f: UniformStep) -> int:
    if not isinstance(f, DyadicStep):
        raise ValueError("expected a dyadic step function")
    return f.order


def averaging(f: DyadicStep, s: int) -> DyadicStep:
    """Conditional expectation onto the order-``s`` cells, kept at the order of ``f``."""
    n = _order_of(f)
    if not 0 <= s <= n:
        raise ValueError(f"averaging order {s} must lie in [0, {n}]")
    blocks = f.values.reshape(1 << s, -1)
    means = blocks.sum(axis=1) / blocks.shape[1]
    return DyadicStep(np.repeat(means, blocks.shape[1]))


def sign_flip(f: DyadicStep, j: int) -> DyadicStep:
    """``T_j``: multiplies the coefficient of ``w_k`` by the sign of ``w_k`` on ``I^n_j``.

    Since ``w_k(I_i) w_k(I_j) = w_k(I_{i xor j})`` this is the cell
    permutation ``i -> i xor j``.
    """
    n = _order_of(f)
    if not 0 <= j < (1 << n):
        raise ValueError(f"flip index {j} out of range for order {n}")
    return DyadicStep(f.values[np.arange(1 << n) ^ j])


def _check_selected(n: int, selected: Iterable[int]) -> tuple[int, ...]:
    sel = tuple(sorted({int(m) for m in selected}))
    if any(m < 0 or m >= (1 << n) for m in sel):
        raise ValueError(f"selected indices must lie in [0, {1 << n})")
    return sel


def rademacher_projection(f: DyadicStep, selected: Sequence[int]) -> DyadicStep:
    """Orthogonal projection onto the span of the selected Walsh functions."""
    n = _order_of(f)
    sel = _check_selected(n, selected)
    if not sel:
        return DyadicStep.zero(n)
    theta = theta_matrix(n).entries
    coeffs = (theta[:, sel].T.astype(np.float64) @ f.values) / (1 << n)
    return synthesize(coeffs, sel, n)


def _diag_operator(n: int, diag: Sequence) -> OperatorMatrix:
    size = 1 << n
    out = np.full((size, size), Fraction(0), dtype=object)
    for i, d in enumerate(diag):
        out[i, i] = Fraction(d)
    return OperatorMatrix(n, "walsh", out)


def identity_operator(n: int, basis: str = "interval") -> OperatorMatrix:
    return _diag_operator(n, [1] * (1 << n)).to_basis(basis)


def averaging_operator(n: int, s: int) -> OperatorMatrix:
    """``A_s`` in the interval basis."""
    check_order(n)
    if not 0 <= s <= n:
        raise ValueError(f"averaging order {s} must lie in [0, {n}]")
    size, width = 1 << n, 1 << (n - s)
    out = np.full((size, size), Fraction(0), dtype=object)
    w = Fraction(1, width)
    for b in range(1 << s):
        out[b * width:(b + 1) * width, b * width:(b + 1) * width] = w
    return OperatorMatrix(n, "interval", out)


def sign_flip_operator(n: int, j: int) -> OperatorMatrix:
    """``T_j`` in the Walsh basis: ``diag(theta[j, :])``."""
    check_order(n)
    if not 0 <= j < (1 << n):
        raise ValueError(f"flip index {j} out of range for order {n}")
    return _diag_operator(n, theta_matrix(n).entries[j].tolist())


def projection_operator(n: int, selected: Sequence[int]) -> OperatorMatrix:
    """``P_n`` in the Walsh basis."""
    sel = set(_check_selected(n, selected))
    return _diag_operator(n, [1 if k in sel else 0 for k in range(1 << n)])


def build_Qn(n: int, selected: Sequence[int], perturbation: Sequence = ()) -> OperatorMatrix:
    """A projection onto the span of the selected ``w_m`` (Walsh basis).

    Each perturbation ``(m, i0, c)`` adds ``c * <w_i0, f>`` to the functional
    that produces the coefficient of ``w_m``; ``m`` must be selected and
    ``i0`` must not, which keeps ``q_m(w_i) = delta_{m,i}`` on the range.
    """
    sel = _check_selected(n, selected)
    base = projection_operator(n, sel).entries.copy()
    for m, i0, c in perturbation:
        m, i0 = int(m), int(i0)
        if m not in sel:
            raise ValueError(f"perturbed functional q_{m} is not a selected index")
        if not 0 <= i0 < (1 << n):
            raise ValueError(f"perturbation index {i0} out of range for order {n}")
        if i0 in sel:
            raise ValueError(f"perturbation index {i0} is selected; q_m(w_i0) must stay delta")
        base[m, i0] += _to_fraction(c)
    return OperatorMatrix(n, "walsh", base)


def verify_averaging_identity(
    n: int, selected: Sequence[int], Q: OperatorMatrix
) -> tuple[bool, Fraction]:
    """Check ``P_n == 2^-n sum_j T_j Q T_j`` exactly; returns (equal, max entrywise residual)."""
    if Q.n != n:
        raise ValueError(f"Q acts on order {Q.n}, not {n}")
    sel = _check_selected(n, selected)
    Qw = Q.to_basis("walsh")
    if not Qw.is_projection():
        raise ValueError("Q is not a projection (Q @ Q != Q)")
    num, den = Qw.numerators()
    size = 1 << n
    mask = np.zeros(size, dtype=bool)
    mask[list(sel)] = True
    if any(x != 0 for x in num[~mask].flat):
        raise ValueError("Q has range outside the span of the selected Walsh functions")
    block = num[np.ix_(mask, mask)]
    if not np.all(block == den * np.eye(len(sel), dtype=np.int64)):
        raise ValueError("Q does not fix the selected Walsh functions")

    theta = theta_matrix(n).entries
    if _max_abs(num) * size < _INT64_SAFE:
        work = num.astype(np.int64)
        total = np.zeros((size, size), dtype=np.int64)
    else:
        work = num
        total = np.zeros((size, size), dtype=object)
    for j in range(size):
        # T_j is diagonal in the Walsh basis, so T_j Q T_j scales entry (a, b) by theta_ja theta_jb.
        signs = theta[j]
        total += np.outer(signs, signs).astype(work.dtype) * work
    target = np.zeros((size, size), dtype=np.int64)
    target[list(sel), list(sel)] = 1
    scale = den * size
    gap = max((abs(int(x) - scale * int(t)) for x, t in zip(total.flat, target.flat)), default=0)
    residual = Fraction(gap, scale)
    return residual == 0, residual


def _candidate_functions(n: int, samples: int, seed: int) -> Iterable[DyadicStep]:
    for s in range(n + 1):
        for j in range(1 << s):
            yield DyadicInterval(s, j).indicator(n)
    for k in range(1 << n):
        yield walsh(k, n)
    for i in range(samples):
        rng = sample_rng(seed, i)
        yield DyadicStep(rng.standard_normal(1 << n))


def operator_norm_estimate(T: OperatorMatrix, spec: NormSpec, samples: int, seed: int = 0) -> float:
    """Lower bound for ``||T||`` on ``(X_n, spec)``: best ratio over test functions.

    Test functions are indicators of all dyadic intervals up to order ``n``
    (single cells included), all Walsh functions of order ``n``, and
    ``samples`` Gaussian vectors drawn from ``sample_rng(seed, i)``.
    """
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    best = 0.0
    for f in _candidate_functions(T.n, samples, seed):
        denom = norm(f, spec)
        if denom == 0.0:
            continue
        best = max(best, norm(T.apply(f), spec) / denom)
    return best


@dataclass(frozen=True)
class BasisConstantEstimate:
    """Sampled basis constant and, for ``L^p`` with ``p >= 1``, the bound ``1 + alpha``."""

    estimate: float
    bound: float | None
    q: Fraction
    alpha: int


def _min_ratio(indices: Sequence[int]) -> Fraction:
    idx = [int(i) for i in indices]
    if not idx or idx[0] < 1:
        raise ValueError("indices must be positive")
    if len(idx) == 1:
        return Fraction(2)
    q = min(Fraction(b, a) for a, b in zip(idx, idx[1:]))
    if q <= 1:
        raise ValueError(f"indices {idx} are not lacunary for any q > 1")
    return q


def basis_constant_estimate(
    indices: Sequence[int], spec: NormSpec, samples: int, seed: int = 0
) -> BasisConstantEstimate:
    """Largest sampled ``||S_M|| / ||S_N||`` over partial sums with ``M < N``.

    The bound reported alongside is ``C + alpha C_1 phi_X(1)`` with the
    averaging-operator norm ``C = 1`` and the ``L^1`` embedding constant
    ``C_1 = 1``, which hold for ``L^p`` with ``p >= 1``; other norms get
    ``bound=None``.
    """
    q = _min_ratio(indices)
    alpha = lacunary_alpha(q)
    bound = None
    if isinstance(spec, Lp) and (spec.p is INF or spec.p >= 1):
        bound = 1.0 + alpha * 1.0 * fundamental_function(spec, 1)
    K = len(indices)
    if K == 1:
        return BasisConstantEstimate(1.0, bound, q, alpha)

    coeff_sets = list(corner_coefficients(K))
    for i in range(samples):
        coeff_sets.append(sample_rng(seed, i).standard_normal(K))
    idx = [int(i) for i in indices]
    best = 0.0
    for a in coeff_sets:
        partial = [norm(synthesize(a[:m], idx[:m]), spec) for m in range(1, K + 1)]
        for N in range(1, K):
            if partial[N] == 0.0:
                continue
            best = max(best, max(partial[:N]) / partial[N])
    return BasisConstantEstimate(best, bound, q, alpha)
