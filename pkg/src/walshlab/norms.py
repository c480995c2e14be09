"""Rearrangement-invariant norms of step functions.

Every norm here is evaluated from the distribution of ``|f|`` (distinct values
and their cell counts, in increasing order), so two equimeasurable functions
get bitwise identical results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .config import check_order
from .dyadic import DyadicSet, DyadicStep, UniformStep, _atoms, _wrap, refine

__all__ = [
    "INF",
    "Lp",
    "OrliczExp",
    "Local",
    "NormSpec",
    "lp_norm",
    "exp_integral",
    "orlicz_norm",
    "localize",
    "norm",
    "fundamental_function",
    "parse_spec",
    "format_spec",
    "EXP_CUTOFF",
    "LUXEMBURG_RTOL",
]

EXP_CUTOFF = 700.0
LUXEMBURG_RTOL = 1e-12
LUXEMBURG_MAX_ITER = 200


class _Infinity(enum.Enum):
    INF = "inf"

    def __repr__(self) -> str:
        return "INF"


INF = _Infinity.INF


@dataclass(frozen=True)
class Lp:
    """``L^p``; a quasi-norm when ``0 < p < 1``. Pass ``INF`` for the sup norm."""

    p: Union[float, _Infinity]

    def __post_init__(self):
        if self.p is not INF:
            p = float(self.p)
            if not (p > 0 and math.isfinite(p)):
                raise ValueError(f"Lp exponent must be a finite positive number or INF, got {self.p}")
            object.__setattr__(self, "p", p)

    @property
    def is_quasi(self) -> bool:
        return self.p is not INF and self.p < 1


@dataclass(frozen=True)
class OrliczExp:
    """Luxemburg norm generated by ``M_p(t) = exp(t**p) - 1``."""

    p: float = 2.0

    def __post_init__(self):
        p = float(self.p)
        if not (p > 0 and math.isfinite(p)):
            raise ValueError(f"Orlicz exponent must be positive, got {self.p}")
        object.__setattr__(self, "p", p)

    is_quasi = False


@dataclass(frozen=True)
class Local:
    """The local space ``X|E``: ``f`` is transported from ``E`` onto [0, 1] first."""

    E: DyadicSet
    inner: Union[Lp, OrliczExp]

    def __post_init__(self):
        if self.E.measure == 0:
            raise ValueError("a local space needs a set of positive measure")
        if isinstance(self.inner, Local):
            raise ValueError("nested localization is not supported")
        if not isinstance(self.inner, (Lp, OrliczExp)):
            raise TypeError(f"unsupported inner norm {self.inner!r}")

    @property
    def is_quasi(self) -> bool:
        return self.inner.is_quasi


NormSpec = Union[Lp, OrliczExp, Local]


def _lp_from_atoms(vals: np.ndarray, counts: np.ndarray, cells: int, p) -> float:
    top = float(vals[-1])
    if top == 0.0:
        return 0.0
    if p is INF:
        return top
    # Scaling by the maximum keeps large exponents from overflowing.
    mean = math.fsum(counts * (vals / top) ** p) / cells
    return top * mean ** (1.0 / p)


def lp_norm(f: UniformStep, p) -> float:
    """``(integral |f|^p)^(1/p)``, or ``max |f|`` for ``p = INF``."""
    if p is not INF:
        p = float(p)
        if not p > 0:
            raise ValueError(f"p must be positive, got {p}")
    vals, counts = _atoms(f)
    return _lp_from_atoms(vals, counts, f.cells, p)


def _exp_mean(vals: np.ndarray, counts: np.ndarray, cells: int, lam: float, p: float) -> float:
    t = (vals / lam) ** p
    if t[-1] > EXP_CUTOFF:
        # exp(700) times the smallest cell measure is already far above 1.
        return math.inf
    return math.fsum(counts * np.expm1(t)) / cells


def exp_integral(f: UniformStep, lam: float, E: DyadicSet | None = None, p_exp: float = 2.0) -> float:
    """Mean of ``exp((|f|/lam)**p_exp) - 1`` over ``E`` with respect to ``m_E``.

    Returns ``math.inf`` when some exponent exceeds ``EXP_CUTOFF``.
    """
    lam = float(lam)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not p_exp > 0:
        raise ValueError(f"exponent must be positive, got {p_exp}")
    g = f if E is None else localize(f, E)
    vals, counts = _atoms(g)
    return _exp_mean(vals, counts, g.cells, lam, float(p_exp))


def _luxemburg_from_atoms(vals: np.ndarray, counts: np.ndarray, cells: int, p: float) -> float:
    top = float(vals[-1])
    if top == 0.0:
        return 0.0
    # Bisect for f / max|f|, whose norm is of order one, then scale back.
    # This keeps the brackets finite and normal for tiny or huge inputs.
    unit = vals / top

    def excess(lam):
        return _exp_mean(unit, counts, cells, lam, p) > 1.0

    hi = 1.0
    while excess(hi):
        hi *= 2.0
    lo = hi / 2.0
    while not excess(lo):
        lo /= 2.0
    for _ in range(LUXEMBURG_MAX_ITER):
        if hi - lo <= LUXEMBURG_RTOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if excess(mid):
            lo = mid
        else:
            hi = mid
    return top * (0.5 * (lo + hi))


def orlicz_norm(f: UniformStep, p_exp: float = 2.0, E: DyadicSet | None = None) -> float:
    """Luxemburg norm ``inf{lam > 0 : exp_integral(f, lam, E, p_exp) <= 1}`` by bisection."""
    if not p_exp > 0:
        raise ValueError(f"exponent must be positive, got {p_exp}")
    g = f if E is None else localize(f, E)
    vals, counts = _atoms(g)
    return _luxemburg_from_atoms(vals, counts, g.cells, float(p_exp))


def localize(f: UniformStep, E: DyadicSet) -> UniformStep:
    """``f o rho_E^{-1}``: the values of ``f`` on the cells of ``E``, left to right."""
    if E.measure == 0:
        raise ValueError("cannot localize to a null set")
    if E.measure == 1:
        return f
    if not isinstance(f, DyadicStep):
        raise ValueError("localization needs a dyadic step function")
    order = max(f.order, E.order)
    return _wrap(refine(f, order).values[E.cells(order)])


def norm(f: UniformStep, spec: NormSpec) -> float:
    if isinstance(spec, Local):
        return norm(localize(f, spec.E), spec.inner)
    vals, counts = _atoms(f)
    if isinstance(spec, Lp):
        return _lp_from_atoms(vals, counts, f.cells, spec.p)
    if isinstance(spec, OrliczExp):
        return _luxemburg_from_atoms(vals, counts, f.cells, spec.p)
    raise TypeError(f"unknown norm spec {spec!r}")


def _dyadic_point(t) -> tuple[int, int]:
    """``t = r / 2**s`` in lowest terms; returns ``(r, s)``."""
    if isinstance(t, str):
        t = Fraction(t.strip())
    frac = Fraction(t)
    den = frac.denominator
    if den & (den - 1):
        raise ValueError(f"{t} is not a dyadic rational")
    if not 0 < frac <= 1:
        raise ValueError(f"{t} is outside (0, 1]")
    return frac.numerator, den.bit_length() - 1


def fundamental_function(spec: NormSpec, t) -> float:
    """Norm of the indicator of ``[0, t]`` for dyadic ``t`` in (0, 1]."""
    r, s = _dyadic_point(t)
    check_order(s)
    values = np.zeros(1 << s)
    values[:r] = 1.0
    return norm(DyadicStep(values), spec)


def parse_spec(text: str) -> NormSpec:
    """Parse ``lp:2``, ``lp:inf``, ``mp:2`` or ``local:<set>|<inner>``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.lower()
    if kind == "local":
        set_text, sep, inner = rest.partition("|")
        if not sep:
            raise ValueError(f"local spec needs 'local:<set>|<inner>', got {text!r}")
        return Local(DyadicSet.parse(set_text), parse_spec(inner))
    if kind == "linf" and not rest:
        return Lp(INF)
    if kind == "lp":
        if rest.lower() in ("inf", "infinity"):
            return Lp(INF)
        return Lp(float(rest))
    if kind == "mp":
        return OrliczExp(float(rest) if rest else 2.0)
    raise ValueError(f"unknown norm spec {text!r}")


def _num(x: float) -> str:
    return repr(float(x)).removesuffix(".0") if float(x).is_integer() else repr(float(x))


def format_spec(spec: NormSpec) -> str:
    if isinstance(spec, Local):
        return f"local:{spec.E.format()}|{format_spec(spec.inner)}"
    if isinstance(spec, Lp):
        return "lp:inf" if spec.p is INF else f"lp:{_num(spec.p)}"
    if isinstance(spec, OrliczExp):
        return f"mp:{_num(spec.p)}"
    raise TypeError(f"unknown norm spec {spec!r}")
