import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from walshlab.dyadic import DyadicSet, distribution
from walshlab.khintchine import (
    DEFAULT_MAJORIZATION_GRID,
    INDEX_CAP,
    ConstantsReport,
    canonical_lacunary,
    check_bound_eq1,
    corner_coefficients,
    eq1_bound,
    equidistribution_tables,
    find_local_N,
    majorization_constant,
    rademacher_sum,
    ratio,
    sample_lacunary,
    sample_rng,
    scan_constants,
    verify_equidistribution,
)
from walshlab.norms import Local, Lp, OrliczExp
from walshlab.walsh import rademacher, synthesize, validate_lacunary

ratios = st.sampled_from([Fraction(11, 10), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(7, 4)])


def test_ratio_is_parseval_in_l2():
    assert ratio([3.0, 4.0], [1, 5], Lp(2)) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        ratio([0.0, 0.0], [1, 2], Lp(2))


def test_canonical_chain():
    assert canonical_lacunary(2, 5) == [1, 2, 4, 8, 16]
    assert canonical_lacunary(1.5, 5) == [1, 2, 3, 5, 8]
    assert canonical_lacunary(Fraction(11, 10), 4, start=10) == [10, 11, 13, 15]


@given(ratios, st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_sampled_index_sets_are_lacunary(q, M, seed):
    if canonical_lacunary(q, M)[-1] > INDEX_CAP:
        with pytest.raises(ValueError):
            sample_lacunary(sample_rng(seed), q, M)
        return
    idx = sample_lacunary(sample_rng(seed), q, M)
    assert len(idx) == M
    assert 1 <= idx[0] <= 64
    assert idx[-1] <= INDEX_CAP
    assert validate_lacunary(idx, q)[0]
    assert idx == sample_lacunary(sample_rng(seed), q, M)


def test_corner_coefficients_are_unit():
    corners = corner_coefficients(4)
    assert len(corners) == 6
    assert all(math.isclose(np.linalg.norm(c), 1.0, rel_tol=1e-15) for c in corners)
    assert len(corner_coefficients(1)) == 1


def test_scan_l2_constants_are_one():
    rep = scan_constants(Lp(2), 1.5, 6, 200, seed=3)
    assert rep.A_hat == pytest.approx(1.0, abs=1e-12)
    assert rep.B_hat == pytest.approx(1.0, abs=1e-12)


def test_scan_l1_two_terms_finds_flat_corner():
    rep = scan_constants(Lp(1), 2, 2, 500, seed=0)
    assert rep.A_hat == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert rep.B_hat == pytest.approx(1.0, rel=1e-12)


def test_scan_report_consistency():
    rep = scan_constants(Lp(4), 3, 5, 300, seed=11)
    assert rep.A_hat <= rep.B_hat
    assert ratio(rep.argmin_coeffs, rep.argmin_indices, Lp(4)) == rep.A_hat
    assert ratio(rep.argmax_coeffs, rep.argmax_indices, Lp(4)) == rep.B_hat
    assert validate_lacunary(rep.argmax_indices, 3)[0]
    assert ConstantsReport.from_dict(rep.to_dict()) == rep


def test_scan_is_deterministic_across_workers():
    one = scan_constants(Lp(3), 1.5, 6, 120, seed=5, workers=1)
    two = scan_constants(Lp(3), 1.5, 6, 120, seed=5, workers=3)
    assert one == two


def test_scan_trace_and_nesting():
    trace = []
    small = scan_constants(Lp(6), 2, 5, 50, seed=9, trace=trace)
    large = scan_constants(Lp(6), 2, 5, 400, seed=9)
    assert [i for i, _ in trace] == list(range(50))
    assert large.A_hat <= small.A_hat
    assert large.B_hat >= small.B_hat


def test_ascent_only_improves():
    rnd = scan_constants(OrliczExp(), 2, 4, 100, seed=2)
    asc = scan_constants(OrliczExp(), 2, 4, 100, seed=2, search="ascent", ascent_rounds=20)
    assert asc.A_hat <= rnd.A_hat
    assert asc.B_hat >= rnd.B_hat


def test_scan_argument_checks():
    with pytest.raises(ValueError):
        scan_constants(Lp(2), 1, 3, 10)
    with pytest.raises(ValueError):
        scan_constants(Lp(2), 2, 3, 10, search="grid")
    with pytest.raises(ValueError):
        scan_constants(Lp(2), 3, 20, 10)


@pytest.mark.parametrize(
    "n, q, value",
    [
        (1, 2, 3.414213562373095),
        (2, 2, 4.060207060512871),
        (5, 3, 5.785803596051307),
        (1, 1.5, 5.913591357920932),
        (3, 1.5, 5.636742397572657),
    ],
)
def test_eq1_bound_values(n, q, value):
    assert eq1_bound(n, q) == pytest.approx(value, rel=1e-14)


def test_check_bound_eq1_validates_report():
    rep = scan_constants(Lp(4), 2, 4, 50)
    assert check_bound_eq1(2, 2, rep)
    with pytest.raises(ValueError):
        check_bound_eq1(1, 2, rep)
    with pytest.raises(ValueError):
        check_bound_eq1(2, 3, rep)


def test_rademacher_sum():
    assert rademacher_sum([1.0, 1.0]) == rademacher(1) + rademacher(2)


@st.composite
def two_lacunary(draw):
    M = draw(st.integers(1, 8))
    idx = [draw(st.integers(1, 8))]
    for _ in range(M - 1):
        idx.append(2 * idx[-1] + draw(st.integers(0, 3)))
    a = draw(st.lists(st.floats(-10, 10, allow_nan=False), min_size=M, max_size=M))
    return a, idx


@given(two_lacunary())
def test_equidistribution_property(case):
    a, idx = case
    assert verify_equidistribution(a, idx)
    w, r = equidistribution_tables(a, idx)
    assert w == r


def test_equidistribution_rejects_small_ratio():
    with pytest.raises(ValueError):
        verify_equidistribution([1.0, 1.0], [2, 3])


def test_equidistribution_can_fail_below_ratio_two():
    # w_7 = w_1 w_2 w_4, so the four terms are not independent.
    a = [1.0, 1.0, 1.0, 1.0]
    w = distribution(synthesize(a, [1, 2, 4, 7]))
    assert w != distribution(rademacher_sum(a))
    # x + y + z + xyz is 4 or 0 in absolute value.
    assert w.atoms == ((4.0, Fraction(1, 4)), (0.0, Fraction(3, 4)))


def test_find_local_N_frozen():
    E = DyadicSet.parse("0/1")
    assert find_local_N(E, 1.5, Lp(2), 2, 200, seed=0) == 4
    assert find_local_N(E, 1.5, Lp(2), 4, 200, seed=0) == 1
    assert find_local_N(E, 2, Lp(2), 3, 100, seed=0) == 1


def test_find_local_N_returns_none_when_nothing_fits():
    E = DyadicSet.parse("0/1")
    assert find_local_N(E, 2, Lp(2), 3, 10, floor_A=1.0, cap=8) is None


def test_find_local_N_argument_checks():
    E = DyadicSet.parse("0/1")
    with pytest.raises(ValueError):
        find_local_N(E, 2, Local(E, Lp(2)), 2, 10)
    with pytest.raises(ValueError):
        find_local_N(E, 2, Lp(2), 2, 10, floor_A=2.0)


def brute_majorized(w_vals, r_vals, C):
    """Compare m_W(lam) and C m_R(lam/C) on a dense exact grid of lam."""
    w = [abs(Fraction(v)) for v in w_vals]
    r = [abs(Fraction(v)) for v in r_vals]
    n = len(w)
    marks = sorted(set(w) | {C * v for v in r} | {Fraction(0)})
    probes = []
    for lo, hi in zip(marks, marks[1:] + [marks[-1] + 1]):
        probes += [lo, (lo + hi) / 2]
    for lam in probes:
        if lam <= 0:
            continue
        mw = Fraction(sum(v > lam for v in w), n)
        mr = Fraction(sum(C * v > lam for v in r), len(r))
        if mw > C * mr:
            return False
    return True


@given(
    st.lists(st.integers(-3, 3), min_size=2, max_size=5).filter(any),
    st.sampled_from([Fraction(3, 2), Fraction(6, 5)]),
    st.integers(1, 3),
)
def test_majorization_matches_brute_force(coeffs, q, start):
    idx = canonical_lacunary(q, len(coeffs), start=start)
    a = [float(c) for c in coeffs]
    w = synthesize(a, idx).values
    r = rademacher_sum(a).values
    expected = next((c for c in DEFAULT_MAJORIZATION_GRID if brute_majorized(w, r, c)), None)
    assert majorization_constant(a, idx) == expected
    expected_rev = next((c for c in DEFAULT_MAJORIZATION_GRID if brute_majorized(r, w, c)), None)
    assert majorization_constant(a, idx, reverse=True) == expected_rev


def test_majorization_for_two_lacunary_is_grid_minimum():
    assert majorization_constant([1.0, 1.0], [2, 3]) == Fraction(11, 10)
    assert majorization_constant([1.0, -2.0, 0.5], [1, 2, 4]) == Fraction(11, 10)
    assert majorization_constant([1.0], [1], grid=[1.5, 2.0]) == Fraction(3, 2)
    with pytest.raises(ValueError):
        majorization_constant([1.0], [1], grid=[1.0])
