from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from renewal_sums import polys, sums
from renewal_sums._rational import DomainError
from renewal_sums.series import SeriesResult, ToleranceError
from renewal_sums.sums import Family
from renewal_sums.triangles import EULERIAN

mpmath.mp.dps = 40
T_GRID = [Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(9, 10)]
TIGHT = Fraction(1, 10**20)


def _mp(x) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _within(res: SeriesResult, ref: Fraction) -> bool:
    return res.contains(ref)


def test_family_validation():
    with pytest.raises(DomainError):
        Family("bernstein", t=0)
    with pytest.raises(DomainError):
        Family("bernstein", t=1)
    with pytest.raises(DomainError):
        Family("hbernstein", t="1/2")
    with pytest.raises(DomainError):
        Family("binomial", t="1/2")
    with pytest.raises(DomainError):
        Family("nope")
    with pytest.raises(TypeError):
        Family("bernstein", t=0.5)
    assert Family("bernstein", t="0.25") == Family("bernstein", t=Fraction(1, 4))


def test_eulerian_column_k0_is_e():
    res = sums.column_sum(Family("eulerian"), 0)
    assert res.truncation_bound <= sums.DEFAULT_EPS
    assert abs(_mp(res.value) - mpmath.e) <= _mp(res.truncation_bound)
    assert f"{float(res.value - 2):.5f}" == "0.71828"


def test_binomial_column_is_two():
    res = sums.column_sum(Family("binomial"), 7, eps=TIGHT)
    assert _within(res, Fraction(2))


@pytest.mark.parametrize("k", range(11))
def test_bernstein_column_is_inverse_t(k):
    res = sums.column_sum(Family("bernstein", t="1/4"), k, eps=TIGHT)
    assert _within(res, Fraction(4))


def test_diagonal_examples():
    assert sums.diagonal_sum(Family("binomial"), 5) == Fraction(21, 32)
    assert sums.diagonal_sum(Family("binomial"), 0) == 1
    assert sums.diagonal_sum(Family("binomial"), 3) == Fraction(5, 8)
    assert abs(sums.diagonal_sum(Family("eulerian"), 40) - Fraction(2, 3)) < Fraction(1, 10**6)


def test_alternating_examples():
    assert _within(sums.alternating_sum(Family("binomial"), 0, eps=TIGHT), Fraction(2, 3))
    assert _within(sums.alternating_sum(Family("bernstein", t="1/2"), 1, eps=TIGHT), Fraction(-2, 9))

def test_eulerian_alternating_decays():
    # the limit is 0, but at k = 12 the sum is still about 4.1e-9
    res = sums.alternating_sum(Family("eulerian"), 12, eps=Fraction(1, 10**10))
    brute = sum(Fraction((-1) ** n * EULERIAN.entry(n, 12), math.factorial(n)) for n in range(120))
    assert abs(res.value - brute) <= res.truncation_bound
    assert Fraction(4, 10**9) < res.value < Fraction(42, 10**10)
    mags = [abs(sums.alternating_sum(Family("eulerian"), k, eps=Fraction(1, 10**40)).value) for k in (0, 6, 12, 18, 24, 30)]
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert mags[-1] < Fraction(1, 10**22)


def test_a2_exact():
    for n in range(61):
        assert sums.diagonal_sum(Family("binomial"), n) == Fraction(2, 3) + Fraction(1, 3) * Fraction(-1, 2) ** n


def test_c2_exact():
    for t in T_GRID:
        f = Family("bernstein", t=t)
        for n in range(41):
            assert sums.diagonal_sum(f, n) == sums.closed_form(f, "diagonal", n=n) == (1 - (-t) ** (n + 1)) / (1 + t)


def test_series_vs_closed_form_binomial_bernstein():
    for f in [Family("binomial")] + [Family("bernstein", t=t) for t in T_GRID]:
        for k in (0, 1, 4, 9):
            assert _within(sums.column_sum(f, k, eps=TIGHT), sums.closed_form(f, "column"))
            assert _within(sums.alternating_sum(f, k, eps=TIGHT), sums.closed_form(f, "alternating", k=k))


def _brute_hb(t, h, k, N, alternating=False):
    return sum((-1) ** n * polys.h_bernstein(n, k, t, h) if alternating else polys.h_bernstein(n, k, t, h) for n in range(k, N))


def test_hbernstein_column_example():
    f = Family("hbernstein", t="1/2", h="1/4")
    assert sums.closed_form(f, "column") == 3
    res = sums.column_sum(f, 3, eps=TIGHT)
    assert res.truncation_bound <= TIGHT and _within(res, Fraction(3))


@pytest.mark.parametrize("t,h", [("1/2", "1/4"), ("2/3", "1/5"), ("9/10", "1/2"), ("1/3", "1/7")])
def test_hbernstein_column_and_alternating_vs_closed(t, h):
    f = Family("hbernstein", t=t, h=h)
    for k in (0, 1, 5):
        assert _within(sums.column_sum(f, k, eps=TIGHT), sums.closed_form(f, "column"))
        alt = sums.alternating_sum(f, k, eps=Fraction(1, 10**15))
        rhs = sums.closed_form(f, "alternating", k=k, eps=Fraction(1, 10**15))
        assert abs(alt.value - rhs.value) <= alt.truncation_bound + rhs.truncation_bound


def test_hbernstein_partial_sums_approach_certified_value():
    # terms decay like n^-a with a = 2, so the remainder after N terms shrinks like 1/N
    t, h, k = Fraction(1, 2), Fraction(1, 4), 2
    res = sums.column_sum(Family("hbernstein", t=t, h=h), k, eps=TIGHT)
    r200 = res.value - _brute_hb(t, h, k, 200)
    r400 = res.value - _brute_hb(t, h, k, 400)
    assert 0 < r400 < r200
    assert abs(r400 / r200 - Fraction(1, 2)) < Fraction(1, 50)


def test_d2_identity_small_n():
    for t in ("1/4", "1/2", "3/4"):
        for h in ("1/5", "1/2", "2"):
            f = Family("hbernstein", t=t, h=h)
            for n in range(13):
                lhs = sums.diagonal_sum(f, n)
                rhs = sums.closed_form(f, "diagonal", n=n, eps=Fraction(1, 10**25))
                assert rhs.contains(lhs)


def test_d2_limit_examples():
    res = sums.hbernstein_diagonal_limit("1/2", 1, eps=Fraction(1, 10**20))
    assert abs(_mp(res.value) - mpmath.sqrt(2) / 2) <= _mp(res.truncation_bound)
    res = sums.hbernstein_diagonal_limit("1/2", "1/2", eps=Fraction(1, 10**20))
    assert abs(_mp(res.value) - mpmath.log(2)) <= _mp(res.truncation_bound)


def test_d2_limit_quadrature_agrees():
    for t, h in (("1/3", "1/10"), ("1/2", "3"), ("9/10", "1/50")):
        series = sums.hbernstein_diagonal_limit(t, h, eps=Fraction(1, 10**18), method="series")
        quad = sums.hbernstein_diagonal_limit(t, h, eps=Fraction(1, 10**18), method="quadrature")
        assert abs(Fraction(series.value) - Fraction(quad.value)) < Fraction(1, 10**16)


def test_d3_rhs_examples():
    # a = b = 1: integral of 1/(2-x) over [0, 1]
    res = sums.hbernstein_alternating_limitk("1/2", "1/2", 0, eps=TIGHT)
    assert abs(_mp(res.value) - mpmath.log(2)) <= _mp(res.truncation_bound)
    # a = b = 2: 6 * integral of x(1-x)/(2-x) = 9 - 12 ln 2
    res = sums.hbernstein_alternating_limitk("1/2", "1/4", 0, eps=TIGHT)
    ref = 6 * mpmath.quad(lambda x: x * (1 - x) / (2 - x), [0, 1])
    assert abs(ref - (9 - 12 * mpmath.log(2))) < mpmath.mpf(10) ** -30
    assert abs(_mp(res.value) - ref) <= _mp(res.truncation_bound) + mpmath.mpf(10) ** -30
    with pytest.raises(DomainError):
        sums.closed_form(Family("hbernstein", t="1/2", h="1/2"), "alternating", k=0)


def test_d3_rhs_shrinks():
    vals = [abs(float(sums.hbernstein_alternating_limitk("1/2", "1/4", k).value)) for k in (0, 4, 8, 16, 32)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_closed_form_domains():
    with pytest.raises(DomainError):
        sums.closed_form(Family("eulerian"), "column")
    with pytest.raises(DomainError):
        sums.closed_form(Family("hbernstein", t="1/4", h="1/2"), "column")
    with pytest.raises(DomainError):
        sums.column_sum(Family("hbernstein", t="1/4", h="1/4"), 1)
    with pytest.raises(DomainError):
        sums.closed_form(Family("binomial"), "diagonal")


def test_eulerian_bspline_bridge_termwise():
    for k in range(1, 6):
        for n in range(31):
            assert polys.irwin_hall_density(n, k + 1) == Fraction(EULERIAN.entry(n, k), math.factorial(n))
    e = sums.column_sum(Family("eulerian"), 3, eps=TIGHT)
    b = sums.column_sum(Family("bspline", t=1), 3, eps=TIGHT)
    assert abs(e.value - b.value) <= e.truncation_bound + b.truncation_bound


def test_bspline_real_argument():
    # sum_n N_{0,n}(x) -> 2 as x grows
    res = sums.bspline_column_sum("17/2", eps=TIGHT)
    assert abs(res.value - 2) < Fraction(1, 10**4)
    alt = sums.bspline_alternating_sum("17/2", eps=TIGHT)
    assert abs(alt.value) < Fraction(1, 10**4)


@pytest.mark.parametrize("k", range(6))
def test_eulerian_tail_bound_is_sound(k):
    res = sums.column_sum(Family("eulerian"), k, eps=Fraction(1, 10**8))
    long = sum(Fraction(EULERIAN.entry(n, k), math.factorial(n)) for n in range(200))
    assert 0 <= long - res.value <= res.truncation_bound


def test_contrast_examples():
    res = sums.contrast_sum(Family("eulerian"), [1, -1], 0, eps=TIGHT)
    assert abs(_mp(res.value) - 1 / mpmath.e) <= _mp(res.truncation_bound)
    assert abs(sums.contrast_sum(Family("eulerian"), [1, -1], 20).value) < Fraction(1, 10**6)
    assert abs(sums.contrast_sum(Family("binomial"), [1, -2, 1], 30).value) < Fraction(1, 10**3)
    with pytest.raises(DomainError):
        sums.contrast_sum(Family("eulerian"), [1, 1], 3)
    with pytest.raises(DomainError):
        sums.contrast_sum(Family("bernstein", t="1/2"), [1, -1], 3)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.integers(-5, 5), min_size=3, max_size=3),
    st.lists(st.integers(-5, 5), min_size=3, max_size=3),
    st.integers(0, 6),
)
def test_contrast_linearity(c1, c2, k):
    c1 = c1[:-1] + [-sum(c1[:-1])]
    c2 = c2[:-1] + [-sum(c2[:-1])]
    f = Family("eulerian")
    eps = Fraction(1, 10**15)
    a = sums.contrast_sum(f, c1, k, eps=eps)
    b = sums.contrast_sum(f, c2, k, eps=eps)
    s = sums.contrast_sum(f, [x + y for x, y in zip(c1, c2)], k, eps=eps)
    assert abs(s.value - a.value - b.value) <= s.truncation_bound + a.truncation_bound + b.truncation_bound


def test_tolerance_error_carries_bound():
    with pytest.raises(ToleranceError) as info:
        sums.column_sum(Family("hbernstein", t="1/2", h="1/4"), 2, eps=Fraction(1, 10**200), max_terms=256)
    assert info.value.best_bound is not None


def test_result_record_round_trip():
    f = Family("bernstein", t="1/3")
    rec = sums.result_record(f, "diagonal", {"n": 4}, sums.diagonal_sum(f, 4))
    assert Fraction(rec["exact"]) == sums.diagonal_sum(f, 4)
    assert rec["params"] == {"t": "1/3", "n": "4"}
