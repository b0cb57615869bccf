from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from renewal_sums import polys
from renewal_sums._rational import DomainError
from renewal_sums.triangles import EULERIAN

T_GRID = [Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(9, 10)]
H_GRID = [Fraction(1, 7), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3)]


def test_bernstein_examples():
    assert polys.bernstein(2, 1, "1/2") == Fraction(1, 2)
    assert polys.bernstein(4, 2, Fraction(1, 2)) == Fraction(6, 16)
    assert polys.bernstein(3, 0, "1/3") == Fraction(8, 27)
    assert polys.bernstein(3, 1, "0.25") == polys.bernstein(3, 1, "1/4")


def test_h_bernstein_examples():
    assert polys.h_bernstein(3, 1, "1/4", 0) == polys.bernstein(3, 1, "1/4") == Fraction(27, 64)
    assert polys.h_bernstein(1, 1, "1/2", 1) == Fraction(1, 2)
    assert polys.h_bernstein(2, 1, "1/2", 1) == Fraction(1, 4)


def test_beta_moment_examples():
    assert polys.beta_moment(3, 5, 0) == 1
    for j in range(10):
        assert polys.beta_moment(1, 1, j) == Fraction(1, j + 1)
    assert polys.beta_moment(2, 3, 2) == Fraction(1, 5)


def test_beta_moment_against_quadrature():
    a, b = Fraction(3, 2), Fraction(5, 3)
    with mpmath.workdps(30):
        A, B = mpmath.mpf(3) / 2, mpmath.mpf(5) / 3
        for j in range(5):
            ref = mpmath.beta(A + j, B) / mpmath.beta(A, B)
            assert abs(mpmath.mpf(polys.beta_moment(a, b, j).numerator) / polys.beta_moment(a, b, j).denominator - ref) < mpmath.mpf(10) ** -25


def test_partition_of_unity():
    for t in T_GRID:
        for n in range(61):
            assert sum(polys.bernstein(n, k, t) for k in range(n + 1)) == 1


def test_h_partition_of_unity():
    for t in T_GRID:
        for h in H_GRID:
            for n in range(0, 41, 5):
                assert sum(polys.h_bernstein(n, k, t, h) for k in range(n + 1)) == 1


def _beta_mixture(n: int, k: int, a: Fraction, b: Fraction) -> Fraction:
    # E[C(n,k) p^k (1-p)^(n-k)] expanded through (1-p)^(n-k) = sum_i C(n-k,i) (-p)^i
    return math.comb(n, k) * sum(
        math.comb(n - k, i) * (-1) ** i * polys.beta_moment(a, b, k + i) for i in range(n - k + 1)
    )


def test_mixture_identity():
    for t in T_GRID:
        for h in H_GRID[:3]:
            a, b = polys.hbernstein_ab(t, h)
            for n in range(11):
                for k in range(n + 1):
                    assert polys.h_bernstein(n, k, t, h) == _beta_mixture(n, k, a, b)


def test_irwin_hall_examples():
    assert polys.irwin_hall_density(0, "1/2") == 1
    assert polys.irwin_hall_density(0, 1) == 1
    assert polys.irwin_hall_density(0, 0) == 0
    assert polys.irwin_hall_density(1, 1) == 1
    assert polys.irwin_hall_density(2, 1) == Fraction(1, 2)
    assert polys.irwin_hall_density(3, -1) == 0
    assert polys.irwin_hall_density(3, 5) == 0


def test_integer_bridge():
    for n in range(1, 31):
        for k in range(1, n + 1):
            assert polys.irwin_hall_density(n, k) == Fraction(EULERIAN.entry(n, k - 1), math.factorial(n))


def test_integrates_to_one():
    for n in range(21):
        assert polys.irwin_hall_integral(n) == 1


def test_convolution_recurrence():
    for n in range(1, 11):
        conv = polys.box_convolution_pieces(n)
        for m, piece in enumerate(polys.irwin_hall_pieces(n)):
            assert polys.poly_trim(polys.poly_sub(piece, conv[m])) == ()


def test_irwin_hall_matches_convolution_quadrature():
    # N_{0,2}(t) = int_{t-1}^t N_{0,1}, with N_{0,1} the hat on (0, 2)
    hat = lambda x: max(0, 1 - abs(x - 1))  # noqa: E731
    for t in (Fraction(1, 3), Fraction(3, 2), Fraction(5, 2)):
        lo, hi = float(t) - 1, float(t)
        nodes = [lo] + [x for x in (0, 1, 2) if lo < x < hi] + [hi]
        ref = mpmath.quad(hat, nodes)
        assert abs(float(polys.irwin_hall_density(2, t)) - float(ref)) < 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        polys.bernstein(2, 3, "1/2")
    with pytest.raises(DomainError):
        polys.h_bernstein(2, 1, 0, "1/2")
    with pytest.raises(DomainError):
        polys.h_bernstein(2, 1, "1/2", -1)
    with pytest.raises(TypeError):
        polys.bernstein(2, 1, 0.5)


@settings(max_examples=60)
@given(st.integers(0, 12), st.fractions(min_value=0, max_value=13, max_denominator=50))
def test_irwin_hall_is_a_probability_of_an_interval(n, t):
    # N_{0,n}(t) is the density of a sum of n+1 uniforms: in [0, 1] and zero outside the support
    v = polys.irwin_hall_density(n, t)
    assert 0 <= v <= 1
    if t > n + 1 or t <= 0:
        assert v == 0


@settings(max_examples=60)
@given(st.integers(1, 15), st.fractions(min_value=0, max_value=16, max_denominator=40))
def test_piecewise_continuity(n, t):
    # degree >= 1 splines are continuous across integer knots
    if t.denominator == 1 and 0 < t <= n:
        m = int(t)
        left = polys.poly_eval(polys.irwin_hall_pieces(n)[m - 1], t)
        right = polys.poly_eval(polys.irwin_hall_pieces(n)[m], t)
        assert left == right
