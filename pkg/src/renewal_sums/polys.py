"""Pointwise evaluators: Bernstein, h-Bernstein, beta moments, uniform B-splines.

Everything here is exact. Parameters are converted with
:func:`~renewal_sums._rational.to_rational`, so ``"1/4"`` and ``"0.25"``
are accepted and mean the same thing.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ._rational import DomainError, RationalLike, to_rational

Poly = tuple[Fraction, ...]  # ascending coefficients


def _check_nk(n: int, k: int) -> None:
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")


def bernstein(n: int, k: int, t: RationalLike) -> Fraction:
    """C(n,k) t^k (1-t)^(n-k) for t in [0, 1]."""
    _check_nk(n, k)
    t = to_rational(t, "t")
    if not 0 <= t <= 1:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    return math.comb(n, k) * t**k * (1 - t) ** (n - k)


def hbernstein_ab(t: RationalLike, h: RationalLike) -> tuple[Fraction, Fraction]:
    """Beta parameters a = t/h, b = (1-t)/h of the beta-binomial form."""
    t, h = to_rational(t, "t"), to_rational(h, "h")
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    if h <= 0:
        raise DomainError(f"h must be > 0, got {h}")
    return t / h, (1 - t) / h


def h_bernstein(n: int, k: int, t: RationalLike, h: RationalLike) -> Fraction:
    """Polya-Eggenberger probability of k successes in n draws.

    With h = 0 this is the ordinary Bernstein polynomial; with h > 0 it is
    the beta-binomial pmf with parameters (t/h, (1-t)/h).
    """
    _check_nk(n, k)
    t, h = to_rational(t, "t"), to_rational(h, "h")
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    if h < 0:
        raise DomainError(f"h must be >= 0, got {h}")
    num = Fraction(1)
    for i in range(k):
        num *= t + i * h
    for i in range(n - k):
        num *= 1 - t + i * h
    den = Fraction(1)
    for i in range(n):
        den *= 1 + i * h
    return math.comb(n, k) * num / den


def beta_moment(a: RationalLike, b: RationalLike, j: int) -> Fraction:
    """E[p^j] for p ~ Beta(a, b), i.e. prod_{i<j} (a+i)/(a+b+i)."""
    a, b = to_rational(a, "a"), to_rational(b, "b")
    if a <= 0 or b <= 0:
        raise DomainError(f"need a, b > 0, got a={a}, b={b}")
    if j < 0:
        raise DomainError("j must be >= 0")
    m = Fraction(1)
    for i in range(j):
        m *= (a + i) / (a + b + i)
    return m


def irwin_hall_density(n: int, t: RationalLike) -> Fraction:
    """Uniform B-spline N_{0,n}(t): density of a sum of n + 1 standard uniforms.

    Closed form (1/n!) sum_{0 <= j < t} (-1)^j C(n+1, j) (t-j)^n on (0, n+1],
    zero elsewhere. Degree 0 is the indicator of (0, 1]; for n >= 1 the
    function is continuous so the endpoint convention is invisible.
    """
    if n < 0:
        raise DomainError("degree n must be >= 0")
    t = to_rational(t, "t")
    if t <= 0 or t > n + 1:
        return Fraction(0)
    m = math.ceil(t) - 1  # t lies in (m, m+1]
    return _poly_eval(irwin_hall_pieces(n)[m], t)


@lru_cache(maxsize=None)
def irwin_hall_pieces(n: int) -> tuple[Poly, ...]:
    """Polynomial pieces of N_{0,n}; piece ``m`` is valid on (m, m+1]."""
    inv_fact = Fraction(1, math.factorial(n))
    pieces = []
    acc = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        # add (-1)^m C(n+1, m) (t - m)^n
        c = (-1) ** m * math.comb(n + 1, m)
        for i in range(n + 1):
            acc[i] += c * math.comb(n, i) * (-m) ** (n - i) * inv_fact
        pieces.append(tuple(acc))
    return tuple(pieces)


def _poly_eval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_eval(p: Poly, x: RationalLike) -> Fraction:
    return _poly_eval(p, to_rational(x, "x"))


def poly_antiderivative(p: Poly) -> Poly:
    """Antiderivative with zero constant term."""
    return (Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(p))


def poly_shift(p: Poly, s: Fraction) -> Poly:
    """Coefficients of q(x) = p(x + s)."""
    out = [Fraction(0)] * len(p)
    for i, c in enumerate(p):
        for j in range(i + 1):
            out[j] += c * math.comb(i, j) * s ** (i - j)
    return tuple(out)


def poly_sub(p: Poly, q: Poly) -> Poly:
    size = max(len(p), len(q))
    p = tuple(p) + (Fraction(0),) * (size - len(p))
    q = tuple(q) + (Fraction(0),) * (size - len(q))
    return tuple(x - y for x, y in zip(p, q))


def poly_trim(p: Poly) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def irwin_hall_integral(n: int) -> Fraction:
    """Exact integral of N_{0,n} over its support [0, n+1]."""
    total = Fraction(0)
    for m, piece in enumerate(irwin_hall_pieces(n)):
        anti = poly_antiderivative(piece)
        total += _poly_eval(anti, Fraction(m + 1)) - _poly_eval(anti, Fraction(m))
    return total


def box_convolution_pieces(n: int) -> tuple[Poly, ...]:
    """Pieces of t -> integral_{t-1}^{t} N_{0,n-1}(x) dx, computed exactly.

    On (m, m+1] the integral splits at x = m into the tail of piece m-1 and
    the head of piece m of the degree n-1 spline.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    lower = irwin_hall_pieces(n - 1)
    out = []
    for m in range(n + 1):
        result: Poly = (Fraction(0),)
        if m - 1 >= 0 and m - 1 < len(lower):
            anti = poly_antiderivative(lower[m - 1])
            # F(m) - F(t - 1)
            shifted = poly_shift(anti, Fraction(-1))
            const = _poly_eval(anti, Fraction(m))
            result = poly_sub((const,), shifted)
        if m < len(lower):
            anti = poly_antiderivative(lower[m])
            const = _poly_eval(anti, Fraction(m))
            result = poly_sub(result, poly_sub((const,), anti))
        out.append(poly_trim(result))
    return tuple(out)
