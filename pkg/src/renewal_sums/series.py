"""Series machinery with certified truncation bounds.

The main tool is :func:`hypergeometric_tail`, which evaluates

    sum_{m >= M} s^(m-M) t_m,      t_{m+1}/t_m = prod(m + num_i) / prod(m + den_i)

for s = +1 or s = -1 with a rigorous error bound, even when t_m decays only
polynomially. It finds an asymptotic multiplier c(m) with

    c(m) - s c(m+1) t_{m+1}/t_m = 1 - rho(m),   rho(m) = O(m^-(order+1)),

so the tail telescopes to c(M) t_M up to sum rho(m) s^m t_m, and bounds
sup_{m >= M} |rho(m)| exactly from the coefficients of rho(M + x).
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

Poly = list[Fraction]  # ascending coefficients


class ToleranceError(RuntimeError):
    """The requested tolerance was not reached within the term budget."""

    def __init__(self, message: str, best_bound: Fraction | decimal.Decimal | None = None, terms_used: int = 0):
        super().__init__(message)
        self.best_bound = best_bound
        self.terms_used = terms_used


@dataclass(frozen=True)
class SeriesResult:
    """A truncated infinite sum.

    ``truncation_bound`` bounds |true sum - value|. It is a proof for every
    exact-rational route; for quadrature it is the integrator's estimate.
    """

    value: Fraction | decimal.Decimal
    truncation_bound: Fraction | decimal.Decimal
    terms_used: int

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def contains(self, x: Fraction | decimal.Decimal, slack: Fraction | decimal.Decimal = 0) -> bool:
        """True if ``x`` lies within the bound (plus ``slack``) of the value."""
        if isinstance(self.value, Fraction) and isinstance(x, Fraction):
            return abs(self.value - x) <= self.truncation_bound + Fraction(slack)
        return abs(Fraction(self.value) - Fraction(x)) <= Fraction(self.truncation_bound) + Fraction(slack)


# -- polynomial helpers -------------------------------------------------------


def _pmul(p: Poly, q: Poly) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _padd(p: Poly, q: Poly, scale: Fraction = Fraction(1)) -> Poly:
    out = list(p) + [Fraction(0)] * max(0, len(q) - len(p))
    for i, b in enumerate(q):
        out[i] += scale * b
    return out


def _pshift(p: Poly, s: Fraction) -> Poly:
    """Coefficients of p(x + s)."""
    out = [Fraction(0)] * len(p)
    for i, c in enumerate(p):
        if c:
            for j in range(i + 1):
                out[j] += c * math.comb(i, j) * s ** (i - j)
    return out


def _linear_product(roots: Sequence[Fraction]) -> Poly:
    """prod (m + r_i) as a polynomial in m."""
    p: Poly = [Fraction(1)]
    for r in roots:
        p = _pmul(p, [Fraction(r), Fraction(1)])
    return p


def _peval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


# -- power series in u = 1/m -----------------------------------------------------


def _ps_mul(p: Poly, q: Poly, size: int) -> Poly:
    out = [Fraction(0)] * size
    for i, a in enumerate(p[:size]):
        if a:
            for j, b in enumerate(q[: size - i]):
                out[i + j] += a * b
    return out


def _ps_binomial(power: int, size: int) -> Poly:
    """(1 + u)^power for any integer power."""
    out = [Fraction(1)]
    for i in range(1, size):
        out.append(out[-1] * (power - i + 1) / i)
    return out


def _ps_ratio(num: Sequence[Fraction], den: Sequence[Fraction], size: int) -> Poly:
    """prod(1 + num_i u) / prod(1 + den_i u) as a power series."""
    r = [Fraction(1)] + [Fraction(0)] * (size - 1)
    for a in num:
        r = _ps_mul(r, [Fraction(1), Fraction(a)], size)
    for g in den:
        inv = [(-Fraction(g)) ** i for i in range(size)]
        r = _ps_mul(r, inv, size)
    return r


def _solve_multiplier(num: Sequence[Fraction], den: Sequence[Fraction], sign: int, order: int) -> dict[int, Fraction]:
    """Coefficients e_j of c(m) = sum_j e_j m^-j making the residual O(m^-(order+1))."""
    size = order + 3
    ratio = _ps_ratio(num, den, size)
    js = list(range(-1, order)) if sign == 1 else list(range(0, order + 1))
    g: dict[int, Poly] = {}
    for j in js:
        prod = _ps_mul(_ps_binomial(-j, size), ratio, size)
        g[j] = [(1 if i == 0 else 0) - sign * prod[i] for i in range(size)]
    e: dict[int, Fraction] = {}
    lag = 1 if sign == 1 else 0  # g_j[0] vanishes for s = +1
    for i in range(order + 1):
        j_new = i - lag
        rhs = Fraction(1 if i == 0 else 0)
        for j, ej in e.items():
            if 0 <= i - j < size:
                rhs -= ej * g[j][i - j]
        diag = g[j_new][lag]
        if diag == 0:
            raise ArithmeticError("degenerate multiplier system")
        e[j_new] = rhs / diag
    return e


def _residual_sup(e: dict[int, Fraction], num: Sequence[Fraction], den: Sequence[Fraction], sign: int, start: int) -> tuple[Fraction, Fraction]:
    """Return (c(start), sup_{m >= start} |rho(m)|) for the multiplier ``e``."""
    J = max(0, max(e))
    # c(m) = C(m) / m^J
    C: Poly = [Fraction(0)] * (J + 2)
    for j, ej in e.items():
        C[J - j] += ej
    P = _linear_product(num)
    Q = _linear_product(den)
    mJ: Poly = [Fraction(0)] * J + [Fraction(1)]
    m1J: Poly = _linear_product([Fraction(1)] * J)
    C_next = _pshift(C, Fraction(1))
    denom = _pmul(_pmul(mJ, m1J), Q)
    lhs = _padd(_pmul(_pmul(C, m1J), Q), _pmul(_pmul(C_next, mJ), P), Fraction(-sign))
    resid = _padd(denom, lhs, Fraction(-1))
    Ms = Fraction(start)
    nr = _pshift(resid, Ms)
    dr = _pshift(denom, Ms)
    sup = Fraction(0)
    for i, ni in enumerate(nr):
        if ni == 0:
            continue
        di = dr[i] if i < len(dr) else Fraction(0)
        if di <= 0:
            raise ArithmeticError("residual bound unavailable at this start index")
        sup = max(sup, abs(ni) / di)
    c_start = _peval(C, Ms) / Ms**J
    return c_start, sup


def hypergeometric_tail(
    first: Fraction,
    num: Sequence[Fraction],
    den: Sequence[Fraction],
    start: int,
    alternating: bool = False,
    order: int = 10,
) -> tuple[Fraction, Fraction]:
    """Certified ``sum_{m >= start} (+-1)^(m-start) t_m`` with ``t_start = first``.

    The term ratio for m >= start is prod(m + num_i) / prod(m + den_i).
    Requirements: positive terms (``first > 0`` and every ``start + num_i``,
    ``start + den_i`` positive), ``start >= 1`` and
    ``sum(den) - sum(num) > 1`` so that the positive series converges.

    Returns ``(value, bound)`` with |true tail - value| <= bound.
    """
    num = [Fraction(x) for x in num]
    den = [Fraction(x) for x in den]
    if len(num) != len(den):
        raise ValueError("num and den must have the same length")
    if start < 1:
        raise ValueError("start must be >= 1")
    if first <= 0 or any(start + x <= 0 for x in num + den):
        raise ValueError("terms must be positive from the start index on")
    if sum(den) - sum(num) - 1 <= 0:
        raise ValueError("positive series diverges; the tail cannot be certified")

    e = _solve_multiplier(num, den, 1, order)
    c0, sup = _residual_sup(e, num, den, 1, start)
    if sup >= 1:
        raise ArithmeticError("start index too small for the residual bound")
    positive = c0 * first
    positive_upper = positive / (1 - sup)
    if not alternating:
        return positive, sup * positive_upper

    e = _solve_multiplier(num, den, -1, order)
    c0_alt, sup_alt = _residual_sup(e, num, den, -1, start)
    return c0_alt * first, sup_alt * positive_upper


def sum_with_tail(
    term_at: Callable[[int], Fraction],
    tail: Callable[[int], tuple[Fraction, Fraction]],
    eps: Fraction,
    start: int,
    max_terms: int,
    weight: Callable[[int], int] = lambda m: 1,
) -> SeriesResult:
    """Sum ``weight(m) term_at(m)`` for m < M directly and add ``tail(M)``.

    M starts at ``start`` and doubles until the certified bound is <= eps.
    ``term_at`` must be cheap to call sequentially (it may cache).
    """
    M = start
    total = Fraction(0)
    done = 0
    best = None
    while True:
        for m in range(done, M):
            total += weight(m) * term_at(m)
        done = M
        try:
            value, bound = tail(M)
        except ArithmeticError:
            value, bound = None, None
        if bound is not None:
            best = bound if best is None else min(best, bound)
            if bound <= eps:
                return SeriesResult(total + value, bound, M)
        if 2 * M > max_terms:
            raise ToleranceError(f"tolerance {float(eps):.3g} not reached within {max_terms} terms", best, M)
        M *= 2


# -- quadrature -----------------------------------------------------------------


def beta_expectation_quad(f: Callable, a: Fraction, b: Fraction, digits: int) -> tuple[decimal.Decimal, decimal.Decimal]:
    """E[f(p)] for p ~ Beta(a, b) by tanh-sinh quadrature.

    ``f`` receives and returns mpmath numbers. Works at ``digits + 15``
    significant digits; returns (value, estimated error) as Decimals.
    """
    import mpmath

    with mpmath.workdps(digits + 15):
        A, B = mpmath.mpf(a.numerator) / a.denominator, mpmath.mpf(b.numerator) / b.denominator
        half = mpmath.mpf(1) / 2
        # x = u^(1/A) on [0, 1/2] and 1 - x = v^(1/B) on [1/2, 1] absorb the endpoint powers
        left = lambda u: f(u ** (1 / A)) * (1 - u ** (1 / A)) ** (B - 1) / A  # noqa: E731
        right = lambda v: f(1 - v ** (1 / B)) * (1 - v ** (1 / B)) ** (A - 1) / B  # noqa: E731
        v1, e1 = mpmath.quad(left, [0, half**A], method="tanh-sinh", error=True)
        v2, e2 = mpmath.quad(right, [0, half**B], method="tanh-sinh", error=True)
        norm = mpmath.beta(A, B)
        val, err = (v1 + v2) / norm, (abs(e1) + abs(e2)) / norm
        to_dec = lambda x: decimal.Decimal(mpmath.nstr(x, digits + 15, strip_zeros=False))  # noqa: E731
        return to_dec(val), to_dec(err)
