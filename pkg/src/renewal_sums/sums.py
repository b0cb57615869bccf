"""Column, short-diagonal, alternating and contrast sums of the five families.

Families (``Family.kind``) and the term of row ``n``, column ``k``:

=============  ==============================  ======================
kind           term                            parameters
=============  ==============================  ======================
binomial       C(n,k) / 2^n
eulerian       <n,k> / n!
bernstein      C(n,k) t^k (1-t)^(n-k)          0 < t < 1
hbernstein     beta-binomial pmf               0 < t < 1, h > 0
bspline        N_{0,n}(k + t)                  offset t >= 0
=============  ==============================  ======================

Column sums run over n (infinite), short diagonals take row n - k and
column k (finite), alternating sums weight row n by (-1)^n. Every infinite
sum returns a :class:`SeriesResult` whose bound is a proof:

* binomial / Bernstein: ratio majorant of the negative-binomial tail;
* Eulerian / B-spline: P(S_n < x) <= x^n / n! (simplex volume);
* h-Bernstein: certified hypergeometric tail (:mod:`renewal_sums.series`).

:func:`closed_form` gives the exact right-hand sides for the binomial,
Bernstein and h-Bernstein families, so the two routes can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal, Sequence

from . import polys
from ._rational import DomainError, RationalLike, fmt_decimal, fmt_rational, to_rational
from .series import SeriesResult, ToleranceError, beta_expectation_quad, hypergeometric_tail, sum_with_tail
from .triangles import EULERIAN

__all__ = [
    "DEFAULT_EPS",
    "Family",
    "SeriesResult",
    "ToleranceError",
    "alternating_sum",
    "bspline_alternating_sum",
    "bspline_column_sum",
    "closed_form",
    "column_sum",
    "contrast_sum",
    "diagonal_sum",
    "hbernstein_alternating_limitk",
    "hbernstein_diagonal_limit",
    "result_record",
]

Kind = Literal["binomial", "eulerian", "bernstein", "hbernstein", "bspline"]
Identity = Literal["column", "diagonal", "alternating"]
KINDS: tuple[str, ...] = ("binomial", "eulerian", "bernstein", "hbernstein", "bspline")
IDENTITIES: tuple[str, ...] = ("column", "diagonal", "alternating")

DEFAULT_EPS = Fraction(1, 10**12)
DEFAULT_MAX_TERMS = 1 << 16
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Family:
    """One of the five term families with its parameters."""

    kind: Kind
    t: Fraction | None = None
    h: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown family {self.kind!r}; expected one of {KINDS}")
        if self.t is not None:
            object.__setattr__(self, "t", to_rational(self.t, "t"))
        if self.h is not None:
            object.__setattr__(self, "h", to_rational(self.h, "h"))
        if self.kind in ("binomial", "eulerian"):
            if self.t is not None or self.h is not None:
                raise DomainError(f"{self.kind} takes no parameters")
        elif self.kind == "bernstein":
            self._need_t_open()
            if self.h is not None:
                raise DomainError("bernstein takes no h; use hbernstein")
        elif self.kind == "hbernstein":
            self._need_t_open()
            if self.h is None or self.h <= 0:
                raise DomainError("hbernstein needs h > 0")
        else:
            if self.h is not None:
                raise DomainError("bspline takes no h")
            if self.t is None:
                object.__setattr__(self, "t", Fraction(0))
            if self.t < 0:
                raise DomainError("bspline offset t must be >= 0")

    def _need_t_open(self) -> None:
        if self.t is None or not 0 < self.t < 1:
            raise DomainError(f"{self.kind} needs t in (0, 1), got {self.t}")

    @property
    def ab(self) -> tuple[Fraction, Fraction]:
        return polys.hbernstein_ab(self.t, self.h)

    def params(self) -> dict[str, str]:
        out = {}
        if self.t is not None:
            out["t"] = fmt_rational(self.t)
        if self.h is not None:
            out["h"] = fmt_rational(self.h)
        return out

    def _need_h_below_t(self, what: str) -> None:
        if self.h >= self.t:
            raise DomainError(f"{what} for hbernstein requires 0 < h < t (E[1/p] diverges otherwise)")


def _check_index(name: str, v: int) -> None:
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise DomainError(f"{name} must be a non-negative int, got {v!r}")


def _eps(eps: RationalLike) -> Fraction:
    e = to_rational(eps, "eps")
    if e <= 0:
        raise DomainError("eps must be positive")
    return e


# -- term-level series ----------------------------------------------------------


def _bernoulli_column(t: Fraction, k: int, eps: Fraction, weight: Callable[[int], Fraction], wmax: Fraction, max_terms: int) -> SeriesResult:
    """sum_n weight(n) C(n,k) t^k (1-t)^(n-k); terms below n = k vanish."""
    q = 1 - t
    n = k
    term = t**k
    total = Fraction(0)
    best = None
    while True:
        total += weight(n) * term
        nxt = term * (n + 1) / (n + 1 - k) * q
        r_next = Fraction(n + 2, n + 2 - k) * q  # ratio term_{n+2}/term_{n+1}; decreasing in n
        if r_next < 1:
            bound = wmax * nxt / (1 - r_next)
            best = bound
            if bound <= eps:
                return SeriesResult(total, bound, n + 1)
        if n - k >= max_terms:
            raise ToleranceError(f"tolerance not reached within {max_terms} terms", best, n + 1)
        n += 1
        term = nxt


def _simplex_tail(x: Fraction, N: int) -> Fraction | None:
    """Bound on sum_{n > N} x^n / n!, or None while N + 2 <= x."""
    if N + 2 <= x:
        return None
    first = x ** (N + 1) / math.factorial(N + 1)
    return first / (1 - x / (N + 2))


def _uniform_column(term_at: Callable[[int], Fraction], x: Fraction, eps: Fraction, weight: Callable[[int], Fraction], wmax: Fraction, max_terms: int) -> SeriesResult:
    """sum_n weight(n) term_at(n) where 0 <= term_at(n) <= P(S_n < x) <= x^n/n!."""
    total = Fraction(0)
    best = None
    for n in range(max_terms + 1):
        total += weight(n) * term_at(n)
        tail = _simplex_tail(x, n)
        if tail is not None:
            bound = wmax * tail
            best = bound
            if bound <= eps:
                return SeriesResult(total, bound, n + 1)
    raise ToleranceError(f"tolerance not reached within {max_terms} terms", best, max_terms + 1)


def _hbernstein_column(t: Fraction, h: Fraction, k: int, eps: Fraction, alternating: bool, max_terms: int) -> SeriesResult:
    a, b = polys.hbernstein_ab(t, h)
    # m = n - k; t_m = (a)_k/(a+b)_k * (k+1)_m (b)_m / ((a+b+k)_m m!)
    num = [Fraction(k + 1), b]
    den = [Fraction(1), a + b + k]
    first = polys.beta_moment(a, b, k)
    cache = [first]

    def term_at(m: int) -> Fraction:
        while len(cache) <= m:
            j = len(cache) - 1
            cache.append(cache[-1] * (j + num[0]) * (j + num[1]) / ((j + den[0]) * (j + den[1])))
        return cache[m]

    def tail(M: int) -> tuple[Fraction, Fraction]:
        value, bound = hypergeometric_tail(term_at(M), num, den, M, alternating=alternating, order=12)
        return value * (-1) ** M if alternating else value, bound

    weight = (lambda m: (-1) ** m) if alternating else (lambda m: 1)
    res = sum_with_tail(term_at, tail, eps, start=max(16, 2 * k + 8), max_terms=max_terms, weight=weight)
    sign = (-1) ** k if alternating else 1
    return SeriesResult(sign * res.value, res.truncation_bound, res.terms_used + k)


def _row_term(f: Family, k: int) -> Callable[[int], Fraction]:
    if f.kind == "eulerian":
        return lambda n: Fraction(EULERIAN.entry(n, k), math.factorial(n))
    if f.kind == "bspline":
        x = k + f.t
        return lambda n: polys.irwin_hall_density(n, x)
    raise AssertionError(f.kind)


def _weighted_column(f: Family, k: int, eps: Fraction, weight: Callable[[int], Fraction], wmax: Fraction, max_terms: int) -> SeriesResult:
    if f.kind in ("binomial", "bernstein"):
        t = HALF if f.kind == "binomial" else f.t
        return _bernoulli_column(t, k, eps, weight, wmax, max_terms)
    if f.kind == "eulerian":
        # <n,k>/n! = P(k <= S_n < k+1)
        return _uniform_column(_row_term(f, k), Fraction(k + 1), eps, weight, wmax, max_terms)
    if f.kind == "bspline":
        # N_{0,n}(x) = P(x-1 <= S_n < x)
        return _uniform_column(_row_term(f, k), k + f.t, eps, weight, wmax, max_terms)
    raise AssertionError(f.kind)


def column_sum(f: Family, k: int, eps: RationalLike = DEFAULT_EPS, max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """sum_{n >= 0} term(n, k) with a certified truncation bound <= eps.

    For ``bspline`` the argument is ``k + f.t`` (see :func:`bspline_column_sum`
    for a real argument).
    """
    _check_index("k", k)
    eps = _eps(eps)
    if f.kind == "hbernstein":
        f._need_h_below_t("column sum")
        return _hbernstein_column(f.t, f.h, k, eps, False, max_terms)
    return _weighted_column(f, k, eps, lambda n: 1, Fraction(1), max_terms)


def alternating_sum(f: Family, k: int, eps: RationalLike = DEFAULT_EPS, max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """sum_{n >= 0} (-1)^n term(n, k) with a certified truncation bound <= eps."""
    _check_index("k", k)
    eps = _eps(eps)
    if f.kind == "hbernstein":
        f._need_h_below_t("alternating sum")
        return _hbernstein_column(f.t, f.h, k, eps, True, max_terms)
    return _weighted_column(f, k, eps, lambda n: -1 if n & 1 else 1, Fraction(1), max_terms)


def bspline_column_sum(x: RationalLike, eps: RationalLike = DEFAULT_EPS, max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """sum_{n >= 0} N_{0,n}(x) for a real (rational) argument x >= 0."""
    return column_sum(Family("bspline", t=_nonneg(x)), 0, eps, max_terms)


def bspline_alternating_sum(x: RationalLike, eps: RationalLike = DEFAULT_EPS, max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """sum_{n >= 0} (-1)^n N_{0,n}(x) for a real (rational) argument x >= 0."""
    return alternating_sum(Family("bspline", t=_nonneg(x)), 0, eps, max_terms)


def _nonneg(x: RationalLike) -> Fraction:
    x = to_rational(x, "x")
    if x < 0:
        raise DomainError("argument must be >= 0")
    return x


def contrast_sum(f: Family, c: Sequence[RationalLike], k: int, eps: RationalLike = DEFAULT_EPS, max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """sum_n c[n mod m] term(n, k) for a contrast c (entries summing to zero)."""
    if f.kind not in ("eulerian", "binomial"):
        raise DomainError("contrast sums are defined for the eulerian and binomial families")
    _check_index("k", k)
    coeffs = [to_rational(x, "c") for x in c]
    if not coeffs:
        raise DomainError("contrast must be non-empty")
    if sum(coeffs) != 0:
        raise DomainError(f"not a contrast: entries sum to {fmt_rational(sum(coeffs))}, not 0")
    m = len(coeffs)
    wmax = max(abs(x) for x in coeffs)
    return _weighted_column(f, k, _eps(eps), lambda n: coeffs[n % m], wmax, max_terms)


# -- finite short diagonals ------------------------------------------------------


def diagonal_sum(f: Family, n: int) -> Fraction:
    """sum_{k >= 0} term(n - k, k), an exact finite sum.

    For ``bspline`` the term is N_{0,n-k}(k + t) with the family offset
    ``t > 0``.
    """
    _check_index("n", n)
    ks = range(n // 2 + 1)
    if f.kind == "binomial":
        return sum((Fraction(math.comb(n - k, k), 2 ** (n - k)) for k in ks), Fraction(0))
    if f.kind == "eulerian":
        return sum((Fraction(EULERIAN.entry(n - k, k), math.factorial(n - k)) for k in ks), Fraction(0))
    if f.kind == "bernstein":
        return sum((polys.bernstein(n - k, k, f.t) for k in ks), Fraction(0))
    if f.kind == "hbernstein":
        return sum((polys.h_bernstein(n - k, k, f.t, f.h) for k in ks), Fraction(0))
    if f.t <= 0:
        raise DomainError("bspline short diagonal needs offset t > 0")
    return sum((polys.irwin_hall_density(n - k, k + f.t) for k in range(n + 1)), Fraction(0))


# -- h-Bernstein moment series ----------------------------------------------------


def _reciprocal_one_plus_p(a: Fraction, b: Fraction, eps: Fraction, max_terms: int) -> SeriesResult:
    """E[1/(1+p)], p ~ Beta(a, b), via the Euler-transformed moment series.

    sum_j (-1)^j E[p^j] stalls when b is small; its Euler transform is
    sum_j E[(1-p)^j] / 2^(j+1) whose term ratio (b+j) / (2(a+b+j)) is below
    1/2, so the tail after term J is at most twice term J+1.
    """
    term = HALF
    total = Fraction(0)
    for j in range(max_terms):
        total += term
        term = term * (b + j) / (2 * (a + b + j))
        bound = 2 * term
        if bound <= eps:
            return SeriesResult(total, bound, j + 1)
    raise ToleranceError(f"tolerance not reached within {max_terms} terms", 2 * term, max_terms)


def _digits_for(eps: Fraction) -> int:
    return max(15, math.ceil(-math.log10(float(eps))) + 2) if eps < 1 else 15


def _reciprocal_quad(a: Fraction, b: Fraction, eps: Fraction) -> SeriesResult:
    val, err = beta_expectation_quad(lambda x: 1 / (1 + x), a, b, _digits_for(eps))
    return SeriesResult(val, err, 0)


def hbernstein_diagonal_limit(
    t: RationalLike,
    h: RationalLike,
    eps: RationalLike = DEFAULT_EPS,
    method: Literal["auto", "series", "quadrature"] = "auto",
    max_terms: int = 10**6,
) -> SeriesResult:
    """Limit of the h-Bernstein short diagonals: E[1/(1+p)], p ~ Beta(t/h, (1-t)/h).

    At h = 1 this equals 2^-t. ``auto`` uses the exact series and falls
    back to tanh-sinh quadrature only if the series would need more than
    ``max_terms`` terms.
    """
    a, b = polys.hbernstein_ab(t, h)
    return _reciprocal(a, b, _eps(eps), method, max_terms)


def _reciprocal(a: Fraction, b: Fraction, eps: Fraction, method: str, max_terms: int) -> SeriesResult:
    if method == "quadrature":
        return _reciprocal_quad(a, b, eps)
    if method not in ("auto", "series"):
        raise ValueError(f"unknown method {method!r}")
    try:
        return _reciprocal_one_plus_p(a, b, eps, max_terms)
    except ToleranceError:
        if method == "series":
            raise
        return _reciprocal_quad(a, b, eps)


def _hbernstein_diagonal_closed(f: Family, n: int, eps: Fraction) -> SeriesResult:
    """E[(1 - (-p)^(n+1)) / (1+p)] = E[1/(1+p)] + (-1)^n E[p^(n+1)/(1+p)]."""
    a, b = f.ab
    main = _reciprocal_one_plus_p(a, b, eps / 2, DEFAULT_MAX_TERMS)
    # E[p^(n+1) g(p)] under Beta(a,b) = E[p^(n+1)] * E[g] under Beta(a+n+1, b)
    weight = polys.beta_moment(a, b, n + 1)
    corr = _reciprocal_one_plus_p(a + n + 1, b, eps / 2, DEFAULT_MAX_TERMS)
    sign = 1 if n % 2 == 0 else -1
    return SeriesResult(
        main.value + sign * weight * corr.value,
        main.truncation_bound + weight * corr.truncation_bound,
        main.terms_used + corr.terms_used,
    )


def hbernstein_alternating_limitk(
    t: RationalLike, h: RationalLike, k: int, eps: RationalLike = DEFAULT_EPS, max_terms: int = DEFAULT_MAX_TERMS
) -> SeriesResult:
    """(-1)^k E[p^k / (2-p)^(k+1)], p ~ Beta(t/h, (1-t)/h), for 0 < t < 1, h > 0.

    The integral is finite for every h > 0; only the matching alternating
    column sum needs h < t (see :func:`closed_form`).

    Expands 1/(2-p)^(k+1) = sum_j C(k+j, j) p^j / 2^(k+1+j) and sums beta
    moments. The term ratio is at most (k+j+1)/(2(j+1)), which decreases in
    j, giving a geometric tail once j + 1 > k.
    """
    f = Family("hbernstein", t=t, h=h)
    _check_index("k", k)
    eps = _eps(eps)
    a, b = f.ab
    term = polys.beta_moment(a, b, k) / 2 ** (k + 1)
    total = Fraction(0)
    for j in range(max_terms):
        total += term
        term = term * (k + j + 1) * (a + k + j) / (2 * (j + 1) * (a + b + k + j))
        q = Fraction(k + j + 2, 2 * (j + 2))  # majorant of every later ratio
        if q < 1:
            bound = term / (1 - q)
            if bound <= eps:
                sign = -1 if k % 2 else 1
                return SeriesResult(sign * total, bound, j + 1)
    raise ToleranceError(f"tolerance not reached within {max_terms} terms", None, max_terms)


# -- closed forms ----------------------------------------------------------------


def closed_form(
    f: Family,
    identity: Identity,
    *,
    n: int | None = None,
    k: int | None = None,
    eps: RationalLike = DEFAULT_EPS,
) -> Fraction | SeriesResult:
    """Exact right-hand side of a non-asymptotic identity.

    Returns a Fraction for the binomial and Bernstein identities and for the
    h-Bernstein column; the h-Bernstein diagonal and alternating right-hand
    sides are integrals, returned as a :class:`SeriesResult`.
    Column identities do not depend on k; diagonals need ``n``,
    alternating sums need ``k``.
    """
    if identity not in IDENTITIES:
        raise DomainError(f"identity must be one of {IDENTITIES}")
    if f.kind in ("eulerian", "bspline"):
        raise DomainError(f"{f.kind} has no finite closed form; only the limit is known")
    if identity == "diagonal":
        if n is None:
            raise DomainError("diagonal identity needs n")
        _check_index("n", n)
    if identity == "alternating":
        if k is None:
            raise DomainError("alternating identity needs k")
        _check_index("k", k)
    t = HALF if f.kind == "binomial" else f.t

    if f.kind in ("binomial", "bernstein"):
        if identity == "column":
            return 1 / t
        if identity == "diagonal":
            return (1 - (-t) ** (n + 1)) / (1 + t)
        return (-t) ** k / (2 - t) ** (k + 1)

    if identity == "column":
        f._need_h_below_t("the column identity")
        return (1 - f.h) / (t - f.h)
    if identity == "diagonal":
        return _hbernstein_diagonal_closed(f, n, _eps(eps))
    f._need_h_below_t("the alternating identity")
    return hbernstein_alternating_limitk(f.t, f.h, k, eps)


# -- serialization ---------------------------------------------------------------


def result_record(f: Family, identity: str, params: dict, result: SeriesResult | Fraction, digits: int = 15) -> dict:
    """JSON-ready record: value and bound as decimal strings, exact value as p/q."""
    if isinstance(result, Fraction):
        result = SeriesResult(result, Fraction(0), 0)
    rec = {
        "family": f.kind,
        "identity": identity,
        "params": {**f.params(), **{k: str(v) for k, v in params.items()}},
        "value": fmt_decimal(result.value, digits),
        "truncation_bound": fmt_decimal(result.truncation_bound, 3) if result.truncation_bound else "0",
        "terms_used": result.terms_used,
    }
    if isinstance(result.value, Fraction):
        rec["exact"] = fmt_rational(result.value)
    return rec


RECORD_FIELDS = ("family", "identity", "params", "value", "truncation_bound", "terms_used", "exact")
