"""How fast the normalized Eulerian column sums approach 2.

gap(k) = sum_n <n,k>/n! - 2 is computed as an exact rational partial sum
plus a simplex tail bound, tightened until the bound cannot disturb the
reported digits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache

from ._rational import to_decimal
from .sums import Family, column_sum

EULERIAN = Family("eulerian")
_START_EPS_DIGITS = 20
_FLOOR = Fraction(1, 10**600)


@dataclass(frozen=True)
class GapRecord:
    k: int
    gap: Decimal  # rounded to `digits` significant digits
    digits: int
    exact_gap: Fraction = field(repr=False)
    truncation_bound: Fraction = field(repr=False)
    terms_used: int = 0

    def below(self, threshold: Fraction) -> bool:
        """Certified |gap| < threshold."""
        return abs(self.exact_gap) + self.truncation_bound < threshold


@lru_cache(maxsize=None)
def _gap(k: int, digits: int) -> tuple[Fraction, Fraction, int]:
    exponent = digits + _START_EPS_DIGITS
    while True:
        eps = Fraction(1, 10**exponent)
        res = column_sum(EULERIAN, k, eps=eps, max_terms=20_000)
        gap = res.value - 2
        if res.truncation_bound * 10 ** (digits + 1) <= abs(gap) or eps < _FLOOR:
            return gap, res.truncation_bound, res.terms_used
        exponent *= 2


def gap_record(k: int, digits: int = 15) -> GapRecord:
    if k < 0:
        raise ValueError("k must be >= 0")
    if digits < 6:
        raise ValueError("digits must be >= 6")
    gap, bound, terms = _gap(k, digits)
    return GapRecord(k, to_decimal(gap, digits), digits, gap, bound, terms)


def eulerian_gap_table(k_max: int, digits: int = 15) -> list[GapRecord]:
    """gap(k) for k = 0..k_max, each certified to ``digits`` significant digits."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return [gap_record(k, digits) for k in range(k_max + 1)]


def gap_table_csv(records: list[GapRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "gap", "truncation_bound", "terms_used"])
    for r in records:
        w.writerow([r.k, str(r.gap), str(to_decimal(r.truncation_bound, 3)) if r.truncation_bound else "0", r.terms_used])
    return buf.getvalue()


def gap_table_text(records: list[GapRecord], per_line: int = 4) -> str:
    """Rows of k and gap side by side, in chunks of ``per_line`` columns."""
    lines = []
    for i in range(0, len(records), per_line):
        chunk = records[i : i + per_line]
        cells_k = [str(r.k) for r in chunk]
        cells_g = [f"{r.gap:.2e}" if abs(r.gap) < Decimal("0.01") else f"{r.gap:.5f}" for r in chunk]
        width = [max(len(a), len(b)) for a, b in zip(cells_k, cells_g)]
        lines.append("k    " + "  ".join(c.rjust(w) for c, w in zip(cells_k, width)))
        lines.append("gap  " + "  ".join(c.rjust(w) for c, w in zip(cells_g, width)))
        lines.append("")
    return "\n".join(lines)


@dataclass(frozen=True)
class RateReport:
    """Empirical check that |gap(k)| k^alpha decays.

    ``monotone`` is the pointwise test; it can fail near sign changes of the
    oscillating gap, listed in ``violations``. ``envelope_monotone`` compares
    maxima over consecutive windows of ``window`` values of k.
    """

    alpha: float
    k_range: tuple[int, int]
    status: str
    monotone: bool | None = None
    violations: tuple[int, ...] = ()
    envelope_monotone: bool | None = None
    envelope: tuple[float, ...] = ()
    observed_exponents: tuple[float, ...] = ()


BURN_IN = 5


def rate_check(alpha: float, k_min: int = BURN_IN, k_max: int = 30, window: int = 8) -> RateReport:
    """Test whether |gap(k)| k^alpha is non-increasing on [max(k_min, 5), k_max]."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    lo = max(k_min, BURN_IN)
    if k_max - lo < 1:
        return RateReport(alpha, (k_min, k_max), "insufficient range")
    ks = list(range(lo, k_max + 1))
    scaled = {k: float(abs(gap_record(k, 6).exact_gap)) * k**alpha for k in ks}
    violations = tuple(k for k in ks[:-1] if scaled[k + 1] > scaled[k])
    windows = [ks[i : i + window] for i in range(0, len(ks), window)]
    envelope = tuple(max(scaled[k] for k in w) for w in windows)
    envelope_ok = all(b < a for a, b in zip(envelope, envelope[1:]))
    # local power-law exponent of the raw |gap| envelope between windows
    raw = [max(scaled[k] / k**alpha for k in w) for w in windows]
    exponents = [
        -math.log(r1 / r0) / math.log(_mid(w1) / _mid(w0))
        for w0, w1, r0, r1 in zip(windows, windows[1:], raw, raw[1:])
    ]
    return RateReport(
        alpha,
        (k_min, k_max),
        "ok",
        monotone=not violations,
        violations=violations,
        envelope_monotone=envelope_ok,
        envelope=envelope,
        observed_exponents=tuple(exponents),
    )


def _mid(w: list[int]) -> float:
    return (w[0] + w[-1]) / 2
