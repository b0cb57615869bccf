"""Pascal and Eulerian triangles with exact integer rows.

Rows are generated one at a time from the row above and memoized, so a
:class:`Triangle` can be asked for row 300 of the Eulerian numbers without
any overflow concerns (Python ``int`` is arbitrary precision).
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

Kind = Literal["pascal", "eulerian"]
KINDS: tuple[Kind, ...] = ("pascal", "eulerian")


def _check_index(name: str, value: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")


class Triangle:
    """Lazily generated triangular array of exact integers.

    Row ``n`` always has ``n + 1`` entries (columns ``0..n``). For the
    Eulerian triangle this means the last column is the trailing zero
    printed in the usual table, e.g. row 3 is ``[1, 4, 1, 0]``.

    The row cache is filled under a lock; once a row exists it is never
    mutated, so concurrent readers are safe.
    """

    def __init__(self, kind: Kind) -> None:
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        self.kind = kind
        self._rows: list[tuple[int, ...]] = [(1,)]
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"Triangle({self.kind!r}, cached_rows={len(self._rows)})"

    def next_row(self, prev: tuple[int, ...]) -> tuple[int, ...]:
        """Apply the defining recurrence to ``prev`` (row ``n - 1``)."""
        n = len(prev)
        get = lambda j: prev[j] if 0 <= j < n else 0  # noqa: E731
        if self.kind == "pascal":
            return tuple(get(k) + get(k - 1) for k in range(n + 1))
        return tuple((k + 1) * get(k) + (n - k) * get(k - 1) for k in range(n + 1))

    def row(self, n: int) -> tuple[int, ...]:
        _check_index("n", n)
        if n >= len(self._rows):
            with self._lock:
                while len(self._rows) <= n:
                    self._rows.append(self.next_row(self._rows[-1]))
        return self._rows[n]

    def rows(self, levels: int) -> list[tuple[int, ...]]:
        """Rows ``0..levels-1``."""
        if levels < 1:
            raise ValueError("levels must be >= 1")
        self.row(levels - 1)
        return self._rows[:levels]

    def entry(self, n: int, k: int) -> int:
        _check_index("k", k)
        r = self.row(n)
        return r[k] if k < len(r) else 0

    def row_total(self, n: int) -> int:
        """The normalizing constant of row ``n``: ``2**n`` or ``n!``."""
        return 2**n if self.kind == "pascal" else math.factorial(n)

    def to_csv(self, levels: int, normalized: bool = False) -> str:
        """Rows as CSV, one row per line, exact decimal integers (or ``p/q``)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for n in range(levels):
            if normalized:
                writer.writerow([_fmt_fraction(x) for x in normalized_row(self, n)])
            else:
                writer.writerow(self.row(n))
        return buf.getvalue()


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


PASCAL = Triangle("pascal")
EULERIAN = Triangle("eulerian")


def get_triangle(kind: Kind | Triangle) -> Triangle:
    if isinstance(kind, Triangle):
        return kind
    if kind == "pascal":
        return PASCAL
    if kind == "eulerian":
        return EULERIAN
    raise ValueError(f"unknown triangle kind {kind!r}")


def binomial(n: int, k: int) -> int:
    """C(n, k), zero when ``k > n``."""
    _check_index("n", n)
    _check_index("k", k)
    return math.comb(n, k)


def eulerian(n: int, k: int) -> int:
    """Eulerian number <n, k>: permutations of n elements with k ascents."""
    return EULERIAN.entry(n, k)


def normalized_row(t: Kind | Triangle, n: int) -> list[Fraction]:
    """Row ``n`` divided by its total, so the entries sum to exactly 1."""
    tri = get_triangle(t)
    total = tri.row_total(n)
    return [Fraction(x, total) for x in tri.row(n)]


def short_diagonal_unnormalized(n: int) -> int:
    """sum_k C(n - k, k), the (n+1)-th Fibonacci number."""
    _check_index("n", n)
    return sum(math.comb(n - k, k) for k in range(n // 2 + 1))


@dataclass(frozen=True)
class ParityBitmap:
    """Black/white picture of a triangle: black (1) where the entry is odd."""

    width: int
    height: int
    bits: tuple[tuple[int, ...], ...]

    def bit(self, n: int, k: int) -> int:
        return self.bits[n][k]

    def to_pbm(self) -> str:
        """Plain PBM (``P1``); 1 is black."""
        lines = ["P1", f"{self.width} {self.height}"]
        lines.extend(" ".join(map(str, row)) for row in self.bits)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_pbm(cls, text: str) -> ParityBitmap:
        tokens = [
            tok
            for line in text.splitlines()
            for tok in line.split("#", 1)[0].split()
        ]
        if not tokens or tokens[0] != "P1":
            raise ValueError("not a plain PBM (missing P1 magic)")
        width, height = int(tokens[1]), int(tokens[2])
        cells = [int(x) for x in tokens[3:]]
        if len(cells) != width * height:
            raise ValueError("PBM cell count does not match its header")
        bits = tuple(tuple(cells[r * width : (r + 1) * width]) for r in range(height))
        return cls(width, height, bits)


def parity_bitmap(t: Kind | Triangle, levels: int) -> ParityBitmap:
    """Parity picture of rows ``0..levels-1``; row 0 on top, column 0 at left."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    tri = get_triangle(t)
    bits = []
    for n, row in enumerate(tri.rows(levels)):
        bits.append(tuple(row[k] & 1 if k <= n else 0 for k in range(levels)))
    return ParityBitmap(width=levels, height=levels, bits=tuple(bits))
