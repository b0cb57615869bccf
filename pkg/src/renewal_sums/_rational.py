"""Exact parsing and formatting of rationals."""

from __future__ import annotations

import decimal
from fractions import Fraction
from numbers import Rational

RationalLike = int | Fraction | str


class DomainError(ValueError):
    """An argument lies outside the domain where an identity is defined."""


def to_rational(x: RationalLike, name: str = "value") -> Fraction:
    """Convert ``x`` to a Fraction without any binary rounding.

    Accepts ints, Fractions and strings such as ``"1/4"``, ``"0.25"`` or
    ``"1e-12"``. Floats are refused: ``0.1`` is not one tenth.
    """
    if isinstance(x, bool):
        raise TypeError(f"{name}: bool is not a rational")
    if isinstance(x, float):
        raise TypeError(f"{name}: floats are not accepted; pass a string like '0.1' or '1/10'")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, decimal.Decimal):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{name}: cannot parse {x!r} as a rational") from exc
    raise TypeError(f"{name}: unsupported type {type(x).__name__}")


def fmt_rational(x: Fraction) -> str:
    """``"num/den"``, or just ``"num"`` for integers."""
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_decimal(x: Fraction | decimal.Decimal, digits: int) -> decimal.Decimal:
    """Round ``x`` to ``digits`` significant digits."""
    ctx = decimal.Context(prec=digits + 15)
    d = x if isinstance(x, decimal.Decimal) else ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    return decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN).plus(d)


def fmt_decimal(x: Fraction | decimal.Decimal, digits: int) -> str:
    return str(to_decimal(x, digits))
