"""Helpers for exact rationals and their ``"num/den"`` text form."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def as_ratio(value) -> Fraction:
    """Coerce an int, Fraction or ``"num/den"`` string to a Fraction.

    Floats are rejected: they would silently carry binary rounding error.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not ratios")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def fmt_ratio(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def ratio_json(value: Fraction) -> dict:
    value = Fraction(value)
    return {"exact": fmt_ratio(value), "decimal": float(value)}
