"""Exact rational parsing and formatting.

Every probability, correlation, and bound in this package is a
``fractions.Fraction`` end to end, so feasibility verdicts never depend on
floating-point rounding.  Decimal strings are converted to the exact
rational they denote ("0.25" -> 1/4).
"""

from decimal import Decimal, InvalidOperation
from fractions import Fraction

__all__ = ["parse_rational", "format_rational", "decimal_str"]


def parse_rational(value: int | str | Fraction) -> Fraction:
    """Parse an exact rational from "p/q", an integer, or a decimal string.

    Floats are rejected: the binary value of a float literal is usually
    not the number the caller meant (float 0.1 is not 1/10).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"cannot parse a rational from {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(
            f"refusing float {value!r}: pass a string or Fraction for exact input"
        )
    if not isinstance(value, str):
        raise ValueError(f"cannot parse a rational from {type(value).__name__}")
    text = value.strip()
    if not text:
        raise ValueError("empty rational token")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        # Decimal covers exponent forms Fraction's grammar may not.
        return Fraction(Decimal(text))
    except InvalidOperation:
        raise ValueError(f"not a rational token: {value!r}") from None


def format_rational(q: Fraction) -> str:
    """Canonical "p/q" in lowest terms; integral values render without "/1"."""
    return str(q)


def decimal_str(q: Fraction, places: int = 12) -> str:
    """Fixed-point decimal rendering for human-facing reports."""
    sign = "-" if q < 0 else ""
    q = abs(q)
    scaled = q * 10**places
    digits = scaled.numerator // scaled.denominator
    if 2 * (scaled.numerator % scaled.denominator) >= scaled.denominator:
        digits += 1
    whole, frac = divmod(digits, 10**places)
    return f"{sign}{whole}.{str(frac).zfill(places)}"
