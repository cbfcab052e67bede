"""Exact rational scalars.

Every coefficient in the package is an exact rational: gmpy2.mpq when
available (noticeably faster on the convolution kernels), else
fractions.Fraction.  Both keep denominators positive and fractions
reduced, which is all the rest of the code relies on.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    from fractions import Fraction as Rat

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)


def rat(numerator, denominator=1) -> Rat:
    """Build an exact rational from integers (or pass a Rat through)."""
    if denominator == 1 and type(numerator) is type(ONE):
        return numerator
    return Rat(numerator, denominator)


def rat_str(value) -> str:
    """Render as `p` or `p/q`, matching the expression grammar."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rat(text: str) -> Rat:
    """Parse `p` or `p/q` (q > 0 enforced by normalization)."""
    if "/" in text:
        p, q = text.split("/", 1)
        return Rat(int(p), int(q))
    return Rat(int(text))
