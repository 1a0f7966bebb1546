"""Exact two's-complement fixed-point arithmetic.

A value in format <n,l> (n integer bits including sign, l fractional bits)
is stored as a scaled integer s with real value s * 2**-l.  The representable
range is [-2**(n-1), 2**(n-1) - 2**-l].  All arithmetic here is performed on
exact integers (extended precision), rounded once, then overflow-handled once,
so results are bit-reproducible across platforms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class Rounding(enum.Enum):
    """Rounding applied to the scaled value x * 2**l."""

    ROUND = "round"   # round half away from zero
    FLOOR = "floor"   # truncate toward -inf


class Overflow(enum.Enum):
    """Out-of-range handling on the scaled integer."""

    WRAP = "wrap"         # two's-complement modular wrap on n+l bits
    SATURATE = "saturate"  # clamp to [min_value, max_value]


@dataclass(frozen=True)
class FixedPointFormat:
    """The <n,l> bit split: ``int_bits`` includes the sign bit."""

    int_bits: int
    frac_bits: int

    def __post_init__(self):
        if self.int_bits < 1:
            raise ValueError("int_bits must be >= 1")
        if self.frac_bits < 0:
            raise ValueError("frac_bits must be >= 0")
        if self.int_bits + self.frac_bits > 64:
            raise ValueError("total word length above 64 bits is unsupported")

    @property
    def total_bits(self) -> int:
        return self.int_bits + self.frac_bits

    @property
    def min_scaled(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def max_scaled(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def min_value(self) -> Fraction:
        return Fraction(self.min_scaled, 1 << self.frac_bits)

    @property
    def max_value(self) -> Fraction:
        return Fraction(self.max_scaled, 1 << self.frac_bits)

    @property
    def resolution(self) -> Fraction:
        return Fraction(1, 1 << self.frac_bits)

    def __str__(self) -> str:
        return f"<{self.int_bits},{self.frac_bits}>"


@dataclass(frozen=True)
class FxNum:
    """A quantized value: ``scaled * 2**-frac_bits``, always in range."""

    scaled: int
    fmt: FixedPointFormat

    def __post_init__(self):
        if not self.fmt.min_scaled <= self.scaled <= self.fmt.max_scaled:
            raise ValueError(f"scaled value {self.scaled} out of range for {self.fmt}")

    @property
    def value(self) -> float:
        return self.scaled / (1 << self.fmt.frac_bits)

    @property
    def exact(self) -> Fraction:
        return Fraction(self.scaled, 1 << self.fmt.frac_bits)

    def __float__(self) -> float:
        return self.value


def range_of(fmt: FixedPointFormat) -> tuple[Fraction, Fraction]:
    """Exact (min, max) representable values of a format."""
    return fmt.min_value, fmt.max_value


def _div_round(num: int, den: int, rounding: Rounding) -> int:
    """Round num/den to an integer; den > 0."""
    if rounding is Rounding.FLOOR:
        return num // den
    q, r = divmod(num, den)
    if 2 * r > den:
        return q + 1
    if 2 * r < den:
        return q
    return q + 1 if num >= 0 else q  # tie: away from zero


def round_scaled(x, frac_bits: int, rounding: Rounding) -> int:
    """Exact rounding of x * 2**frac_bits to an integer (no range handling)."""
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite value")
        num, den = x.as_integer_ratio()
    elif isinstance(x, Fraction):
        num, den = x.numerator, x.denominator
    else:
        num, den = int(x), 1
    return _div_round(num << frac_bits, den, rounding)


def handle_overflow(scaled: int, fmt: FixedPointFormat, overflow: Overflow) -> tuple[int, bool]:
    """Force a scaled integer into range; returns (result, overflowed)."""
    if fmt.min_scaled <= scaled <= fmt.max_scaled:
        return scaled, False
    if overflow is Overflow.SATURATE:
        return max(fmt.min_scaled, min(fmt.max_scaled, scaled)), True
    half = 1 << (fmt.total_bits - 1)
    return ((scaled + half) % (1 << fmt.total_bits)) - half, True


def quantize(x, fmt: FixedPointFormat,
             rounding: Rounding = Rounding.ROUND,
             overflow: Overflow = Overflow.SATURATE) -> FxNum:
    """Quantize a real value onto the format grid, then overflow-handle it.

    Idempotent: an in-range grid value comes back unchanged.  Raises
    ValueError on non-finite input.
    """
    scaled = round_scaled(x, fmt.frac_bits, rounding)
    scaled, _ = handle_overflow(scaled, fmt, overflow)
    return FxNum(scaled, fmt)


def quantize_flagged(x, fmt: FixedPointFormat,
                     rounding: Rounding = Rounding.ROUND,
                     overflow: Overflow = Overflow.SATURATE) -> tuple[FxNum, bool]:
    """Like quantize, but also reports whether overflow handling fired."""
    scaled = round_scaled(x, fmt.frac_bits, rounding)
    scaled, flagged = handle_overflow(scaled, fmt, overflow)
    return FxNum(scaled, fmt), flagged


def fwl(coeffs: Sequence[float], fmt: FixedPointFormat,
        rounding: Rounding = Rounding.ROUND) -> list[FxNum]:
    """Apply finite-word-length effects element-wise to a coefficient vector.

    Coefficient quantization always saturates: coefficients are a design-time
    artifact, and wrap-mangled coefficients would change the plant rather
    than model arithmetic overflow.
    """
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("empty polynomial")
    return [quantize(c, fmt, rounding, Overflow.SATURATE) for c in coeffs]


def fwl_values(coeffs: Sequence[float], fmt: FixedPointFormat,
               rounding: Rounding = Rounding.ROUND) -> list[float]:
    """fwl() rendered back to floats (exact: grid values are dyadic)."""
    return [q.value for q in fwl(coeffs, fmt, rounding)]


def _check_pair(a: FxNum, b: FxNum) -> FixedPointFormat:
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")
    return a.fmt


def fx_add(a: FxNum, b: FxNum,
           overflow: Overflow = Overflow.WRAP,
           rounding: Rounding = Rounding.ROUND) -> tuple[FxNum, bool]:
    fmt = _check_pair(a, b)
    scaled, flagged = handle_overflow(a.scaled + b.scaled, fmt, overflow)
    return FxNum(scaled, fmt), flagged


def fx_sub(a: FxNum, b: FxNum,
           overflow: Overflow = Overflow.WRAP,
           rounding: Rounding = Rounding.ROUND) -> tuple[FxNum, bool]:
    fmt = _check_pair(a, b)
    scaled, flagged = handle_overflow(a.scaled - b.scaled, fmt, overflow)
    return FxNum(scaled, fmt), flagged


def fx_mul(a: FxNum, b: FxNum,
           overflow: Overflow = Overflow.WRAP,
           rounding: Rounding = Rounding.ROUND) -> tuple[FxNum, bool]:
    fmt = _check_pair(a, b)
    # exact product has 2l fractional bits; rescale with a single rounding
    scaled = _div_round(a.scaled * b.scaled, 1 << fmt.frac_bits, rounding)
    scaled, flagged = handle_overflow(scaled, fmt, overflow)
    return FxNum(scaled, fmt), flagged


def fx_div(a: FxNum, b: FxNum,
           overflow: Overflow = Overflow.WRAP,
           rounding: Rounding = Rounding.ROUND) -> tuple[FxNum, bool]:
    fmt = _check_pair(a, b)
    if b.scaled == 0:
        raise ZeroDivisionError("division by zero")
    num, den = a.scaled << fmt.frac_bits, b.scaled
    if den < 0:
        num, den = -num, -den
    scaled = _div_round(num, den, rounding)
    scaled, flagged = handle_overflow(scaled, fmt, overflow)
    return FxNum(scaled, fmt), flagged
