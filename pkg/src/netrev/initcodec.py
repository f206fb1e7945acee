"""Codec for sized Verilog binary/hex literals carrying LUT configurations.

Bit index i of the decoded vector is the gate output for the input assignment
whose j-th pin (in the LUT's declared pin order, pin 0 least significant)
equals bit j of i.
"""

from __future__ import annotations

import re

from .errors import InitFormatError

_LITERAL_RE = re.compile(r"^\s*(\d+)\s*'\s*([bBhH])\s*([0-9a-fA-F_xXzZ]+)\s*$")


def parse_sized_literal(literal: str) -> tuple[int, int]:
    """Parse ``<width>'b...`` / ``<width>'h...`` into (width, value)."""
    m = _LITERAL_RE.match(literal)
    if not m:
        raise InitFormatError(f"malformed sized literal {literal!r}")
    width = int(m.group(1))
    base = m.group(2).lower()
    digits = m.group(3).replace("_", "")
    if not digits:
        raise InitFormatError(f"sized literal {literal!r} has no digits")
    if width <= 0:
        raise InitFormatError(f"sized literal {literal!r} has zero width")
    try:
        value = int(digits, 2 if base == "b" else 16)
    except ValueError:
        raise InitFormatError(f"invalid digits in sized literal {literal!r}") from None
    digit_bits = len(digits) if base == "b" else 4 * len(digits)
    # Verilog zero-extends short literals; reject literals that cannot fit.
    if digit_bits > width and value >> width:
        raise InitFormatError(f"value of {literal!r} does not fit in {width} bits")
    return width, value


def decode_init(literal: str, input_count: int) -> list[int]:
    """Decode a LUT config literal into its 2**input_count output bits."""
    width, value = parse_sized_literal(literal)
    expected = 1 << input_count
    if width != expected:
        raise InitFormatError(
            f"LUT config {literal!r} is {width} bits wide, "
            f"need {expected} for {input_count} inputs"
        )
    return [(value >> i) & 1 for i in range(expected)]


def encode_init(bits: list[int], base: str = "b") -> str:
    """Encode output bits back into a canonical sized literal."""
    width = len(bits)
    if width == 0 or width & (width - 1):
        raise InitFormatError(f"bit vector length {width} is not a power of two")
    value = 0
    for i, bit in enumerate(bits):
        if bit:
            value |= 1 << i
    if base == "b":
        return f"{width}'b{value:0{width}b}"
    if base == "h":
        return f"{width}'h{value:0{(width + 3) // 4}X}"
    raise InitFormatError(f"unsupported literal base {base!r}")


def literal_base(literal: str) -> str:
    """The base letter of a literal, for re-encoding in the same style."""
    m = _LITERAL_RE.match(literal)
    if not m:
        raise InitFormatError(f"malformed sized literal {literal!r}")
    return m.group(2).lower()
