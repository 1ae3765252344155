"""Integer encodings: pairing, structural numbering, block codes, input codes.

Every code is an arbitrary-precision natural so codes of all kinds can live in
one membership set; there are no overflow semantics anywhere.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from math import isqrt

from .formula import Assignment, assignment_index

# Pairing a pair of serialization-sized naturals squares their magnitude, so
# codes routinely run to tens of thousands of decimal digits. The interpreter's
# int/str conversion guard is sized for untrusted input, not for that; lift it
# high enough that code files and transcripts always render.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(), 2_000_000))

# Structural numbers are plain naturals; nothing about them needs wrapping.
GodelNumber = int


def pair(a: int, b: int) -> int:
    """Cantor pairing: a bijection between pairs of naturals and naturals."""
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    """Exact inverse of pair."""
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def godel_number(p) -> GodelNumber:
    """Structural number of a problem: its canonical serialization as a base-256 natural.

    Problems with equal canonical form share a number; distinct forms can not
    collide because the serialization is injective, never empty, and never
    starts with a NUL byte.
    """
    return int.from_bytes(p.canonical_key().encode("utf-8"), "big")


@dataclass(frozen=True)
class PartitionCode:
    """Code for the block of a problem's assignments sharing one true-count."""

    true_count: int
    godel: GodelNumber
    code: int


def partition_code(f, t: int) -> PartitionCode:
    """Pair the true-count t with the problem's structural number."""
    if not 0 <= t <= f.k:
        raise ValueError(f"true-count {t} out of range [0, {f.k}]")
    g = godel_number(f)
    return PartitionCode(t, g, pair(t, g))


def decode_partition_code(code: int) -> tuple[int, GodelNumber]:
    """Recover (true_count, structural number) from a block code."""
    return unpair(code)


@dataclass(frozen=True)
class InputCode:
    """Reversible code of (machine index, one assignment, padding length).

    `bits` is the assignment as a 0/1 string, position j = literal j.
    """

    machine_index: int
    bits: str
    padding_length: int
    code: int

    @property
    def k(self) -> int:
        return len(self.bits)

    def assignment(self) -> Assignment:
        return tuple(ch == "1" for ch in self.bits)


def input_code(i: int, a: Assignment, n: int = 0) -> InputCode:
    """Encode the triple (i, a, n).

    The assignment is framed with a leading 1 bit so its length survives the
    round trip; the frame and padding are paired, then paired with i.
    """
    framed = (1 << len(a)) | assignment_index(a)
    code = pair(i, pair(framed, n))
    bits = "".join("1" if v else "0" for v in a)
    return InputCode(i, bits, n, code)


def decode_input_code(code: int) -> InputCode:
    """Recover the full triple from an input code."""
    i, rest = unpair(code)
    framed, n = unpair(rest)
    if framed < 1:
        raise ValueError(f"{code} is not an input code (empty frame)")
    k = framed.bit_length() - 1
    value = framed ^ (1 << k)
    bits = "".join("1" if (value >> j) & 1 else "0" for j in range(k))
    return InputCode(i, bits, n, code)
