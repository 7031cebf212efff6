"""Additive sharing over Z_u of bit-decomposed integers.

Bit indexing is 1-based with bit 1 the least significant and bit l the most
significant; a SharedInteger stores one party's residues in that order.
"""

from dataclasses import dataclass

from .errors import IntegrityError
from .rng import Rng


@dataclass(frozen=True)
class SharedInteger:
    """One party's half of a bitwise-shared l-bit integer (LSB first)."""

    bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def bit(self, i: int) -> int:
        """Share of bit i, 1-based from the least significant end."""
        if not 1 <= i <= len(self.bits):
            raise IndexError(f"bit index {i} outside 1..{len(self.bits)}")
        return self.bits[i - 1]


def share_integer(
    x: int, l: int, u: int, rng: Rng
) -> tuple[SharedInteger, SharedInteger]:
    """Split the bits of x into uniform additive shares mod u."""
    if not 0 <= x < 1 << l:
        raise ValueError(f"value {x} does not fit in {l} bits")
    half_a, half_b = [], []
    for i in range(l):
        bit = (x >> i) & 1
        a = rng.uniform_below(u)
        half_a.append(a)
        half_b.append((bit - a) % u)
    return SharedInteger(tuple(half_a)), SharedInteger(tuple(half_b))


def reconstruct_bit(a: int, b: int, u: int) -> int:
    """Combine two shares of a bit; anything outside {0, 1} is corruption."""
    value = (a + b) % u
    if value not in (0, 1):
        raise IntegrityError(f"shares reconstruct to {value}, not a bit")
    return value


def reconstruct_integer(sa: SharedInteger, sb: SharedInteger, u: int) -> int:
    """Combine two SharedInteger halves back into the plaintext value."""
    if len(sa) != len(sb):
        raise ValueError("share vectors differ in length")
    total = 0
    for i, (a, b) in enumerate(zip(sa.bits, sb.bits)):
        total |= reconstruct_bit(a, b, u) << i
    return total


def local_linear(
    shares: list[int], coeffs: list[int], constant: int, u: int
) -> int:
    """One party's share of sum(coeffs[j] * value[j]) + constant, mod u.

    Linear functions of shared values are computed share-wise; the caller
    is responsible for adding the constant on exactly one side.
    """
    if len(shares) != len(coeffs):
        raise ValueError("shares and coefficients differ in length")
    total = constant
    for s, c in zip(shares, coeffs):
        total += c * s
    return total % u
