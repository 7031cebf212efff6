"""The small-plaintext homomorphic cipher.

Encryption of m in Z_u is g^m * h^r mod n with a fresh 2t-bit randomizer r.
Raising a ciphertext to the secret exponent v kills the h component, leaving
g^(mv); full decryption recovers m from that residue (lookup table or
baby-step giant-step), and the cheap zero check only asks whether c^v = 1.
"""

import math
from dataclasses import dataclass

from .counters import OpCounters
from .errors import IntegrityError
from .keys import PublicKey, SecretKey
from .numtheory import mod_pow
from .rng import Rng

# Beyond this the precomputed table stops being reasonable; use BsgsDecoder.
TABLE_CAP = 1 << 24


@dataclass(frozen=True)
class Ciphertext:
    """An element of Z_n^*."""

    value: int

    def to_bytes(self) -> bytes:
        """Minimal big-endian encoding (empty for the impossible value 0)."""
        length = (self.value.bit_length() + 7) // 8
        return self.value.to_bytes(length, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ciphertext":
        return cls(int.from_bytes(data, "big"))


def encrypt(
    pk: PublicKey,
    m: int,
    rng: Rng,
    counters: OpCounters | None = None,
    r: int | None = None,
) -> Ciphertext:
    """Encrypt m in Z_u; r defaults to a uniform 2t-bit randomizer."""
    if not 0 <= m < pk.u:
        raise ValueError(f"plaintext {m} outside Z_u (u={pk.u})")
    if r is None:
        r = rng.getrandbits(2 * pk.params.t)
    if counters is not None:
        counters.encryptions += 1
    value = mod_pow(pk.g, m, pk.n, counters) * mod_pow(pk.h, r, pk.n, counters) % pk.n
    return Ciphertext(value)


def is_zero(sk: SecretKey, c: Ciphertext, counters: OpCounters | None = None) -> bool:
    """True iff c encrypts 0, via the cheap c^v = 1 test."""
    if counters is not None:
        counters.zero_checks += 1
    return mod_pow(c.value, sk.v, sk.n, counters) == 1


class DecryptionTable:
    """Precomputed map from g^(mv) mod n to m, for every m in Z_u."""

    def __init__(self, entries: dict[int, int], u: int):
        self._entries = entries
        self.u = u

    @classmethod
    def build(cls, pk: PublicKey, sk: SecretKey) -> "DecryptionTable":
        if pk.u > TABLE_CAP:
            raise ValueError(
                f"u={pk.u} exceeds the table cap 2^24; use BsgsDecoder instead"
            )
        base = pow(pk.g, sk.v, pk.n)
        entries = {}
        acc = 1
        for m in range(pk.u):
            entries[acc] = m
            acc = acc * base % pk.n
        return cls(entries, pk.u)

    def lookup(self, residue: int) -> int | None:
        return self._entries.get(residue)

    def __len__(self) -> int:
        return len(self._entries)


class BsgsDecoder:
    """Discrete log in the order-u subgroup generated by g^v mod n.

    Uses sqrt(u) memory instead of the full table; interchangeable with
    DecryptionTable wherever a residue->plaintext lookup is needed.
    """

    def __init__(self, pk: PublicKey, sk: SecretKey):
        self.u = pk.u
        self._n = pk.n
        self._base = pow(pk.g, sk.v, pk.n)
        self._step = math.isqrt(pk.u - 1) + 1
        baby = {}
        acc = 1
        for j in range(self._step):
            baby.setdefault(acc, j)
            acc = acc * self._base % self._n
        self._baby = baby
        # base^(-step) without inversion: the subgroup has order u
        self._giant = pow(self._base, self.u - self._step % self.u, self._n)

    def lookup(self, residue: int) -> int | None:
        y = residue % self._n
        for i in range(self.u // self._step + 2):
            j = self._baby.get(y)
            if j is not None:
                m = (i * self._step + j) % self.u
                if pow(self._base, m, self._n) == residue % self._n:
                    return m
            y = y * self._giant % self._n
        return None


def build_table(pk: PublicKey, sk: SecretKey) -> DecryptionTable:
    return DecryptionTable.build(pk, sk)


def decrypt(
    sk: SecretKey,
    table: DecryptionTable | BsgsDecoder,
    c: Ciphertext,
    counters: OpCounters | None = None,
) -> int:
    """Full decryption: m such that c encrypts m."""
    if counters is not None:
        counters.full_decryptions += 1
    residue = mod_pow(c.value, sk.v, sk.n, counters)
    m = table.lookup(residue)
    if m is None:
        raise IntegrityError("ciphertext does not decrypt to any plaintext in Z_u")
    return m


def homomorphic_add(pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Ciphertext of m1 + m2 mod u."""
    return Ciphertext(c1.value * c2.value % pk.n)


def homomorphic_scale(
    pk: PublicKey, c: Ciphertext, s: int, counters: OpCounters | None = None
) -> Ciphertext:
    """Ciphertext of m*s mod u."""
    if s < 0:
        raise ValueError("scale factor must be non-negative")
    return Ciphertext(mod_pow(c.value, s, pk.n, counters))


def blind(
    pk: PublicKey,
    c: Ciphertext,
    s: int,
    s_prime: int,
    counters: OpCounters | None = None,
) -> Ciphertext:
    """c^s * h^s_prime mod n: multiplies the plaintext by a unit s and
    re-randomizes, preserving exactly the zero/nonzero status."""
    if not 1 <= s < pk.u:
        raise ValueError("blinding factor must be a unit in Z_u")
    value = (
        mod_pow(c.value, s, pk.n, counters)
        * mod_pow(pk.h, s_prime, pk.n, counters)
        % pk.n
    )
    return Ciphertext(value)
