"""Seedable deterministic random stream.

All protocol randomness flows through injected Rng handles so any run can be
reproduced bit-for-bit from its seeds. The stream is a SHA-256 counter
generator: block i is SHA-256(seed_bytes || i).
"""

import hashlib
import secrets


class Rng:
    """Deterministic byte stream keyed by a 64-bit seed.

    Equal seeds produce identical output streams. Instances are cheap and
    single-owner: never share one across concurrent sessions.
    """

    def __init__(self, seed: int):
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self._key = seed.to_bytes(8, "big")
        self._counter = 0
        self._pool = b""

    @classmethod
    def from_entropy(cls) -> "Rng":
        """Rng seeded from OS entropy, for production entry points."""
        return cls(secrets.randbits(64))

    def take_bytes(self, n: int) -> bytes:
        if n < 0:
            raise ValueError("byte count must be non-negative")
        while len(self._pool) < n:
            block = hashlib.sha256(
                self._key + self._counter.to_bytes(16, "big")
            ).digest()
            self._counter += 1
            self._pool += block
        out, self._pool = self._pool[:n], self._pool[n:]
        return out

    def getrandbits(self, k: int) -> int:
        """Uniform integer in [0, 2**k)."""
        if k < 0:
            raise ValueError("bit count must be non-negative")
        if k == 0:
            return 0
        nbytes = (k + 7) // 8
        value = int.from_bytes(self.take_bytes(nbytes), "big")
        return value >> (8 * nbytes - k)

    def uniform_below(self, bound: int) -> int:
        """Uniform integer in [0, bound), by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        k = (bound - 1).bit_length()
        while True:
            value = self.getrandbits(k)
            if value < bound:
                return value

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.uniform_below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
