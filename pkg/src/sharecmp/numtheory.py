"""Modular arithmetic, primality testing, prime sampling, and CRT."""

import math

from .counters import OpCounters
from .rng import Rng

# Trial-division prefilter for Miller-Rabin candidates.
_SMALL_PRIME_LIMIT = 2000


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i in range(limit) if flags[i]]


_SMALL_PRIMES = _sieve(_SMALL_PRIME_LIMIT)

# 2^(-80) error bound with the standard 4^(-rounds) estimate.
DEFAULT_MR_ROUNDS = 40


def mod_pow(
    base: int, exp: int, modulus: int, counters: OpCounters | None = None
) -> int:
    """base**exp mod modulus; counted when a counter context is supplied."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    if counters is not None:
        counters.modexps += 1
    return pow(base, exp, modulus)


def is_probable_prime(
    n: int, rounds: int = DEFAULT_MR_ROUNDS, rng: Rng | None = None
) -> bool:
    """Miller-Rabin: always true for primes, false for composites with
    probability at least 1 - 4**(-rounds).

    Witness bases come from `rng` when given (keeps key generation
    reproducible) and from OS entropy otherwise.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    # n is odd and > _SMALL_PRIME_LIMIT here
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    draw = rng.uniform_below if rng is not None else _entropy_below
    for _ in range(rounds):
        a = 2 + draw(n - 3)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _entropy_below(bound: int) -> int:
    import secrets

    return secrets.randbelow(bound)


def random_prime(bits: int, rng: Rng, rounds: int = DEFAULT_MR_ROUNDS) -> int:
    """Probable prime with exactly `bits` bits (top bit set)."""
    if bits < 2:
        raise ValueError("a prime needs at least 2 bits")
    while True:
        candidate = (1 << (bits - 1)) | rng.getrandbits(bits - 1)
        if bits > 2:
            candidate |= 1
        if is_probable_prime(candidate, rounds, rng):
            return candidate


def random_prime_in_range(
    lo: int, hi: int, rng: Rng, rounds: int = DEFAULT_MR_ROUNDS
) -> int:
    """Probable prime uniform over [lo, hi]; raises if the range has none."""
    if lo > hi:
        raise ValueError("empty range")
    width = hi - lo + 1
    # Enough draws that a prime-free window is overwhelmingly unlikely to be
    # mistaken for one; small windows get a deterministic sweep instead.
    if width <= 64:
        candidates = [c for c in range(lo, hi + 1) if is_probable_prime(c, rounds, rng)]
        if not candidates:
            raise ValueError(f"no prime in [{lo}, {hi}]")
        return candidates[rng.uniform_below(len(candidates))]
    for _ in range(200 * max(hi.bit_length(), 1)):
        candidate = lo + rng.uniform_below(width)
        if candidate > 2:
            candidate |= 1
        if candidate > hi:
            continue
        if is_probable_prime(candidate, rounds, rng):
            return candidate
    raise ValueError(f"no prime found in [{lo}, {hi}]")


def crt_combine(a_p: int, a_q: int, p: int, q: int) -> int:
    """The unique x in [0, p*q) with x ≡ a_p (mod p) and x ≡ a_q (mod q)."""
    if math.gcd(p, q) != 1:
        raise ValueError("moduli must be coprime")
    inv = pow(p, -1, q)
    return (a_p % p) + p * ((a_q - a_p) * inv % q)
