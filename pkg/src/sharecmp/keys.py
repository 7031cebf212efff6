"""Key material for the small-plaintext homomorphic scheme.

The modulus is n = p*q with p = 2*u*v_p*f_p + 1 and q = 2*u*v_q*f_q + 1 for
prime cofactors f_p, f_q, so that u and v_p divide p-1 and u and v_q divide
q-1. g is assembled by CRT from elements of order u*v_p mod p and u*v_q
mod q, giving order u*v_p*v_q = u*v mod n; h likewise from orders v_p and
v_q, giving order v.
"""

import json
import math
from dataclasses import dataclass, field

from .errors import KeyConfigError
from .numtheory import (
    crt_combine,
    is_probable_prime,
    random_prime,
    random_prime_in_range,
)
from .rng import Rng


@dataclass(frozen=True)
class Params:
    """Size parameters: k bits of modulus, t bits of v, l bits per compared
    integer. Must satisfy k > t > l."""

    k: int
    t: int
    l: int

    def __post_init__(self):
        if self.l < 1:
            raise KeyConfigError("l must be at least 1")
        if not self.k > self.t > self.l:
            raise KeyConfigError(
                f"parameters must satisfy k > t > l, got k={self.k} t={self.t} l={self.l}"
            )


@dataclass(frozen=True)
class PublicKey:
    n: int
    g: int
    h: int
    u: int
    params: Params


@dataclass(frozen=True)
class SecretKey:
    p: int
    q: int
    v_p: int
    v_q: int

    @property
    def v(self) -> int:
        return self.v_p * self.v_q

    @property
    def n(self) -> int:
        return self.p * self.q


def _element_of_order(modulus: int, group_order: int, target: int,
                      target_prime_factors: tuple[int, ...], rng: Rng) -> int:
    """Element of exact multiplicative order `target` mod a prime `modulus`.

    Requires target | group_order (= modulus - 1). Raises a random element
    to the cofactor power, then rejects unless no proper prime-divisor
    quotient collapses to 1.
    """
    cofactor = group_order // target
    while True:
        x = 2 + rng.uniform_below(modulus - 3)
        e = pow(x, cofactor, modulus)
        if e == 1:
            continue
        if all(pow(e, target // w, modulus) != 1 for w in target_prime_factors):
            return e


def _build_generators(p: int, q: int, u: int, v_p: int, v_q: int,
                      rng: Rng) -> tuple[int, int]:
    g_p = _element_of_order(p, p - 1, u * v_p, (u, v_p), rng)
    g_q = _element_of_order(q, q - 1, u * v_q, (u, v_q), rng)
    h_p = _element_of_order(p, p - 1, v_p, (v_p,), rng)
    h_q = _element_of_order(q, q - 1, v_q, (v_q,), rng)
    g = crt_combine(g_p, g_q, p, q)
    h = crt_combine(h_p, h_q, p, q)
    return g, h


def from_factors(p: int, q: int, v_p: int, v_q: int, u: int, params: Params,
                 rng: Rng) -> tuple[PublicKey, SecretKey]:
    """Assemble a key pair from explicit primes (used for desk-scale keys).

    The primes must already satisfy the divisibility constraints; g and h
    are constructed with the prescribed orders.
    """
    for name, value in (("p", p), ("q", q), ("v_p", v_p), ("v_q", v_q), ("u", u)):
        if not is_probable_prime(value, rng=rng):
            raise KeyConfigError(f"{name} = {value} is not prime")
    if (p - 1) % (u * v_p) != 0 or (q - 1) % (u * v_q) != 0:
        raise KeyConfigError("need u*v_p | p-1 and u*v_q | q-1")
    if len({u, v_p, v_q}) != 3 or p == q:
        raise KeyConfigError("u, v_p, v_q must be pairwise distinct and p != q")
    g, h = _build_generators(p, q, u, v_p, v_q, rng)
    return PublicKey(p * q, g, h, u, params), SecretKey(p, q, v_p, v_q)


def _prime_with_factor(base: int, p_lo: int, p_hi: int,
                       rng: Rng) -> tuple[int, int] | None:
    """Prime p = base*f + 1 with prime f and p in [p_lo, p_hi], or None.

    Repeated factors (f colliding with u, v_p, v_q) are fine: the order
    construction only needs the target divisors present in p - 1.
    """
    f_lo = max(2, -(-(p_lo - 1) // base))
    f_hi = (p_hi - 1) // base
    if f_lo > f_hi:
        return None
    for _ in range(600 * max(p_hi.bit_length(), 8)):
        try:
            f = random_prime_in_range(f_lo, f_hi, rng)
        except ValueError:
            return None
        p = base * f + 1
        if is_probable_prime(p, rng=rng):
            return p, f
    return None


def generate_keys(params: Params, rng: Rng,
                  allow_tiny: bool = False) -> tuple[PublicKey, SecretKey]:
    """Generate a key pair satisfying every invariant, deterministically
    under a fixed rng seed.

    Standard sizing puts v_p and v_q at ceil(t/2)+1 bits (so v exceeds t
    bits) and places p, q in the window that makes n exactly k bits. When
    the parameters are too tight for that, `allow_tiny` instead shrinks
    v_p/v_q and widens the cofactor window until primes exist, and the
    returned key records the effective k and t it actually achieves;
    without the flag such parameters raise KeyConfigError.
    """
    k, t, l = params.k, params.t, params.l
    if k % 2 != 0:
        raise KeyConfigError("k must be even to split the modulus evenly")
    u_bits = l + 2
    v_bits = (t + 1) // 2 + 1

    half = k // 2
    strict = half > u_bits + v_bits + 8
    if not strict and not allow_tiny:
        raise KeyConfigError(
            f"k={k} leaves no room for cofactor primes (need k/2 > {u_bits + v_bits + 8}); "
            "use tiny-key test mode for desk-scale parameters"
        )

    if strict:
        # p, q >= ceil(sqrt(2^(k-1))) makes n exactly k bits.
        p_lo = math.isqrt((1 << (k - 1)) - 1) + 1
        p_hi = (1 << half) - 1
    else:
        v_bits = max(2, min(v_bits, half - u_bits - 3))
        p_lo, p_hi = 3, (1 << half) - 1

    while True:
        u = random_prime(u_bits, rng)
        v_p = random_prime(v_bits, rng)
        while v_p == u:
            v_p = random_prime(v_bits, rng)
        v_q = random_prime(v_bits, rng)
        while v_q in (u, v_p):
            v_q = random_prime(v_bits, rng)

        got_p = _prime_with_factor(2 * u * v_p, p_lo, p_hi, rng, {u, v_p, v_q})
        if got_p is None:
            continue
        p, f_p = got_p
        got_q = _prime_with_factor(2 * u * v_q, p_lo, p_hi, rng, {u, v_p, v_q, f_p})
        if got_q is None:
            continue
        q, f_q = got_q
        if p == q:
            continue
        break

    effective = params
    if not strict:
        n_bits = (p * q).bit_length()
        t_eff = min(t, (v_p * v_q).bit_length())
        if not n_bits > t_eff > l:
            raise KeyConfigError(
                f"tiny-key mode produced k={n_bits}, t={t_eff}, l={l}; "
                "no valid ordering k > t > l is reachable"
            )
        effective = Params(n_bits, t_eff, l)

    g, h = _build_generators(p, q, u, v_p, v_q, rng)
    return PublicKey(p * q, g, h, u, effective), SecretKey(p, q, v_p, v_q)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))

    @property
    def all_ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def format(self) -> str:
        lines = [
            f"[{'PASS' if c.passed else 'FAIL'}] {c.name}"
            + (f": {c.detail}" if c.detail else "")
            for c in self.checks
        ]
        verdict = "all checks passed" if self.all_ok else (
            f"{len(self.failures())} check(s) FAILED"
        )
        return "\n".join(lines + [verdict])


def validate_keys(pk: PublicKey, sk: SecretKey) -> ValidationReport:
    """Check every structural invariant of a key pair, reporting each."""
    rep = ValidationReport()
    p, q, v_p, v_q = sk.p, sk.q, sk.v_p, sk.v_q
    n, g, h, u = pk.n, pk.g, pk.h, pk.u
    v = sk.v
    k, t, l = pk.params.k, pk.params.t, pk.params.l

    for name, value in (("p", p), ("q", q), ("u", u), ("v_p", v_p), ("v_q", v_q)):
        rep.add(f"{name} prime", is_probable_prime(value), str(value))
    rep.add("p and q distinct", p != q)
    rep.add("u, v_p, v_q pairwise distinct", len({u, v_p, v_q}) == 3)
    rep.add("n = p*q", n == p * q)
    rep.add("v_p divides p-1", (p - 1) % v_p == 0)
    rep.add("v_q divides q-1", (q - 1) % v_q == 0)
    rep.add("u divides p-1", (p - 1) % u == 0)
    rep.add("u divides q-1", (q - 1) % u == 0)
    rep.add("n has k bits", n.bit_length() == k,
            f"{n.bit_length()} vs k={k}")
    rep.add("u has l+2 bits", u.bit_length() == l + 2,
            f"{u.bit_length()} vs l+2={l + 2}")
    rep.add("v has at least t bits", v.bit_length() >= t,
            f"{v.bit_length()} vs t={t}")
    rep.add("g invertible mod n", math.gcd(g, n) == 1)
    rep.add("h invertible mod n", math.gcd(h, n) == 1)

    rep.add("h^v = 1", pow(h, v, n) == 1)
    order_h_exact = all(pow(h, v // w, n) != 1 for w in {v_p, v_q})
    rep.add("order of h is exactly v", pow(h, v, n) == 1 and order_h_exact)
    rep.add("g^(uv) = 1", pow(g, u * v, n) == 1)
    order_g_exact = all(pow(g, u * v // w, n) != 1 for w in {u, v_p, v_q})
    rep.add("order of g is exactly uv", pow(g, u * v, n) == 1 and order_g_exact)
    return rep


# -- key file I/O -------------------------------------------------------

_BIG_FIELDS = ("n", "g", "h", "u")
_SECRET_FIELDS = ("p", "q", "v_p", "v_q")


def key_to_dict(pk: PublicKey, sk: SecretKey | None = None) -> dict:
    """JSON-ready dict; big integers as base-10 strings. Omits the secret
    half when sk is None (public-only export)."""
    data = {
        "k": pk.params.k,
        "t": pk.params.t,
        "l": pk.params.l,
        "n": str(pk.n),
        "g": str(pk.g),
        "h": str(pk.h),
        "u": str(pk.u),
    }
    if sk is not None:
        data.update(
            p=str(sk.p), q=str(sk.q), v_p=str(sk.v_p), v_q=str(sk.v_q)
        )
    return data


def key_from_dict(data: dict) -> tuple[PublicKey, SecretKey | None]:
    params = Params(int(data["k"]), int(data["t"]), int(data["l"]))
    pk = PublicKey(
        n=int(data["n"]), g=int(data["g"]), h=int(data["h"]), u=int(data["u"]),
        params=params,
    )
    if all(f in data for f in _SECRET_FIELDS):
        sk = SecretKey(
            p=int(data["p"]), q=int(data["q"]),
            v_p=int(data["v_p"]), v_q=int(data["v_q"]),
        )
        return pk, sk
    return pk, None


def save_key_file(path: str, pk: PublicKey, sk: SecretKey | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(key_to_dict(pk, sk), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_key_file(path: str) -> tuple[PublicKey, SecretKey | None]:
    with open(path, encoding="utf-8") as fh:
        return key_from_dict(json.load(fh))
