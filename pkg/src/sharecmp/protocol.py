"""Two-party secure comparison as explicit role state machines.

Two variants share the encrypt/blind/zero-check tail:

* P1 (baseline): bitwise XOR digits are computed interactively with two
  masked share-product rounds per bit, then combined into per-bit check
  values whose any-zero status encodes the comparison.
* P3 (XOR-free): the digits are plain share differences, combined locally
  with power-of-two weights so that a weighted prefix sum vanishes exactly
  when the leading bits agree. No interaction before the encryption step.

Party A holds the secret key and performs all decryptions and zero checks;
party B blinds, permutes, and learns the outcome from A's final message.
"""

import threading
from dataclasses import dataclass
from enum import Enum

from .cipher import (
    BsgsDecoder,
    Ciphertext,
    DecryptionTable,
    blind,
    decrypt,
    encrypt,
    homomorphic_add,
    homomorphic_scale,
    is_zero,
)
from .counters import OpCounters
from .errors import IntegrityError, ProtocolError
from .keys import PublicKey, SecretKey
from .messages import (
    CBatch,
    ComparisonOutcome,
    GammaBatch,
    Outcome,
    P2Request,
    P2Response,
)
from .numtheory import mod_pow
from .rng import Rng
from .sharing import SharedInteger, local_linear, reconstruct_bit, share_integer


class Role(Enum):
    A = "A"
    B = "B"


class Variant(Enum):
    P1 = "p1"
    P3 = "p3"


@dataclass
class PartySession:
    """One party's state for a single comparison of shared X against Y."""

    role: Role
    pk: PublicKey
    sk: SecretKey | None
    table: DecryptionTable | BsgsDecoder | None
    x_shares: SharedInteger
    y_shares: SharedInteger
    rng: Rng
    counters: OpCounters

    def __post_init__(self):
        if len(self.x_shares) != len(self.y_shares):
            raise ProtocolError("x and y share vectors differ in length")
        if self.role is Role.A and self.sk is None:
            raise ProtocolError("party A needs the secret key")
        if self.role is Role.B and self.sk is not None:
            raise ProtocolError("party B must not hold the secret key")

    @property
    def l(self) -> int:
        return len(self.x_shares)

    @property
    def u(self) -> int:
        return self.pk.u

    def require_role(self, role: Role) -> None:
        if self.role is not role:
            raise ProtocolError(f"operation requires role {role.value}")


def sessions_for_values(
    pk: PublicKey,
    sk: SecretKey,
    table: DecryptionTable | BsgsDecoder | None,
    x: int,
    y: int,
    seed: int,
) -> tuple[PartySession, PartySession]:
    """Share x and y and build a matched session pair (A, B).

    A dealer stream derived from `seed` splits the inputs; the parties get
    independent derived streams for their protocol randomness.
    """
    dealer = Rng(seed)
    l = pk.params.l
    xa, xb = share_integer(x, l, pk.u, dealer)
    ya, yb = share_integer(y, l, pk.u, dealer)
    rng_a = Rng(dealer.getrandbits(64))
    rng_b = Rng(dealer.getrandbits(64))
    a = PartySession(Role.A, pk, sk, table, xa, ya, rng_a, OpCounters())
    b = PartySession(Role.B, pk, None, None, xb, yb, rng_b, OpCounters())
    return a, b


# -- masked share products (the building block of the XOR step) ---------


def p2_request(session: PartySession, p_a: int) -> P2Request:
    """A encrypts its factor share and sends it over."""
    session.require_role(Role.A)
    return P2Request((encrypt(session.pk, p_a % session.u, session.rng,
                              session.counters),))


def p2_respond(
    session: PartySession, request: P2Request, q_b: int, r: int | None = None
) -> tuple[P2Response, int]:
    """B turns E(p_a) into a fresh encryption of p_a*q_b - r and keeps r.

    r defaults to a uniform element of Z_u drawn from B's stream; passing it
    explicitly is for tests only.
    """
    session.require_role(Role.B)
    if len(request.cs) != 1:
        raise ProtocolError("single-round response expects a single ciphertext")
    cs, rs = _respond_products(session, request.cs, (q_b,),
                               None if r is None else (r,))
    return P2Response(cs), rs[0]


def p2_finish(session: PartySession, response: P2Response) -> int:
    """A decrypts its masked product share p_a*q_b - r."""
    session.require_role(Role.A)
    if session.table is None:
        raise ProtocolError("party A needs a decryption backend for this step")
    if len(response.cs) != 1:
        raise ProtocolError("single-round finish expects a single ciphertext")
    return decrypt(session.sk, session.table, response.cs[0], session.counters)


def _respond_products(
    session: PartySession,
    cs: tuple[Ciphertext, ...],
    q_shares: tuple[int, ...],
    rs: tuple[int, ...] | None = None,
) -> tuple[tuple[Ciphertext, ...], tuple[int, ...]]:
    """B-side core of the product round, element-wise over a batch."""
    if len(cs) != len(q_shares):
        raise ProtocolError("product batch length mismatch")
    u = session.u
    if rs is None:
        rs = tuple(session.rng.uniform_below(u) for _ in cs)
    out = []
    for c, q_b, r in zip(cs, q_shares, rs):
        scaled = homomorphic_scale(session.pk, c, q_b % u, session.counters)
        mask = encrypt(session.pk, (-r) % u, session.rng, session.counters)
        out.append(homomorphic_add(session.pk, scaled, mask))
    return tuple(out), rs


def _xor_combine_a(p_a: int, q_a: int, t1_a: int, t2_a: int, u: int) -> int:
    """A's XOR-digit share from its sum/product terms and the two masked
    cross products p_a*q_b - r1 and q_a*p_b - r2."""
    return (p_a + q_a - 2 * (p_a * q_a + t1_a + t2_a)) % u


def _xor_combine_b(p_b: int, q_b: int, r1: int, r2: int, u: int) -> int:
    return (p_b + q_b - 2 * (p_b * q_b + r1 + r2)) % u


def xor_shares(
    session_a: PartySession,
    session_b: PartySession,
    p: tuple[int, int],
    q: tuple[int, int],
) -> tuple[int, int]:
    """In-process XOR of two shared bits: returns (A's share, B's share).

    Runs the two product rounds directly between the sessions; the
    transport-driven path batches the same arithmetic across bits.
    """
    p_a, p_b = p
    q_a, q_b = q
    u = session_a.u
    req1 = p2_request(session_a, p_a)
    resp1, r1 = p2_respond(session_b, req1, q_b)
    t1_a = p2_finish(session_a, resp1)
    req2 = p2_request(session_a, q_a)
    resp2, r2 = p2_respond(session_b, req2, p_b)
    t2_a = p2_finish(session_a, resp2)
    d_a = _xor_combine_a(p_a, q_a, t1_a, t2_a, u)
    d_b = _xor_combine_b(p_b, q_b, r1, r2, u)
    return d_a, d_b


# -- per-bit check values ------------------------------------------------


def compute_c_shares_p1(session: PartySession, d_shares: list[int]) -> list[int]:
    """Baseline check values from XOR digits: bit difference plus one plus
    the count of differing higher bits. The constant is A's to add."""
    l = session.l
    if len(d_shares) != l:
        raise ProtocolError("need one XOR digit share per bit")
    u = session.u
    constant_mine = 1 if session.role is Role.A else 0
    out = []
    for i in range(1, l + 1):
        shares = [session.x_shares.bit(i), session.y_shares.bit(i)]
        coeffs = [1, u - 1]
        for j in range(i + 1, l + 1):
            shares.append(d_shares[j - 1])
            coeffs.append(1)
        out.append(local_linear(shares, coeffs, constant_mine, u))
    return out


def compute_c_shares_p3(session: PartySession) -> list[int]:
    """XOR-free check values, fully local.

    Digit shares are plain differences of the party's x and y shares; the
    higher digits enter with weight 2^(j-i) so the weighted sum vanishes
    exactly when all of them are zero (distinct powers of two cannot cancel),
    and any other zero of the check value still certifies Y > X because the
    most significant nonzero digit dominates the sum's sign.
    """
    l = session.l
    u = session.u
    constant_mine = 1 if session.role is Role.A else 0
    d = [
        (session.x_shares.bit(j) - session.y_shares.bit(j)) % u
        for j in range(1, l + 1)
    ]
    out = []
    for i in range(1, l + 1):
        shares = [session.x_shares.bit(i), session.y_shares.bit(i)]
        coeffs = [1, u - 1]
        for j in range(i + 1, l + 1):
            shares.append(d[j - 1])
            coeffs.append(pow(2, j - i, u))
        out.append(local_linear(shares, coeffs, constant_mine, u))
    return out


# -- encrypt / blind / detect tail ---------------------------------------


def encrypt_c_shares(session: PartySession, alpha: list[int]) -> CBatch:
    """A encrypts each of its check-value shares for B."""
    session.require_role(Role.A)
    return CBatch(
        tuple(encrypt(session.pk, a, session.rng, session.counters) for a in alpha)
    )


def blind_permute(session: PartySession, batch: CBatch, beta: list[int]) -> GammaBatch:
    """B folds in its own shares, blinds each value by a fresh unit, and
    returns the results in a fresh uniformly random order."""
    session.require_role(Role.B)
    l = session.l
    if len(batch.cs) != l or len(beta) != l:
        raise ProtocolError(f"expected {l} ciphertexts and {l} shares")
    pk = session.pk
    u = session.u
    two_t = 2 * pk.params.t
    gammas = []
    for c, b in zip(batch.cs, beta):
        combined = c.value * mod_pow(pk.g, b % u, pk.n, session.counters) % pk.n
        s = 1 + session.rng.uniform_below(u - 1)
        s_prime = session.rng.getrandbits(two_t)
        gammas.append(blind(pk, Ciphertext(combined), s, s_prime, session.counters))
    order = session.rng.permutation(l)
    return GammaBatch(tuple(gammas[i] for i in order))


def detect_zero(session: PartySession, batch: GammaBatch) -> ComparisonOutcome:
    """A zero-checks every blinded value (no short-circuit, so both outcomes
    cost the same) and reports GREATER iff any encrypts zero."""
    session.require_role(Role.A)
    found = False
    for c in batch.cs:
        if is_zero(session.sk, c, session.counters):
            found = True
    return ComparisonOutcome.GREATER if found else ComparisonOutcome.NOT_GREATER


# -- test-support oracle --------------------------------------------------


def lemma1_weight(digits: list[int]) -> int:
    """Exact signed sum of digits[j-1] * 2^j; zero iff every digit is zero.

    Digits must lie in {-1, 0, 1}. This is a plaintext oracle for tests,
    not a protocol step.
    """
    total = 0
    for j, d in enumerate(digits, start=1):
        if d not in (-1, 0, 1):
            raise ValueError(f"digit {d} outside {{-1, 0, 1}}")
        total += d << j
    return total


# -- transport-driven drivers --------------------------------------------


def _xor_phase_a(session: PartySession, endpoint, batched: bool) -> list[int]:
    l = session.l
    u = session.u
    xa = session.x_shares.bits
    ya = session.y_shares.bits
    if batched:
        t1 = _product_round_a(session, endpoint, xa)
        t2 = _product_round_a(session, endpoint, ya)
    else:
        t1, t2 = [], []
        for i in range(l):
            t1.extend(_product_round_a(session, endpoint, (xa[i],)))
            t2.extend(_product_round_a(session, endpoint, (ya[i],)))
    return [
        _xor_combine_a(xa[i], ya[i], t1[i], t2[i], u) for i in range(l)
    ]


def _product_round_a(session: PartySession, endpoint, factors) -> list[int]:
    request = P2Request(
        tuple(
            encrypt(session.pk, f % session.u, session.rng, session.counters)
            for f in factors
        )
    )
    endpoint.send(request)
    response = _expect(endpoint.receive(), P2Response)
    if len(response.cs) != len(factors):
        raise ProtocolError("response cardinality does not match request")
    return [
        decrypt(session.sk, session.table, c, session.counters)
        for c in response.cs
    ]


def _xor_phase_b(session: PartySession, endpoint, batched: bool) -> list[int]:
    l = session.l
    u = session.u
    xb = session.x_shares.bits
    yb = session.y_shares.bits
    if batched:
        r1 = _product_round_b(session, endpoint, yb)
        r2 = _product_round_b(session, endpoint, xb)
    else:
        r1, r2 = [], []
        for i in range(l):
            r1.extend(_product_round_b(session, endpoint, (yb[i],)))
            r2.extend(_product_round_b(session, endpoint, (xb[i],)))
    return [
        _xor_combine_b(xb[i], yb[i], r1[i], r2[i], u) for i in range(l)
    ]


def _product_round_b(session: PartySession, endpoint, q_shares) -> list[int]:
    request = _expect(endpoint.receive(), P2Request)
    if len(request.cs) != len(q_shares):
        raise ProtocolError("request cardinality does not match share batch")
    cs, rs = _respond_products(session, request.cs, tuple(q_shares))
    endpoint.send(P2Response(cs))
    return list(rs)


def _expect(message, expected_type):
    if not isinstance(message, expected_type):
        raise ProtocolError(
            f"expected {expected_type.__name__}, got {type(message).__name__}"
        )
    return message


def run_party_a(
    session: PartySession,
    endpoint,
    variant: Variant,
    batched: bool = True,
) -> ComparisonOutcome:
    """Drive role A over a transport endpoint; returns the outcome."""
    session.require_role(Role.A)
    if variant is Variant.P1:
        d_shares = _xor_phase_a(session, endpoint, batched)
        alpha = compute_c_shares_p1(session, d_shares)
    else:
        alpha = compute_c_shares_p3(session)
    endpoint.send(encrypt_c_shares(session, alpha))
    gamma = _expect(endpoint.receive(), GammaBatch)
    outcome = detect_zero(session, gamma)
    endpoint.send(Outcome(outcome))
    return outcome


def run_party_b(
    session: PartySession,
    endpoint,
    variant: Variant,
    batched: bool = True,
) -> ComparisonOutcome:
    """Drive role B over a transport endpoint; returns the outcome A sent."""
    session.require_role(Role.B)
    if variant is Variant.P1:
        d_shares = _xor_phase_b(session, endpoint, batched)
        beta = compute_c_shares_p1(session, d_shares)
    else:
        beta = compute_c_shares_p3(session)
    batch = _expect(endpoint.receive(), CBatch)
    endpoint.send(blind_permute(session, batch, beta))
    return _expect(endpoint.receive(), Outcome).result


def run_party(session, endpoint, variant, batched: bool = True) -> ComparisonOutcome:
    if session.role is Role.A:
        return run_party_a(session, endpoint, variant, batched)
    return run_party_b(session, endpoint, variant, batched)


def _audit_p3_no_wraparound(
    session_a: PartySession, session_b: PartySession
) -> None:
    """Cross-check, with both halves visible, that every XOR-free check
    value stays strictly inside (-u, u), so vanishing mod u equals
    vanishing over the integers. Test/debug instrumentation only."""
    u = session_a.u
    l = session_a.l
    x_bits = [
        reconstruct_bit(session_a.x_shares.bit(i), session_b.x_shares.bit(i), u)
        for i in range(1, l + 1)
    ]
    y_bits = [
        reconstruct_bit(session_a.y_shares.bit(i), session_b.y_shares.bit(i), u)
        for i in range(1, l + 1)
    ]
    alpha = compute_c_shares_p3(session_a)
    beta = compute_c_shares_p3(session_b)
    for i in range(1, l + 1):
        c_int = x_bits[i - 1] - y_bits[i - 1] + 1 + sum(
            (x_bits[j - 1] - y_bits[j - 1]) << (j - i) for j in range(i + 1, l + 1)
        )
        if not -u < c_int < u:
            raise IntegrityError(f"check value c_{i} = {c_int} wrapped around u = {u}")
        if (alpha[i - 1] + beta[i - 1]) % u != c_int % u:
            raise IntegrityError(f"share reconstruction of c_{i} disagrees")


def run_comparison(
    variant: Variant,
    session_a: PartySession,
    session_b: PartySession,
    transport_pair=None,
    batched: bool = True,
    audit: bool = False,
) -> ComparisonOutcome:
    """Run one full comparison between two in-process sessions.

    The parties execute concurrently over the given endpoint pair (an
    in-memory pair is created when none is supplied). With audit=True the
    XOR-free variant also verifies the no-wraparound property from the
    plaintext side before running.
    """
    if session_a.l != session_b.l:
        raise ProtocolError("sessions disagree on the bit length")
    if transport_pair is None:
        from .transport import memory_pair

        transport_pair = memory_pair()
    ep_a, ep_b = transport_pair
    if audit and variant is Variant.P3:
        _audit_p3_no_wraparound(session_a, session_b)

    result_a: list[ComparisonOutcome] = []
    errors: list[BaseException] = []

    def drive_a():
        try:
            result_a.append(run_party_a(session_a, ep_a, variant, batched))
        except BaseException as exc:  # noqa: BLE001 - reraised below
            errors.append(exc)

    worker = threading.Thread(target=drive_a, name="party-a")
    worker.start()
    try:
        outcome_b = run_party_b(session_b, ep_b, variant, batched)
    finally:
        worker.join(timeout=60.0)
    if errors:
        raise errors[0]
    if not result_a:
        raise ProtocolError("party A did not complete")
    if result_a[0] is not outcome_b:
        raise ProtocolError("parties disagree on the outcome")
    return outcome_b
