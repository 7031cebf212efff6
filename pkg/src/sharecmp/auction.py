"""Sealed-bid auction loop over the XOR-free comparison.

Two servers hold additive shares of the current highest bid; each incoming
bid arrives pre-shared, is compared against the incumbent without either
server seeing any plaintext, and replaces the incumbent only when strictly
greater (ties lose). Closing the auction opens the final maximum.
"""

from dataclasses import dataclass, field

from .cipher import BsgsDecoder, DecryptionTable
from .counters import OpCounters
from .errors import IntegrityError
from .keys import PublicKey, SecretKey
from .messages import ComparisonOutcome
from .protocol import PartySession, Role, Variant, run_comparison
from .rng import Rng
from .sharing import SharedInteger, reconstruct_bit, reconstruct_integer, share_integer


@dataclass(frozen=True)
class BidSubmission:
    """A bidder's value, already split: one half per auction server."""

    bidder_id: str
    share_for_a: SharedInteger
    share_for_b: SharedInteger


@dataclass
class AuctionState:
    """One auction server's view: its half of the incumbent bid plus a
    plaintext history of round outcomes (never of bid values)."""

    role: Role
    pk: PublicKey
    sk: SecretKey | None
    table: DecryptionTable | BsgsDecoder | None
    rng: Rng
    counters: OpCounters
    high_shares: SharedInteger
    round: int = 0
    history: list[tuple[int, str, ComparisonOutcome]] = field(default_factory=list)

    def inspect_stored_fields(self) -> dict:
        """Everything bid-derived this party retains, for audit tests."""
        return {
            "high_shares": self.high_shares.bits,
            "round": self.round,
            "history": [(r, b, o.value) for r, b, o in self.history],
        }


def new_auction(
    pk: PublicKey,
    sk: SecretKey,
    table: DecryptionTable | BsgsDecoder | None,
    rng_a: Rng,
    rng_b: Rng,
    dealer_rng: Rng,
) -> tuple[AuctionState, AuctionState]:
    """Open an auction with the highest bid initialized to a sharing of 0."""
    l = pk.params.l
    zero_a, zero_b = share_integer(0, l, pk.u, dealer_rng)
    state_a = AuctionState(Role.A, pk, sk, table, rng_a, OpCounters(), zero_a)
    state_b = AuctionState(Role.B, pk, None, None, rng_b, OpCounters(), zero_b)
    return state_a, state_b


def make_bid(bidder_id: str, value: int, l: int, u: int, rng: Rng) -> BidSubmission:
    """What a bidder sends: fresh shares of its value for each server."""
    half_a, half_b = share_integer(value, l, u, rng)
    return BidSubmission(bidder_id, half_a, half_b)


def submit_bid(
    state_a: AuctionState,
    state_b: AuctionState,
    bid: BidSubmission,
    transport_pair=None,
    audit: bool = False,
) -> ComparisonOutcome:
    """Compare a bid against the incumbent and update both states.

    GREATER replaces the incumbent's shares with the bid's; otherwise the
    state is unchanged. With audit=True the bid's shares are first checked
    to reconstruct to bits, and a malformed bid is rejected without
    touching the auction state.
    """
    l = state_a.pk.params.l
    u = state_a.pk.u
    if len(bid.share_for_a) != l or len(bid.share_for_b) != l:
        raise IntegrityError("bid share vectors have the wrong length")
    if audit:
        for i in range(1, l + 1):
            reconstruct_bit(bid.share_for_a.bit(i), bid.share_for_b.bit(i), u)

    session_a = PartySession(
        Role.A, state_a.pk, state_a.sk, state_a.table,
        state_a.high_shares, bid.share_for_a, state_a.rng, state_a.counters,
    )
    session_b = PartySession(
        Role.B, state_b.pk, None, None,
        state_b.high_shares, bid.share_for_b, state_b.rng, state_b.counters,
    )
    outcome = run_comparison(
        Variant.P3, session_a, session_b, transport_pair, audit=audit
    )
    if outcome is ComparisonOutcome.GREATER:
        state_a.high_shares = bid.share_for_a
        state_b.high_shares = bid.share_for_b
    for state in (state_a, state_b):
        state.history.append((state.round, bid.bidder_id, outcome))
        state.round += 1
    return outcome


def close_auction(state_a: AuctionState, state_b: AuctionState) -> int:
    """Open the incumbent: both halves combine into the winning amount."""
    return reconstruct_integer(
        state_a.high_shares, state_b.high_shares, state_a.pk.u
    )


def winning_bidder(state: AuctionState) -> tuple[int, str] | None:
    """Round index and bidder id of the last strict improvement, if any."""
    winner = None
    for round_index, bidder_id, outcome in state.history:
        if outcome is ComparisonOutcome.GREATER:
            winner = (round_index, bidder_id)
    return winner
