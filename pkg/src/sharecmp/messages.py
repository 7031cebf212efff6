"""Wire messages exchanged by the comparison protocols and the auction."""

from dataclasses import dataclass
from enum import Enum
from typing import Union

from .cipher import Ciphertext


class ComparisonOutcome(Enum):
    """GREATER means the challenger value Y exceeds the incumbent X."""

    GREATER = "greater"
    NOT_GREATER = "not_greater"


@dataclass(frozen=True)
class P2Request:
    """Encrypted share-product inputs from the key holder (one per round
    unbatched, l per round batched)."""

    cs: tuple[Ciphertext, ...]


@dataclass(frozen=True)
class P2Response:
    """Masked share-product results, same cardinality as the request."""

    cs: tuple[Ciphertext, ...]


@dataclass(frozen=True)
class CBatch:
    """A's encryptions of its l comparison-value shares, bit order 1..l."""

    cs: tuple[Ciphertext, ...]


@dataclass(frozen=True)
class GammaBatch:
    """B's blinded combinations, in randomly permuted order."""

    cs: tuple[Ciphertext, ...]


@dataclass(frozen=True)
class Outcome:
    result: ComparisonOutcome


@dataclass(frozen=True)
class AuctionBid:
    """One party's half of a bidder's shared bid."""

    bidder_id: str
    shares: tuple[int, ...]


@dataclass(frozen=True)
class AuctionResult:
    """A party's closing high-bid shares, exchanged to open the winner."""

    shares: tuple[int, ...]


ProtocolMessage = Union[
    P2Request, P2Response, CBatch, GammaBatch, Outcome, AuctionBid, AuctionResult
]
