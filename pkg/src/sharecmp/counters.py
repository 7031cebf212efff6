"""Per-party operation tallies used by the cost benchmark."""

from dataclasses import asdict, dataclass


@dataclass
class OpCounters:
    """Monotone counts of the expensive operations one party performed.

    Each protocol session owns one instance; nothing here is global, so
    two parties (or two concurrent sessions) never share a tally.
    """

    encryptions: int = 0
    full_decryptions: int = 0
    zero_checks: int = 0
    modexps: int = 0

    def as_dict(self) -> dict[str, int]:
        return asdict(self)
