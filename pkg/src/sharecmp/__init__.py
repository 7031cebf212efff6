"""Two-party secure integer comparison over additive shares.

Provides the small-plaintext homomorphic cipher, bitwise additive sharing,
the baseline XOR-based comparison and the XOR-free variant, an in-memory
and TCP transport, a sealed-bid auction loop, and a cost benchmark.
"""

from .auction import (
    AuctionState,
    BidSubmission,
    close_auction,
    make_bid,
    new_auction,
    submit_bid,
    winning_bidder,
)
from .bench import BenchReport, VariantStats, run_bench
from .cipher import (
    BsgsDecoder,
    Ciphertext,
    DecryptionTable,
    blind,
    build_table,
    decrypt,
    encrypt,
    homomorphic_add,
    homomorphic_scale,
    is_zero,
)
from .counters import OpCounters
from .errors import (
    FrameError,
    IntegrityError,
    KeyConfigError,
    ProtocolError,
    TransportError,
    TransportTimeout,
)
from .keys import (
    Params,
    PublicKey,
    SecretKey,
    ValidationReport,
    from_factors,
    generate_keys,
    load_key_file,
    save_key_file,
    validate_keys,
)
from .messages import (
    AuctionBid,
    AuctionResult,
    CBatch,
    ComparisonOutcome,
    GammaBatch,
    Outcome,
    P2Request,
    P2Response,
)
from .numtheory import crt_combine, is_probable_prime, mod_pow, random_prime
from .protocol import (
    PartySession,
    Role,
    Variant,
    blind_permute,
    compute_c_shares_p1,
    compute_c_shares_p3,
    detect_zero,
    encrypt_c_shares,
    lemma1_weight,
    p2_finish,
    p2_request,
    p2_respond,
    run_comparison,
    run_party,
    run_party_a,
    run_party_b,
    sessions_for_values,
    xor_shares,
)
from .rng import Rng
from .sharing import (
    SharedInteger,
    local_linear,
    reconstruct_bit,
    reconstruct_integer,
    share_integer,
)
from .transport import (
    MemoryEndpoint,
    TcpEndpoint,
    TcpListener,
    decode_frame,
    encode_message,
    memory_pair,
    tcp_connect,
)

__version__ = "0.1.0"
