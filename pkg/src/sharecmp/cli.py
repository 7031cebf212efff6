"""Command-line surface: keygen, compare, bench, auction, party.

Exit codes: 0 success, 1 usage or parameter error, 2 protocol or transport
failure.
"""

import argparse
import sys
import threading

from .auction import close_auction, make_bid, new_auction, submit_bid, winning_bidder
from .bench import run_bench
from .cipher import TABLE_CAP, BsgsDecoder, DecryptionTable
from .counters import OpCounters
from .errors import KeyConfigError, ProtocolError, TransportError
from .keys import Params, generate_keys, load_key_file, save_key_file, validate_keys
from .messages import ComparisonOutcome
from .protocol import (
    PartySession,
    Role,
    Variant,
    run_comparison,
    run_party,
    sessions_for_values,
)
from .rng import Rng
from .sharing import SharedInteger
from .transport import PROTOCOL_VERSION, TcpListener, memory_pair, tcp_connect

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROTOCOL = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _decryption_backend(pk, sk):
    if pk.u <= TABLE_CAP:
        return DecryptionTable.build(pk, sk)
    return BsgsDecoder(pk, sk)


def _seed_or_entropy(seed):
    return Rng(seed) if seed is not None else Rng.from_entropy()


def _load_keys(path, need_secret=True):
    pk, sk = load_key_file(path)
    if need_secret and sk is None:
        raise _UsageError(f"key file {path} has no secret half")
    return pk, sk


def _print_counters(label: str, counters: OpCounters) -> None:
    c = counters.as_dict()
    print(
        f"party {label}: encryptions={c['encryptions']} "
        f"full_decryptions={c['full_decryptions']} "
        f"zero_checks={c['zero_checks']} modexps={c['modexps']}"
    )


def _cmd_keygen(args) -> int:
    params = Params(args.k, args.t, args.l)
    rng = _seed_or_entropy(args.seed)
    pk, sk = generate_keys(params, rng, allow_tiny=args.test_allow_tiny_keys)
    if (pk.params.k, pk.params.t) != (args.k, args.t):
        print(
            f"note: tiny-key mode reduced parameters to k={pk.params.k} "
            f"t={pk.params.t} to fit a valid key",
            file=sys.stderr,
        )
    save_key_file(args.out, pk, sk)
    if args.public_out:
        save_key_file(args.public_out, pk, None)
    report = validate_keys(pk, sk)
    print(report.format())
    print(f"wrote {args.out}")
    return EXIT_OK if report.all_ok else EXIT_PROTOCOL


def _cmd_compare(args) -> int:
    pk, sk = _load_keys(args.keys)
    l = pk.params.l
    for name, value in (("x", args.x), ("y", args.y)):
        if not 0 <= value < 1 << l:
            raise _UsageError(f"{name}={value} outside [0, 2^{l})")
    variant = Variant(args.protocol)
    table = _decryption_backend(pk, sk) if variant is Variant.P1 else None
    seed = args.seed if args.seed is not None else Rng.from_entropy().getrandbits(63)
    session_a, session_b = sessions_for_values(pk, sk, table, args.x, args.y, seed)

    if args.transport == "tcp":
        listener = TcpListener("127.0.0.1", 0)
        endpoints = {}

        def accept():
            endpoints["a"] = listener.accept()

        acceptor = threading.Thread(target=accept)
        acceptor.start()
        ep_b = tcp_connect("127.0.0.1", listener.port)
        acceptor.join()
        pair = (endpoints["a"], ep_b)
    else:
        pair = memory_pair()

    outcome = run_comparison(
        variant, session_a, session_b, pair, batched=not args.unbatched
    )
    print(outcome.name)
    _print_counters("A", session_a.counters)
    _print_counters("B", session_b.counters)
    return EXIT_OK


def _cmd_bench(args) -> int:
    rng = _seed_or_entropy(args.seed)
    if args.keys:
        pk, sk = _load_keys(args.keys)
    else:
        params = Params(args.k, args.t, args.l)
        pk, sk = generate_keys(params, rng, allow_tiny=args.test_allow_tiny_keys)
    table = _decryption_backend(pk, sk)
    seed = args.seed if args.seed is not None else rng.getrandbits(63)
    report = run_bench(pk, sk, table, args.reps, seed)
    print(report.to_table())
    print()
    print(report.to_machine())
    return EXIT_OK


def _cmd_auction(args) -> int:
    pk, sk = _load_keys(args.keys)
    l = pk.params.l
    bids = []
    with open(args.bids, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError:
                raise _UsageError(
                    f"{args.bids}:{lineno}: not a decimal bid: {text!r}"
                ) from None
            if not 0 <= value < 1 << l:
                raise _UsageError(
                    f"{args.bids}:{lineno}: bid {value} outside [0, 2^{l})"
                )
            bids.append(value)

    seed_rng = _seed_or_entropy(args.seed)
    dealer = Rng(seed_rng.getrandbits(64))
    state_a, state_b = new_auction(
        pk, sk, None,
        Rng(seed_rng.getrandbits(64)), Rng(seed_rng.getrandbits(64)), dealer,
    )
    for index, value in enumerate(bids, start=1):
        bid = make_bid(f"bidder-{index}", value, l, pk.u, dealer)
        outcome = submit_bid(state_a, state_b, bid)
        print(f"round {index} ({bid.bidder_id}): {outcome.name}")
    winner_value = close_auction(state_a, state_b)
    winner = winning_bidder(state_a)
    if winner is None:
        print(f"winner: none, high bid {winner_value}")
    else:
        print(f"winner: {winner[1]} (round {winner[0] + 1}), high bid {winner_value}")
    return EXIT_OK


def _read_share_file(path: str, l: int, u: int) -> SharedInteger:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError:
                raise _UsageError(f"{path}:{lineno}: not a residue: {text!r}") from None
            if not 0 <= value < u:
                raise _UsageError(f"{path}:{lineno}: residue {value} outside Z_u")
            values.append(value)
    if len(values) != l:
        raise _UsageError(f"{path}: expected {l} share lines, found {len(values)}")
    return SharedInteger(tuple(values))


def _parse_host_port(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        raise _UsageError(f"address must be HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


def _cmd_party(args) -> int:
    role = Role.A if args.role == "a" else Role.B
    pk, sk = _load_keys(args.keys, need_secret=role is Role.A)
    l = pk.params.l
    x_shares = _read_share_file(args.x_shares, l, pk.u)
    y_shares = _read_share_file(args.y_shares, l, pk.u)
    variant = Variant(args.protocol)
    rng = _seed_or_entropy(args.seed)

    if role is Role.A:
        table = _decryption_backend(pk, sk) if variant is Variant.P1 else None
        session = PartySession(
            Role.A, pk, sk, table, x_shares, y_shares, rng, OpCounters()
        )
        host, port = _parse_host_port(args.listen)
        listener = TcpListener(host, port)
        endpoint = listener.accept(
            timeout=args.timeout, version=args.handshake_version
        )
    else:
        session = PartySession(
            Role.B, pk, None, None, x_shares, y_shares, rng, OpCounters()
        )
        host, port = _parse_host_port(args.connect)
        endpoint = tcp_connect(
            host, port, timeout=args.timeout, version=args.handshake_version
        )
    try:
        outcome = run_party(session, endpoint, variant)
    finally:
        endpoint.close()
    print(outcome.name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sharecmp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_keygen = sub.add_parser("keygen", help="generate and validate a key file")
    p_keygen.add_argument("--k", type=int, default=1024, help="modulus bits")
    p_keygen.add_argument("--t", type=int, default=160, help="bits of v")
    p_keygen.add_argument("--l", type=int, default=16, help="compared-integer bits")
    p_keygen.add_argument("--seed", type=int, default=None)
    p_keygen.add_argument("--out", required=True, help="key file path")
    p_keygen.add_argument("--public-out", default=None,
                          help="also write a public-only export here")
    p_keygen.add_argument("--test-allow-tiny-keys", action="store_true",
                          help="permit insecure desk-scale parameters")
    p_keygen.set_defaults(func=_cmd_keygen)

    p_compare = sub.add_parser("compare", help="run one comparison in-process")
    p_compare.add_argument("--protocol", choices=["p1", "p3"], required=True)
    p_compare.add_argument("--x", type=int, required=True)
    p_compare.add_argument("--y", type=int, required=True)
    p_compare.add_argument("--keys", required=True)
    p_compare.add_argument("--seed", type=int, default=None)
    p_compare.add_argument("--transport", choices=["mem", "tcp"], default="mem")
    p_compare.add_argument("--unbatched", action="store_true",
                           help="one product round per message (baseline only)")
    p_compare.set_defaults(func=_cmd_compare)

    p_bench = sub.add_parser("bench", help="compare the two variants' cost")
    p_bench.add_argument("--k", type=int, default=1024)
    p_bench.add_argument("--t", type=int, default=160)
    p_bench.add_argument("--l", type=int, default=16)
    p_bench.add_argument("--reps", type=int, default=20)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--keys", default=None,
                         help="reuse a key file instead of generating")
    p_bench.add_argument("--test-allow-tiny-keys", action="store_true")
    p_bench.set_defaults(func=_cmd_bench)

    p_auction = sub.add_parser("auction", help="run an auction from a bid script")
    p_auction.add_argument("--bids", required=True,
                           help="file with one decimal bid per line")
    p_auction.add_argument("--keys", required=True)
    p_auction.add_argument("--seed", type=int, default=None)
    p_auction.set_defaults(func=_cmd_auction)

    p_party = sub.add_parser("party", help="run one comparison role over TCP")
    p_party.add_argument("--role", choices=["a", "b"], required=True)
    p_party.add_argument("--listen", default=None, help="HOST:PORT (role a)")
    p_party.add_argument("--connect", default=None, help="HOST:PORT (role b)")
    p_party.add_argument("--keys", required=True)
    p_party.add_argument("--x-shares", required=True)
    p_party.add_argument("--y-shares", required=True)
    p_party.add_argument("--protocol", choices=["p1", "p3"], default="p3")
    p_party.add_argument("--seed", type=int, default=None)
    p_party.add_argument("--timeout", type=float, default=30.0)
    p_party.add_argument("--handshake-version", type=int,
                         default=PROTOCOL_VERSION, help=argparse.SUPPRESS)
    p_party.set_defaults(func=_cmd_party)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "party":
            if args.role == "a" and not args.listen:
                raise _UsageError("role a requires --listen")
            if args.role == "b" and not args.connect:
                raise _UsageError("role b requires --connect")
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProtocolError, TransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
