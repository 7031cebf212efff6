"""Message framing and delivery.

Frame layout (canonical, rejected strictly on decode):

    length   u32 big-endian, equals 1 + len(payload)
    msg_type u8, from the registry below
    payload  message-specific

Big integers are encoded as a u16 byte count followed by the minimal
big-endian magnitude (zero encodes as count 0); lists carry a u16 count
prefix. Non-minimal integer encodings and trailing bytes are errors, so a
given message has exactly one valid frame and transcripts can be compared
byte for byte across transports.

The in-memory pair and the TCP endpoints move identical frame bytes; TCP
adds only a 4-byte protocol-version handshake at connection time.
"""

import queue
import socket
import struct
import time

from .cipher import Ciphertext
from .errors import FrameError, TransportError, TransportTimeout
from .messages import (
    AuctionBid,
    AuctionResult,
    CBatch,
    ComparisonOutcome,
    GammaBatch,
    Outcome,
    P2Request,
    P2Response,
    ProtocolMessage,
)

PROTOCOL_VERSION = 1

MSG_P2_REQUEST = 0x01
MSG_P2_RESPONSE = 0x02
MSG_C_BATCH = 0x03
MSG_GAMMA_BATCH = 0x04
MSG_OUTCOME = 0x05
MSG_AUCTION_BID = 0x10
MSG_AUCTION_RESULT = 0x11

_BATCH_TYPES = {
    MSG_P2_REQUEST: P2Request,
    MSG_P2_RESPONSE: P2Response,
    MSG_C_BATCH: CBatch,
    MSG_GAMMA_BATCH: GammaBatch,
}
_BATCH_TAGS = {cls: tag for tag, cls in _BATCH_TYPES.items()}

_OUTCOME_BYTE = {
    ComparisonOutcome.NOT_GREATER: 0x00,
    ComparisonOutcome.GREATER: 0x01,
}
_OUTCOME_FROM_BYTE = {v: k for k, v in _OUTCOME_BYTE.items()}


def _encode_uint(value: int) -> bytes:
    if value < 0:
        raise FrameError("wire integers are non-negative")
    nbytes = (value.bit_length() + 7) // 8
    if nbytes > 0xFFFF:
        raise FrameError("integer exceeds the 2^16-1 byte encoding limit")
    return struct.pack(">H", nbytes) + value.to_bytes(nbytes, "big")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FrameError("truncated payload")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def uint(self) -> int:
        nbytes = self.u16()
        raw = self.take(nbytes)
        if nbytes > 0 and raw[0] == 0:
            raise FrameError("non-minimal integer encoding")
        return int.from_bytes(raw, "big")

    def done(self) -> None:
        if self.pos != len(self.data):
            raise FrameError("trailing bytes after message payload")


def _encode_int_list(values) -> bytes:
    if len(values) > 0xFFFF:
        raise FrameError("list exceeds the u16 count prefix")
    return struct.pack(">H", len(values)) + b"".join(
        _encode_uint(v) for v in values
    )


def _decode_int_list(reader: _Reader) -> tuple[int, ...]:
    count = reader.u16()
    return tuple(reader.uint() for _ in range(count))


def encode_message(msg: ProtocolMessage) -> bytes:
    """Full canonical frame (header included) for a protocol message."""
    if isinstance(msg, tuple(_BATCH_TAGS)):
        tag = _BATCH_TAGS[type(msg)]
        payload = _encode_int_list([c.value for c in msg.cs])
    elif isinstance(msg, Outcome):
        tag = MSG_OUTCOME
        payload = bytes([_OUTCOME_BYTE[msg.result]])
    elif isinstance(msg, AuctionBid):
        tag = MSG_AUCTION_BID
        ident = msg.bidder_id.encode("utf-8")
        if len(ident) > 0xFFFF:
            raise FrameError("bidder id too long")
        payload = (
            struct.pack(">H", len(ident)) + ident + _encode_int_list(msg.shares)
        )
    elif isinstance(msg, AuctionResult):
        tag = MSG_AUCTION_RESULT
        payload = _encode_int_list(msg.shares)
    else:
        raise FrameError(f"unknown message type {type(msg).__name__}")
    return struct.pack(">IB", 1 + len(payload), tag) + payload


def decode_frame(frame: bytes) -> ProtocolMessage:
    """Inverse of encode_message; rejects anything non-canonical."""
    if len(frame) < 5:
        raise FrameError("frame shorter than its header")
    length, tag = struct.unpack(">IB", frame[:5])
    payload = frame[5:]
    if length != 1 + len(payload):
        raise FrameError("frame length field disagrees with payload size")
    reader = _Reader(payload)
    if tag in _BATCH_TYPES:
        values = _decode_int_list(reader)
        reader.done()
        return _BATCH_TYPES[tag](tuple(Ciphertext(v) for v in values))
    if tag == MSG_OUTCOME:
        raw = reader.u8()
        reader.done()
        if raw not in _OUTCOME_FROM_BYTE:
            raise FrameError(f"unknown outcome byte {raw:#x}")
        return Outcome(_OUTCOME_FROM_BYTE[raw])
    if tag == MSG_AUCTION_BID:
        ident_len = reader.u16()
        ident = reader.take(ident_len).decode("utf-8")
        shares = _decode_int_list(reader)
        reader.done()
        return AuctionBid(ident, shares)
    if tag == MSG_AUCTION_RESULT:
        shares = _decode_int_list(reader)
        reader.done()
        return AuctionResult(shares)
    raise FrameError(f"unregistered message type {tag:#x}")


# -- endpoints ------------------------------------------------------------


class MemoryEndpoint:
    """One side of an in-process duplex channel carrying encoded frames.

    Messages are serialized on send exactly as on the wire, so transcripts
    are byte-comparable with TCP runs.
    """

    def __init__(self, inbox: "queue.Queue[bytes]", peer_inbox: "queue.Queue[bytes]",
                 default_timeout: float = 10.0):
        self._inbox = inbox
        self._peer_inbox = peer_inbox
        self._default_timeout = default_timeout
        self.sent_frames: list[bytes] = []

    def send(self, msg: ProtocolMessage) -> None:
        frame = encode_message(msg)
        self.sent_frames.append(frame)
        self._peer_inbox.put(frame)

    def receive(self, timeout: float | None = None) -> ProtocolMessage:
        if timeout is None:
            timeout = self._default_timeout
        try:
            if timeout == 0:
                frame = self._inbox.get_nowait()
            else:
                frame = self._inbox.get(timeout=timeout)
        except queue.Empty:
            raise TransportTimeout(f"no frame within {timeout}s") from None
        return decode_frame(frame)

    def close(self) -> None:
        pass


def memory_pair(default_timeout: float = 10.0) -> tuple[MemoryEndpoint, MemoryEndpoint]:
    box_a: "queue.Queue[bytes]" = queue.Queue()
    box_b: "queue.Queue[bytes]" = queue.Queue()
    a = MemoryEndpoint(box_a, box_b, default_timeout)
    b = MemoryEndpoint(box_b, box_a, default_timeout)
    return a, b


class TcpEndpoint:
    """Framed messages over a connected socket, after a version handshake."""

    def __init__(self, sock: socket.socket, default_timeout: float = 30.0,
                 version: int = PROTOCOL_VERSION):
        self._sock = sock
        self._default_timeout = default_timeout
        self.sent_frames: list[bytes] = []
        self._handshake(version)

    def _handshake(self, version: int) -> None:
        self._sock.settimeout(self._default_timeout)
        try:
            self._sock.sendall(struct.pack(">I", version))
            peer = struct.unpack(">I", self._recv_exact(4))[0]
        except OSError as exc:
            raise TransportError(f"handshake failed: {exc}") from exc
        if peer != version:
            self._sock.close()
            raise TransportError(
                f"protocol version mismatch: ours {version}, peer {peer}"
            )

    def _recv_exact(self, n: int) -> bytes:
        chunks = []
        remaining = n
        while remaining:
            chunk = self._sock.recv(remaining)
            if not chunk:
                raise TransportError("peer disconnected")
            chunks.append(chunk)
            remaining -= len(chunk)
        return b"".join(chunks)

    def send(self, msg: ProtocolMessage) -> None:
        frame = encode_message(msg)
        self.sent_frames.append(frame)
        try:
            self._sock.sendall(frame)
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def receive(self, timeout: float | None = None) -> ProtocolMessage:
        if timeout is None:
            timeout = self._default_timeout
        self._sock.settimeout(timeout if timeout > 0 else 0.001)
        try:
            header = self._recv_exact(4)
            (length,) = struct.unpack(">I", header)
            body = self._recv_exact(length)
        except socket.timeout:
            raise TransportTimeout(f"no frame within {timeout}s") from None
        except OSError as exc:
            raise TransportError(f"receive failed: {exc}") from exc
        return decode_frame(header + body)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


class TcpListener:
    """Party A's side: bind, then accept exactly one peer."""

    def __init__(self, host: str, port: int):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            self._sock.bind((host, port))
            self._sock.listen(1)
        except OSError as exc:
            raise TransportError(f"cannot listen on {host}:{port}: {exc}") from exc
        self.port = self._sock.getsockname()[1]

    def accept(self, timeout: float = 30.0,
               version: int = PROTOCOL_VERSION) -> TcpEndpoint:
        self._sock.settimeout(timeout)
        try:
            conn, _addr = self._sock.accept()
        except socket.timeout:
            raise TransportTimeout("no peer connected in time") from None
        finally:
            self._sock.close()
        return TcpEndpoint(conn, default_timeout=timeout, version=version)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


def tcp_connect(host: str, port: int, timeout: float = 30.0,
                version: int = PROTOCOL_VERSION) -> TcpEndpoint:
    """Party B's side: connect, retrying until the listener is up."""
    deadline = time.monotonic() + timeout
    last_error: Exception | None = None
    while time.monotonic() < deadline:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.settimeout(max(0.1, deadline - time.monotonic()))
        try:
            sock.connect((host, port))
            return TcpEndpoint(sock, default_timeout=timeout, version=version)
        except (ConnectionRefusedError, socket.timeout) as exc:
            sock.close()
            last_error = exc
            time.sleep(0.05)
        except OSError as exc:
            sock.close()
            raise TransportError(f"connect to {host}:{port} failed: {exc}") from exc
    raise TransportTimeout(
        f"could not reach {host}:{port} within {timeout}s: {last_error}"
    )
