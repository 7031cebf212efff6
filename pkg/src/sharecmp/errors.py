"""Exception types shared across the package."""


class ProtocolError(Exception):
    """A party was driven out of order or received an ill-formed message."""


class IntegrityError(ProtocolError):
    """Shares or ciphertexts reconstruct to something impossible."""


class KeyConfigError(ValueError):
    """Key parameters leave no room for a valid key."""


class TransportError(Exception):
    """Frame-level or connection-level failure."""


class FrameError(TransportError):
    """A frame could not be decoded canonically."""


class TransportTimeout(TransportError):
    """No frame arrived within the allowed time."""
