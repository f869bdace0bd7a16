from .beacon import (
    BEACON_MAGIC,
    BEACON_PERIOD,
    DiscoveryBeacon,
    decode_beacon,
    discover_master,
    encode_beacon,
)
from .framing import (
    FrameDecoder,
    MessageKind,
    WireMessage,
    frame,
    unframe,
)

__all__ = [
    "BEACON_MAGIC",
    "BEACON_PERIOD",
    "DiscoveryBeacon",
    "encode_beacon",
    "decode_beacon",
    "discover_master",
    "WireMessage",
    "MessageKind",
    "frame",
    "unframe",
    "FrameDecoder",
]
