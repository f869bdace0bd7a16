"""Length-prefixed TCP framing.

Frame layout (header fields big-endian):

    u32 payload length | u8 kind | u32 request_id | payload bytes

An empty-payload frame is exactly 9 bytes. The framing is self-delimiting:
feeding a valid byte stream in arbitrary chunks reassembles the identical
message sequence. A length over the 256 MiB cap is connection-fatal; an
unknown kind skips that single frame (it is still correctly delimited).
"""

import logging
import struct
from dataclasses import dataclass, field
from enum import IntEnum

from ..errors import FrameTooLarge

log = logging.getLogger("scenesync.wire.framing")

HEADER = struct.Struct(">IBI")
MAX_PAYLOAD = 256 * 1024 * 1024


class MessageKind(IntEnum):
    REQUEST = 1
    RESPONSE = 2
    ERROR = 3
    STATE_UPDATE = 4
    MESH_UPDATE = 5
    CLOUD_FRAME = 6
    HELLO = 7
    PING = 8
    PONG = 9


_KINDS = {int(k) for k in MessageKind}


@dataclass(frozen=True)
class WireMessage:
    kind: MessageKind
    request_id: int = 0
    payload: bytes = b""


def frame(msg: WireMessage) -> bytes:
    if len(msg.payload) > MAX_PAYLOAD:
        raise FrameTooLarge(f"payload of {len(msg.payload)} bytes exceeds cap")
    return HEADER.pack(len(msg.payload), int(msg.kind), msg.request_id) + msg.payload


class FrameDecoder:
    """Incremental decoder; feed() returns every newly completed message.

    Unknown-kind frames are consumed and counted, not returned. A frame
    whose length field exceeds the cap raises FrameTooLarge and poisons the
    decoder (the stream cannot be resynchronized).
    """

    def __init__(self):
        self._buffer = bytearray()
        self._offset = 0
        self.skipped_unknown = 0
        self._poisoned = False

    def feed(self, data: bytes) -> list:
        if self._poisoned:
            raise FrameTooLarge("decoder is poisoned by an earlier oversize frame")
        self._buffer.extend(data)
        messages = []
        while True:
            available = len(self._buffer) - self._offset
            if available < HEADER.size:
                break
            length, kind, request_id = HEADER.unpack_from(self._buffer, self._offset)
            if length > MAX_PAYLOAD:
                self._poisoned = True
                raise FrameTooLarge(f"frame announces {length} bytes (cap {MAX_PAYLOAD})")
            if available < HEADER.size + length:
                break
            start = self._offset + HEADER.size
            payload = bytes(self._buffer[start : start + length])
            self._offset = start + length
            if kind not in _KINDS:
                self.skipped_unknown += 1
                log.debug("skipping frame with unknown kind %d", kind)
                continue
            messages.append(WireMessage(MessageKind(kind), request_id, payload))
        if self._offset > 65536:
            del self._buffer[: self._offset]
            self._offset = 0
        return messages

    @property
    def remainder(self) -> bytes:
        return bytes(self._buffer[self._offset :])


def unframe(data: bytes):
    """One-shot decode: (messages, unconsumed tail bytes)."""
    decoder = FrameDecoder()
    messages = decoder.feed(data)
    return messages, decoder.remainder
