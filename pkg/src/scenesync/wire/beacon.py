"""UDP discovery beacons.

The master broadcasts one datagram at 5 Hz: a 7-byte ASCII magic followed by
a UTF-8 text body with fixed field order

    session_id_hex | host | service_port | stream_port | scene_epoch | master_name

The master name comes last and may contain any text (including separators).
A datagram without the magic is not a beacon and is silently ignorable;
a magic-prefixed datagram with a malformed body is corrupt. The whole
datagram must fit in 512 bytes. Listeners bind the discovery port with
address reuse so several clients on one host can all hear the broadcast.
"""

import logging
import secrets
import socket
import time
from dataclasses import dataclass, field

from ..errors import BeaconCorrupt, BeaconTooLarge, NoMasterFound, NotABeacon

log = logging.getLogger("scenesync.wire.beacon")

BEACON_MAGIC = b"SIMPUB\x01"
BEACON_MAX_BYTES = 512
BEACON_PERIOD = 0.2  # seconds; 5 Hz


@dataclass(frozen=True)
class DiscoveryBeacon:
    session_id: bytes  # 16 random bytes, regenerated per master launch
    master_name: str
    host: str
    service_port: int
    stream_port: int
    scene_epoch: int = 0

    @staticmethod
    def new_session_id() -> bytes:
        return secrets.token_bytes(16)


def encode_beacon(beacon: DiscoveryBeacon) -> bytes:
    if len(beacon.session_id) != 16:
        raise BeaconCorrupt("session_id must be 16 bytes")
    if not (0 < beacon.service_port < 65536 and 0 < beacon.stream_port < 65536):
        raise BeaconCorrupt("ports must be nonzero u16 values")
    body = "|".join(
        (
            beacon.session_id.hex(),
            beacon.host,
            str(beacon.service_port),
            str(beacon.stream_port),
            str(beacon.scene_epoch),
            beacon.master_name,
        )
    )
    datagram = BEACON_MAGIC + body.encode("utf-8")
    if len(datagram) > BEACON_MAX_BYTES:
        raise BeaconTooLarge(f"beacon is {len(datagram)} bytes (cap {BEACON_MAX_BYTES})")
    return datagram


def decode_beacon(datagram: bytes) -> DiscoveryBeacon:
    if not datagram.startswith(BEACON_MAGIC):
        raise NotABeacon("missing magic prefix")
    if len(datagram) > BEACON_MAX_BYTES:
        raise BeaconCorrupt("datagram exceeds the beacon size cap")
    try:
        body = datagram[len(BEACON_MAGIC):].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BeaconCorrupt(f"body is not UTF-8: {exc}") from None
    parts = body.split("|", 5)
    if len(parts) != 6:
        raise BeaconCorrupt(f"expected 6 fields, got {len(parts)}")
    session_hex, host, service_raw, stream_raw, epoch_raw, name = parts
    try:
        session_id = bytes.fromhex(session_hex)
        service_port = int(service_raw)
        stream_port = int(stream_raw)
        scene_epoch = int(epoch_raw)
    except ValueError as exc:
        raise BeaconCorrupt(f"malformed field: {exc}") from None
    if len(session_id) != 16:
        raise BeaconCorrupt("session id must be 16 bytes")
    if not (0 < service_port < 65536 and 0 < stream_port < 65536):
        raise BeaconCorrupt("ports out of range")
    if not host:
        raise BeaconCorrupt("empty host")
    return DiscoveryBeacon(
        session_id=session_id,
        master_name=name,
        host=host,
        service_port=service_port,
        stream_port=stream_port,
        scene_epoch=scene_epoch,
    )


def open_listen_socket(port: int) -> socket.socket:
    """UDP socket on the discovery port, shareable between processes."""
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEPORT, 1)
    except OSError:  # not available on every platform
        pass
    sock.bind(("", port))
    return sock


def discover_master(listen_port: int, timeout: float = 5.0) -> DiscoveryBeacon:
    """Block until the first valid beacon arrives, or raise NoMasterFound."""
    deadline = time.monotonic() + timeout
    with open_listen_socket(listen_port) as sock:
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise NoMasterFound(f"no beacon on port {listen_port} within {timeout}s")
            sock.settimeout(remaining)
            try:
                datagram, _addr = sock.recvfrom(2048)
            except socket.timeout:
                raise NoMasterFound(
                    f"no beacon on port {listen_port} within {timeout}s"
                ) from None
            try:
                return decode_beacon(datagram)
            except NotABeacon:
                continue
            except BeaconCorrupt as exc:
                log.debug("ignoring corrupt beacon: %s", exc)
                continue
