"""The headless reference client.

Discovers the master via UDP, fetches and validates the scene and all
referenced assets (hash-verified, one refetch on corruption), subscribes to
the update stream, maintains anchor-applied world poses, and measures
latency. It is protocol-complete but renders nothing, standing in for an
XR headset in tests and benchmarks.
"""

import itertools
import json
import logging
import socket
import statistics
import threading
import time
import uuid
import zlib
from dataclasses import dataclass, field

import numpy as np

from .. import DEFAULT_DISCOVERY_PORT
from ..errors import (
    AssetCorrupt,
    Disconnected,
    EmptySample,
    RemoteError,
    RequestTimeout,
    SceneSyncError,
)
from ..usr import compute_asset_hash, decode_mesh_blob, deserialize_scene, validate_scene
from ..usr.serialize import scene_name_table
from ..usr.types import Pose
from ..wire import discover_master
from ..wire.beacon import DiscoveryBeacon
from ..wire.framing import FrameDecoder, MessageKind, WireMessage, frame
from ..wire import payloads
from .kinematics import KinematicState

log = logging.getLogger("scenesync.client")


# --- low-level connections ----------------------------------------------------


class ServiceConnection:
    """Framed request/response channel; safe for pipelined use from any thread."""

    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.settimeout(None)
        self._send_lock = threading.Lock()
        self._pending = {}
        self._pending_lock = threading.Lock()
        self._ids = itertools.count(1)
        self._closed = threading.Event()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    # each pending request gets an event plus a result slot
    class _Slot:
        __slots__ = ("event", "message")

        def __init__(self):
            self.event = threading.Event()
            self.message = None

    def _read_loop(self) -> None:
        decoder = FrameDecoder()
        try:
            while not self._closed.is_set():
                chunk = self.sock.recv(65536)
                if not chunk:
                    break
                for msg in decoder.feed(chunk):
                    if msg.kind in (MessageKind.RESPONSE, MessageKind.ERROR, MessageKind.PONG):
                        with self._pending_lock:
                            slot = self._pending.pop(msg.request_id, None)
                        if slot is not None:
                            slot.message = msg
                            slot.event.set()
        except (ConnectionError, OSError, SceneSyncError):
            pass
        finally:
            self._fail_all()

    def _fail_all(self) -> None:
        self._closed.set()
        with self._pending_lock:
            pending, self._pending = self._pending, {}
        for slot in pending.values():
            slot.event.set()
        try:
            self.sock.close()
        except OSError:
            pass

    def _send(self, msg: WireMessage) -> None:
        if self._closed.is_set():
            raise Disconnected("service connection is closed")
        data = frame(msg)
        try:
            with self._send_lock:
                self.sock.sendall(data)
        except OSError as exc:
            self._fail_all()
            raise Disconnected(f"send failed: {exc}") from None

    def _wait(self, slot: "_Slot", request_id: int, timeout: float):
        if not slot.event.wait(timeout):
            with self._pending_lock:
                self._pending.pop(request_id, None)
            raise RequestTimeout(f"no response within {timeout}s")
        if slot.message is None:
            raise Disconnected("connection dropped while waiting")
        return slot.message

    def request(self, service: str, payload: bytes = b"", timeout: float = 10.0) -> bytes:
        request_id = next(self._ids)
        slot = self._Slot()
        with self._pending_lock:
            self._pending[request_id] = slot
        self._send(
            WireMessage(MessageKind.REQUEST, request_id, payloads.encode_request(service, payload))
        )
        msg = self._wait(slot, request_id, timeout)
        if msg.kind is MessageKind.ERROR:
            code, message = payloads.decode_error(msg.payload)
            raise RemoteError(code, message)
        return msg.payload

    def ping(self, timeout: float = 5.0) -> float:
        """One PING/PONG round trip; returns seconds."""
        request_id = next(self._ids)
        slot = self._Slot()
        with self._pending_lock:
            self._pending[request_id] = slot
        start = time.perf_counter()
        self._send(WireMessage(MessageKind.PING, request_id))
        self._wait(slot, request_id, timeout)
        return time.perf_counter() - start

    def send_raw(self, msg: WireMessage) -> None:
        self._send(msg)

    @property
    def alive(self) -> bool:
        return not self._closed.is_set()

    def close(self) -> None:
        self._fail_all()


class StreamConnection:
    """Subscription channel: says HELLO, then feeds incoming frames to callbacks."""

    def __init__(self, host, port, node_id, device_name, role, on_message, on_disconnect):
        self.sock = socket.create_connection((host, port), timeout=5.0)
        self.sock.settimeout(None)
        self._on_message = on_message
        self._on_disconnect = on_disconnect
        self._closed = threading.Event()
        self.sock.sendall(
            frame(
                WireMessage(
                    MessageKind.HELLO, 0, payloads.encode_hello(node_id, device_name, role)
                )
            )
        )
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        decoder = FrameDecoder()
        try:
            while not self._closed.is_set():
                chunk = self.sock.recv(1 << 20)
                if not chunk:
                    break
                for msg in decoder.feed(chunk):
                    self._on_message(msg)
        except (ConnectionError, OSError, SceneSyncError):
            pass
        finally:
            was_closed = self._closed.is_set()
            self.close()
            if not was_closed:
                self._on_disconnect()

    def close(self) -> None:
        self._closed.set()
        try:
            self.sock.close()
        except OSError:
            pass


# --- reconstructed scene state --------------------------------------------------


@dataclass
class ClientStats:
    frames_applied: int = 0
    mesh_frames_applied: int = 0
    cloud_frames: int = 0
    bytes_received: int = 0
    asset_bytes_wire: int = 0
    asset_bytes_raw: int = 0
    last_sim_time: float = 0.0
    skipped_unknown: int = 0
    topology_mismatch: int = 0
    resyncs: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LatencyStats:
    mean_ms: float
    p50_ms: float
    p99_ms: float
    samples: int
    partial: bool = False


def _percentile(sorted_values, q: float) -> float:
    if not sorted_values:
        return float("nan")
    pos = min(len(sorted_values) - 1, max(0, round(q * (len(sorted_values) - 1))))
    return sorted_values[int(pos)]


class ReconstructedScene:
    """Client-side mirror: resolved scene, live poses, deformable buffers."""

    def __init__(self, scene, name_table):
        self.scene = scene
        self.name_table = list(name_table)
        self.kinematics = KinematicState(scene)
        self.stats = ClientStats()
        self.anchor_accept = True
        self._lock = threading.RLock()
        # per-visual decoded mesh copies, mutated in place by mesh updates
        self.mesh_buffers = {}
        for obj in scene.objects():
            for index, visual in enumerate(obj.visuals):
                if visual.mesh_ref is not None and visual.mesh_ref in scene.assets:
                    self.mesh_buffers[(obj.name, index)] = decode_mesh_blob(
                        scene.assets[visual.mesh_ref]
                    )

    @property
    def world_poses(self) -> dict:
        with self._lock:
            return dict(self.kinematics.world)

    @property
    def anchor(self) -> Pose:
        return self.kinematics.anchor

    def apply_update(self, update) -> None:
        """Apply a SceneUpdate or MeshUpdate to the mirrored state."""
        if isinstance(update, payloads.SceneUpdate):
            with self._lock:
                known = {
                    name: pose
                    for name, pose in update.poses.items()
                    if name in self.kinematics.local
                }
                self.stats.skipped_unknown += len(update.poses) - len(known)
                self.kinematics.set_local(known)
                self.stats.frames_applied += 1
                self.stats.last_sim_time = max(self.stats.last_sim_time, update.sim_time)
            return
        if isinstance(update, payloads.MeshUpdate):
            with self._lock:
                buffer = self.mesh_buffers.get((update.object_name, update.visual_index))
                if buffer is None or len(update.vertices) != len(buffer.vertices):
                    self.stats.topology_mismatch += 1
                    return
                buffer.vertices[:] = update.vertices
                if update.normals is not None and len(update.normals) == len(buffer.normals):
                    buffer.normals[:] = update.normals
                self.stats.mesh_frames_applied += 1
            return
        raise TypeError(f"cannot apply {type(update).__name__}")

    def set_anchor(self, pose: Pose) -> None:
        with self._lock:
            if self.anchor_accept:
                self.kinematics.set_anchor(pose)

    def dump(self) -> dict:
        with self._lock:
            return {
                "meta": dict(self.scene.meta),
                "anchor_accept": self.anchor_accept,
                "anchor": {
                    "pos": list(self.anchor.pos),
                    "rot": list(self.anchor.rot_xyzw()),
                    "rot_order": "xyzw",
                },
                "world_poses": {
                    name: {
                        "pos": list(pose.pos),
                        "rot": list(pose.rot_xyzw()),
                        "rot_order": "xyzw",
                    }
                    for name, pose in self.kinematics.world.items()
                },
                "stats": self.stats.to_dict(),
            }


# --- the client -------------------------------------------------------------------


class HeadlessClient:
    def __init__(
        self,
        discovery_port: int = DEFAULT_DISCOVERY_PORT,
        timeout: float = 5.0,
        device_name: str | None = None,
        role: str = "client",
        auto_reconnect: bool = False,
    ):
        self.discovery_port = discovery_port
        self.timeout = timeout
        self.node_id = uuid.uuid4().bytes
        self.device_name = device_name or f"headless-{socket.gethostname()}"
        self.role = role
        self.auto_reconnect = auto_reconnect
        self.beacon: DiscoveryBeacon | None = None
        self.service: ServiceConnection | None = None
        self.stream: StreamConnection | None = None
        self.state: ReconstructedScene | None = None
        self._asset_cache = {}  # hash -> blob, survives resyncs
        self._stats_carry = ClientStats()
        self._stopped = threading.Event()
        self._disconnected = threading.Event()
        self._resynced = threading.Event()
        self._first_frame = threading.Event()
        self._watcher = None
        self.last_resync_duration = 0.0

    # -- sync ---------------------------------------------------------------

    def connect_and_sync(self) -> ReconstructedScene:
        """Discover, fetch scene + assets (verified), and subscribe."""
        self.beacon = discover_master(self.discovery_port, self.timeout)
        return self._sync_to_beacon(self.beacon)

    def _sync_to_beacon(self, beacon: DiscoveryBeacon) -> ReconstructedScene:
        started = time.perf_counter()
        self._disconnected.clear()
        self.service = ServiceConnection(beacon.host, beacon.service_port, self.timeout)
        doc = self.service.request("scene", timeout=max(self.timeout, 30.0))
        scene = deserialize_scene(doc.decode("utf-8"))

        stats = self._stats_carry
        stats.bytes_received += len(doc)
        for blob_hash in scene.referenced_assets():
            cached = self._asset_cache.get(blob_hash)
            scene.assets[blob_hash] = (
                cached if cached is not None else self._fetch_asset(blob_hash, stats)
            )
        report = validate_scene(scene)
        if not report.ok:
            raise AssetCorrupt(f"synced scene failed validation: {report.entries[0]}")

        state = ReconstructedScene(scene, scene_name_table(scene))
        state.stats = stats
        self.state = state
        self._first_frame.clear()
        self.stream = StreamConnection(
            beacon.host,
            beacon.stream_port,
            self.node_id,
            self.device_name,
            self.role,
            self._on_stream_message,
            self._on_stream_disconnect,
        )
        # the master answers a HELLO with a catch-up state update; once that
        # lands the subscription is registered and nothing can be missed
        if not self._first_frame.wait(max(self.timeout, 5.0)):
            raise Disconnected("no catch-up update after subscribing")
        self.last_resync_duration = time.perf_counter() - started
        self._resynced.set()
        if self.auto_reconnect and self._watcher is None:
            self._watcher = threading.Thread(target=self._watch_loop, daemon=True)
            self._watcher.start()
        return state

    def _fetch_asset(self, blob_hash: str, stats: ClientStats) -> bytes:
        for attempt in (0, 1):
            raw = self.service.request("asset", blob_hash.encode("ascii"), timeout=60.0)
            if not raw:
                raise AssetCorrupt(f"empty asset response for {blob_hash}")
            flag, body = raw[0], raw[1:]
            blob = zlib.decompress(body) if flag == payloads.ASSET_DEFLATE else body
            if compute_asset_hash(blob) == blob_hash:
                stats.asset_bytes_wire += len(raw)
                stats.asset_bytes_raw += len(blob)
                stats.bytes_received += len(raw)
                self._asset_cache[blob_hash] = blob
                return blob
            log.warning("asset %s failed hash check (attempt %d)", blob_hash[:12], attempt + 1)
        raise AssetCorrupt(f"asset {blob_hash} corrupt after one retry")

    # -- stream handling -------------------------------------------------------

    def _on_stream_message(self, msg: WireMessage) -> None:
        self._first_frame.set()
        state = self.state
        if state is None:
            return
        state.stats.bytes_received += len(msg.payload) + 9
        if msg.kind is MessageKind.STATE_UPDATE:
            sim_time, entries = payloads.decode_state_update(msg.payload)
            poses = {}
            unknown = 0
            for name_id, pose in entries:
                if name_id < len(state.name_table):
                    poses[state.name_table[name_id]] = pose
                else:
                    unknown += 1
            if unknown:
                state.stats.skipped_unknown += unknown
            state.apply_update(payloads.SceneUpdate(sim_time=sim_time, poses=poses))
        elif msg.kind is MessageKind.MESH_UPDATE:
            name_id, visual_index, vertices, normals = payloads.decode_mesh_update(msg.payload)
            if name_id >= len(state.name_table):
                state.stats.skipped_unknown += 1
                return
            state.apply_update(
                payloads.MeshUpdate(
                    object_name=state.name_table[name_id],
                    visual_index=visual_index,
                    vertices=vertices,
                    normals=normals,
                )
            )
        elif msg.kind is MessageKind.CLOUD_FRAME:
            state.stats.cloud_frames += 1
        elif msg.kind is MessageKind.REQUEST:
            self._on_control(msg)

    def _on_control(self, msg: WireMessage) -> None:
        try:
            service, body = payloads.decode_request(msg.payload)
        except SceneSyncError:
            return
        state = self.state
        if service == "anchor" and state is not None:
            state.set_anchor(payloads.decode_pose(body))
        elif service == "anchor-ctl" and state is not None:
            state.anchor_accept = bool(body and body[0])
        elif service == "scene-epoch":
            log.info("scene epoch changed; scheduling re-fetch")
            threading.Thread(target=self._refetch_scene, daemon=True).start()

    def _refetch_scene(self) -> None:
        try:
            if self.beacon is not None and self.service is not None and self.service.alive:
                if self.stream is not None:
                    self.stream.close()
                self.service.close()
                self._stats_carry.resyncs += 1
                self._sync_to_beacon(self.beacon)
        except SceneSyncError as exc:
            log.warning("scene re-fetch failed: %s", exc)

    def _on_stream_disconnect(self) -> None:
        self._disconnected.set()

    # -- reconnect watcher -------------------------------------------------------

    def _watch_loop(self) -> None:
        while not self._stopped.is_set():
            if not self._disconnected.wait(timeout=0.2):
                continue
            if self._stopped.is_set():
                return
            self._resynced.clear()
            if self.service is not None:
                self.service.close()
            log.info("master lost; rediscovering")
            while not self._stopped.is_set():
                try:
                    beacon = discover_master(self.discovery_port, timeout=2.0)
                except SceneSyncError:
                    continue
                try:
                    self._stats_carry.resyncs += 1
                    self.beacon = beacon
                    self._sync_to_beacon(beacon)
                except SceneSyncError as exc:
                    log.warning("resync failed: %s", exc)
                    time.sleep(0.1)
                    continue
                break

    def wait_synced(self, timeout: float) -> bool:
        return self._resynced.wait(timeout)

    @property
    def connected(self) -> bool:
        return (
            self.service is not None
            and self.service.alive
            and not self._disconnected.is_set()
        )

    # -- measurements ---------------------------------------------------------------

    def measure_roundtrip(self, n: int) -> LatencyStats:
        if n <= 0:
            raise EmptySample("need at least one ping sample")
        if self.service is None:
            raise Disconnected("not connected")
        samples = []
        partial = False
        for _ in range(n):
            try:
                samples.append(self.service.ping(timeout=self.timeout) * 1000.0)
            except (Disconnected, RequestTimeout):
                partial = True
                break
        if not samples:
            raise Disconnected("no ping completed")
        ordered = sorted(samples)
        return LatencyStats(
            mean_ms=statistics.fmean(samples),
            p50_ms=_percentile(ordered, 0.50),
            p99_ms=_percentile(ordered, 0.99),
            samples=len(samples),
            partial=partial,
        )

    def dump(self) -> dict:
        doc = {
            "connected": self.connected,
            "discovery_port": self.discovery_port,
            "node_id": self.node_id.hex(),
            "device_name": self.device_name,
            "session_id": self.beacon.session_id.hex() if self.beacon else None,
            "scene_epoch": self.beacon.scene_epoch if self.beacon else None,
        }
        if self.state is not None:
            doc.update(self.state.dump())
        return doc

    def close(self) -> None:
        self._stopped.set()
        self._disconnected.set()
        if self.stream is not None:
            self.stream.close()
        if self.service is not None:
            self.service.close()
        if self._watcher is not None:
            self._watcher.join(timeout=2.0)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def publish_cloud_frame(frame_payload: bytes, discovery_port: int, timeout: float = 5.0) -> None:
    """Send one CLOUD_FRAME through a discovered master (for cloudtool)."""
    beacon = discover_master(discovery_port, timeout)
    conn = ServiceConnection(beacon.host, beacon.service_port, timeout)
    try:
        conn.send_raw(WireMessage(MessageKind.CLOUD_FRAME, 0, frame_payload))
        conn.request("ping", timeout=timeout)  # flush: proves the frame was read
    finally:
        conn.close()
