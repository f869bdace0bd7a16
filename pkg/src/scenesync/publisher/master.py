"""The master node: beacons its presence, serves scene/asset requests,
streams state updates to subscribers, manages the node registry and spatial
anchors, steps the built-in demo scenes, and hosts the dashboard gateway.

Everything network-facing runs on one asyncio loop inside a dedicated
thread; MasterHandle is the thread-safe facade handed back to the caller,
so integration stays a single start_master() call next to an existing
simulation loop.
"""

import asyncio
import base64
import collections
import json
import logging
import socket
import threading
import time
import zlib
from dataclasses import dataclass

from ..errors import (
    BindError,
    NotADemoScene,
    ParseError,
    TopologyMismatch,
    UnknownNode,
    InvalidName,
    UnknownObject,
)
from ..usr import decode_mesh_blob
from ..usr.serialize import scene_name_table, serialize_scene
from ..usr.types import GeometryKind, SimScene
from ..wire.beacon import BEACON_PERIOD, DiscoveryBeacon, encode_beacon
from ..wire.framing import FrameDecoder, MessageKind, WireMessage, frame
from ..wire import payloads
from .config import PublisherConfig
from .demo import build_demo_scene, step_demo_scene
from .registry import NodeRegistry

log = logging.getLogger("scenesync.publisher")

SUBSCRIBER_QUEUE_CAP = 64
_DROPPABLE = {int(MessageKind.STATE_UPDATE), int(MessageKind.CLOUD_FRAME)}


def load_scene(config: PublisherConfig) -> tuple:
    """(scene, demo_name or None) from the config."""
    if config.demo:
        return build_demo_scene(config.demo), config.demo
    if config.scene_path is None:
        raise ParseError("config needs either scene_path or demo")
    fmt = config.scene_format
    if fmt is None:
        suffix = config.scene_path.suffix.lower()
        fmt = "urdf" if suffix == ".urdf" else "mjcf"
    options = config.parser
    if not options.asset_search_paths:
        options.asset_search_paths = [config.scene_path.parent]
    text = config.scene_path.read_text()
    if fmt == "urdf":
        from ..parsers import parse_urdf

        return parse_urdf(text, options), None
    from ..parsers import parse_mjcf

    return parse_mjcf(text, options), None


class _Subscriber:
    """One update-stream connection plus its bounded outgoing queue.

    Pose/cloud frames are idempotent snapshots: on overflow the oldest
    droppable frame goes first. Mesh updates and control frames are never
    dropped; they apply backpressure to the publisher instead.
    """

    def __init__(self, writer: asyncio.StreamWriter):
        self.writer = writer
        self.queue = collections.deque()
        self.wakeup = asyncio.Event()
        self.space = asyncio.Event()
        self.space.set()
        self.closed = False

    def _drop_oldest_droppable(self) -> bool:
        for i, (kind, _) in enumerate(self.queue):
            if kind in _DROPPABLE:
                del self.queue[i]
                return True
        return False

    def offer(self, kind: int, data: bytes) -> None:
        """Enqueue a droppable frame, evicting the oldest snapshot if full."""
        if self.closed:
            return
        if len(self.queue) >= SUBSCRIBER_QUEUE_CAP and not self._drop_oldest_droppable():
            return  # queue full of undroppable frames; shed the new snapshot
        self.queue.append((kind, data))
        self.wakeup.set()

    async def push(self, kind: int, data: bytes) -> None:
        """Enqueue an undroppable frame, waiting for space when full."""
        if self.closed:
            return
        while len(self.queue) >= SUBSCRIBER_QUEUE_CAP:
            if self._drop_oldest_droppable():
                break
            self.space.clear()
            await self.space.wait()
            if self.closed:
                return
        self.queue.append((kind, data))
        self.wakeup.set()

    async def run_writer(self) -> None:
        try:
            while not self.closed:
                if not self.queue:
                    self.wakeup.clear()
                    await self.wakeup.wait()
                    continue
                _, data = self.queue.popleft()
                if len(self.queue) < SUBSCRIBER_QUEUE_CAP:
                    self.space.set()
                self.writer.write(data)
                await self.writer.drain()
        except (ConnectionError, asyncio.CancelledError, OSError):
            pass
        finally:
            self.close()

    def close(self) -> None:
        self.closed = True
        self.wakeup.set()
        self.space.set()


class MasterServer:
    """Loop-internal state; every method here runs on the server loop."""

    def __init__(self, config: PublisherConfig, scene: SimScene, demo_name):
        self.config = config
        self.demo_name = demo_name
        self.session_id = DiscoveryBeacon.new_session_id()
        self.scene_epoch = 1
        self._install_scene(scene)
        self.registry = NodeRegistry(on_event=self._on_registry_event)
        self.subscribers = set()
        self.node_streams = {}  # node_id hex -> _Subscriber
        self.ws_queues = set()  # gateway event queues
        self.started = time.time()
        self.service_port = 0
        self.stream_port = 0
        self.http_port = 0
        self._servers = []
        self._tasks = []
        self._udp = None
        self._uvicorn = None
        self._asset_wire_cache = {}
        self._tick_count = 0

    # -- scene bookkeeping -------------------------------------------------

    def _install_scene(self, scene: SimScene) -> None:
        self.scene = scene
        self.scene_doc = serialize_scene(scene).encode("utf-8")
        self.name_table = scene_name_table(scene)
        self.name_to_id = {name: i for i, name in enumerate(self.name_table)}
        self.tracked = {
            name
            for name in self.name_table
            if name not in self.config.parser.no_tracked_objects
        }
        self.current_poses = {}  # merged latest local poses (for late joiners)
        self.current_meshes = {}  # (name, visual_index) -> encoded MESH_UPDATE payload
        self.last_sim_time = 0.0
        self._asset_wire_cache = {}
        # expected vertex counts for mesh-update topology checks
        self.mesh_vertex_counts = {}
        for obj in scene.objects():
            for index, visual in enumerate(obj.visuals):
                if visual.geometry_kind is GeometryKind.MESH and visual.mesh_ref in scene.assets:
                    mesh = decode_mesh_blob(scene.assets[visual.mesh_ref])
                    self.mesh_vertex_counts[(obj.name, index)] = mesh.vertex_count

    # -- startup / shutdown -------------------------------------------------

    async def startup(self) -> None:
        try:
            service_server = await asyncio.start_server(
                self._handle_service_conn, host=self.config.host, port=0
            )
            stream_server = await asyncio.start_server(
                self._handle_stream_conn, host=self.config.host, port=0
            )
        except OSError as exc:
            raise BindError(f"cannot bind TCP service sockets: {exc}") from None
        self._servers = [service_server, stream_server]
        self.service_port = service_server.sockets[0].getsockname()[1]
        self.stream_port = stream_server.sockets[0].getsockname()[1]

        self._udp = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._udp.setsockopt(socket.SOL_SOCKET, socket.SO_BROADCAST, 1)

        from .gateway import make_gateway_server

        try:
            http_sock = socket.create_server(
                (self.config.host, self.config.http_port), reuse_port=False
            )
        except OSError as exc:
            await self._close_servers()
            raise BindError(f"cannot bind HTTP port {self.config.http_port}: {exc}") from None
        self.http_port = http_sock.getsockname()[1]
        self._uvicorn, gateway_task = make_gateway_server(self, http_sock)

        self._tasks = [
            asyncio.create_task(self._beacon_task(), name="beacon"),
            asyncio.create_task(self._tick_task(), name="tick"),
            asyncio.create_task(self._heartbeat_task(), name="heartbeat"),
            gateway_task,
        ]

    async def _close_servers(self) -> None:
        for server in self._servers:
            server.close()
            await server.wait_closed()
        self._servers = []

    async def shutdown(self) -> None:
        if self._uvicorn is not None:
            self._uvicorn.should_exit = True
            self._uvicorn.force_exit = True
        for sub in list(self.subscribers):
            sub.close()
            sub.writer.close()
        for task in self._tasks:
            if task.get_name() != "gateway":
                task.cancel()
        await asyncio.gather(*self._tasks, return_exceptions=True)
        await self._close_servers()
        if self._udp is not None:
            self._udp.close()
        # per-connection handlers and subscriber writers
        stragglers = [t for t in asyncio.all_tasks() if t is not asyncio.current_task()]
        for task in stragglers:
            task.cancel()
        await asyncio.gather(*stragglers, return_exceptions=True)

    # -- periodic tasks ------------------------------------------------------

    def _beacon(self) -> DiscoveryBeacon:
        return DiscoveryBeacon(
            session_id=self.session_id,
            master_name=self.config.master_name,
            host=self.config.host,
            service_port=self.service_port,
            stream_port=self.stream_port,
            scene_epoch=self.scene_epoch,
        )

    async def _beacon_task(self) -> None:
        warned = set()
        while True:
            datagram = encode_beacon(self._beacon())
            for addr in self.config.broadcast_addrs:
                try:
                    self._udp.sendto(datagram, (addr, self.config.discovery_port))
                except OSError as exc:
                    if addr not in warned:
                        warned.add(addr)
                        log.warning("beacon to %s failed: %s", addr, exc)
            await asyncio.sleep(BEACON_PERIOD)

    async def _tick_task(self) -> None:
        loop = asyncio.get_running_loop()
        period = 1.0 / self.config.update_hz
        start = loop.time()
        while True:
            self._tick_count += 1
            target = start + self._tick_count * period
            sim_time = self._tick_count * period
            if self.demo_name:
                update = step_demo_scene(self.demo_name, sim_time)
            else:
                update = payloads.SceneUpdate(sim_time=sim_time, poses={})
            try:
                self.publish_update(update)
            except UnknownObject:  # demo scenes always publish known names
                log.exception("demo tick rejected")
            delay = target - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)

    async def _heartbeat_task(self) -> None:
        while True:
            self._ws_broadcast({"type": "heartbeat", "server_time": time.time()})
            await asyncio.sleep(1.0)

    # -- publishing ----------------------------------------------------------

    def publish_update(self, update: payloads.SceneUpdate) -> None:
        unknown = [name for name in update.poses if name not in self.tracked]
        if unknown:
            raise UnknownObject(f"not trackable: {unknown}")
        if update.sim_time < self.last_sim_time:
            log.debug(
                "clamping sim_time %.6f to last %.6f", update.sim_time, self.last_sim_time
            )
            update = payloads.SceneUpdate(sim_time=self.last_sim_time, poses=update.poses)
        self.last_sim_time = update.sim_time
        self.current_poses.update(update.poses)
        data = frame(
            WireMessage(
                MessageKind.STATE_UPDATE,
                0,
                payloads.encode_state_update(update, self.name_to_id),
            )
        )
        for sub in self.subscribers:
            sub.offer(int(MessageKind.STATE_UPDATE), data)
        if update.poses:
            self._ws_broadcast(
                {
                    "type": "state_update",
                    "sim_time": update.sim_time,
                    "poses": {
                        name: {
                            "pos": list(pose.pos),
                            "rot": list(pose.rot_xyzw()),
                            "rot_order": "xyzw",
                        }
                        for name, pose in update.poses.items()
                    },
                }
            )

    async def publish_mesh_update(self, update: payloads.MeshUpdate) -> None:
        if update.object_name not in self.tracked:
            raise UnknownObject(f"not trackable: {update.object_name!r}")
        expected = self.mesh_vertex_counts.get((update.object_name, update.visual_index))
        if expected is None:
            raise UnknownObject(
                f"{update.object_name!r} visual {update.visual_index} is not a mesh"
            )
        if len(update.vertices) != expected * 3:
            raise TopologyMismatch(
                f"vertex count {len(update.vertices) // 3} != original {expected}"
            )
        payload = payloads.encode_mesh_update(update, self.name_to_id)
        self.current_meshes[(update.object_name, update.visual_index)] = payload
        data = frame(WireMessage(MessageKind.MESH_UPDATE, 0, payload))
        for sub in list(self.subscribers):
            await sub.push(int(MessageKind.MESH_UPDATE), data)
        self._ws_broadcast(
            {
                "type": "mesh_update",
                "object": update.object_name,
                "visual_index": update.visual_index,
                "vertex_count": len(update.vertices) // 3,
                "vertices": [float(v) for v in update.vertices],
            }
        )

    def publish_cloud_frame(self, frame_payload: bytes) -> None:
        data = frame(WireMessage(MessageKind.CLOUD_FRAME, 0, frame_payload))
        for sub in self.subscribers:
            sub.offer(int(MessageKind.CLOUD_FRAME), data)
        self._ws_broadcast(
            {
                "type": "cloud_frame",
                "data_b64": base64.b64encode(frame_payload).decode("ascii"),
            }
        )

    def step_demo(self, t: float) -> payloads.SceneUpdate:
        if not self.demo_name:
            raise NotADemoScene("master is publishing a file scene")
        return step_demo_scene(self.demo_name, t)

    # -- registry / anchors ---------------------------------------------------

    def _on_registry_event(self, event: str, node) -> None:
        self._ws_broadcast({"type": event, "node": node.to_dict()})

    def rename_node(self, node_id: str, new_name: str) -> None:
        if not new_name:
            raise InvalidName("device name must be non-empty")
        if node_id not in self.registry:
            raise UnknownNode(node_id)
        self.registry.rename(node_id, new_name)

    def list_nodes(self) -> list:
        return [node.to_dict() for node in self.registry.list()]

    def _stream_for(self, node_id: str) -> _Subscriber:
        if node_id not in self.registry:
            raise UnknownNode(node_id)
        sub = self.node_streams.get(node_id)
        if sub is None or sub.closed:
            raise UnknownNode(f"node {node_id} has no update stream")
        return sub

    async def set_anchor(self, node_id: str, pose) -> None:
        sub = self._stream_for(node_id)
        data = frame(
            WireMessage(
                MessageKind.REQUEST, 0, payloads.encode_request("anchor", payloads.encode_pose(pose))
            )
        )
        await sub.push(int(MessageKind.REQUEST), data)

    async def set_anchor_enabled(self, node_id: str, enabled: bool) -> None:
        sub = self._stream_for(node_id)
        data = frame(
            WireMessage(
                MessageKind.REQUEST,
                0,
                payloads.encode_request("anchor-ctl", b"\x01" if enabled else b"\x00"),
            )
        )
        await sub.push(int(MessageKind.REQUEST), data)

    def swap_scene(self, scene: SimScene) -> None:
        """Atomically replace the published scene and bump the epoch."""
        self._install_scene(scene)
        self.scene_epoch += 1
        notice = frame(
            WireMessage(
                MessageKind.REQUEST,
                0,
                payloads.encode_request("scene-epoch", str(self.scene_epoch).encode()),
            )
        )
        for sub in self.subscribers:
            sub.queue.append((int(MessageKind.REQUEST), notice))
            sub.wakeup.set()
        self._ws_broadcast({"type": "scene_epoch", "scene_epoch": self.scene_epoch})

    # -- websocket mirror -------------------------------------------------------

    def _ws_broadcast(self, event: dict) -> None:
        if not self.ws_queues:
            return
        text = json.dumps(event)
        for queue in self.ws_queues:
            if queue.full():
                try:
                    queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass
            queue.put_nowait(text)

    # -- service connection -----------------------------------------------------

    async def _handle_service_conn(self, reader, writer) -> None:
        decoder = FrameDecoder()
        write_lock = asyncio.Lock()
        try:
            while True:
                chunk = await reader.read(65536)
                if not chunk:
                    break
                for msg in decoder.feed(chunk):
                    if msg.kind is MessageKind.PING:
                        async with write_lock:
                            writer.write(frame(WireMessage(MessageKind.PONG, msg.request_id)))
                            await writer.drain()
                    elif msg.kind is MessageKind.REQUEST:
                        asyncio.create_task(
                            self._answer_request(msg, writer, write_lock)
                        )
                    elif msg.kind is MessageKind.CLOUD_FRAME:
                        self.publish_cloud_frame(msg.payload)
                    else:
                        log.debug("ignoring %s frame on service connection", msg.kind.name)
        except (ConnectionError, OSError):
            pass
        finally:
            writer.close()

    async def _answer_request(self, msg: WireMessage, writer, write_lock) -> None:
        try:
            service, body = payloads.decode_request(msg.payload)
            response = await self._dispatch_service(service, body)
            reply = WireMessage(MessageKind.RESPONSE, msg.request_id, response)
        except _ServiceError as exc:
            reply = WireMessage(
                MessageKind.ERROR, msg.request_id, payloads.encode_error(exc.code, exc.message)
            )
        except Exception as exc:  # noqa: BLE001 - surface as protocol error
            log.exception("service request failed")
            reply = WireMessage(
                MessageKind.ERROR, msg.request_id, payloads.encode_error(500, str(exc))
            )
        try:
            async with write_lock:
                writer.write(frame(reply))
                await writer.drain()
        except (ConnectionError, OSError):
            pass

    async def _dispatch_service(self, service: str, body: bytes) -> bytes:
        if service == "ping":
            return b""
        if service == "scene":
            return self.scene_doc
        if service == "asset":
            return await self._serve_asset(body.decode("ascii", errors="replace"))
        if service == "nodes":
            return json.dumps(self.list_nodes()).encode("utf-8")
        if service == "rename":
            node_id, rest = payloads.decode_node_ref(body)
            name = rest.decode("utf-8", errors="replace")
            try:
                self.rename_node(node_id.hex(), name)
            except UnknownNode as exc:
                raise _ServiceError(404, str(exc)) from None
            except InvalidName as exc:
                raise _ServiceError(400, str(exc)) from None
            return b""
        if service == "anchor":
            node_id, rest = payloads.decode_node_ref(body)
            try:
                await self.set_anchor(node_id.hex(), payloads.decode_pose(rest))
            except UnknownNode as exc:
                raise _ServiceError(404, str(exc)) from None
            return b""
        if service == "anchor-ctl":
            node_id, rest = payloads.decode_node_ref(body)
            try:
                await self.set_anchor_enabled(node_id.hex(), bool(rest and rest[0]))
            except UnknownNode as exc:
                raise _ServiceError(404, str(exc)) from None
            return b""
        raise _ServiceError(404, f"unknown service {service!r}")

    async def _serve_asset(self, hash_hex: str) -> bytes:
        blob = self.scene.assets.get(hash_hex)
        if blob is None:
            raise _ServiceError(404, f"unknown asset {hash_hex}")
        cached = self._asset_wire_cache.get(hash_hex)
        if cached is None:
            if self.config.compression == "deflate":
                loop = asyncio.get_running_loop()
                compressed = await loop.run_in_executor(None, zlib.compress, blob, 6)
            else:
                compressed = None
            if compressed is not None and len(compressed) < len(blob):
                cached = bytes([payloads.ASSET_DEFLATE]) + compressed
            else:
                cached = bytes([payloads.ASSET_RAW]) + blob
            self._asset_wire_cache[hash_hex] = cached
        return cached

    # -- stream connection ---------------------------------------------------

    async def _handle_stream_conn(self, reader, writer) -> None:
        decoder = FrameDecoder()
        sub = None
        node_hex = None
        try:
            # the subscription starts with the client's HELLO
            while sub is None:
                chunk = await asyncio.wait_for(reader.read(65536), timeout=10.0)
                if not chunk:
                    return
                for msg in decoder.feed(chunk):
                    if msg.kind is not MessageKind.HELLO:
                        continue
                    node_id, device_name, role = payloads.decode_hello(msg.payload)
                    node_hex = node_id.hex()
                    sub = _Subscriber(writer)
                    self.subscribers.add(sub)
                    self.node_streams[node_hex] = sub
                    self.registry.add(node_hex, device_name, role)
                    asyncio.create_task(sub.run_writer())
                    self._send_catchup(sub)
                    break
            while True:
                chunk = await reader.read(65536)
                if not chunk:
                    break
                self.registry.touch(node_hex)
                for msg in decoder.feed(chunk):
                    if msg.kind is MessageKind.PING:
                        await sub.push(
                            int(MessageKind.PONG),
                            frame(WireMessage(MessageKind.PONG, msg.request_id)),
                        )
        except (ConnectionError, OSError, asyncio.TimeoutError):
            pass
        finally:
            if sub is not None:
                self.subscribers.discard(sub)
                sub.close()
                if node_hex is not None:
                    if self.node_streams.get(node_hex) is sub:
                        self.node_streams.pop(node_hex, None)
                        self.registry.remove(node_hex)
            writer.close()

    def _send_catchup(self, sub: _Subscriber) -> None:
        """Bring a late joiner to the current state: merged poses + latest meshes."""
        update = payloads.SceneUpdate(sim_time=self.last_sim_time, poses=dict(self.current_poses))
        sub.offer(
            int(MessageKind.STATE_UPDATE),
            frame(
                WireMessage(
                    MessageKind.STATE_UPDATE,
                    0,
                    payloads.encode_state_update(update, self.name_to_id),
                )
            ),
        )
        for payload in self.current_meshes.values():
            sub.queue.append(
                (int(MessageKind.MESH_UPDATE), frame(WireMessage(MessageKind.MESH_UPDATE, 0, payload)))
            )
            sub.wakeup.set()


class _ServiceError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass
class LoopThread:
    loop: asyncio.AbstractEventLoop
    thread: threading.Thread


def _start_loop_thread() -> LoopThread:
    loop = asyncio.new_event_loop()
    thread = threading.Thread(target=loop.run_forever, name="master-loop", daemon=True)
    thread.start()
    return LoopThread(loop=loop, thread=thread)


class MasterHandle:
    """Thread-safe facade over the loop-internal MasterServer."""

    def __init__(self, server: MasterServer, loop_thread: LoopThread):
        self._server = server
        self._lt = loop_thread
        self._closed = False

    def _call(self, coro, timeout=30.0):
        if self._closed:
            raise RuntimeError("master handle is closed")
        return asyncio.run_coroutine_threadsafe(coro, self._lt.loop).result(timeout)

    # -- introspection ------------------------------------------------------

    @property
    def session_id(self) -> bytes:
        return self._server.session_id

    @property
    def scene_epoch(self) -> int:
        return self._server.scene_epoch

    @property
    def service_port(self) -> int:
        return self._server.service_port

    @property
    def stream_port(self) -> int:
        return self._server.stream_port

    @property
    def http_port(self) -> int:
        return self._server.http_port

    @property
    def discovery_port(self) -> int:
        return self._server.config.discovery_port

    @property
    def scene(self) -> SimScene:
        return self._server.scene

    # -- operations ----------------------------------------------------------

    def publish_update(self, update: payloads.SceneUpdate) -> None:
        async def run():
            self._server.publish_update(update)

        self._call(run())

    def publish_mesh_update(self, update: payloads.MeshUpdate) -> None:
        self._call(self._server.publish_mesh_update(update))

    def publish_cloud_frame(self, frame_payload: bytes) -> None:
        async def run():
            self._server.publish_cloud_frame(frame_payload)

        self._call(run())

    def step_demo_scene(self, t: float) -> payloads.SceneUpdate:
        return self._server.step_demo(t)

    def rename_node(self, node_id: str, new_name: str) -> None:
        async def run():
            self._server.rename_node(node_id, new_name)

        self._call(run())

    def list_nodes(self) -> list:
        async def run():
            return self._server.list_nodes()

        return self._call(run())

    def set_anchor(self, node_id: str, pose) -> None:
        self._call(self._server.set_anchor(node_id, pose))

    def set_anchor_enabled(self, node_id: str, enabled: bool) -> None:
        self._call(self._server.set_anchor_enabled(node_id, enabled))

    def swap_scene(self, scene: SimScene) -> None:
        async def run():
            self._server.swap_scene(scene)

        self._call(run())

    def shutdown(self, timeout: float = 10.0) -> None:
        if self._closed:
            return
        try:
            self._call(self._server.shutdown(), timeout=timeout)
        finally:
            self._closed = True
            self._lt.loop.call_soon_threadsafe(self._lt.loop.stop)
            self._lt.thread.join(timeout=timeout)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()


def start_master(config: PublisherConfig, scene: SimScene | None = None) -> MasterHandle:
    """Parse the scene, bind every socket, and start serving.

    A scene built programmatically (e.g. straight from a running simulation)
    can be passed directly instead of config.scene_path. Raises before any
    socket is bound when the scene fails to parse; raises BindError (with
    everything torn down again) when a port is taken.
    """
    if scene is not None:
        demo_name = None
    else:
        scene, demo_name = load_scene(config)
    lt = _start_loop_thread()
    server = MasterServer(config, scene, demo_name)
    try:
        asyncio.run_coroutine_threadsafe(server.startup(), lt.loop).result(30.0)
    except BaseException:
        lt.loop.call_soon_threadsafe(lt.loop.stop)
        lt.thread.join(timeout=5.0)
        raise
    log.info(
        "master %s up: service=%d stream=%d http=%d discovery=%d",
        config.master_name,
        server.service_port,
        server.stream_port,
        server.http_port,
        config.discovery_port,
    )
    return MasterHandle(server, lt)
