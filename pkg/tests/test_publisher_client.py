import math
import os
import socket
import time

import numpy as np
import pytest

from conftest import cloth_scene, grid_mesh, loopback_config
from scenesync.client import HeadlessClient
from scenesync.errors import (
    BindError,
    InvalidName,
    NotADemoScene,
    ParseError,
    RemoteError,
    TopologyMismatch,
    UnknownNode,
    UnknownObject,
)
from scenesync.publisher import (
    MeshUpdate,
    PublisherConfig,
    SceneUpdate,
    start_master,
)
from scenesync.usr import Pose
from scenesync.wire import discover_master


def wait_until(predicate, timeout=5.0, interval=0.01, message="condition not met"):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        value = predicate()
        if value:
            return value
        time.sleep(interval)
    raise AssertionError(message)


class TestSync:
    def test_sync_demo_orbit(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            assert state.scene.meta["name"] == "orbit"
            assert state.scene.assets == {}
            assert state.scene.find("ball") is not None
            wait_until(lambda: state.stats.frames_applied >= 2)

    def test_discover_beacon_details(self, orbit_master, discovery_port):
        beacon = discover_master(discovery_port, timeout=2.0)
        assert beacon.service_port == orbit_master.service_port
        assert beacon.stream_port == orbit_master.stream_port
        assert beacon.session_id == orbit_master.session_id

    def test_orbit_positions_follow_closed_form(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            wait_until(lambda: state.stats.last_sim_time > 0.2)
            with state._lock:
                t = state.stats.last_sim_time
                pos = state.kinematics.world["ball"].pos
            np.testing.assert_allclose(
                pos, (0.5 * math.cos(t), 0.2, 0.5 * math.sin(t)), atol=1e-5
            )


class TestPublish:
    def test_sequential_updates_in_order(self, discovery_port):
        with start_master(
            loopback_config(discovery_port), scene=cloth_scene()
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            last = None
            for i in range(1000):
                # f32-representable values so the wire round trip is exact
                last = Pose(pos=(0.0, float(np.float32(i / 1000.0)), 0.0))
                master.publish_update(SceneUpdate(sim_time=i * 1e-3, poses={"cloth": last}))
            wait_until(
                lambda: state.world_poses["cloth"].pos == last.pos,
                message="final pose did not arrive",
            )
            assert state.stats.last_sim_time == pytest.approx(0.999)

    def test_unknown_object_rejected_whole(self, discovery_port):
        with start_master(loopback_config(discovery_port), scene=cloth_scene()) as master:
            with pytest.raises(UnknownObject):
                master.publish_update(
                    SceneUpdate(sim_time=0.0, poses={"cloth": Pose(), "ghost": Pose()})
                )

    def test_no_tracked_object_rejected(self, discovery_port):
        config = loopback_config(discovery_port)
        config.parser.no_tracked_objects = ["cloth"]
        with start_master(config, scene=cloth_scene()) as master:
            with pytest.raises(UnknownObject):
                master.publish_update(SceneUpdate(sim_time=0.0, poses={"cloth": Pose()}))

    def test_heartbeat_empty_update(self, discovery_port):
        with start_master(loopback_config(discovery_port), scene=cloth_scene()) as master:
            master.publish_update(SceneUpdate(sim_time=1.0, poses={}))  # no error

    def test_step_demo_on_file_scene_raises(self, discovery_port):
        with start_master(loopback_config(discovery_port), scene=cloth_scene()) as master:
            with pytest.raises(NotADemoScene):
                master.step_demo_scene(1.0)

    def test_sim_time_monotonic_on_wire(self, discovery_port):
        with start_master(
            loopback_config(discovery_port), scene=cloth_scene()
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            master.publish_update(SceneUpdate(sim_time=5.0, poses={"cloth": Pose()}))
            master.publish_update(SceneUpdate(sim_time=2.0, poses={"cloth": Pose(pos=(1, 0, 0))}))
            wait_until(lambda: state.world_poses["cloth"].pos == (1.0, 0.0, 0.0))
            assert state.stats.last_sim_time == 5.0


class TestMeshUpdates:
    def test_mesh_update_applied_bitwise(self, discovery_port):
        scene = cloth_scene(side=6)
        with start_master(
            loopback_config(discovery_port), scene=scene
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            rng = np.random.default_rng(1)
            verts = rng.normal(size=36 * 3).astype(np.float32)
            master.publish_mesh_update(MeshUpdate("cloth", 0, verts))
            wait_until(lambda: state.stats.mesh_frames_applied == 1)
            buffer = state.mesh_buffers[("cloth", 0)]
            assert buffer.vertices.tobytes() == verts.tobytes()

    def test_wrong_vertex_count_rejected_by_master(self, discovery_port):
        with start_master(loopback_config(discovery_port), scene=cloth_scene(side=6)) as master:
            with pytest.raises(TopologyMismatch):
                master.publish_mesh_update(
                    MeshUpdate("cloth", 0, np.zeros(5 * 3, dtype=np.float32))
                )

    def test_wrong_vertex_count_rejected_by_client(self, discovery_port):
        from scenesync.wire.payloads import MeshUpdate as WireMeshUpdate

        scene = cloth_scene(side=6)
        with start_master(
            loopback_config(discovery_port), scene=scene
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            bad = WireMeshUpdate("cloth", 0, np.zeros(9, dtype=np.float32))
            state.apply_update(bad)
            assert state.stats.topology_mismatch == 1
            assert state.stats.mesh_frames_applied == 0

    def test_index_buffers_never_change(self, discovery_port):
        scene = cloth_scene(side=6)
        with start_master(
            loopback_config(discovery_port), scene=scene
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            before = state.mesh_buffers[("cloth", 0)].indices.copy()
            for i in range(10):
                master.publish_mesh_update(
                    MeshUpdate("cloth", 0, np.full(36 * 3, float(i), dtype=np.float32))
                )
            wait_until(lambda: state.stats.mesh_frames_applied == 10)
            np.testing.assert_array_equal(state.mesh_buffers[("cloth", 0)].indices, before)


class TestServices:
    def test_ping_service(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            assert client.service.request("ping") == b""

    def test_unknown_asset_404(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            with pytest.raises(RemoteError) as err:
                client.service.request("asset", b"00" * 32)
            assert err.value.code == 404

    def test_unknown_service_404(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            with pytest.raises(RemoteError):
                client.service.request("teleport", b"")

    def test_pipelined_requests_matched_by_id(self, orbit_master, discovery_port):
        import concurrent.futures

        with HeadlessClient(discovery_port=discovery_port, timeout=5.0) as client:
            client.connect_and_sync()
            doc = client.service.request("scene")
            with concurrent.futures.ThreadPoolExecutor(max_workers=32) as pool:
                futures = []
                for i in range(1000):
                    service = "scene" if i % 3 == 0 else "ping"
                    futures.append(pool.submit(client.service.request, service, b"", 20.0))
                results = [f.result() for f in futures]
            for i, result in enumerate(results):
                expected = doc if i % 3 == 0 else b""
                assert result == expected

    def test_idle_ping_under_50ms(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            time.sleep(0.5)  # idle
            assert client.service.ping() < 0.050


class TestServeAsset:
    def test_incompressible_blob_served_raw(self, discovery_port):
        scene = cloth_scene()
        blob = os.urandom(64 * 1024)
        from scenesync.usr import compute_asset_hash

        blob_hash = compute_asset_hash(blob)
        scene.assets[blob_hash] = blob  # unreferenced extra blob is servable
        with start_master(
            loopback_config(discovery_port), scene=scene
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            raw = client.service.request("asset", blob_hash.encode())
            assert raw[0] == 0  # raw flag
            assert raw[1:] == blob

    def test_constant_blob_compresses_over_10x(self, discovery_port):
        from scenesync.usr import compute_asset_hash

        scene = cloth_scene()
        blob = b"\x7f" * (1024 * 1024)
        blob_hash = compute_asset_hash(blob)
        scene.assets[blob_hash] = blob
        with start_master(
            loopback_config(discovery_port), scene=scene
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            raw = client.service.request("asset", blob_hash.encode())
            assert raw[0] == 1  # deflate flag
            assert len(raw) < len(blob) / 10
            import zlib

            assert compute_asset_hash(zlib.decompress(raw[1:])) == blob_hash


class TestRegistryAndAnchors:
    def test_rename_and_list(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            node_id = client.node_id.hex()
            wait_until(lambda: any(n["node_id"] == node_id for n in orbit_master.list_nodes()))
            orbit_master.rename_node(node_id, "quest-3")
            names = {n["node_id"]: n["device_name"] for n in orbit_master.list_nodes()}
            assert names[node_id] == "quest-3"

    def test_rename_unknown_node(self, orbit_master):
        with pytest.raises(UnknownNode):
            orbit_master.rename_node("ff" * 16, "nope")

    def test_rename_empty_name(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            client.connect_and_sync()
            node_id = client.node_id.hex()
            wait_until(lambda: any(n["node_id"] == node_id for n in orbit_master.list_nodes()))
            with pytest.raises(InvalidName):
                orbit_master.rename_node(node_id, "")

    def test_anchor_isolation_between_clients(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as c1, HeadlessClient(
            discovery_port=discovery_port, timeout=3.0
        ) as c2:
            s1, s2 = c1.connect_and_sync(), c2.connect_and_sync()
            wait_until(lambda: len(orbit_master.list_nodes()) == 2)
            wait_until(lambda: s1.stats.frames_applied > 0 and s2.stats.frames_applied > 0)
            orbit_master.set_anchor(c1.node_id.hex(), Pose(pos=(1, 0, 0)))
            wait_until(lambda: s1.anchor.pos == (1.0, 0.0, 0.0))
            # anchored client shifts, the other does not
            w1 = s1.world_poses["ground"].pos
            w2 = s2.world_poses["ground"].pos
            assert w1 == (1.0, 0.0, 0.0)
            assert w2 == (0.0, 0.0, 0.0)

    def test_anchor_ctl_toggles_accept_flag(self, orbit_master, discovery_port):
        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            node_id = client.node_id.hex()
            wait_until(lambda: any(n["node_id"] == node_id for n in orbit_master.list_nodes()))
            assert state.anchor_accept is True
            orbit_master.set_anchor_enabled(node_id, False)
            wait_until(lambda: state.anchor_accept is False)
            orbit_master.set_anchor(node_id, Pose(pos=(5, 0, 0)))
            time.sleep(0.2)
            assert state.anchor.pos == (0.0, 0.0, 0.0)  # push ignored while disabled
            orbit_master.set_anchor_enabled(node_id, True)
            wait_until(lambda: state.anchor_accept is True)

    def test_anchor_unknown_node(self, orbit_master):
        with pytest.raises(UnknownNode):
            orbit_master.set_anchor("aa" * 16, Pose())


class TestLifecycle:
    def test_http_port_in_use_raises_bind_error(self, discovery_port):
        blocker = socket.create_server(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        try:
            with pytest.raises(BindError):
                start_master(loopback_config(discovery_port, http_port=port, demo="orbit"))
        finally:
            blocker.close()

    def test_malformed_scene_no_sockets_bound(self, discovery_port, tmp_path):
        bad = tmp_path / "broken.xml"
        bad.write_text("<mujoco><worldbody>")
        with pytest.raises(ParseError):
            start_master(loopback_config(discovery_port, scene_path=bad))
        # no beacon should be alive afterwards
        from scenesync.errors import NoMasterFound

        with pytest.raises(NoMasterFound):
            discover_master(discovery_port, timeout=0.5)

    def test_shutdown_disconnects_clients(self, discovery_port):
        master = start_master(loopback_config(discovery_port, demo="orbit"))
        client = HeadlessClient(discovery_port=discovery_port, timeout=3.0)
        try:
            client.connect_and_sync()
            assert client.connected
            master.shutdown()
            wait_until(lambda: not client.connected, timeout=2.0)
        finally:
            client.close()

    def test_late_joiner_equivalence(self, discovery_port):
        with start_master(loopback_config(discovery_port), scene=cloth_scene()) as master:
            early = HeadlessClient(discovery_port=discovery_port, timeout=3.0)
            s_early = early.connect_and_sync()
            for i in range(50):
                master.publish_update(
                    SceneUpdate(sim_time=float(i), poses={"cloth": Pose(pos=(0, i * 0.1, 0))})
                )
            wait_until(lambda: s_early.stats.last_sim_time == 49.0)
            late = HeadlessClient(discovery_port=discovery_port, timeout=3.0)
            s_late = late.connect_and_sync()
            # one catch-up update brings the late joiner to the same state
            wait_until(lambda: s_late.stats.frames_applied >= 1)
            try:
                assert s_late.world_poses["cloth"].pos == s_early.world_poses["cloth"].pos
            finally:
                early.close()
                late.close()

    def test_scene_swap_triggers_refetch(self, discovery_port):
        with start_master(
            loopback_config(discovery_port), scene=cloth_scene(side=4)
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            assert master.scene_epoch == 1
            master.swap_scene(cloth_scene(side=7))
            assert master.scene_epoch == 2
            wait_until(
                lambda: client.state is not None
                and client.state.mesh_buffers[("cloth", 0)].vertex_count == 49,
                timeout=5.0,
            )

    def test_tick_regularity_30hz(self, discovery_port):
        # 10 s at 30 Hz: 300 +- 2 tick frames, receive jitter p99 < 10 ms
        with start_master(
            loopback_config(discovery_port, demo="orbit")
        ) as master, HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            arrivals = []
            sim_times = []
            original = client._on_stream_message

            def tap(msg):
                from scenesync.wire.framing import MessageKind
                from scenesync.wire.payloads import decode_state_update

                if msg.kind is MessageKind.STATE_UPDATE:
                    sim_time, entries = decode_state_update(msg.payload)
                    if entries:  # tick frames carry poses; the catch-up may not
                        arrivals.append(time.perf_counter())
                        sim_times.append(sim_time)
                original(msg)

            client.stream._on_message = tap
            time.sleep(0.5)  # settle
            arrivals.clear()
            sim_times.clear()
            time.sleep(10.0)
            # snapshot to avoid racing the reader
            window = list(zip(sim_times, arrivals))

        count = len(window)
        assert 298 <= count <= 302, f"{count} tick frames in 10 s"
        deltas = np.diff([a for _, a in window])
        jitter = np.abs(deltas - (1.0 / 30.0))
        p99 = float(np.percentile(jitter, 99))
        assert p99 < 0.010, f"jitter p99 {p99 * 1000:.2f} ms"

    def test_cloud_frame_fanout(self, orbit_master, discovery_port):
        from scenesync.cloud import PointCloud
        from scenesync.cloud.codec import encode_frame

        with HeadlessClient(discovery_port=discovery_port, timeout=3.0) as client:
            state = client.connect_and_sync()
            rng = np.random.default_rng(3)
            cloud = PointCloud(
                xyz=rng.normal(size=(50, 3)).astype(np.float32),
                rgb=rng.integers(0, 255, (50, 3), dtype=np.uint8),
            )
            orbit_master.publish_cloud_frame(encode_frame(cloud))
            wait_until(lambda: state.stats.cloud_frames == 1)
