import itertools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))  # for the oracles module

from scenesync.publisher import PublisherConfig, start_master
from scenesync.usr import (
    GeometryKind,
    Pose,
    SimMaterial,
    SimMesh,
    SimObject,
    SimScene,
    SimVisual,
    compute_asset_hash,
    encode_mesh_blob,
)

LOOPBACK_BROADCAST = ["127.255.255.255"]

_ports = itertools.count(43000 + (os.getpid() % 997) * 13 % 9000)

# one line per acceptance criterion, printed after the run summary
ACCEPTANCE_LINES = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] {name}" + (f" — {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def discovery_port():
    return next(_ports)


def loopback_config(discovery_port, **overrides) -> PublisherConfig:
    base = dict(
        discovery_port=discovery_port,
        http_port=0,
        broadcast_addrs=list(LOOPBACK_BROADCAST),
        master_name="test-master",
    )
    base.update(overrides)
    return PublisherConfig(**base)


@pytest.fixture
def orbit_master(discovery_port):
    handle = start_master(loopback_config(discovery_port, demo="orbit"))
    yield handle
    handle.shutdown()


def grid_mesh(side: int, cols: int | None = None) -> SimMesh:
    """A flat rows x cols vertex grid in the XZ plane (client frame)."""
    rows = side
    cols = cols or side
    xs, zs = np.meshgrid(np.linspace(0, 1, cols), np.linspace(0, 1, rows))
    verts = np.column_stack(
        [xs.ravel(), np.zeros(rows * cols), zs.ravel()]
    ).astype(np.float32)
    tris = []
    for r in range(rows - 1):
        for c in range(cols - 1):
            a = r * cols + c
            tris += [(a, a + 1, a + cols), (a + 1, a + cols + 1, a + cols)]
    normals = np.tile(np.array([0, 1, 0], dtype=np.float32), (rows * cols, 1))
    return SimMesh(
        vertices=verts.reshape(-1),
        indices=np.asarray(tris, dtype=np.uint32).reshape(-1),
        normals=normals.reshape(-1),
    )


def cloth_scene(side: int = 8, cols: int | None = None) -> SimScene:
    mesh = grid_mesh(side, cols)
    blob = encode_mesh_blob(mesh)
    blob_hash = compute_asset_hash(blob)
    cloth = SimObject(
        name="cloth",
        transform=Pose(pos=(0, 1, 0)),
        visuals=[
            SimVisual(
                geometry_kind=GeometryKind.MESH,
                mesh_ref=blob_hash,
                material=SimMaterial(color=(0.8, 0.2, 0.2, 1.0)),
            )
        ],
    )
    root = SimObject(name="world", children=[cloth])
    return SimScene(root=root, assets={blob_hash: blob}, meta={"name": "cloth"})
