"""Binary payload layouts carried inside wire frames.

All multibyte integers inside payloads are little-endian (the frame header
is big-endian). Object references in stream payloads use u16 ids from the
name table derived from the scene document (depth-first preorder).
"""

import struct
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..errors import DecodeError
from ..usr.types import Pose

# --- request / error --------------------------------------------------------


def encode_request(service: str, payload: bytes = b"") -> bytes:
    name = service.encode("ascii")
    if len(name) > 255:
        raise ValueError("service name too long")
    return bytes([len(name)]) + name + payload


def decode_request(data: bytes):
    if not data:
        raise DecodeError("empty request payload")
    name_len = data[0]
    if len(data) < 1 + name_len:
        raise DecodeError("truncated request payload")
    service = data[1 : 1 + name_len].decode("ascii", errors="replace")
    return service, data[1 + name_len :]


def encode_error(code: int, message: str) -> bytes:
    return struct.pack("<H", code) + message.encode("utf-8")


def decode_error(data: bytes):
    if len(data) < 2:
        raise DecodeError("truncated error payload")
    (code,) = struct.unpack_from("<H", data, 0)
    return code, data[2:].decode("utf-8", errors="replace")


# --- hello ------------------------------------------------------------------

ROLE_CLIENT = 1
ROLE_DASHBOARD = 2
_ROLE_NAMES = {ROLE_CLIENT: "client", ROLE_DASHBOARD: "dashboard"}
_ROLE_CODES = {v: k for k, v in _ROLE_NAMES.items()}


def encode_hello(node_id: bytes, device_name: str, role: str) -> bytes:
    if len(node_id) != 16:
        raise ValueError("node_id must be 16 bytes")
    name = device_name.encode("utf-8")
    return bytes([_ROLE_CODES[role]]) + node_id + struct.pack("<H", len(name)) + name


def decode_hello(data: bytes):
    if len(data) < 19:
        raise DecodeError("truncated hello payload")
    role = _ROLE_NAMES.get(data[0])
    if role is None:
        raise DecodeError(f"unknown role code {data[0]}")
    node_id = bytes(data[1:17])
    (name_len,) = struct.unpack_from("<H", data, 17)
    name = data[19 : 19 + name_len].decode("utf-8", errors="replace")
    return node_id, name, role


# --- poses ------------------------------------------------------------------

_POSE = struct.Struct("<3f4f")


def encode_pose(pose: Pose) -> bytes:
    x, y, z, w = pose.rot_xyzw()
    return _POSE.pack(*pose.pos, x, y, z, w)


def decode_pose(data: bytes, offset: int = 0) -> Pose:
    values = _POSE.unpack_from(data, offset)
    return Pose(pos=values[:3], rot=values[3:], rot_order="xyzw")


# --- state updates ----------------------------------------------------------


@dataclass
class SceneUpdate:
    """Local-pose snapshot for a set of objects at one simulation time."""

    sim_time: float
    poses: Dict[str, Pose] = field(default_factory=dict)


@dataclass
class MeshUpdate:
    """Full vertex-buffer replacement for one visual (topology unchanged)."""

    object_name: str
    visual_index: int
    vertices: np.ndarray  # flat float32 xyz triples
    normals: Optional[np.ndarray] = None

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float32).reshape(-1)
        if self.normals is not None:
            self.normals = np.ascontiguousarray(self.normals, dtype=np.float32).reshape(-1)


_STATE_HEADER = struct.Struct("<dI")
_STATE_ENTRY = struct.Struct("<H3f4f")


def encode_state_update(update: SceneUpdate, name_to_id: Dict[str, int]) -> bytes:
    parts = [_STATE_HEADER.pack(update.sim_time, len(update.poses))]
    for name, pose in update.poses.items():
        x, y, z, w = pose.rot_xyzw()
        parts.append(_STATE_ENTRY.pack(name_to_id[name], *pose.pos, x, y, z, w))
    return b"".join(parts)


def decode_state_update(data: bytes):
    """-> (sim_time, [(name_id, Pose), ...]); mapping ids is the caller's job."""
    if len(data) < _STATE_HEADER.size:
        raise DecodeError("truncated state update")
    sim_time, count = _STATE_HEADER.unpack_from(data, 0)
    expected = _STATE_HEADER.size + count * _STATE_ENTRY.size
    if len(data) != expected:
        raise DecodeError(f"state update size {len(data)} != expected {expected}")
    entries = []
    offset = _STATE_HEADER.size
    for _ in range(count):
        values = _STATE_ENTRY.unpack_from(data, offset)
        offset += _STATE_ENTRY.size
        entries.append(
            (values[0], Pose(pos=values[1:4], rot=values[4:8], rot_order="xyzw"))
        )
    return sim_time, entries


_MESH_HEADER = struct.Struct("<HIBI")
_MESH_FLAG_NORMALS = 1


def encode_mesh_update(update: MeshUpdate, name_to_id: Dict[str, int]) -> bytes:
    flags = _MESH_FLAG_NORMALS if update.normals is not None else 0
    parts = [
        _MESH_HEADER.pack(
            name_to_id[update.object_name],
            update.visual_index,
            flags,
            len(update.vertices) // 3,
        ),
        update.vertices.astype("<f4").tobytes(),
    ]
    if update.normals is not None:
        parts.append(update.normals.astype("<f4").tobytes())
    return b"".join(parts)


def decode_mesh_update(data: bytes):
    """-> (name_id, visual_index, vertices, normals or None)."""
    if len(data) < _MESH_HEADER.size:
        raise DecodeError("truncated mesh update")
    name_id, visual_index, flags, vertex_count = _MESH_HEADER.unpack_from(data, 0)
    offset = _MESH_HEADER.size
    expected = vertex_count * 12 * (2 if flags & _MESH_FLAG_NORMALS else 1)
    if len(data) - offset != expected:
        raise DecodeError("mesh update size mismatch")
    vertices = np.frombuffer(data, dtype="<f4", count=vertex_count * 3, offset=offset).copy()
    normals = None
    if flags & _MESH_FLAG_NORMALS:
        normals = np.frombuffer(
            data, dtype="<f4", count=vertex_count * 3, offset=offset + vertex_count * 12
        ).copy()
    return name_id, visual_index, vertices, normals


# --- service payloads ---------------------------------------------------------


def encode_node_ref(node_id: bytes, extra: bytes = b"") -> bytes:
    if len(node_id) != 16:
        raise ValueError("node_id must be 16 bytes")
    return node_id + extra


def decode_node_ref(data: bytes):
    if len(data) < 16:
        raise DecodeError("payload too short for a node id")
    return bytes(data[:16]), data[16:]


# asset responses: 1-byte flag prefix, then blob bytes
ASSET_RAW = 0
ASSET_DEFLATE = 1
