"""Content-addressed asset blobs.

A blob is an opaque byte string; only its digest travels inside the scene
document. Meshes use a fixed little-endian binary layout so the same mesh
hashes identically on any platform:

    u32 vertex_count | u32 index_count | u32 flags     (flags bit0 = normals,
    vertices f32*3n  | indices u32*m   | [normals]      bit1 = uvs)
    [uvs f32*2n]

Textures are stored as their PNG file bytes unchanged.
"""

import hashlib
import struct

import numpy as np

from ..errors import DecodeError, InvalidAsset
from .types import SimMesh

_MESH_HEADER = struct.Struct("<III")
FLAG_NORMALS = 1
FLAG_UVS = 2


def compute_asset_hash(blob: bytes) -> str:
    """SHA-256 of the blob bytes, as lowercase hex."""
    if not blob:
        raise InvalidAsset("empty blob")
    return hashlib.sha256(blob).hexdigest()


def encode_mesh_blob(mesh: SimMesh) -> bytes:
    flags = 0
    if len(mesh.normals):
        flags |= FLAG_NORMALS
    if len(mesh.uvs):
        flags |= FLAG_UVS
    parts = [
        _MESH_HEADER.pack(mesh.vertex_count, len(mesh.indices), flags),
        mesh.vertices.astype("<f4").tobytes(),
        mesh.indices.astype("<u4").tobytes(),
    ]
    if flags & FLAG_NORMALS:
        parts.append(mesh.normals.astype("<f4").tobytes())
    if flags & FLAG_UVS:
        parts.append(mesh.uvs.astype("<f4").tobytes())
    return b"".join(parts)


def decode_mesh_blob(blob: bytes) -> SimMesh:
    if len(blob) < _MESH_HEADER.size:
        raise DecodeError("mesh blob shorter than header")
    n_vert, n_idx, flags = _MESH_HEADER.unpack_from(blob, 0)
    offset = _MESH_HEADER.size
    expected = n_vert * 12 + n_idx * 4
    if flags & FLAG_NORMALS:
        expected += n_vert * 12
    if flags & FLAG_UVS:
        expected += n_vert * 8
    if len(blob) - offset != expected:
        raise DecodeError(
            f"mesh blob size mismatch: have {len(blob) - offset}, expected {expected}"
        )

    def take(count, dtype, itemsize):
        nonlocal offset
        arr = np.frombuffer(blob, dtype=dtype, count=count, offset=offset).copy()
        offset += count * itemsize
        return arr

    vertices = take(n_vert * 3, "<f4", 4)
    indices = take(n_idx, "<u4", 4)
    normals = (
        take(n_vert * 3, "<f4", 4)
        if flags & FLAG_NORMALS
        else np.empty(0, dtype=np.float32)
    )
    uvs = (
        take(n_vert * 2, "<f4", 4)
        if flags & FLAG_UVS
        else np.empty(0, dtype=np.float32)
    )
    return SimMesh(vertices=vertices, indices=indices, normals=normals, uvs=uvs)


_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def png_size(blob: bytes):
    """(width, height) from a PNG header, or None if not a PNG."""
    if len(blob) < 24 or not blob.startswith(_PNG_MAGIC):
        return None
    width, height = struct.unpack(">II", blob[16:24])
    return (width, height)
