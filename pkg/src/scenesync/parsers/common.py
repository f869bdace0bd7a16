"""Shared machinery for the scene-description parsers: frame conversion of
poses and mesh data, and content-addressed asset registration."""

import logging
from pathlib import Path

import numpy as np

from .. import frames
from ..errors import AssetNotFound, ParseError
from ..usr.assets import compute_asset_hash, encode_mesh_blob, png_size
from ..usr.types import Pose, SimMesh
from .obj import load_mesh_obj

log = logging.getLogger("scenesync.parsers")

PLANE_INFINITE_EXTENT = 20.0  # stand-in extent for "infinite" planes, meters


def pose_to_client(pos, quat_wxyz, dims=(1.0, 1.0, 1.0)) -> Pose:
    """Robotics-frame (pos, wxyz quat, per-axis extents) -> client-frame Pose."""
    return Pose(
        pos=frames.robotics_to_client_pos(pos),
        rot=frames.robotics_to_client_quat(frames.quat_normalize(quat_wxyz)),
        rot_order="xyzw",
        scale=frames.robotics_to_client_dims(dims),
    )


def convert_mesh_to_client(mesh: SimMesh, scale=(1.0, 1.0, 1.0)) -> SimMesh:
    """Bake the file-level scale and map mesh data into the client frame.

    Vertices and normals go through the position map; triangle winding is
    reversed to keep front faces front under the handedness flip. A
    negative-determinant scale flips winding once more.
    """
    sx, sy, sz = (float(s) for s in scale)
    verts = mesh.vertices.reshape(-1, 3).astype(np.float64) * (sx, sy, sz)
    indices = frames.reverse_winding(mesh.indices)
    if sx * sy * sz < 0:
        indices = frames.reverse_winding(indices)

    normals = mesh.normals
    if len(normals):
        n = normals.reshape(-1, 3).astype(np.float64)
        if (sx, sy, sz) != (1.0, 1.0, 1.0):
            # normals transform with the inverse scale; renormalize after
            n = n / (sx, sy, sz)
            lengths = np.linalg.norm(n, axis=1, keepdims=True)
            lengths[lengths == 0] = 1.0
            n = n / lengths
        normals = frames.robotics_to_client_vectors(n.astype(np.float32).reshape(-1))

    return SimMesh(
        vertices=frames.robotics_to_client_vectors(verts.astype(np.float32).reshape(-1)),
        indices=indices,
        normals=normals,
        uvs=mesh.uvs.copy(),
    )


class AssetStore:
    """Deduplicating loader: file path (+ scale) -> registered blob hash."""

    def __init__(self, options):
        self.options = options
        self.blobs = {}  # hash -> bytes
        self._mesh_cache = {}
        self._texture_cache = {}

    def load_mesh(self, relpath: str, scale=(1.0, 1.0, 1.0)):
        """Returns the blob hash, or None for unsupported formats (logged)."""
        key = (relpath, tuple(float(s) for s in scale))
        if key in self._mesh_cache:
            return self._mesh_cache[key]
        path = self.options.resolve(relpath)
        if path is None:
            raise AssetNotFound(relpath)
        if path.suffix.lower() != ".obj":
            log.warning("skipping mesh %s: only OBJ assets are supported", relpath)
            self._mesh_cache[key] = None
            return None
        mesh = convert_mesh_to_client(load_mesh_obj(path.read_bytes()), scale=scale)
        blob = encode_mesh_blob(mesh)
        blob_hash = compute_asset_hash(blob)
        self.blobs[blob_hash] = blob
        self._mesh_cache[key] = blob_hash
        return blob_hash

    def load_texture(self, relpath: str):
        """Returns (hash, (width, height)), or None for non-PNG files (logged)."""
        if relpath in self._texture_cache:
            return self._texture_cache[relpath]
        path = self.options.resolve(relpath)
        if path is None:
            raise AssetNotFound(relpath)
        blob = path.read_bytes()
        size = png_size(blob)
        if size is None:
            log.warning("skipping texture %s: only PNG textures are supported", relpath)
            self._texture_cache[relpath] = None
            return None
        blob_hash = compute_asset_hash(blob)
        self.blobs[blob_hash] = blob
        result = (blob_hash, size)
        self._texture_cache[relpath] = result
        return result


def parse_floats(raw: str, expect=None, what="value") -> list:
    try:
        values = [float(v) for v in raw.split()]
    except ValueError:
        raise ParseError(f"cannot parse {what} {raw!r} as numbers") from None
    if expect is not None and len(values) != expect:
        raise ParseError(f"{what} needs {expect} numbers, got {len(values)}: {raw!r}")
    return values


def clamp01(values):
    return tuple(min(1.0, max(0.0, float(v))) for v in values)
