from .types import (
    GeometryKind,
    Pose,
    SimMaterial,
    SimMesh,
    SimObject,
    SimScene,
    SimVisual,
)
from .assets import (
    compute_asset_hash,
    decode_mesh_blob,
    encode_mesh_blob,
    png_size,
)
from .serialize import deserialize_scene, serialize_scene, scene_name_table
from .validate import ValidationIssue, ValidationReport, validate_scene

__all__ = [
    "GeometryKind",
    "Pose",
    "SimMaterial",
    "SimMesh",
    "SimObject",
    "SimScene",
    "SimVisual",
    "compute_asset_hash",
    "encode_mesh_blob",
    "decode_mesh_blob",
    "png_size",
    "serialize_scene",
    "deserialize_scene",
    "scene_name_table",
    "validate_scene",
    "ValidationReport",
    "ValidationIssue",
]
