"""The unified scene representation: a kinematic tree of objects with visuals,
materials, and content-addressed mesh/texture assets.

All types are value data; treat instances as immutable once a scene has been
built (parsers and the publisher never mutate a published scene). Asset blobs
live in a flat hash-addressed map on the scene so that N visuals referencing
the same mesh store its bytes exactly once.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

import numpy as np

# Content digest of a canonical blob encoding, rendered as lowercase hex.
AssetHash = str

IDENTITY_SCALE = (1.0, 1.0, 1.0)


class GeometryKind(str, Enum):
    BOX = "box"
    SPHERE = "sphere"
    CAPSULE = "capsule"
    CYLINDER = "cylinder"
    PLANE = "plane"
    MESH = "mesh"


@dataclass
class Pose:
    """Position + quaternion (+ optional per-axis scale).

    The quaternion component ordering is explicit via rot_order ("wxyz" or
    "xyzw") and is always written to serialized forms. Scale defaults to
    identity and is only meaningful on visual transforms.
    """

    pos: tuple = (0.0, 0.0, 0.0)
    rot: tuple = (0.0, 0.0, 0.0, 1.0)
    rot_order: str = "xyzw"
    scale: tuple = IDENTITY_SCALE

    def __post_init__(self):
        self.pos = tuple(float(v) for v in self.pos)
        self.rot = tuple(float(v) for v in self.rot)
        self.scale = tuple(float(v) for v in self.scale)
        if self.rot_order not in ("wxyz", "xyzw"):
            raise ValueError(f"rot_order must be wxyz or xyzw, got {self.rot_order!r}")

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    def rot_xyzw(self) -> tuple:
        if self.rot_order == "xyzw":
            return self.rot
        w, x, y, z = self.rot
        return (x, y, z, w)


@dataclass
class SimMaterial:
    color: tuple = (1.0, 1.0, 1.0, 1.0)
    emission_color: tuple = (0.0, 0.0, 0.0, 1.0)
    reflectance: float = 0.0
    texture_ref: Optional[AssetHash] = None
    texture_size: Optional[tuple] = None

    def __post_init__(self):
        self.color = tuple(float(v) for v in self.color)
        self.emission_color = tuple(float(v) for v in self.emission_color)
        self.reflectance = float(self.reflectance)
        if self.texture_size is not None:
            self.texture_size = (int(self.texture_size[0]), int(self.texture_size[1]))


@dataclass
class SimVisual:
    """One geometric element attached to an object.

    geometry_kind == MESH iff mesh_ref is set; primitive dimensions are
    carried as the full per-axis extents in local_transform.scale (see
    docs/wire-format.md for the unit-primitive conventions).
    """

    geometry_kind: GeometryKind
    local_transform: Pose = field(default_factory=Pose)
    mesh_ref: Optional[AssetHash] = None
    material: SimMaterial = field(default_factory=SimMaterial)


@dataclass
class SimObject:
    """A node of the kinematic tree; transform is local to the parent."""

    name: str
    transform: Pose = field(default_factory=Pose)
    children: list = field(default_factory=list)
    visuals: list = field(default_factory=list)

    def walk(self) -> Iterator["SimObject"]:
        """Depth-first preorder over this subtree (self first)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass
class SimScene:
    root: SimObject
    assets: dict = field(default_factory=dict)  # AssetHash -> blob bytes
    meta: dict = field(default_factory=dict)

    def objects(self) -> Iterator[SimObject]:
        return self.root.walk()

    def find(self, name: str) -> Optional[SimObject]:
        for obj in self.objects():
            if obj.name == name:
                return obj
        return None

    def referenced_assets(self) -> list:
        """Sorted unique asset hashes referenced by any visual."""
        refs = set()
        for obj in self.objects():
            for vis in obj.visuals:
                if vis.mesh_ref:
                    refs.add(vis.mesh_ref)
                if vis.material.texture_ref:
                    refs.add(vis.material.texture_ref)
        return sorted(refs)


@dataclass(eq=False)
class SimMesh:
    """Decoded mesh payload: flat little-endian arrays.

    vertices/normals are float32 xyz triples, uvs float32 pairs (may be
    empty), indices uint32 triangle corners.
    """

    vertices: np.ndarray
    indices: np.ndarray
    normals: np.ndarray
    uvs: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.float32))

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float32).reshape(-1)
        self.indices = np.ascontiguousarray(self.indices, dtype=np.uint32).reshape(-1)
        self.normals = np.ascontiguousarray(self.normals, dtype=np.float32).reshape(-1)
        self.uvs = np.ascontiguousarray(self.uvs, dtype=np.float32).reshape(-1)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices) // 3

    @property
    def triangle_count(self) -> int:
        return len(self.indices) // 3
