"""Value types for the depth-camera pipeline."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from ..frames import FrameTag

MAX_POINTS = 2**24


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")


@dataclass
class DepthImage:
    """u16 depth in millimeters (0 = invalid) with a color image of equal size."""

    depth: np.ndarray  # (h, w) uint16
    rgb: np.ndarray  # (h, w, 3) uint8

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=np.uint16)
        self.rgb = np.asarray(self.rgb, dtype=np.uint8)
        if self.depth.ndim != 2:
            raise ShapeError(f"depth must be 2-D, got {self.depth.shape}")
        if self.rgb.shape != self.depth.shape + (3,):
            raise ShapeError(
                f"rgb shape {self.rgb.shape} does not match depth {self.depth.shape}"
            )


@dataclass
class PointCloud:
    """Packed XYZ (float32 meters) + RGB (uint8) points in a named frame."""

    xyz: np.ndarray  # (n, 3) float32
    rgb: np.ndarray  # (n, 3) uint8
    frame: FrameTag = FrameTag.ROBOTICS_Z_UP

    def __post_init__(self):
        self.xyz = np.ascontiguousarray(self.xyz, dtype=np.float32).reshape(-1, 3)
        self.rgb = np.ascontiguousarray(self.rgb, dtype=np.uint8).reshape(-1, 3)
        if len(self.xyz) != len(self.rgb):
            raise ShapeError("xyz and rgb must have the same point count")
        if len(self.xyz) > MAX_POINTS:
            raise ShapeError(f"point count {len(self.xyz)} exceeds {MAX_POINTS}")

    def __len__(self):
        return len(self.xyz)

    @staticmethod
    def empty(frame: FrameTag = FrameTag.ROBOTICS_Z_UP) -> "PointCloud":
        return PointCloud(
            xyz=np.empty((0, 3), dtype=np.float32),
            rgb=np.empty((0, 3), dtype=np.uint8),
            frame=frame,
        )


@dataclass(frozen=True)
class Aabb:
    min: tuple
    max: tuple

    def __post_init__(self):
        object.__setattr__(self, "min", tuple(float(v) for v in self.min))
        object.__setattr__(self, "max", tuple(float(v) for v in self.max))
        if any(lo > hi for lo, hi in zip(self.min, self.max)):
            raise ValueError(f"box min {self.min} exceeds max {self.max}")
