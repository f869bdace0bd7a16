from .types import Aabb, CameraIntrinsics, DepthImage, PointCloud
from .pipeline import (
    crop,
    merge,
    remove_outliers,
    transform_cloud,
    unproject,
    voxel_downsample,
)
from .codec import decode_frame, encode_frame

__all__ = [
    "Aabb",
    "CameraIntrinsics",
    "DepthImage",
    "PointCloud",
    "unproject",
    "crop",
    "remove_outliers",
    "voxel_downsample",
    "transform_cloud",
    "merge",
    "encode_frame",
    "decode_frame",
]
