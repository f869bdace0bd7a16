"""Packed streaming encoding for point-cloud frames.

Layout: u32 count (LE) + u8 frame tag, then 15 bytes per point
(x, y, z as little-endian float32, r, g, b as uint8). decode(encode(c))
is bitwise-exact.
"""

import struct

import numpy as np

from ..errors import DecodeError
from ..frames import FrameTag
from .types import MAX_POINTS, PointCloud

_HEADER = struct.Struct("<IB")

_FRAME_CODES = {FrameTag.ROBOTICS_Z_UP: 0, FrameTag.CLIENT_Y_UP: 1}
_FRAME_FROM_CODE = {v: k for k, v in _FRAME_CODES.items()}

POINT_STRIDE = 15

_point_dtype = np.dtype(
    [("x", "<f4"), ("y", "<f4"), ("z", "<f4"), ("r", "u1"), ("g", "u1"), ("b", "u1")]
)


def encode_frame(cloud: PointCloud) -> bytes:
    n = len(cloud)
    if n > MAX_POINTS:
        raise DecodeError(f"point count {n} exceeds {MAX_POINTS}")
    packed = np.empty(n, dtype=_point_dtype)
    packed["x"] = cloud.xyz[:, 0]
    packed["y"] = cloud.xyz[:, 1]
    packed["z"] = cloud.xyz[:, 2]
    packed["r"] = cloud.rgb[:, 0]
    packed["g"] = cloud.rgb[:, 1]
    packed["b"] = cloud.rgb[:, 2]
    return _HEADER.pack(n, _FRAME_CODES[cloud.frame]) + packed.tobytes()


def decode_frame(data: bytes) -> PointCloud:
    if len(data) < _HEADER.size:
        raise DecodeError("frame shorter than header")
    count, frame_code = _HEADER.unpack_from(data, 0)
    if frame_code not in _FRAME_FROM_CODE:
        raise DecodeError(f"unknown frame tag {frame_code}")
    expected = _HEADER.size + count * POINT_STRIDE
    if len(data) != expected:
        raise DecodeError(f"frame size {len(data)} != expected {expected}")
    packed = np.frombuffer(data, dtype=_point_dtype, count=count, offset=_HEADER.size)
    xyz = np.empty((count, 3), dtype=np.float32)
    rgb = np.empty((count, 3), dtype=np.uint8)
    xyz[:, 0] = packed["x"]
    xyz[:, 1] = packed["y"]
    xyz[:, 2] = packed["z"]
    rgb[:, 0] = packed["r"]
    rgb[:, 1] = packed["g"]
    rgb[:, 2] = packed["b"]
    return PointCloud(xyz=xyz, rgb=rgb, frame=_FRAME_FROM_CODE[frame_code])
