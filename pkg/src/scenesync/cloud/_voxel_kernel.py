"""Compiled kernels for the depth pipeline hot paths.

group-by-voxel: one sequential pass packs each point's voxel index triple
into an integer key (21 bits per axis, cells within +-2^20 of the origin)
and accumulates per-voxel float64 sums through a compact open-addressing
table. Accumulation happens in original point order, so results are
bit-deterministic and match a per-point reference loop exactly. Points
outside the packable range make the kernel bail out; pipeline.py then uses
a sort-based numpy path with identical semantics. All kernels are optional:
without numba the numpy fallbacks take over.
"""

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_AXIS_OFFSET = 1 << 20
_AXIS_LIMIT = 1 << 21


@njit(cache=True)
def _accumulate(xyz, rgb, voxel, shift, table_keys, table_gid, out_keys, sums, counts):
    n = xyz.shape[0]
    cap = table_keys.shape[0]
    mask = cap - 1
    groups = 0
    for i in range(n):
        ix = np.int64(math.floor(np.float64(xyz[i, 0]) / voxel)) + _AXIS_OFFSET
        iy = np.int64(math.floor(np.float64(xyz[i, 1]) / voxel)) + _AXIS_OFFSET
        iz = np.int64(math.floor(np.float64(xyz[i, 2]) / voxel)) + _AXIS_OFFSET
        if not (0 <= ix < _AXIS_LIMIT and 0 <= iy < _AXIS_LIMIT and 0 <= iz < _AXIS_LIMIT):
            return -1
        key = (ix << 42) | (iy << 21) | iz
        # fibonacci hash: the product's HIGH bits mix entropy from every axis
        slot = np.int64(np.uint64(key * np.int64(-7046029254386353131)) >> shift)
        while True:
            gid = table_gid[slot]
            if gid < 0:
                gid = groups
                groups += 1
                table_gid[slot] = gid
                table_keys[slot] = key
                out_keys[gid] = key
                break
            if table_keys[slot] == key:
                break
            slot = (slot + 1) & mask
        counts[gid] += 1
        sums[gid, 0] += xyz[i, 0]
        sums[gid, 1] += xyz[i, 1]
        sums[gid, 2] += xyz[i, 2]
        sums[gid, 3] += rgb[i, 0]
        sums[gid, 4] += rgb[i, 1]
        sums[gid, 5] += rgb[i, 2]
    return groups


def group_by_voxel(xyz: np.ndarray, rgb: np.ndarray, voxel: float):
    """-> (packed keys (g,), sums (g, 6), counts (g,)) in first-seen order.

    Packed keys order identically to lexicographic (ix, iy, iz) order.
    Returns None when any voxel index falls outside the packable range.
    """
    n = len(xyz)
    p = max(4, int(1.6 * n).bit_length())
    cap = 1 << p
    table_keys = np.empty(cap, dtype=np.int64)
    table_gid = np.full(cap, -1, dtype=np.int32)
    out_keys = np.empty(n, dtype=np.int64)
    sums = np.zeros((n, 6), dtype=np.float64)
    counts = np.zeros(n, dtype=np.int64)
    groups = _accumulate(
        xyz, rgb, float(voxel), np.uint64(64 - p), table_keys, table_gid, out_keys, sums, counts
    )
    if groups < 0:
        return None
    return out_keys[:groups], sums[:groups], counts[:groups]


@njit(cache=True)
def _crop_fill(xyz, rgb, x0, y0, z0, x1, y1, z1, out_xyz, out_rgb):
    n = xyz.shape[0]
    j = 0
    for i in range(n):
        x = xyz[i, 0]
        y = xyz[i, 1]
        z = xyz[i, 2]
        if x0 <= x <= x1 and y0 <= y <= y1 and z0 <= z <= z1:
            out_xyz[j, 0] = x
            out_xyz[j, 1] = y
            out_xyz[j, 2] = z
            out_rgb[j, 0] = rgb[i, 0]
            out_rgb[j, 1] = rgb[i, 1]
            out_rgb[j, 2] = rgb[i, 2]
            j += 1
    return j


def crop_compact(xyz, rgb, lo, hi):
    """Closed-box filter via one compacting pass; returns (xyz, rgb) views."""
    out_xyz = np.empty_like(xyz)
    out_rgb = np.empty_like(rgb)
    kept = _crop_fill(
        xyz,
        rgb,
        np.float32(lo[0]),
        np.float32(lo[1]),
        np.float32(lo[2]),
        np.float32(hi[0]),
        np.float32(hi[1]),
        np.float32(hi[2]),
        out_xyz,
        out_rgb,
    )
    return out_xyz[:kept], out_rgb[:kept]


@njit(cache=True)
def _count_valid(depth):
    n = 0
    flat = depth.reshape(-1)
    for i in range(flat.shape[0]):
        if flat[i] != 0:
            n += 1
    return n


@njit(cache=True)
def _unproject_fill(depth, rgb, xcoef, ycoef, xyz, out_rgb):
    h, w = depth.shape
    j = 0
    for v in range(h):
        yc = ycoef[v]
        for u in range(w):
            d = depth[v, u]
            if d == 0:
                continue
            z = np.float32(d) * np.float32(0.001)
            xyz[j, 0] = xcoef[u] * z
            xyz[j, 1] = yc * z
            xyz[j, 2] = z
            out_rgb[j, 0] = rgb[v, u, 0]
            out_rgb[j, 1] = rgb[v, u, 1]
            out_rgb[j, 2] = rgb[v, u, 2]
            j += 1
    return j


def unproject_compact(depth, rgb, xcoef, ycoef):
    """Row-major compacted unprojection; returns (xyz, rgb) arrays."""
    count = _count_valid(depth)
    xyz = np.empty((count, 3), dtype=np.float32)
    out_rgb = np.empty((count, 3), dtype=np.uint8)
    _unproject_fill(depth, rgb, xcoef, ycoef, xyz, out_rgb)
    return xyz, out_rgb
