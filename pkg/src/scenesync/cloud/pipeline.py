"""Point-cloud transformations: unprojection, cropping, outlier removal,
voxel downsampling, rigid transforms, and merging.

Every operation is a pure function with a fixed iteration order, so the full
pipeline is bit-deterministic for identical inputs.
"""

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InsufficientPoints, InvalidVoxel, ShapeError
from . import _voxel_kernel
from .types import Aabb, CameraIntrinsics, DepthImage, PointCloud


# per-intrinsics ray coefficient grids; tiny and reused every frame
_RAY_CACHE = {}


def _ray_grids(k: CameraIntrinsics):
    grids = _RAY_CACHE.get(k)
    if grids is None:
        xcoef = ((np.arange(k.width, dtype=np.float32) - np.float32(k.cx)) / np.float32(k.fx))
        ycoef = ((np.arange(k.height, dtype=np.float32) - np.float32(k.cy)) / np.float32(k.fy))
        grids = (xcoef[None, :], ycoef[:, None])
        if len(_RAY_CACHE) > 64:
            _RAY_CACHE.clear()
        _RAY_CACHE[k] = grids
    return grids


def unproject(image: DepthImage, k: CameraIntrinsics) -> PointCloud:
    """Pinhole unprojection of every valid depth pixel.

    X = (u - cx) * Z / fx, Y = (v - cy) * Z / fy, Z = depth / 1000; pixels
    with zero depth are skipped. Output order is the row-major pixel scan.
    """
    h, w = image.depth.shape
    if (w, h) != (k.width, k.height):
        raise ShapeError(
            f"depth image {w}x{h} does not match intrinsics {k.width}x{k.height}"
        )
    xcoef, ycoef = _ray_grids(k)
    if _voxel_kernel.HAVE_NUMBA:
        xyz, rgb = _voxel_kernel.unproject_compact(
            image.depth, image.rgb, xcoef.reshape(-1), ycoef.reshape(-1)
        )
        return PointCloud(xyz=xyz, rgb=rgb)
    z = image.depth.astype(np.float32)
    z *= np.float32(0.001)
    keep = image.depth.reshape(-1) != 0
    xyz = np.empty((int(keep.sum()), 3), dtype=np.float32)
    xyz[:, 0] = (xcoef * z).reshape(-1)[keep]
    xyz[:, 1] = (ycoef * z).reshape(-1)[keep]
    xyz[:, 2] = z.reshape(-1)[keep]
    rgb = image.rgb.reshape(-1, 3)[keep]
    return PointCloud(xyz=xyz, rgb=rgb)


def _f32_box(box: Aabb):
    """Tightest float32 bounds implementing the exact float64 closed box.

    Point coordinates are float32, so "p >= lo" over float64 is equivalent to
    comparing against the smallest float32 >= lo (and mirrored for the upper
    bound); comparisons can then run entirely in float32.
    """
    inf = np.float32(np.inf)
    lo = np.empty(3, dtype=np.float32)
    hi = np.empty(3, dtype=np.float32)
    for c in range(3):
        f = np.float32(box.min[c])
        lo[c] = np.nextafter(f, inf, dtype=np.float32) if float(f) < box.min[c] else f
        f = np.float32(box.max[c])
        hi[c] = np.nextafter(f, -inf, dtype=np.float32) if float(f) > box.max[c] else f
    return lo, hi


def crop(cloud: PointCloud, box: Aabb) -> PointCloud:
    """Retain exactly the points inside the closed box (min <= p <= max)."""
    lo, hi = _f32_box(box)
    if _voxel_kernel.HAVE_NUMBA and len(cloud):
        xyz, rgb = _voxel_kernel.crop_compact(cloud.xyz, cloud.rgb, lo, hi)
        return PointCloud(xyz=xyz, rgb=rgb, frame=cloud.frame)
    x, y, z = cloud.xyz[:, 0], cloud.xyz[:, 1], cloud.xyz[:, 2]
    keep = (x >= lo[0]) & (x <= hi[0])
    keep &= (y >= lo[1]) & (y <= hi[1])
    keep &= (z >= lo[2]) & (z <= hi[2])
    return PointCloud(xyz=cloud.xyz[keep], rgb=cloud.rgb[keep], frame=cloud.frame)


def remove_outliers(cloud: PointCloud, k: int = 20, sigma: float = 2.0) -> PointCloud:
    """Statistical outlier removal.

    Drops points whose mean distance to their k nearest neighbors exceeds the
    global mean of those distances by more than sigma standard deviations.
    """
    n = len(cloud)
    if n <= k:
        raise InsufficientPoints(f"{n} points but k={k} neighbors requested")
    tree = cKDTree(cloud.xyz.astype(np.float64))
    # first neighbor is the point itself at distance zero
    dists, _ = tree.query(cloud.xyz.astype(np.float64), k=k + 1)
    mean_dist = dists[:, 1:].mean(axis=1)
    threshold = mean_dist.mean() + sigma * mean_dist.std()
    keep = mean_dist <= threshold
    return PointCloud(xyz=cloud.xyz[keep], rgb=cloud.rgb[keep], frame=cloud.frame)


def _lexicographic_order(idx: np.ndarray) -> np.ndarray:
    """Sort permutation for int64 index triples, cheap-packing when possible."""
    mins = idx.min(axis=0)
    spans = idx.max(axis=0) - mins + 1
    bits = [int(s - 1).bit_length() if s > 1 else 1 for s in spans]
    if sum(bits) <= 63:
        shifted = idx - mins
        packed = (shifted[:, 0] << (bits[1] + bits[2])) | (shifted[:, 1] << bits[2]) | shifted[:, 2]
        return np.argsort(packed)
    return np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0]))


def voxel_downsample(cloud: PointCloud, voxel: float) -> PointCloud:
    """One representative point per occupied voxel.

    The voxel index is floor(p / voxel) per component; the representative sits
    at the centroid of the member points with the channel-wise rounded mean
    color (half rounds up). Output is sorted by voxel index lexicographically.
    Sums accumulate in float64 in original point order.
    """
    if voxel <= 0:
        raise InvalidVoxel(f"voxel edge must be positive, got {voxel}")
    if len(cloud) == 0:
        return cloud
    grouped = (
        _voxel_kernel.group_by_voxel(cloud.xyz, cloud.rgb, float(voxel))
        if _voxel_kernel.HAVE_NUMBA
        else None
    )
    if grouped is not None:
        packed, sums, counts = grouped
        order = np.argsort(packed)  # packed keys order == lexicographic index order
    else:
        keys, sums, counts = _group_by_voxel_numpy(cloud.xyz, cloud.rgb, float(voxel))
        order = np.arange(len(counts))  # fallback emits pre-sorted groups
    sums = sums[order]
    counts = counts[order][:, None].astype(np.float64)
    xyz_out = (sums[:, :3] / counts).astype(np.float32)
    rgb_out = np.floor(sums[:, 3:] / counts + 0.5).astype(np.uint8)
    return PointCloud(xyz=xyz_out, rgb=rgb_out, frame=cloud.frame)


def _group_by_voxel_numpy(xyz, rgb, voxel):
    """Sort-based fallback grouping; emits groups already in index order."""
    idx = np.floor(xyz.astype(np.float64) / voxel).astype(np.int64)
    order = _lexicographic_order(idx)
    idx_sorted = idx[order]
    boundary = np.empty(len(idx_sorted), dtype=bool)
    boundary[0] = True
    boundary[1:] = np.any(idx_sorted[1:] != idx_sorted[:-1], axis=1)
    starts = np.nonzero(boundary)[0]
    counts = np.diff(np.append(starts, len(idx_sorted)))
    data = np.column_stack([xyz[order].astype(np.float64), rgb[order].astype(np.float64)])
    sums = np.add.reduceat(data, starts, axis=0)
    return idx_sorted[starts], sums, counts


def transform_cloud(cloud: PointCloud, t: np.ndarray, frame=None) -> PointCloud:
    """Apply p <- R p + t to every point; optionally retag the frame."""
    t = np.asarray(t, dtype=np.float64)
    xyz = cloud.xyz.astype(np.float64) @ t[:3, :3].T + t[:3, 3]
    return PointCloud(
        xyz=xyz.astype(np.float32),
        rgb=cloud.rgb.copy(),
        frame=frame if frame is not None else cloud.frame,
    )


def merge(clouds) -> PointCloud:
    """Concatenate clouds preserving order; frames must agree."""
    clouds = list(clouds)
    if not clouds:
        return PointCloud.empty()
    frames_seen = {c.frame for c in clouds}
    if len(frames_seen) > 1:
        raise ShapeError(f"cannot merge clouds in different frames: {frames_seen}")
    return PointCloud(
        xyz=np.concatenate([c.xyz for c in clouds]),
        rgb=np.concatenate([c.rgb for c in clouds]),
        frame=clouds[0].frame,
    )
