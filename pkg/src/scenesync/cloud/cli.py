"""cloudtool: run the depth pipeline on image files.

Reads a 16-bit PGM depth image plus a PPM color image, unprojects through
the given intrinsics, optionally crops / removes outliers / voxel-downsamples
/ applies an extrinsic transform, then writes the packed frame to a file or
publishes it through a running master node.
"""

import argparse
import sys
from pathlib import Path

from .. import configure_logging, discovery_port_from_env
from ..errors import SceneSyncError
from .codec import encode_frame
from .io import load_extrinsic, load_intrinsics, read_pgm16, read_ppm
from .pipeline import crop, remove_outliers, transform_cloud, unproject, voxel_downsample
from .types import Aabb, DepthImage


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudtool", description="depth-image to point-cloud pipeline"
    )
    parser.add_argument("--depth", required=True, type=Path, help="16-bit binary PGM")
    parser.add_argument("--rgb", required=True, type=Path, help="binary PPM")
    parser.add_argument("--intrinsics", required=True, type=Path, help="key=value file")
    parser.add_argument("--crop", help="x0,y0,z0,x1,y1,z1 closed bounding box")
    parser.add_argument("--voxel", type=float, help="voxel edge length in meters")
    parser.add_argument("--outliers", help="k,sigma statistical filter parameters")
    parser.add_argument("--extrinsic", type=Path, help="key=value file with a 4x4 matrix")
    parser.add_argument("--out", type=Path, help="write packed frame here")
    parser.add_argument(
        "--publish", action="store_true", help="stream the frame through a master node"
    )
    parser.add_argument("--discovery-port", type=int, default=None)
    parser.add_argument("--timeout", type=float, default=5.0)
    return parser


def run_pipeline(args) -> bytes:
    image = DepthImage(
        depth=read_pgm16(args.depth.read_bytes()),
        rgb=read_ppm(args.rgb.read_bytes()),
    )
    k = load_intrinsics(args.intrinsics.read_text())
    cloud = unproject(image, k)
    if args.extrinsic:
        cloud = transform_cloud(cloud, load_extrinsic(args.extrinsic.read_text()))
    if args.crop:
        values = [float(v) for v in args.crop.split(",")]
        if len(values) != 6:
            raise SceneSyncError("--crop needs six comma-separated numbers")
        cloud = crop(cloud, Aabb(min=values[:3], max=values[3:]))
    if args.outliers:
        k_str, _, sigma_str = args.outliers.partition(",")
        cloud = remove_outliers(cloud, k=int(k_str), sigma=float(sigma_str or 2.0))
    if args.voxel:
        cloud = voxel_downsample(cloud, args.voxel)
    return encode_frame(cloud)


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    if not args.out and not args.publish:
        print("need --out or --publish", file=sys.stderr)
        return 2
    try:
        frame = run_pipeline(args)
    except SceneSyncError as exc:
        print(f"pipeline failed: {exc}", file=sys.stderr)
        return 1
    if args.out:
        args.out.write_bytes(frame)
        print(f"wrote {len(frame)} bytes to {args.out}")
    if args.publish:
        from ..client.sync import publish_cloud_frame

        port = args.discovery_port or discovery_port_from_env()
        try:
            publish_cloud_frame(frame, discovery_port=port, timeout=args.timeout)
        except SceneSyncError as exc:
            print(f"publish failed: {exc}", file=sys.stderr)
            return 1
        print("frame published")
    return 0


if __name__ == "__main__":
    sys.exit(main())
