"""publisher: serve a scene file or a built-in demo to discovered clients."""

import argparse
import signal
import sys
import threading
import time
from pathlib import Path

from .. import configure_logging, discovery_port_from_env
from ..errors import SceneSyncError
from ..parsers import ParserOptions
from .config import PublisherConfig
from .demo import DEMO_SCENES
from .master import start_master


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="publisher", description="scene master node")
    parser.add_argument("--scene", type=Path, help="MJCF (.xml) or URDF (.urdf) file")
    parser.add_argument("--demo", choices=sorted(DEMO_SCENES), help="built-in demo scene")
    parser.add_argument("--format", choices=["mjcf", "urdf"], help="override format detection")
    parser.add_argument("--hz", type=float, default=30.0, help="update frequency (default 30)")
    parser.add_argument("--discovery-port", type=int, default=None)
    parser.add_argument("--http-port", type=int, default=8080)
    parser.add_argument("--host", default="127.0.0.1", help="address to advertise and bind")
    parser.add_argument("--no-compress", action="store_true", help="serve assets raw")
    parser.add_argument("--visible-groups", help="comma-separated MJCF geom groups to render")
    parser.add_argument("--no-render", help="comma-separated object names to skip visually")
    parser.add_argument("--no-track", help="comma-separated object names without state updates")
    parser.add_argument("--name", default="", help="master name advertised in the beacon")
    return parser


def config_from_args(args) -> PublisherConfig:
    if bool(args.scene) == bool(args.demo):
        raise SceneSyncError("need exactly one of --scene or --demo")
    split = lambda raw: [v.strip() for v in raw.split(",") if v.strip()] if raw else []
    options = ParserOptions(
        no_rendered_objects=split(args.no_render),
        no_tracked_objects=split(args.no_track),
        visible_geom_groups=(
            [int(v) for v in args.visible_groups.split(",")] if args.visible_groups else None
        ),
    )
    return PublisherConfig(
        scene_path=args.scene,
        demo=args.demo,
        scene_format=args.format,
        update_hz=args.hz,
        discovery_port=args.discovery_port or discovery_port_from_env(),
        http_port=args.http_port,
        compression="none" if args.no_compress else "deflate",
        parser=options,
        host=args.host,
        master_name=args.name,
    )


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        handle = start_master(config)
    except SceneSyncError as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 1
    print(
        f"master up: discovery={handle.discovery_port} service={handle.service_port} "
        f"stream={handle.stream_port} http=http://{config.host}:{handle.http_port}/"
    )
    try:
        while True:
            time.sleep(1.0)
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        handle.shutdown()
    return 0


if __name__ == "__main__":
    sys.exit(main())
