"""client: headless scene consumer for tests, benchmarks, and debugging."""

import argparse
import json
import sys
import time
from pathlib import Path

from .. import configure_logging, discovery_port_from_env
from ..errors import SceneSyncError
from .sync import HeadlessClient


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="client", description="headless scene client")
    parser.add_argument("--discovery-port", type=int, default=None)
    parser.add_argument("--timeout", type=float, default=5.0, help="discovery timeout seconds")
    parser.add_argument("--dump-json", type=Path, help="write reconstructed state and exit")
    parser.add_argument("--bench-latency", type=int, metavar="N", help="measure N ping round trips")
    parser.add_argument("--follow", action="store_true", help="stay connected; auto-reconnect")
    parser.add_argument("--name", default=None, help="device name sent to the master")
    return parser


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    port = args.discovery_port or discovery_port_from_env()
    client = HeadlessClient(
        discovery_port=port,
        timeout=args.timeout,
        device_name=args.name,
        auto_reconnect=args.follow,
    )
    try:
        state = client.connect_and_sync()
    except SceneSyncError as exc:
        print(f"sync failed: {exc}", file=sys.stderr)
        return 1

    objects = len(state.name_table)
    assets = len(state.scene.assets)
    print(f"synced scene {state.scene.meta.get('name', '?')!r}: {objects} objects, {assets} assets")

    status = 0
    try:
        if args.bench_latency:
            stats = client.measure_roundtrip(args.bench_latency)
            flag = " (partial)" if stats.partial else ""
            print(
                f"latency over {stats.samples} pings{flag}: "
                f"mean {stats.mean_ms:.3f} ms, p50 {stats.p50_ms:.3f} ms, p99 {stats.p99_ms:.3f} ms"
            )
        if args.dump_json:
            time.sleep(max(0.1, 2.0 / 30.0))  # let the first updates land
            args.dump_json.write_text(json.dumps(client.dump(), indent=2, sort_keys=True))
            print(f"state written to {args.dump_json}")
        if args.follow:
            print("following updates (ctrl-c to stop)")
            while True:
                time.sleep(2.0)
                stats = client.state.stats if client.state else None
                if stats:
                    print(
                        f"sim_time={stats.last_sim_time:.2f} frames={stats.frames_applied} "
                        f"resyncs={stats.resyncs} connected={client.connected}"
                    )
    except KeyboardInterrupt:
        pass
    except SceneSyncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = 1
    finally:
        client.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
