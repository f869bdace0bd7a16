import socket
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .. import DEFAULT_DISCOVERY_PORT
from ..parsers import ParserOptions

# loopback broadcast is included so same-host clients always hear the beacon
DEFAULT_BROADCAST_ADDRS = ("255.255.255.255", "127.255.255.255")


@dataclass
class PublisherConfig:
    scene_path: Optional[Path] = None
    demo: Optional[str] = None  # "pendulum" | "orbit"
    scene_format: Optional[str] = None  # "mjcf" | "urdf"; None = by extension
    update_hz: float = 30.0
    discovery_port: int = DEFAULT_DISCOVERY_PORT
    http_port: int = 8080
    compression: str = "deflate"  # "deflate" | "none"
    parser: ParserOptions = field(default_factory=ParserOptions)
    host: str = "127.0.0.1"
    master_name: str = ""
    broadcast_addrs: List[str] = field(default_factory=lambda: list(DEFAULT_BROADCAST_ADDRS))

    def __post_init__(self):
        if not 0 < self.update_hz <= 1000:
            raise ValueError(f"update_hz must be in (0, 1000], got {self.update_hz}")
        if self.compression not in ("deflate", "none"):
            raise ValueError(f"unknown compression {self.compression!r}")
        if self.scene_path is not None:
            self.scene_path = Path(self.scene_path)
        if not self.master_name:
            self.master_name = socket.gethostname() or "master"
