"""Scene synchronization middleware.

Parses robot scene descriptions into a unified kinematic-tree representation,
streams it to discovered clients over UDP discovery + framed TCP, processes
depth-camera point clouds, and exposes an operator dashboard gateway.
"""

import logging
import os

__version__ = "0.1.0"

DEFAULT_DISCOVERY_PORT = 7720


def discovery_port_from_env(default: int = DEFAULT_DISCOVERY_PORT) -> int:
    """Discovery port, overridable through IRIS_DISCOVERY_PORT."""
    raw = os.environ.get("IRIS_DISCOVERY_PORT")
    if not raw:
        return default
    return int(raw)


def configure_logging(level: str | None = None) -> None:
    """Configure root logging; level comes from IRIS_LOG unless given."""
    name = (level or os.environ.get("IRIS_LOG") or "info").upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
