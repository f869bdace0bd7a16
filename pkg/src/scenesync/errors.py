"""Exception types shared across the middleware.

Errors are grouped by the layer that raises them; all inherit from
SceneSyncError so callers can catch the whole family at once.
"""


class SceneSyncError(Exception):
    pass


# --- scene representation ---------------------------------------------------

class InvalidAsset(SceneSyncError):
    pass


class ValidationFailed(SceneSyncError):
    """Raised when a scene fails validation. Carries the first violation."""

    def __init__(self, report):
        self.report = report
        first = report.entries[0] if report.entries else None
        super().__init__(str(first) if first else "scene invalid")


class ParseError(SceneSyncError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class UnsupportedGeometry(ParseError):
    pass


class UnsupportedTopology(ParseError):
    pass


class AssetNotFound(SceneSyncError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"asset file not found: {path}")


class EmptyMesh(ParseError):
    pass


# --- frames -----------------------------------------------------------------

class NonUnitQuaternion(SceneSyncError):
    pass


# --- wire protocol ----------------------------------------------------------

class BeaconTooLarge(SceneSyncError):
    pass


class NotABeacon(SceneSyncError):
    """Datagram does not start with the beacon magic; silently ignorable."""


class BeaconCorrupt(SceneSyncError):
    pass


class FrameTooLarge(SceneSyncError):
    """Frame length field exceeds the cap; connection-fatal."""


class UnknownKind(SceneSyncError):
    pass


class NoMasterFound(SceneSyncError):
    pass


class RequestTimeout(SceneSyncError):
    pass


class Disconnected(SceneSyncError):
    pass


class RemoteError(SceneSyncError):
    def __init__(self, code, message=""):
        self.code = code
        self.message = message
        super().__init__(f"remote error {code}: {message}")


# --- publisher --------------------------------------------------------------

class UnknownObject(SceneSyncError):
    pass


class NotADemoScene(SceneSyncError):
    pass


class BindError(SceneSyncError):
    pass


class UnknownNode(SceneSyncError):
    pass


class InvalidName(SceneSyncError):
    pass


# --- client -----------------------------------------------------------------

class AssetCorrupt(SceneSyncError):
    pass


class TopologyMismatch(SceneSyncError):
    pass


class EmptySample(SceneSyncError):
    pass


# --- point cloud ------------------------------------------------------------

class ShapeError(SceneSyncError):
    pass


class InsufficientPoints(SceneSyncError):
    pass


class InvalidVoxel(SceneSyncError):
    pass


class DecodeError(SceneSyncError):
    pass
