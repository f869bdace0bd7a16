from .kinematics import KinematicState, pose_compose
from .sync import HeadlessClient, LatencyStats, ReconstructedScene

__all__ = [
    "HeadlessClient",
    "ReconstructedScene",
    "LatencyStats",
    "KinematicState",
    "pose_compose",
]
