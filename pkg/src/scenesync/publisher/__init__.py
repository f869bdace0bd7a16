from ..wire.payloads import MeshUpdate, SceneUpdate
from .config import PublisherConfig
from .demo import DEMO_SCENES, build_demo_scene, step_demo_scene
from .master import MasterHandle, start_master
from .registry import NodeInfo

__all__ = [
    "PublisherConfig",
    "SceneUpdate",
    "MeshUpdate",
    "NodeInfo",
    "start_master",
    "MasterHandle",
    "build_demo_scene",
    "step_demo_scene",
    "DEMO_SCENES",
]
