"""Built-in demo scenes with closed-form motion.

"orbit": a sphere circling at radius 0.5 m, height 0.2 m, 1 rad/s.
"pendulum": a three-link chain whose joint angles follow
0.5 * sin(t + i) about the client Z axis.

Both are authored directly in the client frame, and stepping is a pure
function of time, so a given t always produces the identical update.
"""

import math

from ..errors import NotADemoScene
from ..usr.types import GeometryKind, Pose, SimMaterial, SimObject, SimScene, SimVisual
from ..wire.payloads import SceneUpdate

ORBIT_RADIUS = 0.5
ORBIT_HEIGHT = 0.2
ORBIT_OMEGA = 1.0  # rad/s

PENDULUM_LINKS = 3
PENDULUM_LINK_LENGTH = 0.3
PENDULUM_BASE_HEIGHT = 1.2
PENDULUM_SWING = 0.5  # rad


def _quat_z(angle: float) -> tuple:
    half = 0.5 * angle
    return (0.0, 0.0, math.sin(half), math.cos(half))


def _orbit_pose(t: float) -> Pose:
    return Pose(
        pos=(
            ORBIT_RADIUS * math.cos(ORBIT_OMEGA * t),
            ORBIT_HEIGHT,
            ORBIT_RADIUS * math.sin(ORBIT_OMEGA * t),
        )
    )


def _build_orbit() -> SimScene:
    ground = SimObject(
        name="ground",
        visuals=[
            SimVisual(
                geometry_kind=GeometryKind.PLANE,
                local_transform=Pose(scale=(4.0, 1.0, 4.0)),
                material=SimMaterial(color=(0.3, 0.3, 0.35, 1.0)),
            )
        ],
    )
    ball = SimObject(
        name="ball",
        transform=_orbit_pose(0.0),
        visuals=[
            SimVisual(
                geometry_kind=GeometryKind.SPHERE,
                local_transform=Pose(scale=(0.2, 0.2, 0.2)),
                material=SimMaterial(color=(0.9, 0.4, 0.1, 1.0)),
            )
        ],
    )
    root = SimObject(name="world", children=[ground, ball])
    return SimScene(root=root, meta={"name": "orbit", "source_format": "demo", "frame": "client-yup"})


def _pendulum_link_pos(index: int) -> tuple:
    return (0.0, 0.0, 0.0) if index == 0 else (0.0, -PENDULUM_LINK_LENGTH, 0.0)


def _pendulum_angle(index: int, t: float) -> float:
    return PENDULUM_SWING * math.sin(t + index)


def _build_pendulum() -> SimScene:
    link_visual = lambda: SimVisual(
        geometry_kind=GeometryKind.CAPSULE,
        local_transform=Pose(
            pos=(0.0, -PENDULUM_LINK_LENGTH / 2, 0.0),
            scale=(0.05, PENDULUM_LINK_LENGTH, 0.05),
        ),
        material=SimMaterial(color=(0.2, 0.5, 0.9, 1.0)),
    )
    innermost = None
    for index in reversed(range(PENDULUM_LINKS)):
        link = SimObject(
            name=f"link{index}",
            transform=Pose(pos=_pendulum_link_pos(index), rot=_quat_z(_pendulum_angle(index, 0.0))),
            visuals=[link_visual()],
        )
        if innermost is not None:
            link.children.append(innermost)
        innermost = link
    base = SimObject(
        name="base",
        transform=Pose(pos=(0.0, PENDULUM_BASE_HEIGHT, 0.0)),
        visuals=[
            SimVisual(
                geometry_kind=GeometryKind.BOX,
                local_transform=Pose(scale=(0.1, 0.1, 0.1)),
                material=SimMaterial(color=(0.6, 0.6, 0.6, 1.0)),
            )
        ],
        children=[innermost],
    )
    root = SimObject(name="world", children=[base])
    return SimScene(
        root=root, meta={"name": "pendulum", "source_format": "demo", "frame": "client-yup"}
    )


DEMO_SCENES = {"orbit": _build_orbit, "pendulum": _build_pendulum}


def build_demo_scene(name: str) -> SimScene:
    try:
        return DEMO_SCENES[name]()
    except KeyError:
        raise NotADemoScene(f"unknown demo scene {name!r}") from None


def step_demo_scene(name: str, t: float) -> SceneUpdate:
    """Closed-form local poses for every animated object at time t."""
    if name == "orbit":
        return SceneUpdate(sim_time=t, poses={"ball": _orbit_pose(t)})
    if name == "pendulum":
        poses = {
            f"link{i}": Pose(
                pos=_pendulum_link_pos(i), rot=_quat_z(_pendulum_angle(i, t))
            )
            for i in range(PENDULUM_LINKS)
        }
        return SceneUpdate(sim_time=t, poses=poses)
    raise NotADemoScene(f"unknown demo scene {name!r}")
