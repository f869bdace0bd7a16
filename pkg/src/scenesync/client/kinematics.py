"""World-pose bookkeeping for a reconstructed kinematic tree.

World poses chain local poses root-down and apply the client's anchor
transform on top: world(obj) = anchor * world(parent) * local(obj). Updates
touch only the affected subtrees; a from-scratch recomputation is kept as
the reference path and the two must agree to float precision.
"""

import numpy as np

from ..frames import quat_mul_xyzw, quat_normalize, quat_rotate_xyzw
from ..usr.types import Pose, SimScene


def pose_compose(a: Pose, b: Pose) -> Pose:
    """a then b, both xyzw; scale is not chained (bodies carry none)."""
    qa = a.rot_xyzw()
    pb = quat_rotate_xyzw(qa, b.pos)
    pos = (a.pos[0] + pb[0], a.pos[1] + pb[1], a.pos[2] + pb[2])
    rot = quat_normalize(quat_mul_xyzw(qa, b.rot_xyzw()))
    return Pose(pos=pos, rot=tuple(rot), rot_order="xyzw")


class KinematicState:
    """Local and world poses for every object of a scene."""

    def __init__(self, scene: SimScene, anchor: Pose | None = None):
        self.anchor = anchor or Pose.identity()
        self.parent = {}
        self.children = {}
        self.order = []  # preorder
        self.local = {}
        self.world = {}
        for obj in scene.objects():
            self.order.append(obj.name)
            self.local[obj.name] = obj.transform
            self.children[obj.name] = [c.name for c in obj.children]
            for child in obj.children:
                self.parent[child.name] = obj.name
        self.root = self.order[0]
        self.recompute_all()

    # -- full recompute (reference path) ------------------------------------

    def recompute_all(self) -> None:
        for name in self.order:
            self._recompute_one(name)

    def _recompute_one(self, name: str) -> None:
        parent = self.parent.get(name)
        base = self.anchor if parent is None else self.world[parent]
        self.world[name] = pose_compose(base, self.local[name])

    # -- incremental updates --------------------------------------------------

    def set_local(self, updates: dict) -> None:
        """Replace local poses and recompute exactly the touched subtrees."""
        for name, pose in updates.items():
            self.local[name] = pose
        dirty = set(updates)
        # drop names whose ancestor is also dirty; the subtree walk covers them
        roots = [
            name
            for name in updates
            if not any(a in dirty for a in self._ancestors(name))
        ]
        for name in roots:
            self._recompute_subtree(name)

    def _ancestors(self, name: str):
        cursor = self.parent.get(name)
        while cursor is not None:
            yield cursor
            cursor = self.parent.get(cursor)

    def _recompute_subtree(self, name: str) -> None:
        stack = [name]
        while stack:
            current = stack.pop()
            self._recompute_one(current)
            stack.extend(reversed(self.children[current]))

    def set_anchor(self, anchor: Pose) -> None:
        self.anchor = anchor
        self.recompute_all()

    def world_positions(self) -> dict:
        return {name: pose.pos for name, pose in self.world.items()}

    def max_deviation_from(self, other: "KinematicState") -> float:
        """Largest positional/rotational component difference to another state."""
        worst = 0.0
        for name in self.order:
            a, b = self.world[name], other.world[name]
            worst = max(worst, max(abs(x - y) for x, y in zip(a.pos, b.pos)))
            qa, qb = np.array(a.rot_xyzw()), np.array(b.rot_xyzw())
            if np.dot(qa, qb) < 0:
                qb = -qb
            worst = max(worst, float(np.max(np.abs(qa - qb))))
        return worst
