import numpy as np
import pytest

from scenesync.client import KinematicState, pose_compose
from scenesync.frames import quat_rotate_xyzw
from scenesync.usr import Pose, SimObject, SimScene


def random_quat(rng):
    q = rng.normal(size=4)
    return tuple(q / np.linalg.norm(q))


def random_pose(rng):
    return Pose(pos=tuple(rng.normal(size=3)), rot=random_quat(rng), rot_order="xyzw")


def random_tree(rng, max_nodes=300, max_depth=8) -> SimScene:
    count = int(rng.integers(2, max_nodes + 1))
    root = SimObject(name="n0", transform=random_pose(rng))
    nodes = [(root, 0)]
    for i in range(1, count):
        parent, depth = nodes[int(rng.integers(0, len(nodes)))]
        while depth >= max_depth:
            parent, depth = nodes[int(rng.integers(0, len(nodes)))]
        child = SimObject(name=f"n{i}", transform=random_pose(rng))
        parent.children.append(child)
        nodes.append((child, depth + 1))
    return SimScene(root=root)


class TestPoseCompose:
    def test_identity(self):
        p = Pose(pos=(1, 2, 3), rot=(0, 0.6, 0, 0.8))
        out = pose_compose(Pose.identity(), p)
        np.testing.assert_allclose(out.pos, p.pos)
        np.testing.assert_allclose(out.rot, p.rot, atol=1e-12)

    def test_matches_matrix_composition(self):
        rng = np.random.default_rng(60)
        from scenesync.frames import transform_from_pos_quat_xyzw, compose

        for _ in range(100):
            a, b = random_pose(rng), random_pose(rng)
            out = pose_compose(a, b)
            ma = transform_from_pos_quat_xyzw(a.pos, a.rot_xyzw())
            mb = transform_from_pos_quat_xyzw(b.pos, b.rot_xyzw())
            expected = compose(ma, mb)
            np.testing.assert_allclose(out.pos, expected[:3, 3], atol=1e-9)
            got = transform_from_pos_quat_xyzw(out.pos, out.rot_xyzw())
            np.testing.assert_allclose(got, expected, atol=1e-9)


class TestKinematics:
    def test_incremental_equals_full(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            scene = random_tree(rng, max_nodes=60)
            state = KinematicState(scene)
            reference = KinematicState(scene)
            for _ in range(20):
                names = rng.choice(state.order, size=min(5, len(state.order)), replace=False)
                updates = {name: random_pose(rng) for name in names}
                state.set_local(updates)
                for name, pose in updates.items():
                    reference.local[name] = pose
                reference.recompute_all()
                assert state.max_deviation_from(reference) < 1e-9

    def test_root_shift_moves_all(self):
        rng = np.random.default_rng(62)
        scene = random_tree(rng, max_nodes=40)
        state = KinematicState(scene)
        before = {name: np.array(p.pos) for name, p in state.world.items()}
        root_local = state.local[state.root]
        state.set_local(
            {
                state.root: Pose(
                    pos=(root_local.pos[0], root_local.pos[1] + 1.0, root_local.pos[2]),
                    rot=root_local.rot_xyzw(),
                )
            }
        )
        for name, pose in state.world.items():
            np.testing.assert_allclose(
                np.array(pose.pos) - before[name], (0, 1, 0), atol=1e-9
            )

    def test_idempotent_updates(self):
        rng = np.random.default_rng(63)
        scene = random_tree(rng, max_nodes=30)
        state = KinematicState(scene)
        updates = {name: random_pose(rng) for name in state.order[:5]}
        state.set_local(updates)
        first = {name: pose for name, pose in state.world.items()}
        state.set_local(updates)
        for name in state.order:
            assert state.world[name].pos == first[name].pos
            assert state.world[name].rot == first[name].rot

    def test_anchor_equivariance(self):
        rng = np.random.default_rng(64)
        scene = random_tree(rng, max_nodes=50)
        state = KinematicState(scene)
        plain = {name: pose for name, pose in state.world.items()}
        anchor = random_pose(rng)
        state.set_anchor(anchor)
        for name, pose in state.world.items():
            expected = pose_compose(anchor, plain[name])
            np.testing.assert_allclose(pose.pos, expected.pos, atol=1e-9)
            qa, qb = np.array(pose.rot_xyzw()), np.array(expected.rot_xyzw())
            if np.dot(qa, qb) < 0:
                qb = -qb
            np.testing.assert_allclose(qa, qb, atol=1e-9)

    def test_translation_anchor_shifts_world(self):
        rng = np.random.default_rng(65)
        scene = random_tree(rng, max_nodes=20)
        state = KinematicState(scene)
        before = {name: np.array(p.pos) for name, p in state.world.items()}
        state.set_anchor(Pose(pos=(1, 0, 0)))
        for name, pose in state.world.items():
            np.testing.assert_allclose(
                np.array(pose.pos) - before[name], (1, 0, 0), atol=1e-12
            )

    def test_deep_chain_world_position(self):
        # hand-checkable chain: 3 translations along Y
        objs = SimObject(
            name="a",
            transform=Pose(pos=(0, 1, 0)),
            children=[
                SimObject(
                    name="b",
                    transform=Pose(pos=(0, 1, 0)),
                    children=[SimObject(name="c", transform=Pose(pos=(0, 1, 0)))],
                )
            ],
        )
        state = KinematicState(SimScene(root=objs))
        np.testing.assert_allclose(state.world["c"].pos, (0, 3, 0))
