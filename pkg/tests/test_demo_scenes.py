import math

import numpy as np
import pytest

from scenesync.errors import NotADemoScene
from scenesync.publisher import build_demo_scene, step_demo_scene
from scenesync.usr import validate_scene


class TestOrbit:
    def test_scene_valid(self):
        scene = build_demo_scene("orbit")
        assert validate_scene(scene).ok
        assert scene.find("ball") is not None
        assert scene.assets == {}

    def test_closed_form_at_zero(self):
        update = step_demo_scene("orbit", 0.0)
        assert update.poses["ball"].pos == (0.5, 0.2, 0.0)

    def test_closed_form_quarter_turn(self):
        update = step_demo_scene("orbit", math.pi / 2)
        np.testing.assert_allclose(update.poses["ball"].pos, (0.0, 0.2, 0.5), atol=1e-9)

    def test_deterministic(self):
        a = step_demo_scene("orbit", 1.2345)
        b = step_demo_scene("orbit", 1.2345)
        assert a.poses["ball"].pos == b.poses["ball"].pos
        assert a.sim_time == b.sim_time


class TestPendulum:
    def test_scene_valid_chain(self):
        scene = build_demo_scene("pendulum")
        assert validate_scene(scene).ok
        base = scene.find("base")
        assert base is not None
        link0 = scene.find("link0")
        assert link0.children[0].name == "link1"
        assert link0.children[0].children[0].name == "link2"

    def test_joint_angles_closed_form(self):
        t = 0.75
        update = step_demo_scene("pendulum", t)
        for i in range(3):
            angle = 0.5 * math.sin(t + i)
            rot = update.poses[f"link{i}"].rot
            np.testing.assert_allclose(
                rot, (0, 0, math.sin(angle / 2), math.cos(angle / 2)), atol=1e-12
            )

    def test_update_names_exist_in_scene(self):
        scene = build_demo_scene("pendulum")
        names = {obj.name for obj in scene.objects()}
        update = step_demo_scene("pendulum", 2.0)
        assert set(update.poses) <= names


def test_unknown_demo():
    with pytest.raises(NotADemoScene):
        build_demo_scene("warp-core")
    with pytest.raises(NotADemoScene):
        step_demo_scene("warp-core", 0.0)
