import numpy as np
import pytest

from scenesync.errors import AssetNotFound, ParseError
from scenesync.parsers import ParserOptions, parse_mjcf
from scenesync.usr import GeometryKind, validate_scene, serialize_scene

CUBE_OBJ = """
v -0.5 -0.5 -0.5
v 0.5 -0.5 -0.5
v 0.5 0.5 -0.5
v -0.5 0.5 -0.5
v -0.5 -0.5 0.5
v 0.5 -0.5 0.5
v 0.5 0.5 0.5
v -0.5 0.5 0.5
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
"""


def visuals_of(scene):
    out = []
    for obj in scene.objects():
        out.extend(obj.visuals)
    return out


class TestBasics:
    def test_single_sphere(self):
        scene = parse_mjcf(
            """
            <mujoco model="demo">
              <worldbody>
                <body name="ball"><geom type="sphere" size="0.1"/></body>
              </worldbody>
            </mujoco>
            """
        )
        assert scene.root.name == "world"
        assert len(scene.root.children) == 1
        body = scene.root.children[0]
        assert body.name == "ball"
        assert len(body.visuals) == 1
        vis = body.visuals[0]
        assert vis.geometry_kind is GeometryKind.SPHERE
        np.testing.assert_allclose(vis.local_transform.scale, (0.2, 0.2, 0.2))
        assert scene.assets == {}
        assert validate_scene(scene).ok

    def test_geom_position_converted(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <geom type="sphere" size="0.1" pos="1 2 3"/>
            </worldbody></mujoco>
            """
        )
        vis = scene.root.visuals[0]
        np.testing.assert_allclose(vis.local_transform.pos, (-2, 3, 1))

    def test_body_position_converted(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <body name="b" pos="1 0 0"><geom type="sphere" size="0.1"/></body>
            </worldbody></mujoco>
            """
        )
        # 1 m forward in robotics X appears 1 m along client +Z
        np.testing.assert_allclose(scene.root.children[0].transform.pos, (0, 0, 1))

    def test_box_half_extents_normalized(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <geom name="g" type="box" size="0.1 0.2 0.3"/>
            </worldbody></mujoco>
            """
        )
        vis = scene.root.visuals[0]
        # full extents (0.2, 0.4, 0.6) permuted to client (y, z, x)
        np.testing.assert_allclose(vis.local_transform.scale, (0.4, 0.6, 0.2))

    def test_capsule_fromto(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <geom type="capsule" size="0.05" fromto="0 0 0 0 0 0.4"/>
            </worldbody></mujoco>
            """
        )
        vis = scene.root.visuals[0]
        assert vis.geometry_kind is GeometryKind.CAPSULE
        # midpoint (0,0,0.2) -> client (0, 0.2, 0); shaft 0.4 on client Y
        np.testing.assert_allclose(vis.local_transform.pos, (0, 0.2, 0), atol=1e-9)
        np.testing.assert_allclose(vis.local_transform.scale, (0.1, 0.4, 0.1), atol=1e-9)

    def test_euler_degrees_default(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <body name="b" euler="0 0 90"><geom type="sphere" size="0.1"/></body>
            </worldbody></mujoco>
            """
        )
        q = scene.root.children[0].transform.rot
        # robotics Rz(90deg) wxyz = (cos45, 0, 0, sin45) -> client xyzw (0, -s, 0, c)
        s = np.sin(np.pi / 4)
        np.testing.assert_allclose(q, (0, -s, 0, s), atol=1e-9)

    def test_unnamed_bodies_get_unique_names(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <body><geom type="sphere" size="0.1"/></body>
              <body><geom type="sphere" size="0.1"/></body>
            </worldbody></mujoco>
            """
        )
        names = [c.name for c in scene.root.children]
        assert len(set(names)) == 2
        assert validate_scene(scene).ok

    def test_xml_syntax_error(self):
        with pytest.raises(ParseError):
            parse_mjcf("<mujoco><worldbody>")

    def test_wrong_root(self):
        with pytest.raises(ParseError):
            parse_mjcf("<robot name='x'/>")


class TestGroupsAndExclusions:
    SCENE = """
    <mujoco><worldbody>
      <body name="a">
        <geom name="g0" type="sphere" size="0.1" group="0"/>
        <geom name="g3" type="sphere" size="0.1" group="3"/>
      </body>
      <body name="b"><geom name="g1" type="sphere" size="0.1" group="1"/></body>
    </worldbody></mujoco>
    """

    def test_no_filter_keeps_all(self):
        scene = parse_mjcf(self.SCENE)
        assert len(visuals_of(scene)) == 3

    def test_group_filter(self):
        scene = parse_mjcf(self.SCENE, ParserOptions(visible_geom_groups=[0, 1]))
        assert len(visuals_of(scene)) == 2

    def test_no_rendered_body(self):
        scene = parse_mjcf(self.SCENE, ParserOptions(no_rendered_objects=["a"]))
        assert len(visuals_of(scene)) == 1
        assert scene.find("a") is not None  # object stays, visuals dropped

    def test_no_rendered_geom(self):
        scene = parse_mjcf(self.SCENE, ParserOptions(no_rendered_objects=["g1"]))
        assert len(visuals_of(scene)) == 2

    def test_invalid_group_range(self):
        with pytest.raises(ValueError):
            ParserOptions(visible_geom_groups=[7])


class TestDefaults:
    def test_class_defaults_applied(self):
        scene = parse_mjcf(
            """
            <mujoco>
              <default>
                <geom rgba="1 0 0 1"/>
                <default class="blue"><geom rgba="0 0 1 1" type="box" size="0.1 0.1 0.1"/></default>
              </default>
              <worldbody>
                <geom name="r" type="sphere" size="0.1"/>
                <geom name="b" class="blue"/>
              </worldbody>
            </mujoco>
            """
        )
        red, blue = scene.root.visuals
        assert red.material.color == (1.0, 0.0, 0.0, 1.0)
        assert blue.material.color == (0.0, 0.0, 1.0, 1.0)
        assert blue.geometry_kind is GeometryKind.BOX

    def test_childclass_inherited(self):
        scene = parse_mjcf(
            """
            <mujoco>
              <default><default class="arm"><geom rgba="0 1 0 1"/></default></default>
              <worldbody>
                <body name="base" childclass="arm">
                  <body name="link"><geom type="sphere" size="0.1"/></body>
                </body>
              </worldbody>
            </mujoco>
            """
        )
        vis = scene.find("link").visuals[0]
        assert vis.material.color == (0.0, 1.0, 0.0, 1.0)


class TestAssets:
    def make_tree(self, tmp_path):
        (tmp_path / "meshes").mkdir()
        (tmp_path / "meshes" / "cube.obj").write_text(CUBE_OBJ)
        return tmp_path

    def test_mesh_loaded_and_deduplicated(self, tmp_path):
        root = self.make_tree(tmp_path)
        scene = parse_mjcf(
            """
            <mujoco>
              <compiler meshdir="meshes"/>
              <asset><mesh name="cube" file="cube.obj"/></asset>
              <worldbody>
                <body name="a"><geom type="mesh" mesh="cube"/></body>
                <body name="b"><geom type="mesh" mesh="cube"/></body>
              </worldbody>
            </mujoco>
            """,
            ParserOptions(asset_search_paths=[root]),
        )
        assert len(scene.assets) == 1
        visuals = visuals_of(scene)
        assert len(visuals) == 2
        assert visuals[0].mesh_ref == visuals[1].mesh_ref
        assert validate_scene(scene).ok

    def test_missing_mesh_file(self, tmp_path):
        with pytest.raises(AssetNotFound):
            parse_mjcf(
                """
                <mujoco>
                  <asset><mesh name="m" file="nope.obj"/></asset>
                  <worldbody><geom type="mesh" mesh="m"/></worldbody>
                </mujoco>
                """,
                ParserOptions(asset_search_paths=[tmp_path]),
            )

    def test_texture_material(self, tmp_path):
        from PIL import Image

        img = tmp_path / "tex.png"
        Image.new("RGB", (16, 8), (255, 0, 0)).save(img)
        scene = parse_mjcf(
            """
            <mujoco>
              <asset>
                <texture name="t" file="tex.png"/>
                <material name="m" texture="t" rgba="1 1 0 1" emission="0.5" reflectance="0.25"/>
              </asset>
              <worldbody><geom type="box" size="0.1 0.1 0.1" material="m"/></worldbody>
            </mujoco>
            """,
            ParserOptions(asset_search_paths=[tmp_path]),
        )
        vis = scene.root.visuals[0]
        mat = vis.material
        assert mat.color == (1.0, 1.0, 0.0, 1.0)
        assert mat.emission_color == (0.5, 0.5, 0.0, 1.0)
        assert mat.reflectance == 0.25
        assert mat.texture_ref in scene.assets
        assert mat.texture_size == (16, 8)

    def test_include_resolution(self, tmp_path):
        (tmp_path / "part.xml").write_text(
            "<mujocoinclude><body name='included'><geom type='sphere' size='0.1'/></body></mujocoinclude>"
        )
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <body name="main"><geom type="sphere" size="0.2"/></body>
              <include file="part.xml"/>
            </worldbody></mujoco>
            """,
            ParserOptions(asset_search_paths=[tmp_path]),
        )
        assert scene.find("included") is not None
        assert len(visuals_of(scene)) == 2


class TestDeterminism:
    def test_same_input_same_bytes(self, tmp_path):
        (tmp_path / "cube.obj").write_text(CUBE_OBJ)
        xml = """
        <mujoco>
          <asset><mesh name="cube" file="cube.obj"/></asset>
          <worldbody>
            <body name="a" pos="0.1 0.2 0.3" euler="10 20 30">
              <geom type="mesh" mesh="cube" rgba="0.1 0.2 0.3 1"/>
              <geom type="capsule" size="0.02" fromto="0 0 0 0.3 0 0"/>
            </body>
          </worldbody>
        </mujoco>
        """
        opts = ParserOptions(asset_search_paths=[tmp_path])
        doc1 = serialize_scene(parse_mjcf(xml, opts))
        doc2 = serialize_scene(parse_mjcf(xml, opts))
        assert doc1 == doc2

    def test_all_quaternions_unit(self):
        scene = parse_mjcf(
            """
            <mujoco><worldbody>
              <body name="a" euler="33 44 55">
                <geom type="box" size="0.1 0.1 0.1" euler="1 2 3"/>
                <body name="b" axisangle="1 1 0 0.7"><geom type="sphere" size="0.05"/></body>
              </body>
            </worldbody></mujoco>
            """
        )
        for obj in scene.objects():
            assert abs(np.linalg.norm(obj.transform.rot) - 1) < 1e-9
            for vis in obj.visuals:
                assert abs(np.linalg.norm(vis.local_transform.rot) - 1) < 1e-9
        assert validate_scene(scene).ok
