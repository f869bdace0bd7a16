import numpy as np
import pytest

from scenesync.errors import ParseError, UnsupportedTopology
from scenesync.parsers import ParserOptions, parse_urdf
from scenesync.usr import GeometryKind, validate_scene

TWO_LINKS = """
<robot name="pair">
  <link name="base"/>
  <link name="tip"/>
  <joint name="j" type="fixed">
    <parent link="base"/>
    <child link="tip"/>
    <origin xyz="0 0 0.5"/>
  </joint>
</robot>
"""


class TestTree:
    def test_fixed_joint_offset_converted(self):
        scene = parse_urdf(TWO_LINKS)
        base = scene.find("base")
        assert [c.name for c in base.children] == ["tip"]
        np.testing.assert_allclose(scene.find("tip").transform.pos, (0, 0.5, 0))

    def test_single_root_under_world(self):
        scene = parse_urdf(TWO_LINKS)
        assert scene.root.name == "world"
        assert [c.name for c in scene.root.children] == ["base"]
        assert validate_scene(scene).ok

    def test_box_full_extents(self):
        scene = parse_urdf(
            """
            <robot name="r">
              <link name="l">
                <visual><geometry><box size="1 1 1"/></geometry></visual>
              </link>
            </robot>
            """
        )
        vis = scene.find("l").visuals[0]
        assert vis.geometry_kind is GeometryKind.BOX
        np.testing.assert_allclose(vis.local_transform.scale, (1, 1, 1))

    def test_cylinder_dims(self):
        scene = parse_urdf(
            """
            <robot name="r">
              <link name="l">
                <visual><geometry><cylinder radius="0.05" length="0.4"/></geometry></visual>
              </link>
            </robot>
            """
        )
        vis = scene.find("l").visuals[0]
        # diameter on client X/Z, length along client Y
        np.testing.assert_allclose(vis.local_transform.scale, (0.1, 0.4, 0.1))

    def test_rpy_single_axis(self):
        scene = parse_urdf(
            """
            <robot name="r">
              <link name="a"/><link name="b"/>
              <joint name="j" type="revolute">
                <parent link="a"/><child link="b"/>
                <origin xyz="0 0 0" rpy="0 0 1.5707963267948966"/>
              </joint>
            </robot>
            """
        )
        q = scene.find("b").transform.rot
        s = np.sin(np.pi / 4)
        np.testing.assert_allclose(q, (0, -s, 0, s), atol=1e-9)

    def test_self_ancestor_loop(self):
        with pytest.raises(UnsupportedTopology):
            parse_urdf(
                """
                <robot name="r">
                  <link name="a"/><link name="b"/>
                  <joint name="j1" type="fixed"><parent link="a"/><child link="b"/></joint>
                  <joint name="j2" type="fixed"><parent link="b"/><child link="a"/></joint>
                </robot>
                """
            )

    def test_multiple_parents_rejected(self):
        with pytest.raises(UnsupportedTopology):
            parse_urdf(
                """
                <robot name="r">
                  <link name="a"/><link name="b"/><link name="c"/>
                  <joint name="j1" type="fixed"><parent link="a"/><child link="c"/></joint>
                  <joint name="j2" type="fixed"><parent link="b"/><child link="c"/></joint>
                </robot>
                """
            )

    def test_missing_link_reference(self):
        with pytest.raises(ParseError):
            parse_urdf(
                """
                <robot name="r">
                  <link name="a"/>
                  <joint name="j" type="fixed"><parent link="a"/><child link="ghost"/></joint>
                </robot>
                """
            )

    def test_no_links(self):
        with pytest.raises(ParseError):
            parse_urdf("<robot name='empty'/>")


class TestMaterials:
    def test_named_material_lookup(self):
        scene = parse_urdf(
            """
            <robot name="r">
              <material name="red"><color rgba="1 0 0 1"/></material>
              <link name="l">
                <visual>
                  <geometry><sphere radius="0.1"/></geometry>
                  <material name="red"/>
                </visual>
              </link>
            </robot>
            """
        )
        assert scene.find("l").visuals[0].material.color == (1.0, 0.0, 0.0, 1.0)

    def test_inline_material_overrides(self):
        scene = parse_urdf(
            """
            <robot name="r">
              <material name="red"><color rgba="1 0 0 1"/></material>
              <link name="l">
                <visual>
                  <geometry><sphere radius="0.1"/></geometry>
                  <material name="red"><color rgba="0 0 1 1"/></material>
                </visual>
              </link>
            </robot>
            """
        )
        assert scene.find("l").visuals[0].material.color == (0.0, 0.0, 1.0, 1.0)

    def test_mesh_visual(self, tmp_path):
        (tmp_path / "part.obj").write_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"
        )
        scene = parse_urdf(
            """
            <robot name="r">
              <link name="l">
                <visual><geometry><mesh filename="part.obj" scale="2 2 2"/></geometry></visual>
              </link>
            </robot>
            """,
            ParserOptions(asset_search_paths=[tmp_path]),
        )
        vis = scene.find("l").visuals[0]
        assert vis.geometry_kind is GeometryKind.MESH
        assert vis.mesh_ref in scene.assets
        assert validate_scene(scene).ok
