"""URDF parsing into the unified scene representation.

Links become objects, joints define the parent-child tree with the joint
origin as the fixed child-link offset (zero configuration), and <visual>
elements become visuals. Collision geometry, transmission, and gazebo
extensions are ignored. Output poses are in the client frame.
"""

import logging
import xml.etree.ElementTree as ET

from .. import frames
from ..errors import ParseError, UnsupportedTopology
from ..usr.types import GeometryKind, Pose, SimMaterial, SimObject, SimScene, SimVisual
from .common import AssetStore, clamp01, parse_floats, pose_to_client
from .options import ParserOptions

log = logging.getLogger("scenesync.parsers.urdf")


def _origin(element: ET.Element):
    """(xyz, rpy) from an optional <origin> child."""
    origin = element.find("origin")
    if origin is None:
        return (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)
    xyz = tuple(parse_floats(origin.get("xyz", "0 0 0"), 3, "origin xyz"))
    rpy = tuple(parse_floats(origin.get("rpy", "0 0 0"), 3, "origin rpy"))
    return xyz, rpy


def _rpy_to_wxyz(rpy):
    # URDF rpy: fixed-axis (extrinsic) roll, pitch, yaw
    return frames.euler_to_quat_wxyz(rpy, seq="xyz")


class _UrdfParser:
    def __init__(self, options: ParserOptions):
        self.options = options
        self.assets = AssetStore(options)
        self.materials = {}  # name -> (rgba, texture file)

    def read_materials(self, robot: ET.Element) -> None:
        for material in robot.findall("material"):
            name = material.get("name")
            if not name:
                continue
            self.materials[name] = self._material_parts(material)

    def _material_parts(self, element: ET.Element):
        rgba = None
        texture = None
        color = element.find("color")
        if color is not None and color.get("rgba"):
            rgba = tuple(parse_floats(color.get("rgba"), 4, "material rgba"))
        tex = element.find("texture")
        if tex is not None and tex.get("filename"):
            texture = tex.get("filename")
        return rgba, texture

    def material_for(self, visual: ET.Element) -> SimMaterial:
        rgba, texture = None, None
        element = visual.find("material")
        if element is not None:
            rgba, texture = self._material_parts(element)
            name = element.get("name")
            if name and rgba is None and texture is None and name in self.materials:
                rgba, texture = self.materials[name]
        texture_ref = None
        texture_size = None
        if texture:
            loaded = self.assets.load_texture(texture)
            if loaded:
                texture_ref, texture_size = loaded
        return SimMaterial(
            color=clamp01(rgba) if rgba else (1.0, 1.0, 1.0, 1.0),
            texture_ref=texture_ref,
            texture_size=texture_size,
        )

    def build_visual(self, visual: ET.Element, link_name: str):
        geometry = visual.find("geometry")
        if geometry is None or len(geometry) == 0:
            log.warning("link %r visual without geometry; skipping", link_name)
            return None
        shape = geometry[0]
        xyz, rpy = _origin(visual)
        quat = _rpy_to_wxyz(rpy)
        material = self.material_for(visual)

        if shape.tag == "box":
            dims = tuple(parse_floats(shape.get("size", "0 0 0"), 3, "box size"))
            return SimVisual(
                geometry_kind=GeometryKind.BOX,
                local_transform=pose_to_client(xyz, quat, dims),
                material=material,
            )
        if shape.tag == "sphere":
            r = float(shape.get("radius", 0))
            return SimVisual(
                geometry_kind=GeometryKind.SPHERE,
                local_transform=pose_to_client(xyz, quat, (2 * r, 2 * r, 2 * r)),
                material=material,
            )
        if shape.tag == "cylinder":
            r = float(shape.get("radius", 0))
            length = float(shape.get("length", 0))
            return SimVisual(
                geometry_kind=GeometryKind.CYLINDER,
                local_transform=pose_to_client(xyz, quat, (2 * r, 2 * r, length)),
                material=material,
            )
        if shape.tag == "mesh":
            filename = shape.get("filename")
            if not filename:
                log.warning("mesh without filename in link %r; skipping", link_name)
                return None
            scale = tuple(parse_floats(shape.get("scale", "1 1 1"), 3, "mesh scale"))
            blob_hash = self.assets.load_mesh(filename, scale)
            if blob_hash is None:
                return None
            return SimVisual(
                geometry_kind=GeometryKind.MESH,
                local_transform=pose_to_client(xyz, quat),
                mesh_ref=blob_hash,
                material=material,
            )
        log.warning("unsupported geometry <%s> in link %r; skipping", shape.tag, link_name)
        return None

    def build_link(self, element: ET.Element) -> SimObject:
        name = element.get("name")
        if not name:
            raise ParseError("link without a name")
        obj = SimObject(name=name)
        if name not in self.options.no_rendered_objects:
            for visual in element.findall("visual"):
                built = self.build_visual(visual, name)
                if built is not None:
                    obj.visuals.append(built)
        return obj


def parse_urdf(xml_text: str, options: ParserOptions | None = None) -> SimScene:
    """Parse URDF text into a client-frame SimScene."""
    options = options or ParserOptions()
    try:
        robot = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise ParseError(f"XML syntax error: {exc.msg}", position=exc.position) from None
    if robot.tag != "robot":
        raise ParseError(f"expected <robot> root, got <{robot.tag}>")

    parser = _UrdfParser(options)
    parser.read_materials(robot)

    links = {}
    order = []
    for element in robot.findall("link"):
        link = parser.build_link(element)
        if link.name in links:
            raise ParseError(f"duplicate link name {link.name!r}")
        links[link.name] = link
        order.append(link.name)
    if not links:
        raise ParseError("URDF contains no links")

    parent_of = {}
    for joint in robot.findall("joint"):
        parent_el = joint.find("parent")
        child_el = joint.find("child")
        if parent_el is None or child_el is None:
            raise ParseError(f"joint {joint.get('name')!r} missing parent or child")
        parent = parent_el.get("link")
        child = child_el.get("link")
        if parent not in links:
            raise ParseError(f"joint {joint.get('name')!r} references unknown parent {parent!r}")
        if child not in links:
            raise ParseError(f"joint {joint.get('name')!r} references unknown child {child!r}")
        if child in parent_of:
            raise UnsupportedTopology(f"link {child!r} has multiple parent joints")
        xyz, rpy = _origin(joint)
        links[child].transform = pose_to_client(xyz, _rpy_to_wxyz(rpy))
        parent_of[child] = parent

    # cycle check: every link must reach a root by following parents
    for name in order:
        seen = set()
        cursor = name
        while cursor in parent_of:
            if cursor in seen:
                raise UnsupportedTopology(f"kinematic loop through link {cursor!r}")
            seen.add(cursor)
            cursor = parent_of[cursor]

    for child, parent in parent_of.items():
        links[parent].children.append(links[child])

    world = SimObject(name="world")
    for name in order:
        if name not in parent_of:
            world.children.append(links[name])

    return SimScene(
        root=world,
        assets=parser.assets.blobs,
        meta={
            "name": robot.get("name", "urdf-robot"),
            "source_format": "urdf",
            "source_units": "meters",
            "frame": "client-yup",
        },
    )
