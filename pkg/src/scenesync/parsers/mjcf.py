"""MJCF (MuJoCo XML) parsing into the unified scene representation.

Supported subset: worldbody/body/geom trees, mesh/texture/material assets,
default classes, and <include>. Actuators, sensors, tendons, contacts,
sites, cameras, and lights carry no renderable geometry and are skipped.
Output poses are in the client frame; box/sphere/capsule/cylinder sizes are
normalized from MuJoCo half-extents to full extents.
"""

import logging
import xml.etree.ElementTree as ET
from math import pi

import numpy as np

from .. import frames
from ..errors import ParseError
from ..usr.types import GeometryKind, Pose, SimMaterial, SimObject, SimScene, SimVisual
from .common import (
    PLANE_INFINITE_EXTENT,
    AssetStore,
    clamp01,
    parse_floats,
    pose_to_client,
)
from .options import ParserOptions

log = logging.getLogger("scenesync.parsers.mjcf")

_SKIPPED_BODY_CHILDREN = {
    "joint", "freejoint", "inertial", "site", "camera", "light", "plugin",
    "composite", "flexcomp", "attach", "frame",
}

_DEFAULT_GEOM_RGBA = (0.5, 0.5, 0.5, 1.0)


class _Compiler:
    def __init__(self):
        self.angle = "degree"
        self.eulerseq = "xyz"
        self.meshdir = ""
        self.texturedir = ""

    def radians(self, value: float) -> float:
        return value * pi / 180.0 if self.angle == "degree" else value


def _merge_defaults(parent: dict, element: ET.Element) -> dict:
    merged = {tag: dict(attrs) for tag, attrs in parent.items()}
    for child in element:
        if child.tag == "default":
            continue
        merged.setdefault(child.tag, {})
        merged[child.tag].update(child.attrib)
    return merged


def _collect_defaults(element: ET.Element, inherited: dict, table: dict) -> None:
    name = element.get("class", "main")
    merged = _merge_defaults(inherited, element)
    table[name] = merged
    for child in element.findall("default"):
        _collect_defaults(child, merged, table)


def _resolve_includes(root: ET.Element, options: ParserOptions, depth=0) -> None:
    if depth > 8:
        raise ParseError("include nesting too deep (cycle?)")
    for parent in root.iter():
        children = list(parent)
        for index, child in enumerate(children):
            if child.tag != "include":
                continue
            relpath = child.get("file")
            if not relpath:
                raise ParseError("<include> without file attribute")
            path = options.resolve(relpath)
            if path is None:
                raise ParseError(f"included file not found: {relpath}")
            try:
                included = ET.fromstring(path.read_text())
            except ET.ParseError as exc:
                raise ParseError(f"XML error in include {relpath}: {exc}") from None
            _resolve_includes(included, options, depth + 1)
            parent.remove(child)
            for offset, grandchild in enumerate(included):
                parent.insert(index + offset, grandchild)


def _orientation_wxyz(attrs: dict, compiler: _Compiler):
    if "quat" in attrs:
        return tuple(parse_floats(attrs["quat"], 4, "quat"))
    if "euler" in attrs:
        angles = [compiler.radians(a) for a in parse_floats(attrs["euler"], 3, "euler")]
        return frames.euler_to_quat_wxyz(angles, seq=compiler.eulerseq)
    if "axisangle" in attrs:
        ax = parse_floats(attrs["axisangle"], 4, "axisangle")
        return frames.axis_angle_to_quat_wxyz(ax[:3], compiler.radians(ax[3]))
    for unsupported in ("xyaxes", "zaxis"):
        if unsupported in attrs:
            log.warning("orientation attribute %r is not supported; using identity", unsupported)
    return (1.0, 0.0, 0.0, 0.0)


def _primitive_dims(geom_type: str, size: list, fromto) -> tuple:
    """MuJoCo size spec -> full per-axis extents in the robotics frame."""
    if geom_type == "sphere":
        r = size[0]
        return (2 * r, 2 * r, 2 * r)
    if geom_type == "box":
        return (2 * size[0], 2 * size[1], 2 * size[2])
    if geom_type in ("capsule", "cylinder"):
        r = size[0]
        if fromto is not None:
            length = float(np.linalg.norm(np.subtract(fromto[3:], fromto[:3])))
        else:
            length = 2 * size[1]
        return (2 * r, 2 * r, length)
    if geom_type == "plane":
        sx = 2 * size[0] if len(size) > 0 and size[0] > 0 else PLANE_INFINITE_EXTENT
        sy = 2 * size[1] if len(size) > 1 and size[1] > 0 else PLANE_INFINITE_EXTENT
        return (sx, sy, 1.0)
    raise ParseError(f"unsupported geom type {geom_type!r}")


class _MjcfParser:
    def __init__(self, options: ParserOptions):
        self.options = options
        self.compiler = _Compiler()
        self.defaults = {"main": {}}
        self.meshes = {}  # name -> (file, scale)
        self.textures = {}  # name -> file
        self.materials = {}  # name -> attrs
        self.assets = AssetStore(options)
        self._anon_bodies = 0

    # -- setup sections --------------------------------------------------

    def read_compiler(self, root: ET.Element) -> None:
        for comp in root.findall("compiler"):
            self.compiler.angle = comp.get("angle", self.compiler.angle)
            self.compiler.eulerseq = comp.get("eulerseq", self.compiler.eulerseq)
            self.compiler.meshdir = comp.get("meshdir", self.compiler.meshdir)
            self.compiler.texturedir = comp.get("texturedir", self.compiler.texturedir)

    def read_defaults(self, root: ET.Element) -> None:
        for default in root.findall("default"):
            _collect_defaults(default, {}, self.defaults)

    def read_assets(self, root: ET.Element) -> None:
        for asset in root.findall("asset"):
            for mesh in asset.findall("mesh"):
                file = mesh.get("file")
                if not file:
                    log.warning("mesh asset without file is not supported; skipping")
                    continue
                name = mesh.get("name") or file.rsplit("/", 1)[-1].rsplit(".", 1)[0]
                scale = tuple(parse_floats(mesh.get("scale", "1 1 1"), 3, "mesh scale"))
                self.meshes[name] = (file, scale)
            for texture in asset.findall("texture"):
                file = texture.get("file")
                name = texture.get("name")
                if not file:
                    log.info("skipping non-file texture %r", name or texture.get("builtin"))
                    continue
                if name:
                    self.textures[name] = file
            for material in asset.findall("material"):
                name = material.get("name")
                if name:
                    self.materials[name] = dict(material.attrib)

    # -- attribute resolution ---------------------------------------------

    def geom_attrs(self, element: ET.Element, childclass: str) -> dict:
        cls = element.get("class") or childclass or "main"
        attrs = dict(self.defaults.get(cls, self.defaults["main"]).get("geom", {}))
        attrs.update(element.attrib)
        return attrs

    def material_for(self, attrs: dict):
        explicit_rgba = "rgba" in attrs
        rgba = parse_floats(attrs["rgba"], 4, "rgba") if explicit_rgba else None
        mat_attrs = self.materials.get(attrs.get("material", ""), None)
        color = _DEFAULT_GEOM_RGBA
        emission = (0.0, 0.0, 0.0, 1.0)
        reflectance = 0.0
        texture_ref = None
        texture_size = None
        if mat_attrs is not None:
            mat_rgba = parse_floats(mat_attrs.get("rgba", "1 1 1 1"), 4, "material rgba")
            color = tuple(mat_rgba)
            scalar = float(mat_attrs.get("emission", 0.0))
            emission = clamp01((mat_rgba[0] * scalar, mat_rgba[1] * scalar, mat_rgba[2] * scalar, 1.0))
            reflectance = min(1.0, max(0.0, float(mat_attrs.get("reflectance", 0.0))))
            texname = mat_attrs.get("texture")
            if texname:
                file = self.textures.get(texname)
                if file is None:
                    log.info("material references unknown texture %r", texname)
                else:
                    loaded = self.assets.load_texture(self._texture_path(file))
                    if loaded:
                        texture_ref, texture_size = loaded
        if explicit_rgba:
            color = tuple(rgba)
        return SimMaterial(
            color=clamp01(color),
            emission_color=emission,
            reflectance=reflectance,
            texture_ref=texture_ref,
            texture_size=texture_size,
        )

    def _mesh_path(self, file: str) -> str:
        return f"{self.compiler.meshdir}/{file}" if self.compiler.meshdir else file

    def _texture_path(self, file: str) -> str:
        return f"{self.compiler.texturedir}/{file}" if self.compiler.texturedir else file

    # -- tree building -----------------------------------------------------

    def build_visual(self, element: ET.Element, childclass: str):
        attrs = self.geom_attrs(element, childclass)
        name = attrs.get("name", "")

        if self.options.visible_geom_groups is not None:
            if int(attrs.get("group", 0)) not in self.options.visible_geom_groups:
                return None
        if name and name in self.options.no_rendered_objects:
            return None

        geom_type = attrs.get("type")
        mesh_name = attrs.get("mesh")
        if mesh_name and (geom_type is None or geom_type == "mesh"):
            geom_type = "mesh"
        elif geom_type is None:
            geom_type = "sphere"

        fromto = (
            parse_floats(attrs["fromto"], 6, "fromto") if "fromto" in attrs else None
        )
        pos = tuple(parse_floats(attrs.get("pos", "0 0 0"), 3, "pos"))
        quat = _orientation_wxyz(attrs, self.compiler)
        if fromto is not None:
            start, end = np.array(fromto[:3]), np.array(fromto[3:])
            pos = tuple((start + end) / 2.0)
            quat = frames.quat_between_z_and(end - start)

        material = self.material_for(attrs)

        if geom_type == "mesh":
            if mesh_name not in self.meshes:
                raise ParseError(f"geom references unknown mesh {mesh_name!r}")
            file, scale = self.meshes[mesh_name]
            blob_hash = self.assets.load_mesh(self._mesh_path(file), scale)
            if blob_hash is None:
                return None
            return SimVisual(
                geometry_kind=GeometryKind.MESH,
                local_transform=pose_to_client(pos, quat),
                mesh_ref=blob_hash,
                material=material,
            )

        size = parse_floats(attrs.get("size", ""), None, "size") if attrs.get("size") else []
        if geom_type in ("sphere", "box", "capsule", "cylinder") and not size:
            log.warning("geom %r has no size; skipping", name or geom_type)
            return None
        if geom_type == "box" and len(size) < 3:
            log.warning("box geom needs 3 size values; skipping")
            return None
        if geom_type in ("capsule", "cylinder") and fromto is None and len(size) < 2:
            log.warning("%s geom needs radius and half-length; skipping", geom_type)
            return None
        try:
            dims = _primitive_dims(geom_type, size, fromto)
        except ParseError:
            log.warning("unsupported geom type %r; skipping", geom_type)
            return None
        return SimVisual(
            geometry_kind=GeometryKind(geom_type),
            local_transform=pose_to_client(pos, quat, dims),
            material=material,
        )

    def build_body(self, element: ET.Element, childclass: str) -> SimObject:
        name = element.get("name")
        if not name:
            self._anon_bodies += 1
            name = f"body_{self._anon_bodies}"
        childclass = element.get("childclass", childclass)
        pos = tuple(parse_floats(element.get("pos", "0 0 0"), 3, "pos"))
        quat = _orientation_wxyz(element.attrib, self.compiler)
        obj = SimObject(name=name, transform=pose_to_client(pos, quat))
        self.fill_children(obj, element, childclass)
        return obj

    def fill_children(self, obj: SimObject, element: ET.Element, childclass: str) -> None:
        skip_visuals = obj.name in self.options.no_rendered_objects
        for child in element:
            if child.tag == "geom":
                if skip_visuals:
                    continue
                visual = self.build_visual(child, childclass)
                if visual is not None:
                    obj.visuals.append(visual)
            elif child.tag == "body":
                obj.children.append(self.build_body(child, childclass))
            elif child.tag in _SKIPPED_BODY_CHILDREN:
                log.debug("skipping unsupported element <%s>", child.tag)
            else:
                log.debug("ignoring element <%s>", child.tag)


def parse_mjcf(xml_text: str, options: ParserOptions | None = None) -> SimScene:
    """Parse MJCF text into a client-frame SimScene."""
    options = options or ParserOptions()
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise ParseError(f"XML syntax error: {exc.msg}", position=exc.position) from None
    if root.tag != "mujoco":
        raise ParseError(f"expected <mujoco> root, got <{root.tag}>")

    _resolve_includes(root, options)

    parser = _MjcfParser(options)
    parser.read_compiler(root)
    parser.read_defaults(root)
    parser.read_assets(root)

    world = SimObject(name="world")
    worldbody = root.find("worldbody")
    if worldbody is not None:
        parser.fill_children(world, worldbody, childclass="")

    return SimScene(
        root=world,
        assets=parser.assets.blobs,
        meta={
            "name": root.get("model", "mjcf-scene"),
            "source_format": "mjcf",
            "source_units": "meters",
            "frame": "client-yup",
        },
    )
