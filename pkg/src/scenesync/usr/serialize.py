"""Scene document serialization.

The document is canonical UTF-8 JSON: keys sorted, no whitespace, optional
fields omitted rather than null. Serializing the same scene therefore yields
byte-identical output on every platform, and serialize(deserialize(doc)) ==
doc. Asset bytes never appear in the document; visuals reference blobs by
hash only. Field names are frozen in docs/wire-format.md.
"""

import json

from ..errors import ParseError, UnsupportedGeometry, ValidationFailed
from .types import IDENTITY_SCALE, GeometryKind, Pose, SimMaterial, SimObject, SimScene, SimVisual

SCENE_DOC_VERSION = 1


def _pose_to_doc(pose: Pose) -> dict:
    doc = {
        "pos": list(pose.pos),
        "rot": list(pose.rot),
        "rot_order": pose.rot_order,
    }
    if tuple(pose.scale) != IDENTITY_SCALE:
        doc["scale"] = list(pose.scale)
    return doc


def _pose_from_doc(doc: dict) -> Pose:
    return Pose(
        pos=tuple(doc["pos"]),
        rot=tuple(doc["rot"]),
        rot_order=doc["rot_order"],
        scale=tuple(doc.get("scale", IDENTITY_SCALE)),
    )


def _material_to_doc(mat: SimMaterial) -> dict:
    doc = {
        "color": list(mat.color),
        "emission": list(mat.emission_color),
        "reflectance": mat.reflectance,
    }
    if mat.texture_ref is not None:
        doc["texture"] = mat.texture_ref
    if mat.texture_size is not None:
        doc["texture_size"] = list(mat.texture_size)
    return doc


def _material_from_doc(doc: dict) -> SimMaterial:
    size = doc.get("texture_size")
    return SimMaterial(
        color=tuple(doc["color"]),
        emission_color=tuple(doc["emission"]),
        reflectance=doc["reflectance"],
        texture_ref=doc.get("texture"),
        texture_size=tuple(size) if size is not None else None,
    )


def _visual_to_doc(vis: SimVisual) -> dict:
    doc = {
        "kind": vis.geometry_kind.value,
        "pose": _pose_to_doc(vis.local_transform),
        "material": _material_to_doc(vis.material),
    }
    if vis.mesh_ref is not None:
        doc["mesh"] = vis.mesh_ref
    return doc


def _visual_from_doc(doc: dict) -> SimVisual:
    kind_raw = doc["kind"]
    try:
        kind = GeometryKind(kind_raw)
    except ValueError:
        raise UnsupportedGeometry(f"unknown geometry kind {kind_raw!r}") from None
    return SimVisual(
        geometry_kind=kind,
        local_transform=_pose_from_doc(doc["pose"]),
        mesh_ref=doc.get("mesh"),
        material=_material_from_doc(doc["material"]),
    )


def _object_to_doc(obj: SimObject) -> dict:
    return {
        "name": obj.name,
        "pose": _pose_to_doc(obj.transform),
        "visuals": [_visual_to_doc(v) for v in obj.visuals],
        "children": [_object_to_doc(c) for c in obj.children],
    }


def _object_from_doc(doc: dict) -> SimObject:
    return SimObject(
        name=doc["name"],
        transform=_pose_from_doc(doc["pose"]),
        visuals=[_visual_from_doc(v) for v in doc.get("visuals", [])],
        children=[_object_from_doc(c) for c in doc.get("children", [])],
    )


def serialize_scene(scene: SimScene) -> str:
    """Scene -> canonical JSON text (no asset bytes)."""
    from .validate import validate_scene

    report = validate_scene(scene, check_assets=False)
    if report.entries:
        raise ValidationFailed(report)
    doc = {
        "version": SCENE_DOC_VERSION,
        "meta": dict(scene.meta),
        "assets": scene.referenced_assets(),
        "root": _object_to_doc(scene.root),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def deserialize_scene(text: str) -> SimScene:
    """Canonical JSON text -> scene with an empty (unresolved) asset map."""
    from .validate import validate_scene

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, position=exc.pos) from None
    if not isinstance(doc, dict) or "root" not in doc:
        raise ParseError("document has no root object")
    version = doc.get("version")
    if version != SCENE_DOC_VERSION:
        raise ParseError(f"unsupported document version {version!r}")
    try:
        scene = SimScene(
            root=_object_from_doc(doc["root"]),
            assets={},
            meta=dict(doc.get("meta", {})),
        )
    except UnsupportedGeometry:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed scene document: {exc}") from None
    report = validate_scene(scene, check_assets=False)
    if report.entries:
        raise ValidationFailed(report)
    return scene


def scene_name_table(scene: SimScene) -> list:
    """Object names in depth-first preorder.

    Both endpoints derive this table from the same scene document, so binary
    state updates can address objects by u16 index without shipping names.
    """
    return [obj.name for obj in scene.objects()]
