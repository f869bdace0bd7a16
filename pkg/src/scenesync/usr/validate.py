"""Scene validation: every invariant violation is reported, none raised."""

from dataclasses import dataclass, field

import numpy as np

from .assets import decode_mesh_blob
from .types import GeometryKind, Pose, SimScene

QUAT_NORM_TOL = 1e-6
NORMAL_NORM_TOL = 1e-3


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str

    def __str__(self):
        return f"{self.code} at {self.path}: {self.message}"


@dataclass
class ValidationReport:
    entries: list = field(default_factory=list)

    def add(self, code: str, path: str, message: str) -> None:
        self.entries.append(ValidationIssue(code, path, message))

    def codes(self) -> set:
        return {e.code for e in self.entries}

    @property
    def ok(self) -> bool:
        return not self.entries

    def __bool__(self):
        return self.ok


def _check_pose(pose: Pose, path: str, report: ValidationReport, scaled: bool) -> None:
    norm = float(np.linalg.norm(pose.rot))
    if abs(norm - 1.0) > QUAT_NORM_TOL:
        report.add("NonUnitQuaternion", path, f"quaternion norm {norm:.9f}")
    if scaled:
        if any(s <= 0.0 for s in pose.scale):
            report.add("NonPositiveScale", path, f"scale {pose.scale}")
    if not all(np.isfinite(pose.pos)):
        report.add("NonFinitePosition", path, f"position {pose.pos}")


def _check_rgba(values, what: str, path: str, report: ValidationReport) -> None:
    if len(values) != 4 or any(not (0.0 <= float(v) <= 1.0) for v in values):
        report.add("ColorOutOfRange", path, f"{what} {tuple(values)}")


def validate_scene(scene: SimScene, check_assets: bool = True) -> ValidationReport:
    """Collect every violated invariant; an empty report means a valid scene.

    check_assets=False skips the dangling-reference and mesh-payload checks,
    for scenes whose blobs have not been fetched yet.
    """
    report = ValidationReport()
    seen = {}
    objects = []

    # Tree walk with an explicit visited set: a node reachable twice means the
    # "tree" shares or cycles.
    stack = [(scene.root, "root")]
    visited = set()
    while stack:
        obj, path = stack.pop()
        if id(obj) in visited:
            report.add("CycleDetected", path, f"object {obj.name!r} reachable twice")
            continue
        visited.add(id(obj))
        objects.append((obj, path))
        for i, child in enumerate(reversed(obj.children)):
            stack.append((child, f"{path}/children[{len(obj.children) - 1 - i}]"))

    for obj, path in objects:
        if not obj.name:
            report.add("EmptyName", path, "object name is empty")
        elif obj.name in seen:
            report.add(
                "NameCollision", path, f"name {obj.name!r} already used at {seen[obj.name]}"
            )
        else:
            seen[obj.name] = path
        _check_pose(obj.transform, f"{path}.transform", report, scaled=True)

        for vi, vis in enumerate(obj.visuals):
            vpath = f"{path}.visuals[{vi}]"
            _check_pose(vis.local_transform, f"{vpath}.pose", report, scaled=True)
            has_ref = vis.mesh_ref is not None
            if (vis.geometry_kind is GeometryKind.MESH) != has_ref:
                report.add(
                    "MeshRefMismatch",
                    vpath,
                    f"kind {vis.geometry_kind.value} with mesh_ref={vis.mesh_ref!r}",
                )
            _check_rgba(vis.material.color, "color", vpath, report)
            _check_rgba(vis.material.emission_color, "emission", vpath, report)
            if not (0.0 <= vis.material.reflectance <= 1.0):
                report.add("ColorOutOfRange", vpath, f"reflectance {vis.material.reflectance}")
            if vis.material.texture_size is not None and any(
                s <= 0 for s in vis.material.texture_size
            ):
                report.add("BadTextureSize", vpath, f"texture_size {vis.material.texture_size}")

            if check_assets:
                for ref, what in ((vis.mesh_ref, "mesh"), (vis.material.texture_ref, "texture")):
                    if ref is not None and ref not in scene.assets:
                        report.add("DanglingAsset", vpath, f"{what} blob {ref} not in assets")

    if check_assets:
        _check_mesh_blobs(scene, objects, report)
    return report


def _check_mesh_blobs(scene: SimScene, objects, report: ValidationReport) -> None:
    checked = set()
    for obj, path in objects:
        for vi, vis in enumerate(obj.visuals):
            ref = vis.mesh_ref
            if ref is None or ref in checked or ref not in scene.assets:
                continue
            checked.add(ref)
            vpath = f"{path}.visuals[{vi}]"
            try:
                mesh = decode_mesh_blob(scene.assets[ref])
            except Exception as exc:
                report.add("BadMeshBlob", vpath, str(exc))
                continue
            if len(mesh.indices) % 3 != 0:
                report.add("BadIndexCount", vpath, f"{len(mesh.indices)} indices")
            if len(mesh.indices) and mesh.indices.max() >= mesh.vertex_count:
                report.add(
                    "IndexOutOfRange",
                    vpath,
                    f"max index {int(mesh.indices.max())} >= {mesh.vertex_count} vertices",
                )
            if len(mesh.normals):
                if len(mesh.normals) != len(mesh.vertices):
                    report.add("BadNormals", vpath, "normal count differs from vertex count")
                else:
                    norms = np.linalg.norm(mesh.normals.reshape(-1, 3), axis=1)
                    bad = np.abs(norms - 1.0) > NORMAL_NORM_TOL
                    if bad.any():
                        report.add(
                            "BadNormals", vpath, f"{int(bad.sum())} normals deviate from unit norm"
                        )
