"""Wavefront OBJ mesh loading.

Supports v/vn/vt/f records. Polygon faces are fan-triangulated; corners are
deduplicated on their (v, vt, vn) index triple. When the file carries no
normals, flat per-face normals are computed and corners are split per face
orientation, so e.g. a cube keeps axis-aligned normals instead of averaged
diagonal ones.
"""

import numpy as np

from ..errors import EmptyMesh, ParseError
from ..usr.types import SimMesh


def _resolve_index(raw: str, count: int, lineno: int, what: str):
    if raw == "":
        return None
    idx = int(raw)
    if idx > 0:
        idx -= 1
    elif idx < 0:
        idx += count
    else:
        raise ParseError(f"{what} index 0 is invalid", position=f"line {lineno}")
    if not 0 <= idx < count:
        raise ParseError(
            f"{what} index {raw} out of range (have {count})", position=f"line {lineno}"
        )
    return idx


def load_mesh_obj(data: bytes) -> SimMesh:
    positions = []
    normals = []
    uvs = []
    faces = []  # list of [(vi, vti, vni), ...] per face

    text = data.decode("utf-8", errors="replace")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            positions.append([float(v) for v in parts[1:4]])
        elif tag == "vn":
            normals.append([float(v) for v in parts[1:4]])
        elif tag == "vt":
            uvs.append([float(v) for v in parts[1:3]])
        elif tag == "f":
            corners = []
            for chunk in parts[1:]:
                fields = chunk.split("/")
                vi = _resolve_index(fields[0], len(positions), lineno, "vertex")
                vti = (
                    _resolve_index(fields[1], len(uvs), lineno, "texcoord")
                    if len(fields) > 1
                    else None
                )
                vni = (
                    _resolve_index(fields[2], len(normals), lineno, "normal")
                    if len(fields) > 2
                    else None
                )
                corners.append((vi, vti, vni))
            if len(corners) < 3:
                raise ParseError("face with fewer than 3 corners", position=f"line {lineno}")
            faces.append(corners)
        # other records (o, g, s, mtllib, usemtl, ...) carry no geometry

    if not faces:
        raise EmptyMesh("OBJ file contains no faces")

    positions = np.asarray(positions, dtype=np.float64)
    normals_in = np.asarray(normals, dtype=np.float64) if normals else None
    uvs_in = np.asarray(uvs, dtype=np.float64) if uvs else None

    # fan triangulation
    triangles = []
    for corners in faces:
        for i in range(1, len(corners) - 1):
            triangles.append((corners[0], corners[i], corners[i + 1]))

    have_normals = normals_in is not None
    computed = {}  # rounded face normal -> key id, when normals are computed
    out_vertices = []
    out_normals = []
    out_uvs = []
    out_indices = []
    corner_map = {}

    for tri in triangles:
        if have_normals:
            normal_keys = [c[2] for c in tri]
            face_normal = None
        else:
            a, b, c = (positions[corner[0]] for corner in tri)
            n = np.cross(b - a, c - a)
            length = np.linalg.norm(n)
            face_normal = n / length if length > 0 else np.array([0.0, 0.0, 1.0])
            rounded = tuple(np.round(face_normal, 6))
            key_id = computed.setdefault(rounded, len(computed))
            normal_keys = [(-1, key_id)] * 3
        for corner, nkey in zip(tri, normal_keys):
            vi, vti, _ = corner
            dedup_key = (vi, vti, nkey)
            slot = corner_map.get(dedup_key)
            if slot is None:
                slot = len(out_vertices)
                corner_map[dedup_key] = slot
                out_vertices.append(positions[vi])
                if have_normals:
                    out_normals.append(
                        normals_in[nkey] if nkey is not None else [0.0, 0.0, 1.0]
                    )
                else:
                    out_normals.append(face_normal)
                out_uvs.append(uvs_in[vti] if (uvs_in is not None and vti is not None) else None)
            out_indices.append(slot)

    vertices = np.asarray(out_vertices, dtype=np.float32).reshape(-1)
    normal_arr = np.asarray(out_normals, dtype=np.float64)
    lengths = np.linalg.norm(normal_arr, axis=1, keepdims=True)
    lengths[lengths == 0] = 1.0
    normal_arr = (normal_arr / lengths).astype(np.float32).reshape(-1)

    if uvs_in is not None and all(u is not None for u in out_uvs):
        uv_arr = np.asarray(out_uvs, dtype=np.float32).reshape(-1)
    else:
        uv_arr = np.empty(0, dtype=np.float32)

    return SimMesh(
        vertices=vertices,
        indices=np.asarray(out_indices, dtype=np.uint32),
        normals=normal_arr,
        uvs=uv_arr,
    )
