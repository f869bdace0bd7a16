"""Coordinate frame conversions and rigid-transform algebra.

Two conventions are used throughout:

* robotics frame: X forward, Y left, Z up, right-handed (simulator side)
* client frame:   X right, Y up, Z forward, left-handed (viewer side)

Positions map robotics->client as (x, y, z) -> (-y, z, x); quaternions map
wxyz -> xyzw as (w, x, y, z) -> (y, -z, -x, w). These are exact permutation/
sign operations, so they preserve norms bit-for-bit. The inverse maps are the
algebraic inverses and are exercised against round-trip identities in tests.

Rigid transforms are plain 4x4 row-major numpy arrays (meters); quaternion
helpers state their component ordering in the function name. See
docs/frames.md for the full conventions.
"""

from enum import Enum

import numpy as np

from .errors import NonUnitQuaternion

UNIT_NORM_TOL = 1e-3


class FrameTag(Enum):
    ROBOTICS_Z_UP = "robotics-zup"
    CLIENT_Y_UP = "client-yup"


# --- position maps ----------------------------------------------------------

def robotics_to_client_pos(pos):
    """Map a robotics-frame position to the client frame: (-y, z, x)."""
    x, y, z = pos[0], pos[1], pos[2]
    return (-y, z, x)


def client_to_robotics_pos(pos):
    """Inverse position map: client (a, b, c) -> robotics (c, -a, b)."""
    a, b, c = pos[0], pos[1], pos[2]
    return (c, -a, b)


def robotics_to_client_dims(dims):
    """Per-axis extents permute without sign: robot (dx, dy, dz) -> (dy, dz, dx).

    A length along robot local Y lands on client local X, robot Z on client Y,
    robot X on client Z; extents are magnitudes so the reflections drop out.
    """
    return (dims[1], dims[2], dims[0])


# --- quaternion maps --------------------------------------------------------

def _check_unit(q):
    n = float(np.linalg.norm(np.asarray(q, dtype=np.float64)))
    if abs(n - 1.0) > UNIT_NORM_TOL:
        raise NonUnitQuaternion(f"quaternion norm {n:.6f} deviates from 1")


def robotics_to_client_quat(q_wxyz):
    """Map a robotics wxyz quaternion to a client xyzw quaternion.

    Output components are (q_y, -q_z, -q_x, q_w); rejects non-unit input.
    """
    _check_unit(q_wxyz)
    w, x, y, z = q_wxyz[0], q_wxyz[1], q_wxyz[2], q_wxyz[3]
    return (y, -z, -x, w)


def client_to_robotics_quat(q_xyzw):
    """Inverse quaternion map: client xyzw (x, y, z, w) -> robotics wxyz (w, -z, x, -y)."""
    _check_unit(q_xyzw)
    x, y, z, w = q_xyzw[0], q_xyzw[1], q_xyzw[2], q_xyzw[3]
    return (w, -z, x, -y)


# --- mesh data maps ---------------------------------------------------------

def robotics_to_client_vectors(flat_xyz: np.ndarray) -> np.ndarray:
    """Apply the position map to a flat float32 array of xyz triples."""
    v = np.asarray(flat_xyz, dtype=np.float32).reshape(-1, 3)
    out = np.empty_like(v)
    out[:, 0] = -v[:, 1]
    out[:, 1] = v[:, 2]
    out[:, 2] = v[:, 0]
    return out.reshape(-1)


def reverse_winding(indices: np.ndarray) -> np.ndarray:
    """Swap the last two corners of every triangle.

    Needed when mesh data crosses the handedness flip so front faces stay
    front faces.
    """
    tri = np.asarray(indices, dtype=np.uint32).reshape(-1, 3).copy()
    tri[:, [1, 2]] = tri[:, [2, 1]]
    return tri.reshape(-1)


# --- quaternion algebra (component order in the function names) --------------

def quat_normalize(q):
    q = np.asarray(q, dtype=np.float64)
    return q / np.linalg.norm(q)


def quat_mul_xyzw(a, b):
    """Hamilton product a*b for xyzw quaternions."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return np.array(
        [
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
            aw * bw - ax * bx - ay * by - az * bz,
        ]
    )


def quat_rotate_xyzw(q, v):
    """Rotate vector v by unit xyzw quaternion q."""
    qv = np.asarray(q[:3], dtype=np.float64)
    w = float(q[3])
    v = np.asarray(v, dtype=np.float64)
    t = 2.0 * np.cross(qv, v)
    return v + w * t + np.cross(qv, t)


def quat_conj_xyzw(q):
    return np.array([-q[0], -q[1], -q[2], q[3]])


def quat_to_mat_xyzw(q):
    """3x3 rotation matrix from a unit xyzw quaternion."""
    x, y, z, w = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def mat_to_quat_xyzw(m):
    """Unit xyzw quaternion from a 3x3 rotation matrix (Shepperd's method)."""
    m = np.asarray(m, dtype=np.float64)
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    return quat_normalize([x, y, z, w])


def wxyz_to_xyzw(q):
    return (q[1], q[2], q[3], q[0])


def xyzw_to_wxyz(q):
    return (q[3], q[0], q[1], q[2])


def axis_angle_to_quat_wxyz(axis, angle):
    axis = np.asarray(axis, dtype=np.float64)
    n = np.linalg.norm(axis)
    if n == 0:
        return (1.0, 0.0, 0.0, 0.0)
    axis = axis / n
    half = 0.5 * angle
    s = np.sin(half)
    return (np.cos(half), axis[0] * s, axis[1] * s, axis[2] * s)


def euler_to_quat_wxyz(angles, seq="xyz"):
    """Euler angles to a wxyz quaternion.

    Lowercase sequence letters rotate about fixed (extrinsic) axes, uppercase
    about the moving (intrinsic) frame. URDF rpy is the extrinsic "xyz" case.
    """
    axes = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
    q = (1.0, 0.0, 0.0, 0.0)
    for letter, angle in zip(seq, angles):
        step = axis_angle_to_quat_wxyz(axes[letter.lower()], float(angle))
        if letter.islower():
            q = quat_mul_wxyz(step, q)
        else:
            q = quat_mul_wxyz(q, step)
    return tuple(quat_normalize(q))


def quat_mul_wxyz(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_between_z_and(direction):
    """wxyz quaternion rotating +Z onto the given direction (minimal twist)."""
    d = np.asarray(direction, dtype=np.float64)
    n = np.linalg.norm(d)
    if n == 0:
        return (1.0, 0.0, 0.0, 0.0)
    d = d / n
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(z, d))
    if c > 1.0 - 1e-12:
        return (1.0, 0.0, 0.0, 0.0)
    if c < -1.0 + 1e-12:
        # antiparallel: rotate pi about X
        return (0.0, 1.0, 0.0, 0.0)
    axis = np.cross(z, d)
    angle = np.arccos(np.clip(c, -1.0, 1.0))
    return axis_angle_to_quat_wxyz(axis, angle)


# --- rigid transforms (4x4 row-major homogeneous matrices) -------------------

def identity_transform() -> np.ndarray:
    return np.eye(4, dtype=np.float64)


def translation(xyz) -> np.ndarray:
    t = np.eye(4, dtype=np.float64)
    t[:3, 3] = xyz
    return t


def transform_from_pos_quat_xyzw(pos, q_xyzw) -> np.ndarray:
    t = np.eye(4, dtype=np.float64)
    t[:3, :3] = quat_to_mat_xyzw(q_xyzw)
    t[:3, 3] = pos
    return t


def validate_transform(t: np.ndarray, tol: float = 1e-6) -> None:
    t = np.asarray(t)
    if t.shape != (4, 4):
        raise ValueError(f"expected 4x4 matrix, got {t.shape}")
    if not np.allclose(t[3], (0.0, 0.0, 0.0, 1.0), atol=tol):
        raise ValueError("bottom row must be (0, 0, 0, 1)")
    det = float(np.linalg.det(t[:3, :3]))
    if abs(det - 1.0) >= tol:
        raise ValueError(f"rotation block determinant {det} deviates from 1")


def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product a @ b; both must be valid rigid transforms."""
    return np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)


def invert(t: np.ndarray) -> np.ndarray:
    """Closed-form rigid inverse (R^T, -R^T p); avoids general inversion."""
    t = np.asarray(t, dtype=np.float64)
    out = np.eye(4, dtype=np.float64)
    rt = t[:3, :3].T
    out[:3, :3] = rt
    out[:3, 3] = -rt @ t[:3, 3]
    return out


def camera_to_base(t_base_ee: np.ndarray, t_ee_cam: np.ndarray) -> np.ndarray:
    """Camera pose in the robot base frame: chain base->end-effector->camera."""
    return compose(t_base_ee, t_ee_cam)
