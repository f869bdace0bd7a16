"""File input for the point-cloud CLI: binary PGM/PPM images and flat
key-value parameter files.

Depth images are 16-bit binary PGM (P5, maxval 65535, big-endian sample
bytes per the netpbm spec); color images binary PPM (P6). Intrinsics and
extrinsics are `key = value` text files, values being numbers or
space-separated number lists.
"""

import numpy as np

from ..errors import ParseError
from .types import CameraIntrinsics


def _read_pnm_header(data: bytes, magic: bytes):
    if not data.startswith(magic):
        raise ParseError(f"expected {magic.decode()} file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated netpbm header")
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    return width, height, maxval, pos


def read_pgm16(data: bytes) -> np.ndarray:
    """16-bit grayscale PGM -> (h, w) uint16 array."""
    width, height, maxval, pos = _read_pnm_header(data, b"P5")
    if maxval != 65535:
        raise ParseError(f"expected 16-bit PGM (maxval 65535), got {maxval}")
    expected = width * height * 2
    raw = data[pos : pos + expected]
    if len(raw) != expected:
        raise ParseError("PGM pixel data truncated")
    return np.frombuffer(raw, dtype=">u2").reshape(height, width).astype(np.uint16)


def write_pgm16(image: np.ndarray) -> bytes:
    image = np.asarray(image, dtype=np.uint16)
    h, w = image.shape
    return b"P5\n%d %d\n65535\n" % (w, h) + image.astype(">u2").tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    """8-bit color PPM -> (h, w, 3) uint8 array."""
    width, height, maxval, pos = _read_pnm_header(data, b"P6")
    if maxval != 255:
        raise ParseError(f"expected 8-bit PPM (maxval 255), got {maxval}")
    expected = width * height * 3
    raw = data[pos : pos + expected]
    if len(raw) != expected:
        raise ParseError("PPM pixel data truncated")
    return np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3).copy()


def write_ppm(image: np.ndarray) -> bytes:
    image = np.asarray(image, dtype=np.uint8)
    h, w, _ = image.shape
    return b"P6\n%d %d\n255\n" % (w, h) + image.tobytes()


def parse_keyvalues(text: str) -> dict:
    """`key = value` lines; '#' starts a comment; values parse as float lists."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value'", position=f"line {lineno}")
        key, _, value = line.partition("=")
        values = [float(v) for v in value.replace(",", " ").split()]
        out[key.strip()] = values[0] if len(values) == 1 else values
    return out


def load_intrinsics(text: str) -> CameraIntrinsics:
    kv = parse_keyvalues(text)
    try:
        return CameraIntrinsics(
            fx=kv["fx"],
            fy=kv["fy"],
            cx=kv["cx"],
            cy=kv["cy"],
            width=int(kv["width"]),
            height=int(kv["height"]),
        )
    except KeyError as exc:
        raise ParseError(f"intrinsics file missing key {exc}") from None


def load_extrinsic(text: str) -> np.ndarray:
    """Rigid transform from a `matrix = <16 floats>` (row-major) entry."""
    kv = parse_keyvalues(text)
    raw = kv.get("matrix")
    if raw is None or np.size(raw) != 16:
        raise ParseError("extrinsic file needs 'matrix = <16 row-major floats>'")
    return np.asarray(raw, dtype=np.float64).reshape(4, 4)
