from .options import ParserOptions
from .obj import load_mesh_obj
from .mjcf import parse_mjcf
from .urdf import parse_urdf

__all__ = ["ParserOptions", "load_mesh_obj", "parse_mjcf", "parse_urdf"]
