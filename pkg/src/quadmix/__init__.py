"""Random planar quadrangulations: generation, geodesics, random walks and exact formulas."""

from .errors import QuadmixError
from .maps import PlanarMap, Quadrangulation, canonical_code, decode_qmap, encode_qmap
from .trees import (LabeledPlaneTree, cvs_forward, enumerate_quadrangulations,
                    sample_quadrangulation, trivial_bijection)
from .walks import (face_kernel, relaxation_time, tv_mixing_time, uniform_mixing_time,
                    vertex_kernel)

__version__ = "0.1.0"

__all__ = [
    "QuadmixError", "PlanarMap", "Quadrangulation", "canonical_code", "decode_qmap",
    "encode_qmap", "LabeledPlaneTree", "cvs_forward", "enumerate_quadrangulations",
    "sample_quadrangulation", "trivial_bijection", "face_kernel", "relaxation_time",
    "tv_mixing_time", "uniform_mixing_time", "vertex_kernel",
]
