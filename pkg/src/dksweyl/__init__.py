"""Exact Weyl group actions on framed quiver varieties of DKS type."""

from .linalg import Matrix
from .quiver import QuiverSpec, cartan, frame, path_quiver
from .rep import RepPoint, moment_map
from .reflection import reflect, verify_zk
from .torsion import VolumeForm, torsion_ses

__all__ = [
    "Matrix", "QuiverSpec", "RepPoint", "VolumeForm",
    "cartan", "frame", "moment_map", "path_quiver", "reflect", "torsion_ses", "verify_zk",
]
__version__ = "0.1.0"
