"""Exact-arithmetic homology of algebras over binary Koszul operads.

The package assembles the small chain complex built from the Koszul dual of
the operad tensored with the acyclic homogeneous bar resolutions of the
symmetric groups, applied to a finite algebra with coefficients, and
computes its homology over Z, Q and prime fields.
"""

from .rings import RingSpec, ZZ, QQ, Fp
from .linalg import SparseMatrix, HomologySummary, rank, smith_normal_form, homology_at

__all__ = [
    "RingSpec", "ZZ", "QQ", "Fp",
    "SparseMatrix", "HomologySummary", "rank", "smith_normal_form", "homology_at",
]

__version__ = "0.1.0"
