"""Exact stabilizer analysis of twisted quantum double lattice models."""

from .abelian_group import (
    Cocycle,
    FiniteAbelianGroup,
    Phase,
    canonical_z22_cocycle,
    pairing_cocycle,
    slant_product,
    trivial_cocycle,
)
from .lattice import Cell, Edge, Lattice
from .model_builder import BoundarySpec, LatticeOperator, ModelInstance, OpKind, build, check_commutation
from .stabilizer_engine import analyze, is_member, verify_logical
from .zn_linalg import BACKEND as HOWELL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec", "Cell", "Cocycle", "Edge", "FiniteAbelianGroup", "HOWELL_BACKEND", "Lattice",
    "LatticeOperator", "ModelInstance", "OpKind", "Phase", "analyze", "build", "canonical_z22_cocycle",
    "check_commutation", "is_member", "pairing_cocycle", "slant_product", "trivial_cocycle",
    "verify_logical",
]
