"""Exact field towers, supersingular curves, torsion and Velu steps."""

from .fields import (FieldCtx, Fq, descend, embed, fq_poly_roots, get_ctx)
from .curves import (Curve, Point, automorphisms, certify_basis,
                     curve_from_j, curve_isomorphism, enumerate_ell_subgroups,
                     frobenius_conjugate, is_supersingular, j_invariant,
                     random_point, velu_codomain_and_kernel, velu_eval,
                     MAX_TORSION_K)

__all__ = [
    "FieldCtx", "Fq", "descend", "embed", "fq_poly_roots", "get_ctx",
    "Curve", "Point", "automorphisms", "certify_basis", "curve_from_j",
    "curve_isomorphism", "enumerate_ell_subgroups", "frobenius_conjugate",
    "is_supersingular", "j_invariant", "random_point",
    "velu_codomain_and_kernel", "velu_eval", "MAX_TORSION_K",
]
