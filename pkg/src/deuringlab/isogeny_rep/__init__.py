"""Isogeny chains, formal homomorphisms and torsion-action machinery."""

from .frames import (TorsionFrame, action_matrix, choose_torsion,
                     frame_twist, get_frame, matrix_mod_crt)
from .steps import (FrobeniusStep, IsoStep, IsogenyRep, ScalarStep, VeluStep,
                    isogeny_from_json, isogeny_from_kernel_point,
                    isogeny_to_json)
from .homs import (HomElement, InterpolatedHom, InterpolationData,
                   degree_of_hom, divide_isogeny, hom_compose,
                   hom_matrix_mod, interpolate, is_zero_hom,
                   pairing_of_homs, recognize_endomorphism)

__all__ = [
    "TorsionFrame", "action_matrix", "choose_torsion", "frame_twist",
    "get_frame", "matrix_mod_crt",
    "FrobeniusStep", "IsoStep", "IsogenyRep", "ScalarStep", "VeluStep",
    "isogeny_from_json", "isogeny_from_kernel_point", "isogeny_to_json",
    "HomElement", "InterpolatedHom", "InterpolationData", "degree_of_hom",
    "divide_isogeny", "hom_compose", "hom_matrix_mod", "interpolate",
    "is_zero_hom",
    "pairing_of_homs", "recognize_endomorphism",
]
