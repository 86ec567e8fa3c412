"""Desk-scale oracles tying curves to quaternion orders: brute-force
End/Hom lattices, explicit order matches, ideal <-> isogeny translation,
graph path search, validators and a configurable oracle suite."""

from .bruteforce import (BF_PRIME_BOUND, end_ring_lattice,
                         hom_module_bruteforce, hom_module_lattice)
from .graph import GRAPH_PRIME_BOUND, ell_path_oracle, isogeny_oracle_bfs
from .ideals import KernelIdeal, ideal_to_isogeny_desk, isogeny_to_ideal
from .moer import (MoerSolution, end_ring_bruteforce, moer_for_curve,
                   moer_from_basis)
from .oracles import DEFAULT_WIRING, OracleSuite
from .special import special_curve_E0
from .validators import (PROBLEMS, ValidationResult, validate, validators)

__all__ = [
    "BF_PRIME_BOUND", "GRAPH_PRIME_BOUND", "DEFAULT_WIRING", "PROBLEMS",
    "KernelIdeal", "MoerSolution", "OracleSuite", "ValidationResult",
    "ell_path_oracle", "end_ring_bruteforce", "end_ring_lattice",
    "hom_module_bruteforce", "hom_module_lattice", "ideal_to_isogeny_desk",
    "isogeny_oracle_bfs", "isogeny_to_ideal", "moer_for_curve",
    "moer_from_basis", "special_curve_E0", "validate", "validators",
]
