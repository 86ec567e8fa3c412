"""Configurable oracle dispatch: each problem is answered by brute
force, by a named reduction, or refused outright.

The wiring map (problem -> "bruteforce" | "reduction:<name>" |
"forbidden") can come from JSON; refusals raise ForbiddenOracle, which
lets a test prove that a reduction never touched a given oracle.
"""

from __future__ import annotations

import json
import threading
from collections import Counter

from ..errors import ForbiddenOracle
from .validators import PROBLEMS

DEFAULT_WIRING = {prob: "bruteforce" for prob in PROBLEMS}


def _registry():
    from ..reductions import REGISTRY
    return REGISTRY


class OracleSuite:
    """Shareable oracle frontend with exact per-problem call totals."""

    def __init__(self, wiring: dict | None = None):
        self.wiring = dict(DEFAULT_WIRING)
        if wiring:
            for prob, mode in wiring.items():
                if prob not in PROBLEMS:
                    raise ValueError(f"unknown problem {prob!r}")
                if (mode not in ("bruteforce", "forbidden")
                        and not mode.startswith("reduction:")):
                    raise ValueError(f"bad wiring {mode!r} for {prob!r}")
                self.wiring[prob] = mode
        self.calls: Counter = Counter()
        self._lock = threading.Lock()

    @classmethod
    def from_json(cls, text: str) -> "OracleSuite":
        return cls(json.loads(text))

    def wiring_json(self) -> str:
        return json.dumps(self.wiring, sort_keys=True)

    def query(self, problem: str, *args):
        if problem not in PROBLEMS:
            raise ValueError(f"unknown problem {problem!r}")
        with self._lock:
            self.calls[problem] += 1
        mode = self.wiring[problem]
        if mode == "forbidden":
            raise ForbiddenOracle(f"oracle for {problem} is wired off")
        if mode == "bruteforce":
            return _BRUTEFORCE[problem](*args)
        name = mode.split(":", 1)[1]
        return _registry()[name](self, *args)

    # convenience entry points, one per problem
    def isogeny(self, E1, E2):
        return self.query("isogeny", E1, E2)

    def ell_path(self, E1, E2, ell):
        return self.query("ell_isogeny_path", E1, E2, ell)

    def end_ring(self, E):
        return self.query("end_ring", E)

    def one_end(self, E):
        return self.query("one_end", E)

    def max_order(self, E):
        return self.query("max_order", E)

    def max_order_q(self, E):
        return self.query("max_order_q", E)

    def moer(self, E):
        return self.query("moer", E)

    def hom_module(self, E1, E2):
        return self.query("hom_module", E1, E2)


def _bf_end_ring(E):
    from .moer import moer_for_curve
    return moer_for_curve(E).basis


def _bf_one_end(E):
    from ..isogeny_rep import degree_of_hom, HomElement, IsogenyRep
    from .moer import moer_for_curve
    sol = moer_for_curve(E)
    one = HomElement.from_isogeny(IsogenyRep.identity(E))
    for h, img in zip(sol.basis, sol.images):
        if img.t * img.t != img.nrd():
            return h
    raise AssertionError("rank-4 ring with only scalar basis elements")


def _bf_max_order(E):
    from .moer import moer_for_curve
    return moer_for_curve(E).order


def _bf_moer(E):
    from .moer import moer_for_curve
    return moer_for_curve(E)


def _bf_isogeny(E1, E2):
    from .graph import isogeny_oracle_bfs
    return isogeny_oracle_bfs(E1, E2)


def _bf_ell_path(E1, E2, ell):
    from .graph import ell_path_oracle
    return ell_path_oracle(E1, E2, ell)


def _bf_hom_module(E1, E2):
    from .bruteforce import hom_module_bruteforce
    return hom_module_bruteforce(E1, E2)


_BRUTEFORCE = {
    "isogeny": _bf_isogeny,
    "ell_isogeny_path": _bf_ell_path,
    "end_ring": _bf_end_ring,
    "one_end": _bf_one_end,
    "max_order": _bf_max_order,
    "max_order_q": _bf_max_order,
    "moer": _bf_moer,
    "hom_module": _bf_hom_module,
}
