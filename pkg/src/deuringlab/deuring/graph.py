"""Meet-in-the-middle path search in small-prime isogeny graphs.

Both oracles run a bidirectional BFS keyed by j-invariant; the halves are
stitched with a model isomorphism and the far half is dualized.
"""

from __future__ import annotations

from ..errors import BudgetExceeded, NotConnected
from ..field_curve import Curve, enumerate_ell_subgroups
from ..isogeny_rep import IsogenyRep, VeluStep

GRAPH_PRIME_BOUND = 1000


def _expand(reps: dict, frontier: list, ell: int):
    nxt = []
    for phi in frontier:
        C = phi.codomain
        for K in enumerate_ell_subgroups(C, ell):
            chain = phi.compose(
                IsogenyRep(C, (VeluStep.from_kernel_point(C, K),)))
            key = chain.codomain.j_invariant().key()
            if key in reps:
                continue
            reps[key] = chain
            nxt.append(chain)
    return nxt


def ell_path_oracle(E1: Curve, E2: Curve, ell: int) -> IsogenyRep:
    """A chain of degree-ell steps from E1 onto the model E2."""
    p = E1.p
    if p != E2.p:
        raise NotConnected("curves live over different primes")
    if p > GRAPH_PRIME_BOUND:
        raise BudgetExceeded(f"p={p} beyond the graph search bound")
    if E1 == E2:
        return IsogenyRep.identity(E1)
    fwd = {E1.j_invariant().key(): IsogenyRep.identity(E1)}
    bwd = {E2.j_invariant().key(): IsogenyRep.identity(E2)}
    ffront = list(fwd.values())
    bfront = list(bwd.values())
    # graph has ~p/12 vertices; p rounds is a safe exhaustion cap
    for _ in range(p):
        hit = set(fwd) & set(bwd)
        if hit:
            key = min(hit)
            half = bwd[key].dual()
            return fwd[key].post_iso(half.domain).compose(half)
        if not ffront and not bfront:
            raise NotConnected("graph components exhausted without meeting")
        if len(ffront) <= len(bfront):
            ffront = _expand(fwd, ffront, ell)
        else:
            bfront = _expand(bwd, bfront, ell)
    raise BudgetExceeded("path search exceeded the round cap")


def isogeny_oracle_bfs(E1: Curve, E2: Curve) -> IsogenyRep:
    """Some isogeny E1 -> E2 (a 2-power path)."""
    return ell_path_oracle(E1, E2, 2)
