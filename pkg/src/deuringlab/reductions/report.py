"""Uniform result envelope for reductions: the solution plus how it was
obtained (oracle call counts, walk lengths, branch taken)."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ReductionReport:
    arrow: str
    solution: object
    queries: dict = field(default_factory=dict)   # problem -> call count
    walk_lengths: list = field(default_factory=list)
    branch: str = ""
    notes: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "arrow": self.arrow,
            "queries": dict(sorted(self.queries.items())),
            "walk_lengths": list(self.walk_lengths),
            "branch": self.branch,
            "notes": list(self.notes),
            "solution": repr(self.solution),
        }


class QueryMeter:
    """Snapshot-based per-reduction call counting on a shared suite."""

    def __init__(self, suite):
        self.suite = suite
        self._before = dict(suite.calls)

    def delta(self) -> dict:
        out = {}
        for prob, n in self.suite.calls.items():
            d = n - self._before.get(prob, 0)
            if d:
                out[prob] = d
        return out
