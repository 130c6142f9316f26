from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from isinglearn.graph import Graph


@dataclass(frozen=True)
class VertexResult:
    neighborhood: tuple[int, ...]
    diagnostics: dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class LearnerResult:
    """Per-vertex neighborhood estimates plus the combined edge set.

    Neighborhoods are merged by OR: ``(i, j)`` is recovered if either
    endpoint claims the other.
    """

    method: str
    p: int
    per_vertex: dict[int, VertexResult]
    settings: dict[str, Any] = field(default_factory=dict)
    flags: tuple[str, ...] = ()
    symmetrization: str = "or"

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        out = set()
        for r, vr in self.per_vertex.items():
            for j in vr.neighborhood:
                out.add((min(r, j), max(r, j)))
        return tuple(sorted(out))

    @property
    def graph(self) -> Graph:
        return Graph(self.p, self.edges)

    def succeeded_against(self, truth: Graph) -> bool:
        return truth.p == self.p and set(self.edges) == set(truth.edges)

    def vertex_successes(self, truth: Graph) -> list[bool]:
        """Whether each vertex's neighborhood in the merged graph matches ``truth``."""
        g = self.graph
        return [g.neighbors(r) == truth.neighbors(r) for r in range(self.p)]

    def to_dict(self, truth: Graph | None = None) -> dict[str, Any]:
        out: dict[str, Any] = {
            "method": self.method,
            "p": self.p,
            "symmetrization": self.symmetrization,
            "settings": self.settings,
            "edges": [list(e) for e in self.edges],
            "flags": list(self.flags),
            "per_vertex": {
                str(r): {"neighborhood": list(v.neighborhood), "diagnostics": v.diagnostics}
                for r, v in sorted(self.per_vertex.items())
            },
        }
        if truth is not None:
            out["success"] = self.succeeded_against(truth)
            out["vertex_success"] = self.vertex_successes(truth)
        return out
