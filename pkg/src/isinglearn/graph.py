"""Graphs, coupling parameters and spin samples.

Vertices are integers ``0..p-1``. Edges are stored as ``(i, j)`` with
``i < j`` in sorted order so that serialization is canonical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np


class GraphError(ValueError):
    """Invalid graph, coupling or sample data."""


def _canonical_edge(i: int, j: int, p: int) -> tuple[int, int]:
    i, j = int(i), int(j)
    if i == j:
        raise GraphError(f"self-loop at vertex {i}")
    if not (0 <= i < p and 0 <= j < p):
        raise GraphError(f"edge ({i}, {j}) out of range for p={p}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``p`` vertices.

    ``meta`` carries generator-specific annotations (e.g. the leaf set of a
    rooted tree) and is ignored by equality.
    """

    p: int
    edges: tuple[tuple[int, int], ...] = ()
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.p < 0:
            raise GraphError("p must be non-negative")
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise GraphError(f"malformed edge {e!r}")
            ce = _canonical_edge(e[0], e[1], self.p)
            if ce in seen:
                raise GraphError(f"duplicate edge {ce}")
            seen.add(ce)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        adj: list[list[int]] = [[] for _ in range(self.p)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj  # type: ignore[attr-defined]

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def to_json(self) -> str:
        return graph_to_json(self)


def max_degree(g: Graph) -> int:
    """Largest vertex degree; 0 for a graph without edges."""
    return max((len(a) for a in g.adjacency), default=0)


def graph_from_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid graph JSON: {exc}") from exc
    return _graph_from_obj(obj)


def _graph_from_obj(obj: Any) -> Graph:
    if not isinstance(obj, dict) or "p" not in obj:
        raise GraphError("graph JSON must be an object with a 'p' field")
    p = obj["p"]
    if not isinstance(p, int) or isinstance(p, bool):
        raise GraphError("'p' must be an integer")
    edges = obj.get("edges", [])
    if not isinstance(edges, list):
        raise GraphError("'edges' must be a list")
    return Graph(p, tuple(tuple(e) for e in edges))


def graph_to_json(g: Graph) -> str:
    return json.dumps({"p": g.p, "edges": [list(e) for e in g.edges]})


@dataclass(frozen=True)
class IsingParams:
    """Pairwise couplings (sparse) plus optional per-vertex external fields.

    Absent pairs read as coupling 0. The field vector is used for the
    boundary-field tree model; ordinary models leave it at zero.
    """

    p: int
    couplings: Mapping[tuple[int, int], float] = field(default_factory=dict)
    fields: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        clean: dict[tuple[int, int], float] = {}
        for (i, j), v in self.couplings.items():
            e = _canonical_edge(i, j, self.p)
            if e in clean:
                raise GraphError(f"duplicate coupling {e}")
            v = float(v)
            if not np.isfinite(v):
                raise GraphError(f"non-finite coupling on {e}")
            if v != 0.0:
                clean[e] = v
        object.__setattr__(self, "couplings", dict(sorted(clean.items())))
        if self.fields is not None:
            f = tuple(float(x) for x in self.fields)
            if len(f) != self.p:
                raise GraphError("fields must have length p")
            object.__setattr__(self, "fields", f if any(f) else None)

    def __hash__(self) -> int:
        return hash((self.p, tuple(self.couplings.items()), self.fields))

    @classmethod
    def uniform(cls, g: Graph, theta: float, fields: Iterable[float] | None = None) -> "IsingParams":
        return cls(g.p, {e: theta for e in g.edges}, None if fields is None else tuple(fields))

    def coupling(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        return self.couplings.get((i, j) if i < j else (j, i), 0.0)

    def field_at(self, i: int) -> float:
        return 0.0 if self.fields is None else self.fields[i]

    @property
    def is_ferromagnetic(self) -> bool:
        return all(v >= 0 for v in self.couplings.values())

    @property
    def graph(self) -> Graph:
        """Support graph: pairs with non-zero coupling."""
        return Graph(self.p, tuple(self.couplings))

    def matrix(self) -> np.ndarray:
        J = np.zeros((self.p, self.p))
        for (i, j), v in self.couplings.items():
            J[i, j] = J[j, i] = v
        return J

    def field_vector(self) -> np.ndarray:
        return np.zeros(self.p) if self.fields is None else np.array(self.fields)

    def to_json(self) -> str:
        obj: dict[str, Any] = {
            "p": self.p,
            "edges": [list(e) for e in self.couplings],
            "couplings": [[i, j, v] for (i, j), v in self.couplings.items()],
        }
        if self.fields is not None:
            obj["fields"] = list(self.fields)
        return json.dumps(obj)

    def digest(self) -> str:
        """Short content hash used to tag sample files."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def params_from_json(text: str, theta: float | None = None) -> IsingParams:
    """Read couplings from graph JSON.

    With a ``couplings`` list the per-edge values are used; otherwise every
    edge gets ``theta`` (required in that case).
    """
    obj = json.loads(text)
    g = _graph_from_obj(obj)
    fields = obj.get("fields")
    if "couplings" in obj:
        c = {}
        for item in obj["couplings"]:
            i, j, v = item
            c[_canonical_edge(i, j, g.p)] = float(v)
        return IsingParams(g.p, c, fields)
    if theta is None:
        raise GraphError("graph has no couplings; a uniform theta is required")
    return IsingParams.uniform(g, theta, fields)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``n`` spin configurations stored as an ``(n, p)`` int8 array."""

    rows: np.ndarray
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise GraphError("sample array must be 2-D with at least one row")
        if not np.all(np.abs(rows) == 1):
            raise GraphError("spins must be -1 or +1")
        rows = rows.astype(np.int8)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleSet):
            return NotImplemented
        return np.array_equal(self.rows, other.rows) and dict(self.meta) == dict(other.meta)


def write_samples(s: SampleSet, path: str | Path) -> None:
    """Header ``p n seed`` then one line of ``p`` spins per sample."""
    seed = s.meta.get("seed", 0)
    lines = [f"{s.p} {s.n} {seed}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in s.rows)
    Path(path).write_text("\n".join(lines) + "\n")


def read_samples(path: str | Path) -> SampleSet:
    text = Path(path).read_text().split("\n")
    header = text[0].split()
    if len(header) != 3:
        raise GraphError("sample header must be 'p n seed'")
    p, n, seed = (int(x) for x in header)
    body = [ln for ln in text[1:] if ln.strip()]
    if len(body) != n:
        raise GraphError(f"expected {n} sample lines, found {len(body)}")
    rows = np.array([[int(v) for v in ln.split()] for ln in body], dtype=np.int8).reshape(n, -1)
    if rows.shape[1] != p:
        raise GraphError(f"expected {p} spins per line")
    return SampleSet(rows, {"seed": seed})
