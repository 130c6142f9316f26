"""Seeded generators for the graph families used in the experiments."""

from __future__ import annotations

import numpy as np

from isinglearn.graph import Graph, GraphError

MAX_REGULAR_TRIES = 10_000


def random_regular(p: int, delta: int, seed: int | None = None) -> Graph:
    """Uniform simple ``delta``-regular graph via the configuration model.

    Stubs are paired by a random permutation; any pairing with a self-loop
    or a repeated edge is thrown away as a whole and redrawn. Whole-graph
    rejection keeps the output uniform over simple regular graphs.
    """
    if delta < 0 or delta >= p:
        raise GraphError(f"need 0 <= delta < p, got delta={delta}, p={p}")
    if (p * delta) % 2:
        raise GraphError(f"p*delta must be even (p={p}, delta={delta})")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(p), delta)
    for attempt in range(MAX_REGULAR_TRIES):
        perm = rng.permutation(stubs).reshape(-1, 2)
        a, b = perm.min(axis=1), perm.max(axis=1)
        if np.any(a == b):
            continue
        keys = a * p + b
        if np.unique(keys).size != keys.size:
            continue
        return Graph(p, tuple(zip(a.tolist(), b.tolist())),
                     {"family": "regular", "delta": delta, "seed": seed, "attempts": attempt + 1})
    raise GraphError(f"no simple {delta}-regular graph on {p} vertices after {MAX_REGULAR_TRIES} tries")


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Edges of the ``rows x cols`` grid, vertices indexed row-major."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return edges


def diluted_grid(rows: int, cols: int, rho: float, seed: int | None = None) -> Graph:
    """Grid with each edge removed independently with probability ``rho``."""
    if rows < 1 or cols < 1:
        raise GraphError("grid dimensions must be positive")
    if not 0.0 <= rho <= 1.0:
        raise GraphError("rho must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = grid_edges(rows, cols)
    keep = rng.random(len(edges)) >= rho
    return Graph(rows * cols, tuple(e for e, k in zip(edges, keep) if k),
                 {"family": "grid", "rows": rows, "cols": cols, "rho": rho, "seed": seed})


def star(delta: int, isolated: int = 0) -> Graph:
    """Center 0 joined to vertices ``1..delta``; the rest are isolated."""
    if delta < 1 or isolated < 0:
        raise GraphError("need delta >= 1 and isolated >= 0")
    return Graph(1 + delta + isolated, tuple((0, k) for k in range(1, delta + 1)),
                 {"family": "star", "delta": delta, "isolated": isolated})


def single_edge_graph(p: int) -> Graph:
    if p < 2:
        raise GraphError("single edge graph needs p >= 2")
    return Graph(p, ((0, 1),), {"family": "edge"})


def regular_tree(delta: int, t: int) -> Graph:
    """Rooted tree of depth ``t``: the root has ``delta`` children, every
    other internal vertex ``delta - 1``.

    Vertices are numbered breadth-first. ``meta`` holds ``depth`` and
    ``parent`` per vertex and the tuple of ``leaves`` (vertices at depth t).
    """
    if delta < 2 or t < 0:
        raise GraphError("need delta >= 2 and t >= 0")
    depth = [0]
    parent = [-1]
    edges = []
    frontier = [0]
    for level in range(1, t + 1):
        nxt = []
        for v in frontier:
            for _ in range(delta if v == 0 else delta - 1):
                u = len(depth)
                depth.append(level)
                parent.append(v)
                edges.append((v, u))
                nxt.append(u)
        frontier = nxt
    return Graph(len(depth), tuple(edges), {
        "family": "tree", "delta": delta, "t": t,
        "depth": tuple(depth), "parent": tuple(parent), "leaves": tuple(frontier),
    })


def tree_size(delta: int, t: int) -> int:
    """Closed-form vertex count of ``regular_tree(delta, t)``."""
    if t == 0:
        return 1
    if delta == 2:
        return 1 + 2 * t
    return 1 + delta * ((delta - 1) ** t - 1) // (delta - 2)


def make_graph(family: str, seed: int | None = None, **params) -> Graph:
    """Dispatch by family name (``regular``, ``grid``, ``star``, ``edge``, ``tree``)."""
    if family == "regular":
        return random_regular(params["p"], params["delta"], seed)
    if family == "grid":
        return diluted_grid(params["rows"], params["cols"], params.get("rho", 0.0), seed)
    if family == "star":
        return star(params["delta"], params.get("isolated", 0))
    if family == "edge":
        return single_edge_graph(params["p"])
    if family == "tree":
        return regular_tree(params["delta"], params["t"])
    raise GraphError(f"unknown graph family {family!r}")
