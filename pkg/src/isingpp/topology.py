"""Problem graphs, random coefficient assignment, connected components.

Graphs are plain edge lists: ``[(a, b), ...]`` with ``a < b``, sorted.
Vertices are dense integers from 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import IsingProblem, Tunnel
from .errors import InputError, ParameterError
from .rng import child_sequences, make_generator


@dataclass(frozen=True, slots=True)
class ChimeraSpec:
    """An m x n grid of bipartite K_{shore,shore} cells.

    Within a cell every side-0 vertex couples to every side-1 vertex.
    Side-0 vertices couple to the matching vertex in the cell above and
    below; side-1 vertices to the matching vertex left and right.
    """

    rows: int
    cols: int
    shore: int

    def __post_init__(self):
        for name in ("rows", "cols", "shore"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ParameterError(f"{name} must be a positive integer, got {v!r}")

    @property
    def vertex_count(self) -> int:
        return self.rows * self.cols * 2 * self.shore

    @property
    def edge_count(self) -> int:
        m, n, s = self.rows, self.cols, self.shore
        return m * n * s * s + s * (n * (m - 1) + m * (n - 1))

    def vertex(self, row: int, col: int, side: int, k: int) -> int:
        return ((row * self.cols + col) * 2 + side) * self.shore + k


@dataclass(frozen=True, slots=True)
class ProblemGenSpec:
    """Uniform coefficient ranges plus the seed that fixes the draw."""

    h_range: tuple
    j_range: tuple
    seed: int

    def __post_init__(self):
        for name in ("h_range", "j_range"):
            lo, hi = getattr(self, name)
            if not (lo <= hi):
                raise ParameterError(f"{name} is empty: [{lo}, {hi}]")
        object.__setattr__(self, "h_range", (float(self.h_range[0]), float(self.h_range[1])))
        object.__setattr__(self, "j_range", (float(self.j_range[0]), float(self.j_range[1])))


def chimera_graph(spec: ChimeraSpec):
    """Edge list of the Chimera topology described by ``spec``."""
    edges = []
    for i in range(spec.rows):
        for j in range(spec.cols):
            for k in range(spec.shore):
                a = spec.vertex(i, j, 0, k)
                for k2 in range(spec.shore):
                    edges.append((a, spec.vertex(i, j, 1, k2)))
            if i + 1 < spec.rows:
                for k in range(spec.shore):
                    edges.append((spec.vertex(i, j, 0, k), spec.vertex(i + 1, j, 0, k)))
            if j + 1 < spec.cols:
                for k in range(spec.shore):
                    edges.append((spec.vertex(i, j, 1, k), spec.vertex(i, j + 1, 1, k)))
    return sorted((a, b) if a < b else (b, a) for a, b in edges)


def complete_graph(n: int):
    """Edge list of K_n."""
    if int(n) != n or n < 2:
        raise ParameterError(f"complete graph needs at least 2 vertices, got {n!r}")
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def path_graph(n: int):
    """Edge list of the path 0 - 1 - ... - (n-1)."""
    if int(n) != n or n < 1:
        raise ParameterError(f"path graph needs a positive vertex count, got {n!r}")
    return [(a, a + 1) for a in range(n - 1)]


def grid_graph(rows: int, cols: int):
    """Edge list of the rows x cols square lattice, row-major vertex ids."""
    if rows < 1 or cols < 1:
        raise ParameterError(f"grid needs positive dimensions, got {rows} x {cols}")
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return sorted(edges)


def random_problem(graph, spec: ProblemGenSpec, vertex_count=None) -> IsingProblem:
    """Draw uniform coefficients on ``graph``.

    Stream discipline: the seed is split into two child streams; the first
    draws h for vertices 0..n-1 in order, the second draws J for edges in
    sorted order. The same spec therefore reproduces the same problem
    bit for bit, independent of platform.
    """
    edges = sorted(set((a, b) if a < b else (b, a) for a, b in graph))
    for a, b in edges:
        if a == b:
            raise InputError(f"graph contains a self-loop at vertex {a}")
    if vertex_count is None:
        if not edges:
            raise InputError("cannot infer vertex count from an empty graph")
        vertex_count = max(b for _, b in edges) + 1

    h_seq, j_seq = child_sequences(spec.seed, 2)
    h_rng = make_generator(h_seq)
    j_rng = make_generator(j_seq)

    h_lo, h_hi = spec.h_range
    j_lo, j_hi = spec.j_range
    h = {a: float(x) for a, x in enumerate(h_rng.uniform(h_lo, h_hi, vertex_count))}
    J = {e: float(x) for e, x in zip(edges, j_rng.uniform(j_lo, j_hi, len(edges)))}
    return IsingProblem(vertex_count, h, J)


def connected_components(subset, graph):
    """Connected components of ``subset`` under the edges of ``graph``.

    Only edges with both ends in the subset count. Returns a list of
    Tunnel objects ordered by smallest member vertex; vertices in the
    subset that touch no such edge come out as singletons. Traversal is
    an explicit-stack DFS, so deep components cannot hit the recursion
    limit.
    """
    members = sorted(set(int(v) for v in subset))
    member_set = set(members)
    adj = {v: [] for v in members}
    for a, b in graph:
        if a in member_set and b in member_set:
            adj[a].append(b)
            adj[b].append(a)

    seen = set()
    components = []
    for start in members:
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        components.append(Tunnel(tuple(comp)))
    return components
