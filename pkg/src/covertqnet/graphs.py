"""Graph-state builders: arbitrary graphs, the 3D-cluster elementary cell,
its tilings, triangle-cell hypergraph states, and brickwork layouts.

The elementary cell is the standard cube: qubits sit on the 6 face centres
and 12 edge midpoints, and each face qubit links to the 4 edge qubits
around it.  On coordinates in {0,1,2}^3 that reads

        z=0 plane        z=1 plane        z=2 plane
        . E . E .        E F E . .        . E . E .
        E F E . .   ->   F . F . .   ->   E F E . .
        . E . E .        E F E . .        . E . E .

with E an edge qubit (exactly one odd coordinate) and F a face qubit
(exactly two odd coordinates).  Tiling translates the cell by steps of 2,
which identifies shared boundary qubits automatically.

The brickwork layout is data-driven: _BRICK_RULES lists (column residue
mod 8, row parity, minimum column) clauses for the vertical edges, so the
pattern can be corrected without touching code.
"""

import itertools
from dataclasses import dataclass, field

from .errors import CapExceeded
from .qsim import DenseState, StabilizerTableau

MAX_TILED_QUBITS = 10_000


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph; vertices 0..n-1, no loops or duplicates."""

    n: int
    edges: frozenset
    tag: str = ""

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if u > v:
                raise ValueError("edges must be stored as ordered pairs")

    @classmethod
    def from_edges(cls, n, edges, tag=""):
        canon = frozenset((min(u, v), max(u, v)) for u, v in edges)
        return cls(n=n, edges=canon, tag=tag)

    def sorted_edges(self):
        return sorted(self.edges)

    def neighbors(self, v):
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def degree(self, v):
        return len(self.neighbors(v))


@dataclass(frozen=True)
class TriangleComplex:
    """Vertex set plus a collection of unordered vertex triples."""

    n: int
    triangles: frozenset

    def __post_init__(self):
        for tri in self.triangles:
            if len(set(tri)) != 3:
                raise ValueError(f"degenerate triangle {tri}")
            if any(not 0 <= v < self.n for v in tri):
                raise ValueError(f"triangle {tri} out of range")
            if tuple(sorted(tri)) != tri:
                raise ValueError("triangles must be stored sorted")

    @classmethod
    def from_triangles(cls, n, triangles):
        canon = frozenset(tuple(sorted(t)) for t in triangles)
        return cls(n=n, triangles=canon)


def build_graph_state(g):
    """Stabilizer tableau of the graph state of g.

    |+> on every vertex, then CZ along every edge; the edge order cannot
    matter because the CZs commute.
    """
    t = StabilizerTableau(g.n)
    for q in range(g.n):
        t.apply("H", q)
    for u, v in g.sorted_edges():
        t.apply("CZ", u, v)
    return t


def graph_stabilizer(g, a):
    """(x bits, z bits) of the generator X_a prod_{b in N(a)} Z_b."""
    px = [0] * g.n
    pz = [0] * g.n
    px[a] = 1
    for b in g.neighbors(a):
        pz[b] = 1
    return px, pz


def verify_graph_state(tableau, g):
    """True iff every graph-state generator measures +1 deterministically."""
    for a in range(g.n):
        px, pz = graph_stabilizer(g, a)
        if tableau.expectation_pauli(px, pz) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# 3D cluster cell and tiling


def _lattice_points(nx, ny, nz):
    """Qubit coordinates of the tiled cell block: 1 or 2 odd coordinates."""
    pts = []
    for x in range(2 * nx + 1):
        for y in range(2 * ny + 1):
            for z in range(2 * nz + 1):
                odd = (x & 1) + (y & 1) + (z & 1)
                if odd in (1, 2):
                    pts.append((x, y, z))
    return pts


def _face_edge_graph(points):
    index = {p: i for i, p in enumerate(sorted(points))}
    edges = set()
    for p, i in index.items():
        if sum(c & 1 for c in p) != 2:
            continue  # faces link outward; handle each pair once from here
        for axis in range(3):
            for step in (-1, 1):
                q = list(p)
                q[axis] += step
                q = tuple(q)
                j = index.get(q)
                if j is not None:
                    edges.add((min(i, j), max(i, j)))
    return GraphSpec.from_edges(len(index), edges), index


def tile_cells(nx, ny, nz):
    """Tile the elementary cell on an nx x ny x nz block.

    Boundary qubits shared between adjacent cells are identified, not
    duplicated.  Raises CapExceeded beyond MAX_TILED_QUBITS qubits.
    """
    if min(nx, ny, nz) < 1:
        raise ValueError("cell counts must be >= 1")
    pts = _lattice_points(nx, ny, nz)
    if len(pts) > MAX_TILED_QUBITS:
        raise CapExceeded(
            f"{len(pts)} qubits exceeds the {MAX_TILED_QUBITS} tableau cap")
    g, _ = _face_edge_graph(pts)
    return g


def raussendorf_cell():
    """The 18-qubit elementary cell and its verified tableau."""
    g = tile_cells(1, 1, 1)
    t = build_graph_state(g)
    if not verify_graph_state(t, g):
        raise AssertionError("cell stabilizers failed to verify")
    return g, t


def raussendorf_cell_coordinates():
    """Coordinate -> index map of the single cell, split by qubit kind."""
    pts = _lattice_points(1, 1, 1)
    index = {p: i for i, p in enumerate(sorted(pts))}
    faces = {p: i for p, i in index.items() if sum(c & 1 for c in p) == 2}
    edges = {p: i for p, i in index.items() if sum(c & 1 for c in p) == 1}
    return faces, edges


# ---------------------------------------------------------------------------
# triangle-cell hypergraph states


def build_union_jack(t):
    """|+>^n with a CCZ on every triangle; order-independent by symmetry."""
    state = DenseState.plus_states(t.n)
    for tri in sorted(t.triangles):
        state.apply("CCZ", *tri)
    return state


# ---------------------------------------------------------------------------
# brickwork layout

# (column mod 8, row parity, minimum column) clauses for vertical edges,
# columns and rows 1-indexed
_BRICK_RULES = ((3, 1, 3), (5, 1, 5), (7, 0, 7), (1, 0, 9))


def brickwork_supported(n, m=2):
    """Whether the brick pattern applies to an n-column, m-row layout.

    Degenerate single-row or single-column layouts carry the pattern
    vacuously (a path, or isolated vertices); otherwise the column count
    must satisfy the brick-placement congruence.
    """
    return n == 1 or m == 1 or n % 8 == 5


def brickwork_graph(n, m):
    """Brickwork layout on n columns x m rows.

    Vertex ids are column-major: (x, y) -> (x-1)*m + (y-1).  When n does
    not meet the brick-pattern congruence the layout falls back to the
    rectangular cluster and tags itself accordingly.
    """
    if n < 1 or m < 1:
        raise ValueError("need at least one column and row")

    def vid(x, y):
        return (x - 1) * m + (y - 1)

    edges = set()
    for y in range(1, m + 1):
        for x in range(1, n):
            edges.add((vid(x, y), vid(x + 1, y)))

    if brickwork_supported(n, m):
        tag = "brickwork"
        for x in range(1, n + 1):
            for residue, parity, min_col in _BRICK_RULES:
                if x % 8 == residue and x >= min_col:
                    for y in range(1, m):
                        if y % 2 == parity:
                            edges.add((vid(x, y), vid(x, y + 1)))
    else:
        tag = "fallback-cluster"
        for x in range(1, n + 1):
            for y in range(1, m):
                edges.add((vid(x, y), vid(x, y + 1)))

    return GraphSpec.from_edges(n * m, edges, tag=tag)


# ---------------------------------------------------------------------------
# adjacency-list text format


def save_graph(g, path):
    """One `u v` pair per line, zero-indexed, sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.sorted_edges():
            fh.write(f"{u} {v}\n")


def load_graph(path, n=None):
    """Read the adjacency-list format; n defaults to max index + 1."""
    edges = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = map(int, line.split())
            edges.append((u, v))
    if n is None:
        n = max((max(e) for e in edges), default=-1) + 1
    return GraphSpec.from_edges(n, edges)
