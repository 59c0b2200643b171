"""Direct (tensor) product of two reduced trees.

Vertices are pairs ``(i, j)`` stored at index ``i * |right| + j``.  Every
unordered edge appears twice, once per orientation, with explicit inverse ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .trees import Tree


class DegenerateProduct(ValueError):
    """A factor has no edges, so the product has no edges either."""


@dataclass(frozen=True)
class OrientedEdge:
    id: int
    source: int
    target: int
    inverse: int


@dataclass(frozen=True)
class Component:
    tag: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]


@dataclass(frozen=True)
class ProductGraph:
    left: Tree
    right: Tree
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[OrientedEdge, ...]
    vertex_component: tuple[int, ...]
    edge_component: tuple[int, ...]

    def index(self, i: int, j: int) -> int:
        return i * self.right.vertex_count + j

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            out[e.source].append(e.id)
        return tuple(tuple(o) for o in out)

    def project(self, e: OrientedEdge, side: int) -> tuple[int, int]:
        """Oriented image of ``e`` in the left (side 1) or right (side 2) factor."""
        k = side - 1
        return self.vertices[e.source][k], self.vertices[e.target][k]

    @property
    def degenerate(self) -> bool:
        return not self.edges

    def to_dot(self) -> str:
        colors = {1: "black", 2: "red"}
        lines = ["graph D {"]
        for v, (i, j) in enumerate(self.vertices):
            lines.append(f'  {v} [label="({self.left.name(i)},{self.right.name(j)})"];')
        for e in self.edges:
            if e.id < e.inverse:
                c = colors.get(self.edge_component[e.id], "gray")
                lines.append(f"  {e.source} -- {e.target} [color={c}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def direct_product(left: Tree, right: Tree) -> ProductGraph:
    nr = right.vertex_count
    vertices = tuple((i, j) for i in range(left.vertex_count) for j in range(nr))
    pairs: list[tuple[int, int]] = []
    for s, (i, j) in enumerate(vertices):
        for p in left.adjacency[i]:
            for q in right.adjacency[j]:
                pairs.append((s, p * nr + q))
    eid = {pr: n for n, pr in enumerate(pairs)}
    edges = tuple(OrientedEdge(n, s, t, eid[(t, s)]) for n, (s, t) in enumerate(pairs))

    # union-find over vertices; component 1 holds vertex (0, 0)
    parent = list(range(len(vertices)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, t in pairs:
        a, b = find(s), find(t)
        if a != b:
            parent[max(a, b)] = min(a, b)
    vcomp = [0] * len(vertices)
    if edges:
        roots = sorted({find(v) for v in range(len(vertices))})
        if len(roots) != 2:
            raise AssertionError(f"product of two trees has {len(roots)} components")
        first = find(0)
        for v in range(len(vertices)):
            vcomp[v] = 1 if find(v) == first else 2
    ecomp = tuple(vcomp[e.source] for e in edges)
    return ProductGraph(left, right, vertices, edges, tuple(vcomp), ecomp)


def components(p: ProductGraph) -> tuple[Component, Component]:
    if p.degenerate:
        raise DegenerateProduct("a factor has no edges; the product graph is edgeless")
    out = []
    for tag in (1, 2):
        vs = tuple(v for v, c in enumerate(p.vertex_component) if c == tag)
        es = tuple(e for e, c in enumerate(p.edge_component) if c == tag)
        out.append(Component(tag, vs, es))
    return out[0], out[1]


@dataclass(frozen=True)
class EdgePreimageIndex:
    """Edges of the product over each factor edge, globally and per start vertex.

    ``by_edge[side][(a, b)]`` (with ``a < b``) lists every oriented product edge
    whose projection is the unordered factor edge ``{a, b}``.
    ``at_vertex[(v, side, u)]`` lists the product edges starting at ``v`` whose
    projection runs from ``pi_side(v)`` to its neighbour ``u``.
    """

    by_edge: dict[int, dict[tuple[int, int], tuple[int, ...]]]
    at_vertex: dict[tuple[int, int, int], tuple[int, ...]]


def preimage_index(p: ProductGraph) -> EdgePreimageIndex:
    by_edge: dict[int, dict[tuple[int, int], list[int]]] = {}
    at_vertex: dict[tuple[int, int, int], list[int]] = {}
    for side, tree in ((1, p.left), (2, p.right)):
        by_edge[side] = {e: [] for e in tree.edges}
        for v, pair in enumerate(p.vertices):
            for u in tree.adjacency[pair[side - 1]]:
                at_vertex[(v, side, u)] = []
    for e in p.edges:
        for side in (1, 2):
            a, b = p.project(e, side)
            by_edge[side][(min(a, b), max(a, b))].append(e.id)
            at_vertex[(e.source, side, b)].append(e.id)
    return EdgePreimageIndex(
        {s: {k: tuple(v) for k, v in d.items()} for s, d in by_edge.items()},
        {k: tuple(v) for k, v in at_vertex.items()},
    )
