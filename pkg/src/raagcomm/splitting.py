"""Graph-of-groups skeletons: the glued diamonds X and quotient graphs from covers.

A skeleton records, per vertex, the free rank ``s`` of a vertex group
``Z x F_s`` and an optional label ``L``; per edge, the labels ``l`` at both
ends.  Vertices and edges may remember which tree vertex / tree edge they lie
over, which is what the M-label computation needs.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Literal

from .covers import CoverGraph, cycle_length, label_subgraph_components
from .product import ProductGraph
from .system import LABELS, LinearSystem, VarId
from .trees import Tree, reduce


class SplittingError(ValueError):
    pass


@dataclass(frozen=True)
class SkVertex:
    id: int
    rank: int
    L: int | None = None
    over: int | None = None
    name: str = ""


@dataclass(frozen=True)
class SkEdge:
    a: int
    b: int
    l_a: int | None = None
    l_b: int | None = None
    over: tuple[int, int] | None = None


@dataclass(frozen=True)
class SplittingSkeleton:
    vertices: tuple[SkVertex, ...]
    edges: tuple[SkEdge, ...]
    tree: Tree | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.vertices)
        if any(v.id != i for i, v in enumerate(self.vertices)):
            raise SplittingError("vertex ids must be 0..n-1 in order")
        for e in self.edges:
            if not (0 <= e.a < n and 0 <= e.b < n):
                raise SplittingError(f"edge ({e.a}, {e.b}) out of range")

    @property
    def has_labels(self) -> bool:
        return all(v.L is not None for v in self.vertices) and all(
            e.l_a is not None and e.l_b is not None for e in self.edges)

    def degree(self, v: int) -> int:
        return sum((e.a == v) + (e.b == v) for e in self.edges)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            adj[e.a].append(e.b)
            adj[e.b].append(e.a)
        return adj

    def rank_multiset(self) -> dict[int, int]:
        return dict(sorted(Counter(v.rank for v in self.vertices).items()))

    def violations(self) -> list[str]:
        bad = []
        for v in self.vertices:
            if v.rank < 2:
                bad.append(f"vertex {v.id} has free rank {v.rank} < 2")
        if self.has_labels:
            for e in self.edges:
                if self.vertices[e.a].L < e.l_a or self.vertices[e.b].L < e.l_b:
                    bad.append(f"edge ({e.a},{e.b}): end label exceeds vertex label")
        seen = {0} if self.vertices else set()
        stack = list(seen)
        adj = self.neighbors()
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            bad.append("skeleton is not connected")
        return bad

    def to_json(self) -> str:
        doc = {
            "vertices": [{"id": v.id, "rank": v.rank, "L": v.L, "over": v.over} for v in self.vertices],
            "edges": [{"a": e.a, "b": e.b, "l_a": e.l_a, "l_b": e.l_b,
                       "over": list(e.over) if e.over else None} for e in self.edges],
        }
        return json.dumps(doc, indent=2) + "\n"


def skeleton_from_json(text: str) -> SplittingSkeleton:
    doc = json.loads(text)
    if set(doc) != {"vertices", "edges"}:
        raise SplittingError("skeleton JSON needs exactly 'vertices' and 'edges'")
    vs = tuple(SkVertex(d["id"], d["rank"], d["L"], d["over"]) for d in doc["vertices"])
    es = tuple(SkEdge(d["a"], d["b"], d["l_a"], d["l_b"], tuple(d["over"]) if d["over"] else None)
               for d in doc["edges"])
    return SplittingSkeleton(vs, es)


# -- the graph of groups X ------------------------------------------------------

def diamond_sequence(k: int) -> list[int]:
    """Piece indices (D_k, D_1, D_{k-1}, D_2, ..., D_{k-1}, D_1, D_k)."""
    mid = [x for i in range(1, k) for x in (i, k - i)]
    return [k] + mid + [k]


def build_X(k: int) -> SplittingSkeleton:
    if k < 1:
        raise SplittingError("k must be at least 1")
    center = k * k + k + 1
    verts: list[SkVertex] = []
    edges: list[SkEdge] = []

    def add(rank: int, name: str) -> int:
        verts.append(SkVertex(len(verts), rank, name=name))
        return len(verts) - 1

    seq = diamond_sequence(k)
    shared = None
    for j, i in enumerate(seq, 1):
        tag = f"P{j}:D{i}"
        if j in (1, len(seq)):
            v = shared if shared is not None else add(center, f"{tag}.v")
            for t in range(1, k + 1):
                u = add(2, f"{tag}.u{t}")
                up = add(k + 2, f"{tag}.u{t}'")
                edges.append(SkEdge(v, u))
                edges.append(SkEdge(u, up))
            shared = v
            continue
        # pieces j and j+1 share v when j is odd and w when j is even
        if j % 2 == 0:
            v, w = shared, add(center, f"{tag}.w")
            shared = w
        else:
            w, v = shared, add(center, f"{tag}.v")
            shared = v
        for t in range(1, i + 1):
            u = add(2, f"{tag}.u{t}")
            edges.append(SkEdge(v, u))
            edges.append(SkEdge(u, w))
    return SplittingSkeleton(tuple(verts), tuple(edges))


def x_expected_census(k: int) -> dict[int, int]:
    """Rank multiset of X in closed form."""
    out: Counter[int] = Counter()
    out[k * k + k + 1] += 2 * k - 1
    out[2] += k * k + k
    out[k + 2] += 2 * k
    return dict(sorted(out.items()))


# -- trees with the letter names used by the covers -------------------------------

def path_4k2_tree(k: int) -> Tree:
    """P_{4k+2} with vertices A, D1, C1, B1, C1', D2, ..., Ck', D{k+1}, E."""
    names = ["A"]
    for i in range(1, k + 1):
        names += [f"D{i}", f"C{i}", f"B{i}", f"C{i}'"]
    names += [f"D{k + 1}", "E"]
    n = len(names)
    return Tree(n, tuple((i, i + 1) for i in range(n - 1)), tuple(names), spec=f"path:{n - 1}")


# -- quotient graphs from covers ---------------------------------------------------

def _kappa(c: CoverGraph, x: int, u: str, v: str | None) -> int:
    """Least kappa >= 1 with x.u^kappa on the v-orbit of x (or equal to x)."""
    target = set(c.orbit(v, x)) if v is not None else {x}
    y = x
    for kappa in range(1, c.vertex_count + 1):
        y = c.perms[u][y]
        if y in target:
            return kappa
    raise SplittingError("no return within the cover degree")


def quotient_graph(g: Tree, cover: CoverGraph) -> SplittingSkeleton:
    """Labelled quotient of the reduced Bass-Serre tree by the preimage of the cover group.

    Cover letters are matched to tree vertices by name; they must form an
    independent set of ``g``.
    """
    name_to_id = {g.name(v): v for v in range(g.vertex_count)}
    missing = [a for a in cover.alphabet if a not in name_to_id]
    if missing:
        raise SplittingError(f"cover letters {missing} are not vertices of the tree")
    A = {name_to_id[a] for a in cover.alphabet}
    for u, v in g.edges:
        if u in A and v in A:
            raise SplittingError(f"letters {g.name(u)} and {g.name(v)} are adjacent")
    red = reduce(g)

    def letters(vs) -> list[str]:
        return [g.name(v) for v in sorted(vs) if v in A]

    verts: list[SkVertex] = []
    home: dict[tuple[int, int], int] = {}  # (tree vertex, cover vertex) -> skeleton vertex
    for v in red.to_old:
        comps = label_subgraph_components(cover, letters({v, *g.neighbors(v)}))
        for comp in comps:
            if v in A:
                lens = {cycle_length(cover, g.name(v), x) for x in comp}
                if len(lens) != 1:
                    raise SplittingError(f"cycle length of {g.name(v)} varies within a component")
                L = lens.pop()
            else:
                L = 1
            if len(comp) % L:
                raise SplittingError("component size is not a multiple of L")
            rank = 1 + (len(comp) // L) * (g.degree(v) - 1)
            sid = len(verts)
            verts.append(SkVertex(sid, rank, L, v, f"{g.name(v)}#{len(comp)}@{comp[0]}"))
            for x in comp:
                home[(v, x)] = sid

    def end_label(x: int, u: int, v: int) -> int:
        if u not in A:
            return 1
        return _kappa(cover, x, g.name(u), g.name(v) if v in A else None)

    edges: list[SkEdge] = []
    for a_new, b_new in red.tree.edges:
        u, v = red.to_old[a_new], red.to_old[b_new]
        for comp in label_subgraph_components(cover, letters({u, v})):
            lu = {end_label(x, u, v) for x in comp}
            lv = {end_label(x, v, u) for x in comp}
            if len(lu) != 1 or len(lv) != 1:
                raise SplittingError("edge labels vary within a component")
            a, b = home[(u, comp[0])], home[(v, comp[0])]
            if any(home[(u, x)] != a or home[(v, x)] != b for x in comp):
                raise SplittingError("edge component is not contained in single vertex components")
            edges.append(SkEdge(a, b, lu.pop(), lv.pop(), (u, v)))
    return SplittingSkeleton(tuple(verts), tuple(edges), g)


# -- labelled isomorphism -------------------------------------------------------------

Compare = Literal["ranks", "labels"]


def _edge_table(s: SplittingSkeleton, with_labels: bool) -> dict[tuple[int, int], Counter]:
    tab: dict[tuple[int, int], Counter] = defaultdict(Counter)
    for e in s.edges:
        la, lb = (e.l_a, e.l_b) if with_labels else (None, None)
        tab[(e.a, e.b)][(la, lb)] += 1
        tab[(e.b, e.a)][(lb, la)] += 1
    return tab


def _refine_pair(a: SplittingSkeleton, ta, b: SplittingSkeleton, tb, with_labels: bool) -> tuple[list[int], list[int]]:
    """Colour refinement run on both skeletons with a shared palette."""
    graphs = ((a, ta, a.neighbors()), (b, tb, b.neighbors()))
    cols = [[(v.rank, s.degree(v.id), v.L if with_labels else None) for v in s.vertices] for s, _, _ in graphs]
    palette: dict = {}
    cols = [[palette.setdefault(c, len(palette)) for c in col] for col in cols]
    for _ in range(len(a.vertices) + 1):
        palette = {}
        new = []
        for (s, tab, adj), col in zip(graphs, cols):
            sigs = []
            for v in range(len(s.vertices)):
                nb = sorted((col[w], tuple(sorted(tab[(v, w)].items(), key=repr))) for w in set(adj[v]))
                sigs.append((col[v], tuple(nb)))
            new.append(sigs)
        keys = sorted(set(new[0]) | set(new[1]), key=repr)
        palette = {k: i for i, k in enumerate(keys)}
        nxt = [[palette[s] for s in sigs] for sigs in new]
        if len(set(nxt[0]) | set(nxt[1])) == len(set(cols[0]) | set(cols[1])):
            return nxt[0], nxt[1]
        cols = nxt
    return cols[0], cols[1]


def iter_isomorphisms(a: SplittingSkeleton, b: SplittingSkeleton,
                      compare: Compare = "ranks") -> Iterator[dict[int, int]]:
    if len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return
    lab = compare == "labels"
    if lab and not (a.has_labels and b.has_labels):
        raise SplittingError("label comparison needs labelled skeletons")
    ta, tb = _edge_table(a, lab), _edge_table(b, lab)
    ka, kb = _refine_pair(a, ta, b, tb, lab)
    if sorted(ka) != sorted(kb):
        return
    adj = a.neighbors()
    # BFS order from the rarest color keeps the search tight
    freq = Counter(ka)
    order: list[int] = []
    seen: set[int] = set()
    for root in sorted(range(len(ka)), key=lambda v: (freq[ka[v]], v)):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in sorted(set(adj[u])):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    by_color: dict[int, list[int]] = defaultdict(list)
    for v, c in enumerate(kb):
        by_color[c].append(v)

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def fits(u: int, x: int) -> bool:
        for w, y in mapping.items():
            if ta.get((u, w), Counter()) != tb.get((x, y), Counter()):
                return False
        if ta.get((u, u), Counter()) != tb.get((x, x), Counter()):
            return False
        return True

    def search(i: int) -> Iterator[dict[int, int]]:
        if i == len(order):
            yield dict(sorted(mapping.items()))
            return
        u = order[i]
        for x in by_color[ka[u]]:
            if x in used or not fits(u, x):
                continue
            mapping[u] = x
            used.add(x)
            yield from search(i + 1)
            del mapping[u]
            used.discard(x)

    yield from search(0)


def labelled_iso(a: SplittingSkeleton, b: SplittingSkeleton,
                 compare: Compare = "ranks") -> dict[int, int] | None:
    """First isomorphism found (deterministic), or None."""
    return next(iter_isomorphisms(a, b, compare), None)


# -- M-labels --------------------------------------------------------------------------

@dataclass
class MLabelResult:
    component: int
    labels: dict[tuple[int, int, int], int]  # (product edge, k, l) -> value
    ratios: list[Fraction]
    ratio_violations: list[str]

    def assignment(self, s: LinearSystem) -> dict[VarId, int]:
        if s.component != self.component:
            raise SplittingError("labels live in the other component")
        return {v: self.labels.get((v.edge, v.k, v.l), 0) for v in s.variables}


def _pair_edges(psi_h: SplittingSkeleton, psi_k: SplittingSkeleton, phi: dict[int, int]) -> list[tuple[SkEdge, SkEdge]]:
    bucket: dict[tuple[int, int], list[SkEdge]] = defaultdict(list)
    for e in psi_k.edges:
        bucket[(e.a, e.b)].append(e)
    for v in bucket.values():
        v.sort(key=lambda e: (e.l_a, e.l_b))
    out = []
    grouped: dict[tuple[int, int], list[SkEdge]] = defaultdict(list)
    for e in psi_h.edges:
        grouped[(e.a, e.b)].append(e)
    for (a, b), es in sorted(grouped.items()):
        x, y = phi[a], phi[b]
        cand = [(e, False) for e in bucket.get((x, y), [])] + [(e, True) for e in bucket.get((y, x), [])]
        if len(cand) != len(es):
            raise SplittingError(f"phi does not map the edges between {a} and {b}")
        es = sorted(es, key=lambda e: (e.l_a, e.l_b))
        for eh, (ek, flip) in zip(es, cand):
            if flip:
                ek = SkEdge(ek.b, ek.a, ek.l_b, ek.l_a, ek.over[::-1] if ek.over else None)
            out.append((eh, ek))
    return out


def m_labels(psi_h: SplittingSkeleton, psi_k: SplittingSkeleton, phi: dict[int, int],
             p: ProductGraph) -> MLabelResult:
    """Sum the label products over the skeleton edges of each product-edge type."""
    if psi_h.tree is None or psi_k.tree is None:
        raise SplittingError("skeletons must come from quotient_graph (tree provenance needed)")
    r1, r2 = reduce(psi_h.tree), reduce(psi_k.tree)
    if r1.tree != p.left or r2.tree != p.right:
        raise SplittingError("product factors do not match the skeleton trees")
    nr = p.right.vertex_count
    eid = {(e.source, e.target): e.id for e in p.edges}

    def delta(x: int) -> int:
        return r1.to_new[psi_h.vertices[x].over] * nr + r2.to_new[psi_k.vertices[phi[x]].over]

    labels: dict[tuple[int, int, int], int] = defaultdict(int)
    ratios: list[Fraction] = []
    bad: list[str] = []
    comps = set()
    for eh, ek in _pair_edges(psi_h, psi_k, phi):
        for (x, lx, y, ly, kx, lkx, ky, lky) in (
            (eh.a, eh.l_a, eh.b, eh.l_b, ek.a, ek.l_a, ek.b, ek.l_b),
            (eh.b, eh.l_b, eh.a, eh.l_a, ek.b, ek.l_b, ek.a, ek.l_a),
        ):
            e = eid.get((delta(x), delta(y)))
            if e is None:
                raise SplittingError("phi is not type-consistent: an edge has no product image")
            comps.add(p.edge_component[e])
            L, Lp = psi_h.vertices[x].L, psi_k.vertices[kx].L
            labels[(e, 1, 1)] += L * ly
            labels[(e, 1, 2)] += L * lky
            labels[(e, 2, 1)] += Lp * ly
            labels[(e, 2, 2)] += Lp * lky
        q = {Fraction(psi_h.vertices[eh.a].L, eh.l_a), Fraction(psi_k.vertices[ek.a].L, ek.l_a),
             Fraction(psi_h.vertices[eh.b].L, eh.l_b), Fraction(psi_k.vertices[ek.b].L, ek.l_b)}
        if len(q) != 1 or next(iter(q)).denominator != 1:
            bad.append(f"edge ({eh.a},{eh.b}): ratios {sorted(q)} are not one integer")
        ratios.append(min(q))
    if len(comps) != 1:
        raise SplittingError("phi is not type-consistent: image meets both components")
    return MLabelResult(comps.pop(), dict(labels), ratios, bad)


def m_labels_all_keys(res: MLabelResult, p: ProductGraph) -> dict[tuple[int, int, int], int]:
    """Labels with explicit zeros on every edge of the product."""
    return {(e.id, k, l): res.labels.get((e.id, k, l), 0) for e in p.edges for k, l in LABELS}
