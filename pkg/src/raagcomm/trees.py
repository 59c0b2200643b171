"""Finite trees: parsing, diameter, leaf reduction and diameter-4 codes.

Trees are immutable values with dense 0-based vertex ids.  The mini-language
accepted by :func:`parse_tree_spec` is::

    path:N                      the path P_N with N edges
    t4:(d1,k1),...,(dl,kl);q    diameter-4 tree: k_i pivots of degree d_i + 1, q hairs
    tkk:K                       the tree T_{K,K+1}
    adj: u v u v ...            explicit edge list
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path


class TreeError(ValueError):
    """Raised for malformed tree specs or inputs that are not trees."""


@dataclass(frozen=True)
class Tree:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    names: tuple[str, ...] | None = None
    spec: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.vertex_count
        if n < 1:
            raise TreeError("a tree needs at least one vertex")
        norm = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        object.__setattr__(self, "edges", norm)
        if len(norm) != n - 1:
            raise TreeError(f"{n} vertices need {n - 1} edges, got {len(norm)}")
        if len(set(norm)) != len(norm):
            raise TreeError("repeated edge")
        for u, v in norm:
            if u == v:
                raise TreeError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise TreeError(f"edge ({u}, {v}) outside 0..{n - 1}")
        if self.names is not None and len(self.names) != n:
            raise TreeError("names must cover every vertex")
        # n - 1 edges plus connected implies acyclic
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise TreeError("graph is not connected")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def leaves(self) -> list[int]:
        return [v for v in range(self.vertex_count) if self.degree(v) == 1]

    def name(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)

    def relabel(self, perm: list[int]) -> "Tree":
        """Return the tree with vertex v renamed to perm[v]."""
        names = None
        if self.names is not None:
            names = [""] * self.vertex_count
            for v, nm in enumerate(self.names):
                names[perm[v]] = nm
            names = tuple(names)
        return Tree(self.vertex_count, tuple((perm[u], perm[v]) for u, v in self.edges), names)


@dataclass(frozen=True)
class Diam4Code:
    """T((d_1,k_1),...,(d_l,k_l); q): k_i pivots of degree d_i + 1 and q hair vertices."""

    pivot_spec: tuple[tuple[int, int], ...]
    hair: int = 0

    def __post_init__(self):
        spec = tuple(tuple(p) for p in self.pivot_spec)
        object.__setattr__(self, "pivot_spec", spec)
        if not spec:
            raise TreeError("diameter-4 code needs at least one pivot class")
        ds = [d for d, _ in spec]
        if any(d < 1 or k < 1 for d, k in spec):
            raise TreeError("pivot degrees and multiplicities must be positive")
        if any(a >= b for a, b in zip(ds, ds[1:])):
            raise TreeError("pivot degrees d_i must be strictly increasing")
        if self.hair < 0:
            raise TreeError("hair count must be nonnegative")
        if len(spec) == 1 and spec[0][1] < 2:
            raise TreeError("a single pivot class needs k >= 2 for diameter 4")

    def format(self) -> str:
        body = ",".join(f"({d},{k})" for d, k in self.pivot_spec)
        return f"t4:{body};{self.hair}"


# -- constructors -----------------------------------------------------------

def path_tree(n_edges: int) -> Tree:
    if n_edges < 0:
        raise TreeError("path length must be nonnegative")
    edges = tuple((i, i + 1) for i in range(n_edges))
    return Tree(n_edges + 1, edges, tuple(f"a{i}" for i in range(n_edges + 1)), spec=f"path:{n_edges}")


def tkk_tree(k: int) -> Tree:
    """T_{k,k+1}; ids follow a_1..a_k, b, c, d, e_1..e_{k+1}."""
    if k < 1:
        raise TreeError("tkk needs K >= 1")
    b, c, d = k, k + 1, k + 2
    edges = [(i, b) for i in range(k)] + [(b, c), (c, d)]
    edges += [(d, k + 3 + j) for j in range(k + 1)]
    names = [f"a{i + 1}" for i in range(k)] + ["b", "c", "d"] + [f"e{j + 1}" for j in range(k + 1)]
    return Tree(2 * k + 4, tuple(edges), tuple(names), spec=f"tkk:{k}")


def tree_from_code(code: Diam4Code) -> Tree:
    """Center 0, then each pivot followed by its leaves, then the hair vertices."""
    edges: list[tuple[int, int]] = []
    names = ["c"]
    nxt = 1
    npiv = 0
    for d, k in code.pivot_spec:
        for _ in range(k):
            piv = nxt
            npiv += 1
            names.append(f"b{npiv}")
            edges.append((0, piv))
            nxt += 1
            for _ in range(d):
                edges.append((piv, nxt))
                names.append(f"l{nxt}")
                nxt += 1
    for _ in range(code.hair):
        edges.append((0, nxt))
        names.append(f"h{nxt}")
        nxt += 1
    return Tree(nxt, tuple(edges), tuple(names), spec=code.format())


def tree_from_edges(pairs: list[tuple[int, int]]) -> Tree:
    n = 1 + max((max(p) for p in pairs), default=0)
    return Tree(n, tuple(pairs))


_T4_RE = re.compile(r"^\s*((?:\(\s*\d+\s*,\s*\d+\s*\)\s*,?\s*)+);\s*(\d+)\s*$")
_PAIR_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_tree_spec(text: str) -> Tree:
    """Parse the tree mini-language (see module docstring)."""
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise TreeError(f"missing ':' in tree spec {text!r}")
    kind = kind.strip().lower()
    if kind == "path":
        if not body.strip().isdigit():
            raise TreeError(f"path length must be a nonnegative integer: {text!r}")
        return path_tree(int(body))
    if kind == "tkk":
        if not body.strip().isdigit():
            raise TreeError(f"tkk parameter must be a positive integer: {text!r}")
        return tkk_tree(int(body))
    if kind == "t4":
        m = _T4_RE.match(body)
        if not m:
            raise TreeError(f"cannot parse diameter-4 code {text!r}")
        pairs = tuple((int(a), int(b)) for a, b in _PAIR_RE.findall(m.group(1)))
        return tree_from_code(Diam4Code(pairs, int(m.group(2))))
    if kind == "adj":
        tokens = body.split()
        if len(tokens) % 2:
            raise TreeError("adjacency list needs an even number of vertex ids")
        try:
            ids = [int(t) for t in tokens]
        except ValueError as exc:
            raise TreeError(f"non-integer vertex id in {text!r}") from exc
        if any(i < 0 for i in ids):
            raise TreeError("vertex ids must be nonnegative")
        tree = tree_from_edges(list(zip(ids[::2], ids[1::2])))
        return Tree(tree.vertex_count, tree.edges, spec=text.strip())
    raise TreeError(f"unknown tree kind {kind!r}")


def read_adjacency_file(path: str | Path) -> Tree:
    """One ``u v`` pair per line; ``#`` starts a comment."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TreeError(f"{path}:{lineno}: expected 'u v'")
        pairs.append((int(parts[0]), int(parts[1])))
    return tree_from_edges(pairs)


# -- metric queries ---------------------------------------------------------

def _bfs(t: Tree, src: int) -> list[int]:
    dist = [-1] * t.vertex_count
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        for w in t.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def _diametral_path(t: Tree) -> list[int]:
    d0 = _bfs(t, 0)
    a = max(range(t.vertex_count), key=lambda v: (d0[v], -v))
    da = _bfs(t, a)
    b = max(range(t.vertex_count), key=lambda v: (da[v], -v))
    path = [b]
    while path[-1] != a:
        u = path[-1]
        path.append(next(w for w in t.adjacency[u] if da[w] == da[u] - 1))
    return path


def diameter(t: Tree) -> int:
    return len(_diametral_path(t)) - 1


@dataclass(frozen=True)
class Reduction:
    """Result of deleting all leaves once; ``to_old[new] = old``."""

    tree: Tree
    original: Tree
    to_old: tuple[int, ...]

    @cached_property
    def to_new(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.to_old)}


def reduce(t: Tree) -> Reduction:
    """Delete every degree-1 vertex and its edge (a single pass)."""
    if diameter(t) < 2:
        raise TreeError("reduction of a tree with diameter < 2 is empty")
    keep = [v for v in range(t.vertex_count) if t.degree(v) > 1]
    to_new = {old: new for new, old in enumerate(keep)}
    edges = tuple((to_new[u], to_new[v]) for u, v in t.edges if u in to_new and v in to_new)
    names = tuple(t.name(v) for v in keep)
    return Reduction(Tree(len(keep), edges, names), t, tuple(keep))


def big_d(t: Tree, v: int) -> int:
    """Degree of the non-leaf vertex ``v`` (an id of ``t``) minus one."""
    deg = t.degree(v)
    if deg <= 1:
        raise TreeError(f"vertex {v} is a leaf")
    return deg - 1


def center(t: Tree) -> list[int]:
    path = _diametral_path(t)
    L = len(path) - 1
    return sorted({path[L // 2], path[(L + 1) // 2]})


def diam4_code(t: Tree) -> Diam4Code:
    path = _diametral_path(t)
    if len(path) - 1 != 4:
        raise TreeError(f"tree has diameter {len(path) - 1}, not 4")
    c = path[2]
    hair = 0
    counts: dict[int, int] = {}
    for w in t.adjacency[c]:
        if t.degree(w) == 1:
            hair += 1
        else:
            d = t.degree(w) - 1
            counts[d] = counts.get(d, 0) + 1
    return Diam4Code(tuple(sorted(counts.items())), hair)


# -- isomorphism ------------------------------------------------------------

def _ahu(t: Tree, root: int) -> str:
    parent = {root: -1}
    order = [root]
    for u in order:
        for w in t.adjacency[u]:
            if w != parent[u]:
                parent[w] = u
                order.append(w)
    code: dict[int, str] = {}
    for u in reversed(order):
        kids = sorted(code[w] for w in t.adjacency[u] if w != parent[u])
        code[u] = "(" + "".join(kids) + ")"
    return code[root]


def canonical_form(t: Tree) -> str:
    """AHU code minimized over the tree's centers."""
    return min(_ahu(t, c) for c in center(t))


def is_isomorphic(a: Tree, b: Tree) -> bool:
    return a.vertex_count == b.vertex_count and canonical_form(a) == canonical_form(b)
