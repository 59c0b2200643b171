"""The homogeneous linear system attached to one component of the product graph.

Variables are the four labels ``M_kl(e)`` of every oriented edge ``e`` in the
component.  Constraints come in four kinds:

* equality rows (edge relations between ``e`` and its inverse, plus the two
  vertex chains at every vertex, stored as consecutive pairwise differences);
* nonnegativity of every variable (implicit);
* strict sums: a subset whose total must be positive;
* implications: ``trigger > 0`` forces the consequent subset to have positive total.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .product import ProductGraph, components, direct_product, preimage_index
from .trees import Tree, big_d, diameter, reduce

LABELS: tuple[tuple[int, int], ...] = ((1, 1), (1, 2), (2, 1), (2, 2))
_SLOT = {kl: n for n, kl in enumerate(LABELS)}

Row = tuple[tuple[int, int], ...]


class LinearSystemError(ValueError):
    """Malformed system, serialization error or bad assignment."""


@dataclass(frozen=True, order=True)
class VarId:
    edge: int
    k: int
    l: int

    def __post_init__(self):
        if (self.k, self.l) not in _SLOT:
            raise LinearSystemError(f"label ({self.k},{self.l}) is not in {{1,2}}^2")

    def __str__(self) -> str:
        return f"M{self.k}{self.l}(e{self.edge})"


@dataclass(frozen=True)
class Implication:
    trigger: int
    consequent: tuple[int, ...]


@dataclass(frozen=True)
class VertexChain:
    """The sums of one vertex chain in order; each sum is a sparse row."""

    vertex: int
    family: int
    sums: tuple[Row, ...]


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[VarId, ...]
    equalities: tuple[Row, ...]
    strict_sums: tuple[tuple[int, ...], ...]
    implications: tuple[Implication, ...]
    component: int
    pair: tuple[str, str] = ("", "")
    chains: tuple[VertexChain, ...] | None = field(default=None, compare=False, repr=False)
    product: ProductGraph | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.variables)
        for row in self.equalities:
            for v, c in row:
                if not 0 <= v < n:
                    raise LinearSystemError(f"row references unknown variable {v}")
                if not isinstance(c, int):
                    raise LinearSystemError("coefficients must be integers")
        for s in self.strict_sums:
            if not s or any(not 0 <= v < n for v in s):
                raise LinearSystemError("strict sums must be nonempty subsets of the variables")
        for imp in self.implications:
            if not 0 <= imp.trigger < n:
                raise LinearSystemError("implication trigger out of range")
            if not imp.consequent or any(not 0 <= v < n for v in imp.consequent):
                raise LinearSystemError("implication consequents must be nonempty subsets")
        if self.component not in (1, 2):
            raise LinearSystemError("component must be 1 or 2")

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def index_of(self, var: VarId) -> int:
        return self._index[var]

    @property
    def _index(self) -> dict[VarId, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {v: i for i, v in enumerate(self.variables)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def edges(self) -> list[int]:
        return sorted({v.edge for v in self.variables})


def _row(terms: dict[int, int]) -> Row:
    return tuple(sorted((v, c) for v, c in terms.items() if c))


def _sum_terms(out: dict[int, int], vars_: Sequence[int], coeff: int) -> None:
    for v in vars_:
        out[v] = out.get(v, 0) + coeff


def build_component_system(p: ProductGraph, component: int, g1: Tree, g2: Tree) -> LinearSystem:
    """System of one product component; ``g1``, ``g2`` are the unreduced trees."""
    r1, r2 = reduce(g1), reduce(g2)
    if r1.tree != p.left or r2.tree != p.right:
        raise LinearSystemError("product factors are not the reductions of the given trees")
    if p.degenerate:
        raise LinearSystemError("degenerate component: the product has no edges")
    comp = components(p)[component - 1]
    if not comp.edges:
        raise LinearSystemError("degenerate component: no edges")

    variables = tuple(VarId(e, k, l) for e in comp.edges for k, l in LABELS)
    index = {v: i for i, v in enumerate(variables)}

    def var(e: int, kl: tuple[int, int]) -> int:
        return index[VarId(e, *kl)]

    rows: list[Row] = []
    for e in comp.edges:
        inv = p.edges[e].inverse
        if e > inv:
            continue
        for a, b in (((1, 1), (1, 1)), ((1, 2), (2, 1)), ((2, 1), (1, 2)), ((2, 2), (2, 2))):
            rows.append(_row({var(e, a): 1, var(inv, b): -1}))

    idx = preimage_index(p)
    chains: list[VertexChain] = []
    for w in comp.vertices:
        w1, w2 = p.vertices[w]
        d1 = big_d(g1, r1.to_old[w1])
        d2 = big_d(g2, r2.to_old[w2])
        left_dirs = p.left.adjacency[w1]
        right_dirs = p.right.adjacency[w2]
        for family, (kl_left, kl_right) in ((1, ((1, 1), (1, 2))), (2, ((2, 1), (2, 2)))):
            sums: list[Row] = []
            for pi in left_dirs:
                t: dict[int, int] = {}
                _sum_terms(t, [var(e, kl_left) for e in idx.at_vertex[(w, 1, pi)]], d1)
                sums.append(_row(t))
            for qj in right_dirs:
                t = {}
                _sum_terms(t, [var(e, kl_right) for e in idx.at_vertex[(w, 2, qj)]], d2)
                sums.append(_row(t))
            chains.append(VertexChain(w, family, tuple(sums)))
            for a, b in zip(sums, sums[1:]):
                t = dict(a)
                for v, c in b:
                    t[v] = t.get(v, 0) - c
                rows.append(_row(t))

    in_comp = set(comp.edges)
    strict: list[tuple[int, ...]] = []
    for side in (1, 2):
        for key in sorted(idx.by_edge[side]):
            pre = [e for e in idx.by_edge[side][key] if e in in_comp]
            for kl in LABELS:
                strict.append(tuple(sorted(var(e, kl) for e in pre)))

    imps: list[Implication] = []
    for v in comp.vertices:
        local = []
        for side, tree in ((1, p.left), (2, p.right)):
            for u in tree.adjacency[p.vertices[v][side - 1]]:
                local.append(idx.at_vertex[(v, side, u)])
        for e in p.out_edges[v]:
            for kl in LABELS:
                trig = var(e, kl)
                for pre in local:
                    for kl2 in LABELS:
                        imps.append(Implication(trig, tuple(sorted(var(x, kl2) for x in pre))))

    return LinearSystem(
        variables,
        tuple(rows),
        tuple(strict),
        tuple(imps),
        component,
        (g1.spec or "", g2.spec or ""),
        tuple(chains),
        p,
    )


def build_full_system(g1: Tree, g2: Tree) -> tuple[LinearSystem, LinearSystem]:
    for name, g in (("left", g1), ("right", g2)):
        if diameter(g) < 3:
            raise LinearSystemError(f"{name} tree has diameter {diameter(g)}; need at least 3")
    p = direct_product(reduce(g1).tree, reduce(g2).tree)
    return build_component_system(p, 1, g1, g2), build_component_system(p, 2, g1, g2)


# -- evaluation -------------------------------------------------------------

@dataclass
class AssignmentReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def as_vector(s: LinearSystem, x: Mapping[VarId, int] | Sequence[int]) -> list:
    if isinstance(x, Mapping):
        missing = [v for v in s.variables if v not in x]
        if missing:
            raise LinearSystemError(f"assignment misses {len(missing)} variables, e.g. {missing[0]}")
        return [x[v] for v in s.variables]
    vec = list(x)
    if len(vec) != s.n_vars:
        raise LinearSystemError(f"assignment has {len(vec)} entries, system has {s.n_vars} variables")
    return vec


def _eval(row: Row, vec: Sequence) -> int | Fraction:
    return sum(c * vec[v] for v, c in row)


def check_assignment(s: LinearSystem, x: Mapping[VarId, int] | Sequence[int]) -> AssignmentReport:
    """Evaluate every constraint exactly and list all violations."""
    vec = as_vector(s, x)
    rep = AssignmentReport()
    for i, row in enumerate(s.equalities):
        val = _eval(row, vec)
        if val != 0:
            rep.violations.append(f"equality {i} evaluates to {val}")
    for i, val in enumerate(vec):
        if val < 0:
            rep.violations.append(f"{s.variables[i]} = {val} is negative")
    for i, sub in enumerate(s.strict_sums):
        if sum(vec[v] for v in sub) <= 0:
            rep.violations.append(f"strict sum {i} is not positive")
    for i, imp in enumerate(s.implications):
        if vec[imp.trigger] > 0 and sum(vec[v] for v in imp.consequent) <= 0:
            rep.violations.append(f"implication {i}: {s.variables[imp.trigger]} > 0 but consequent sums to 0")
    return rep


def chain_values(s: LinearSystem, x: Mapping[VarId, int] | Sequence[int]) -> dict[tuple[int, int], list]:
    """Value of every sum of every vertex chain, keyed by (vertex, family)."""
    if s.chains is None:
        raise LinearSystemError("system carries no chain metadata (was it parsed from JSON?)")
    vec = as_vector(s, x)
    return {(c.vertex, c.family): [_eval(r, vec) for r in c.sums] for c in s.chains}


def r_labels(s: LinearSystem, x: Mapping[VarId, int] | Sequence[int]) -> dict[int, tuple]:
    """(R1(w), R2(w)) per vertex; raises if some chain is not constant."""
    out: dict[int, list] = {}
    for (w, fam), vals in chain_values(s, x).items():
        if len(set(vals)) != 1:
            raise LinearSystemError(f"chain {fam} at vertex {w} is not constant: {vals}")
        out.setdefault(w, [None, None])[fam - 1] = vals[0]
    return {w: tuple(v) for w, v in sorted(out.items())}


# -- JSON -------------------------------------------------------------------

_TOP_KEYS = {"pair", "component", "variables", "equalities", "strict_sums", "implications"}


def emit_json(s: LinearSystem) -> str:
    doc = {
        "pair": {"left_spec": s.pair[0], "right_spec": s.pair[1]},
        "component": s.component,
        "variables": [{"edge": v.edge, "k": v.k, "l": v.l} for v in s.variables],
        "equalities": [[[v, c] for v, c in row] for row in s.equalities],
        "strict_sums": [list(x) for x in s.strict_sums],
        "implications": [{"trigger": i.trigger, "consequent": list(i.consequent)} for i in s.implications],
    }
    return json.dumps(doc, separators=(",", ":"), sort_keys=False) + "\n"


def _check_keys(obj: object, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise LinearSystemError(f"{where}: expected an object")
    extra = set(obj) - allowed
    missing = allowed - set(obj)
    if extra:
        raise LinearSystemError(f"{where}: unknown fields {sorted(extra)}")
    if missing:
        raise LinearSystemError(f"{where}: missing fields {sorted(missing)}")
    return obj


def _int(x: object, where: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise LinearSystemError(f"{where}: expected an integer, got {x!r}")
    return x


def parse_json(text: str) -> LinearSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LinearSystemError(f"malformed JSON: {exc}") from exc
    doc = _check_keys(doc, _TOP_KEYS, "system")
    pair = _check_keys(doc["pair"], {"left_spec", "right_spec"}, "pair")
    variables = []
    for n, v in enumerate(doc["variables"]):
        v = _check_keys(v, {"edge", "k", "l"}, f"variables[{n}]")
        variables.append(VarId(_int(v["edge"], "edge"), _int(v["k"], "k"), _int(v["l"], "l")))
    rows = []
    for n, row in enumerate(doc["equalities"]):
        terms = []
        for term in row:
            if not isinstance(term, list) or len(term) != 2:
                raise LinearSystemError(f"equalities[{n}]: terms are [varIndex, coeff] pairs")
            terms.append((_int(term[0], "varIndex"), _int(term[1], "coeff")))
        rows.append(tuple(terms))
    strict = tuple(tuple(_int(v, "strict_sums") for v in sub) for sub in doc["strict_sums"])
    imps = []
    for n, imp in enumerate(doc["implications"]):
        imp = _check_keys(imp, {"trigger", "consequent"}, f"implications[{n}]")
        imps.append(Implication(_int(imp["trigger"], "trigger"),
                                tuple(_int(v, "consequent") for v in imp["consequent"])))
    return LinearSystem(
        tuple(variables), tuple(rows), strict, tuple(imps),
        _int(doc["component"], "component"), (str(pair["left_spec"]), str(pair["right_spec"])),
    )
