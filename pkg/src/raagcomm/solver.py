"""Integer feasibility of a component system via maximal supports.

The constraints are homogeneous, so nonnegative rational solutions form a
cone and any rational point scales to an integer one.  The solver keeps a set
of *active* variables (the rest are pinned to 0) and repeatedly

1. computes the maximal support: the variables that are positive in some
   cone solution, together with a point positive on all of them;
2. stops with "infeasible" if some strict sum misses the support;
3. deactivates triggers whose implication consequent misses the support;
4. stops with "feasible" once nothing changes.

Variables tied by two-term identity rows (``x_a = x_b``) are merged first;
this is the "reduced" variable set used by the probes and the brute-force oracle.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactlp import LPProblem, lp_feasible, scale_to_integers
from .system import LinearSystem, VarId, build_full_system, check_assignment
from .trees import Tree


class BruteForceGuardExceeded(ValueError):
    """The exhaustive oracle refuses search spaces above its guard."""


BRUTE_FORCE_GUARD = 5 ** 16


# -- variable identification -------------------------------------------------

@dataclass(frozen=True)
class ReducedSystem:
    """Quotient of a system by its identity rows."""

    source: LinearSystem
    classes: tuple[tuple[int, ...], ...]
    class_of: tuple[int, ...]
    rows: tuple[tuple[tuple[int, int], ...], ...]
    strict_sums: tuple[frozenset[int], ...]
    # consequent set -> triggers; implications sharing a consequent are grouped
    implications: tuple[tuple[frozenset[int], tuple[int, ...]], ...]

    @property
    def n(self) -> int:
        return len(self.classes)

    def expand(self, values: Sequence) -> list:
        return [values[c] for c in self.class_of]


def reduce_system(s: LinearSystem) -> ReducedSystem:
    parent = list(range(s.n_vars))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in s.equalities:
        if len(row) == 2 and row[0][1] == -row[1][1]:
            a, b = find(row[0][0]), find(row[1][0])
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = sorted({find(v) for v in range(s.n_vars)})
    cid = {r: i for i, r in enumerate(roots)}
    class_of = tuple(cid[find(v)] for v in range(s.n_vars))
    members: list[list[int]] = [[] for _ in roots]
    for v, c in enumerate(class_of):
        members[c].append(v)

    rows = set()
    for row in s.equalities:
        t: dict[int, int] = {}
        for v, c in row:
            t[class_of[v]] = t.get(class_of[v], 0) + c
        r = tuple(sorted((v, c) for v, c in t.items() if c))
        if r:
            # fix the sign so that r and -r collapse
            if r[0][1] < 0:
                r = tuple((v, -c) for v, c in r)
            rows.add(r)
    strict = tuple(dict.fromkeys(frozenset(class_of[v] for v in sub) for sub in s.strict_sums))
    grouped: dict[frozenset[int], set[int]] = {}
    for imp in s.implications:
        cons = frozenset(class_of[v] for v in imp.consequent)
        grouped.setdefault(cons, set()).add(class_of[imp.trigger])
    imps = tuple((c, tuple(sorted(t))) for c, t in grouped.items())
    return ReducedSystem(s, tuple(tuple(m) for m in members), class_of,
                         tuple(sorted(rows)), strict, imps)


# -- maximal support ----------------------------------------------------------

def _reduced_support(r: ReducedSystem, active: frozenset[int]) -> tuple[frozenset[int], list[Fraction]]:
    cols = sorted(active)
    pos = {c: i for i, c in enumerate(cols)}
    rows = []
    for row in r.rows:
        rr = tuple((pos[v], c) for v, c in row if v in pos)
        if rr:
            rows.append(rr)
    point = [Fraction(0)] * r.n
    support: set[int] = set()
    dead: set[int] = set()
    for v in cols:
        if v in support or v in dead:
            continue
        live = [c for c in cols if c not in dead]
        lp = {c: i for i, c in enumerate(live)}
        sub_rows = []
        for row in rows:
            rr = tuple((lp[cols[j]], c) for j, c in row if cols[j] in lp)
            if rr:
                sub_rows.append(rr)
        lower = tuple(1 if c == v else 0 for c in live)
        res = lp_feasible(LPProblem(len(live), tuple(sub_rows), lower))
        if res.feasible:
            for c, x in zip(live, res.point):
                if x > 0:
                    support.add(c)
                    point[c] += x
        else:
            for c, g in zip(live, res.certificate):
                if g > 0:
                    dead.add(c)
    return frozenset(support), point


def _to_classes(r: ReducedSystem, vars_: Iterable[int | VarId]) -> frozenset[int]:
    """Classes all of whose members are listed."""
    idx = set()
    for v in vars_:
        idx.add(r.source.index_of(v) if isinstance(v, VarId) else int(v))
    return frozenset(c for c, mem in enumerate(r.classes) if all(m in idx for m in mem))


def maximal_support(s: LinearSystem, active: Iterable[int | VarId] | None = None
                    ) -> tuple[frozenset[int], tuple[Fraction, ...]]:
    """Variables positive in some nonnegative solution with inactive variables at 0.

    Returns the support (variable indices) and a rational solution that is
    positive exactly on it.  Strict sums and implications are ignored here.
    """
    r = reduce_system(s)
    act = frozenset(range(r.n)) if active is None else _to_classes(r, active)
    sup, pt = _reduced_support(r, act)
    full = frozenset(v for v, c in enumerate(r.class_of) if c in sup)
    return full, tuple(r.expand(pt))


# -- fixpoint -----------------------------------------------------------------

@dataclass
class ComponentVerdict:
    component: int
    feasible: bool
    trace: list[dict] = field(default_factory=list)
    witness: tuple[int, ...] | None = None
    support: frozenset[int] = frozenset()
    rounds: int = 0


def _fixpoint(r: ReducedSystem, order: Sequence[int] | None) -> ComponentVerdict:
    s = r.source
    active = frozenset(range(r.n))
    rank = None
    if order is not None:
        rank = {}
        for pos, v in enumerate(order):
            c = r.class_of[s.index_of(v) if isinstance(v, VarId) else int(v)]
            rank.setdefault(c, pos)
    trace: list[dict] = []
    rounds = 0
    while True:
        rounds += 1
        sup, pt = _reduced_support(r, active)
        for i, ss in enumerate(r.strict_sums):
            if not ss & sup:
                trace.append({"event": "strict_sum_empty", "strict_sum": i,
                              "variables": [str(s.variables[v]) for v in _members(r, ss)]})
                return ComponentVerdict(s.component, False, trace, None, _expand_set(r, sup), rounds)
        violated: dict[int, frozenset[int]] = {}
        for cons, trigs in r.implications:
            if cons & sup:
                continue
            for t in trigs:
                if t in sup and t not in violated:
                    violated[t] = cons
        if not violated:
            wit = scale_to_integers(r.expand(pt))
            rep = check_assignment(s, wit)
            if not rep.ok:
                raise AssertionError(f"witness failed verification: {rep.violations[:3]}")
            return ComponentVerdict(s.component, True, trace, wit, _expand_set(r, sup), rounds)
        if rank is None:
            chosen = sorted(violated)
        else:
            chosen = [min(violated, key=lambda t: (rank.get(t, len(rank) + t), t))]
        for t in chosen:
            trace.append({
                "event": "pruned",
                "trigger": [str(s.variables[v]) for v in r.classes[t]],
                "consequent": [str(s.variables[v]) for v in _members(r, violated[t])],
            })
        active = sup - frozenset(chosen)


def _members(r: ReducedSystem, classes: Iterable[int]) -> list[int]:
    return sorted(v for c in classes for v in r.classes[c])


def _expand_set(r: ReducedSystem, classes: frozenset[int]) -> frozenset[int]:
    return frozenset(v for v, c in enumerate(r.class_of) if c in classes)


def prune_fixpoint(s: LinearSystem, order: Sequence[int | VarId] | None = None) -> ComponentVerdict:
    """Decide one component.

    With ``order=None`` every violated trigger of a round is removed at once;
    otherwise only the first violated trigger in ``order`` is removed per round.
    The final support does not depend on this choice.
    """
    return _fixpoint(reduce_system(s), order)


# -- whole decision -----------------------------------------------------------

@dataclass
class Verdict:
    feasible: bool
    components: list[ComponentVerdict]
    systems: tuple[LinearSystem, LinearSystem]

    @property
    def meaning(self) -> str:
        return "necessary_condition_passed" if self.feasible else "not_commensurable"

    @property
    def witness_component(self) -> ComponentVerdict | None:
        return next((c for c in self.components if c.feasible), None)

    def witness_map(self) -> dict[VarId, int] | None:
        c = self.witness_component
        if c is None:
            return None
        s = self.systems[c.component - 1]
        return dict(zip(s.variables, c.witness))

    def support_edges(self) -> list[tuple[int, int]]:
        """Oriented product edges whose M11 label is positive in the witness."""
        c = self.witness_component
        if c is None:
            return []
        s = self.systems[c.component - 1]
        edges = {s.variables[i].edge for i, x in enumerate(c.witness) if x > 0}
        return sorted(edges)

    def to_json(self) -> str:
        return json.dumps(verdict_report(self), indent=2, sort_keys=True) + "\n"


def decide(g1: Tree, g2: Tree) -> Verdict:
    """Run both components; feasible if either one is."""
    systems = build_full_system(g1, g2)
    comps = [prune_fixpoint(s) for s in systems]
    return Verdict(any(c.feasible for c in comps), comps, systems)


def _support_components(s: LinearSystem, edges: Sequence[int]) -> int:
    p = s.product
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for e in edges:
        a, b = find(p.edges[e].source), find(p.edges[e].target)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return len({find(v) for v in parent})


def verdict_report(v: Verdict) -> dict:
    comps = []
    for c in v.components:
        s = v.systems[c.component - 1]
        comps.append({
            "component": c.component,
            "verdict": "feasible" if c.feasible else "infeasible",
            "variables": s.n_vars,
            "rounds": c.rounds,
            "support_size": len(c.support),
            "trace": c.trace,
        })
    out = {
        "verdict": "feasible" if v.feasible else "infeasible",
        "meaning": v.meaning,
        "pair": {"left_spec": v.systems[0].pair[0], "right_spec": v.systems[0].pair[1]},
        "components": comps,
        "witness": {},
        "support_edges": [],
    }
    wc = v.witness_component
    if wc is not None:
        s = v.systems[wc.component - 1]
        out["witness_component"] = wc.component
        out["witness"] = {str(var): x for var, x in zip(s.variables, wc.witness) if x}
        p = s.product
        edges = v.support_edges()
        if p is not None:
            out["support_edges"] = [
                [[p.left.name(p.vertices[p.edges[e].source][0]), p.right.name(p.vertices[p.edges[e].source][1])],
                 [p.left.name(p.vertices[p.edges[e].target][0]), p.right.name(p.vertices[p.edges[e].target][1])]]
                for e in edges
            ]
            out["support_connected_pieces"] = _support_components(s, edges)
    return out


# -- brute-force oracle -------------------------------------------------------

def brute_force_feasible(s: LinearSystem, bound: int) -> ComponentVerdict:
    """Exhaustive search over reduced variables with values in ``0..bound``."""
    r = reduce_system(s)
    n = r.n
    if (bound + 1) ** n > BRUTE_FORCE_GUARD:
        raise BruteForceGuardExceeded(f"{bound + 1}^{n} assignments exceed the guard {BRUTE_FORCE_GUARD}")

    rows = [dict(row) for row in r.rows]
    rows_of: list[list[int]] = [[] for _ in range(n)]
    for i, row in enumerate(rows):
        for v in row:
            rows_of[v].append(i)
    # bounds on the still-unassigned part of each row, indexed by depth
    rest_min = [[0] * (n + 1) for _ in rows]
    rest_max = [[0] * (n + 1) for _ in rows]
    for i, row in enumerate(rows):
        for depth in range(n - 1, -1, -1):
            c = row.get(depth, 0)
            rest_min[i][depth] = rest_min[i][depth + 1] + min(0, c * bound)
            rest_max[i][depth] = rest_max[i][depth + 1] + max(0, c * bound)
    strict_last = [[] for _ in range(n)]
    for ss in r.strict_sums:
        strict_last[max(ss)].append(ss)
    imp_last: list[list[tuple[int, frozenset[int]]]] = [[] for _ in range(n)]
    for cons, trigs in r.implications:
        for t in trigs:
            imp_last[max(cons | {t})].append((t, cons))

    x = [0] * n
    partial = [0] * len(rows)

    def ok_at(d: int) -> bool:
        for i in rows_of[d]:
            lo = partial[i] + rest_min[i][d + 1]
            hi = partial[i] + rest_max[i][d + 1]
            if lo > 0 or hi < 0:
                return False
        for ss in strict_last[d]:
            if not any(x[v] for v in ss):
                return False
        for t, cons in imp_last[d]:
            if x[t] and not any(x[v] for v in cons):
                return False
        return True

    def dfs(d: int) -> bool:
        if d == n:
            return True
        for val in range(bound + 1):
            x[d] = val
            for i in rows_of[d]:
                partial[i] += rows[i][d] * val
            good = ok_at(d) and dfs(d + 1)
            if good:
                return True
            for i in rows_of[d]:
                partial[i] -= rows[i][d] * val
        x[d] = 0
        return False

    if dfs(0):
        wit = tuple(r.expand(x))
        if not check_assignment(s, wit).ok:
            raise AssertionError("brute-force solution failed verification")
        sup = frozenset(i for i, v in enumerate(wit) if v)
        return ComponentVerdict(s.component, True, [], wit, sup)
    return ComponentVerdict(s.component, False, [{"event": "exhausted", "bound": bound}])
