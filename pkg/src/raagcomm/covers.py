"""Finite covers of bouquets of circles (Schreier graphs of free-group subgroups).

Two deterministic constructions are provided:

``build_cover_S(k)``
    degree ``k(k+1)`` cover over ``{a1, e1}``.  Vertex ``p(i, t)`` (the t-th
    vertex of the i-th ``a1``-cycle) has id ``(i-1)(k+1) + t``; the basepoint is 0.
``build_cover_Z(k)``
    degree ``k(k+1)`` cover over ``{C1..Ck, C1'..Ck'}`` built around a master
    cycle ``v -> v+1 (mod k(k+1))``.  Loops for the middle letters go to the
    lowest free non-basepoint vertices; every long cycle runs along the master
    cycle and skips the vertices that carry a loop of that letter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class CoverGraph:
    vertex_count: int
    basepoint: int
    alphabet: tuple[str, ...]
    perms: dict[str, tuple[int, ...]]
    kind: str | None = field(default=None, compare=False)
    k: int | None = field(default=None, compare=False)
    flags: tuple[str, ...] = field(default=(), compare=False)

    def step(self, letter: str, v: int, power: int = 1) -> int:
        self._check_letter(letter)
        p = self.perms[letter]
        if power < 0:
            inv = [0] * self.vertex_count
            for a, b in enumerate(p):
                inv[b] = a
            p, power = tuple(inv), -power
        for _ in range(power):
            v = p[v]
        return v

    def read(self, word: Iterable[tuple[str, int]], start: int | None = None) -> int:
        v = self.basepoint if start is None else start
        for letter, e in word:
            v = self.step(letter, v, e)
        return v

    def _check_letter(self, letter: str) -> None:
        if letter not in self.perms:
            raise CoverError(f"unknown letter {letter!r}; alphabet is {list(self.alphabet)}")

    def orbit(self, letter: str, v: int) -> list[int]:
        self._check_letter(letter)
        out = [v]
        w = self.perms[letter][v]
        while w != v:
            out.append(w)
            w = self.perms[letter][w]
            if len(out) > self.vertex_count:
                raise CoverError(f"letter {letter!r} is not a permutation")
        return out

    def cycles(self, letter: str) -> list[list[int]]:
        seen: set[int] = set()
        out = []
        for v in range(self.vertex_count):
            if v not in seen:
                c = self.orbit(letter, v)
                seen.update(c)
                out.append(c)
        return out

    def census(self, letter: str) -> dict[int, int]:
        """cycle length -> number of cycles."""
        out: dict[int, int] = {}
        for c in self.cycles(letter):
            out[len(c)] = out.get(len(c), 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> str:
        doc = {
            "vertices": self.vertex_count,
            "basepoint": self.basepoint,
            "alphabet": list(self.alphabet),
            "perms": {a: list(self.perms[a]) for a in self.alphabet},
        }
        return json.dumps(doc, indent=2) + "\n"

    def to_dot(self) -> str:
        palette = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"]
        lines = ["digraph cover {", f'  {self.basepoint} [shape=doublecircle];']
        for n, a in enumerate(self.alphabet):
            col = palette[n % len(palette)]
            for v, w in enumerate(self.perms[a]):
                lines.append(f'  {v} -> {w} [label="{a}", color={col}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def cover_from_json(text: str) -> CoverGraph:
    doc = json.loads(text)
    extra = set(doc) - {"vertices", "basepoint", "alphabet", "perms"}
    if extra:
        raise CoverError(f"unknown fields {sorted(extra)}")
    perms = {a: tuple(doc["perms"][a]) for a in doc["alphabet"]}
    return CoverGraph(doc["vertices"], doc["basepoint"], tuple(doc["alphabet"]), perms)


def cycle_length(c: CoverGraph, letter: str, vertex: int) -> int:
    return len(c.orbit(letter, vertex))


def label_subgraph_components(c: CoverGraph, letters: Iterable[str]) -> list[list[int]]:
    """Components of the subgraph spanned by ``letters``, sorted by least vertex."""
    letters = list(letters)
    for a in letters:
        c._check_letter(a)
    parent = list(range(c.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in letters:
        for v, w in enumerate(c.perms[a]):
            x, y = find(v), find(w)
            if x != y:
                parent[max(x, y)] = min(x, y)
    groups: dict[int, list[int]] = {}
    for v in range(c.vertex_count):
        groups.setdefault(find(v), []).append(v)
    return [groups[r] for r in sorted(groups)]


def _perm_from_cycles(n: int, cycles: Sequence[Sequence[int]]) -> tuple[int, ...]:
    p = [-1] * n
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            if p[a] != -1:
                raise CoverError(f"vertex {a} appears in two cycles")
            p[a] = b
    for v in range(n):
        if p[v] == -1:
            p[v] = v
    return tuple(p)


# -- the cover S -----------------------------------------------------------------

def s_vertex(k: int, i: int, t: int) -> int:
    return (i - 1) * (k + 1) + (t % (k + 1))


def _q_cycle(k: int, i: int) -> list[int]:
    """e1-order of Q_i: i vertices of P_i (reversed), then k-i of P_{i+1}."""
    if i == 1:
        head = [s_vertex(k, 1, 0)]
    else:
        head = [s_vertex(k, i, t) for t in range(i, 0, -1)]
    tail = [s_vertex(k, i + 1, 0)] + [s_vertex(k, i + 1, t) for t in range(k, i + 1, -1)]
    return head + tail


def build_cover_S(k: int) -> CoverGraph:
    if k < 1:
        raise CoverError("k must be at least 1")
    n = k * (k + 1)
    a_cycles = [[s_vertex(k, i, t) for t in range(k + 1)] for i in range(1, k + 1)]
    a1 = _perm_from_cycles(n, a_cycles)
    e1 = _perm_from_cycles(n, [_q_cycle(k, i) for i in range(1, k)])
    flags: tuple[str, ...] = ()
    if k == 1:
        flags = ("k=1: no e1-cycles; e1-loop placed at the basepoint as well",)
    return CoverGraph(n, 0, ("a1", "e1"), {"a1": a1, "e1": e1}, "S", k, flags)


# -- the cover Z -----------------------------------------------------------------

@dataclass(frozen=True)
class AlphaBeta:
    """Distances along long cycles from the basepoint to loop vertices.

    Keys are ``(i, j)``; ``alpha[(i, 0)] = beta[(i, 0)] = 0`` for ``2 <= i <= k-1``.
    """

    alpha: dict[tuple[int, int], int]
    beta: dict[tuple[int, int], int]
    alpha_p: dict[tuple[int, int], int]
    beta_p: dict[tuple[int, int], int]

    def to_dict(self) -> dict:
        def enc(d: dict[tuple[int, int], int]) -> dict[str, int]:
            return {f"{i},{j}": v for (i, j), v in sorted(d.items())}
        return {"alpha": enc(self.alpha), "beta": enc(self.beta),
                "alpha_prime": enc(self.alpha_p), "beta_prime": enc(self.beta_p)}


def z_letters(k: int) -> tuple[str, ...]:
    return tuple(f"C{i}" for i in range(1, k + 1)) + tuple(f"C{i}'" for i in range(1, k + 1))


def z_loop_counts(k: int) -> dict[str, int]:
    """Number of loops for each letter (zero for C1, Ck, C1', Ck')."""
    out = {a: 0 for a in z_letters(k)}
    for i in range(2, k):
        out[f"C{i}"] = k - i
        out[f"C{i}'"] = i - 1
    return out


def _distance_along(c: CoverGraph, letter: str, target: int) -> int:
    orb = c.orbit(letter, c.basepoint)
    if target not in orb:
        raise CoverError(f"vertex {target} is not on the {letter}-cycle through the basepoint")
    return orb.index(target)


def build_cover_Z(k: int) -> tuple[CoverGraph, AlphaBeta]:
    if k < 1:
        raise CoverError("k must be at least 1")
    n = k * (k + 1)
    master = list(range(n))
    residues = [list(range(r, n, k)) for r in range(k)]

    loops: dict[str, list[int]] = {}
    taken: set[int] = set()
    nxt = 1
    for i in range(2, k):
        for letter, count in ((f"C{i}", k - i), (f"C{i}'", i - 1)):
            got = []
            for _ in range(count):
                while nxt in taken:
                    nxt += 1
                got.append(nxt)
                taken.add(nxt)
            loops[letter] = got

    perms: dict[str, tuple[int, ...]] = {}
    for letter in z_letters(k):
        if letter in (f"C{k}", "C1'"):
            perms[letter] = _perm_from_cycles(n, [master])
        elif letter in ("C1", f"C{k}'"):
            perms[letter] = _perm_from_cycles(n, residues)
        else:
            skip = set(loops[letter])
            perms[letter] = _perm_from_cycles(n, [[v for v in master if v not in skip]])
    if k == 1:
        perms = {"C1": _perm_from_cycles(n, [master]), "C1'": _perm_from_cycles(n, [master])}
    cover = CoverGraph(n, 0, z_letters(k), perms, "Z", k)

    alpha: dict[tuple[int, int], int] = {}
    beta: dict[tuple[int, int], int] = {}
    alpha_p: dict[tuple[int, int], int] = {}
    beta_p: dict[tuple[int, int], int] = {}
    for i in range(2, k):
        alpha[(i, 0)] = 0
        beta[(i, 0)] = 0
        d = sorted(_distance_along(cover, f"C{i - 1}'", v) for v in loops[f"C{i}"])
        alpha.update({(i, j): x for j, x in enumerate(d, 1)})
        d = sorted(_distance_along(cover, f"C{i}", v) for v in loops[f"C{i}'"])
        beta.update({(i, j): x for j, x in enumerate(d, 1)})
        d = sorted(_distance_along(cover, f"C{i}'", v) for v in loops[f"C{i}"])
        beta_p.update({(i, j): x for j, x in enumerate(d, 1)})
    for i in range(2, k + 1):
        prev = loops.get(f"C{i - 1}'", [])
        d = sorted(_distance_along(cover, f"C{i}", v) for v in prev)
        alpha_p.update({(i, j): x for j, x in enumerate(d, 1)})
    return cover, AlphaBeta(alpha, beta, alpha_p, beta_p)


# -- validation ------------------------------------------------------------------

@dataclass
class CoverReport:
    kind: str | None
    k: int | None
    vertex_count: int
    censuses: dict[str, dict[int, int]]
    violations: list[str] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "vertices": self.vertex_count,
            "pass": self.ok,
            "censuses": {a: {str(L): m for L, m in c.items()} for a, c in self.censuses.items()},
            "violations": list(self.violations),
            "flags": list(self.flags),
        }


def _basic_checks(c: CoverGraph, bad: list[str]) -> bool:
    ok = True
    if set(c.perms) != set(c.alphabet):
        bad.append("alphabet and permutation keys differ")
        return False
    for a in c.alphabet:
        p = c.perms[a]
        if len(p) != c.vertex_count or sorted(p) != list(range(c.vertex_count)):
            bad.append(f"letter {a}: map is not a bijection of the vertex set")
            ok = False
    if not 0 <= c.basepoint < c.vertex_count:
        bad.append("basepoint out of range")
        ok = False
    if ok and len(label_subgraph_components(c, c.alphabet)) != 1:
        bad.append("underlying graph is not connected")
    return ok


def _arc(c: CoverGraph, letter: str, common: set[int]) -> list[int] | None:
    """The shared vertices in the order the letter visits them, if they form one arc."""
    starts = [v for v in common if c.step(letter, v, -1) not in common]
    if len(starts) != 1:
        return None
    out = [starts[0]]
    while len(out) < len(common):
        out.append(c.perms[letter][out[-1]])
    return out if set(out) == common else None


def _opposite_order(c: CoverGraph, x: str, cx: list[int], y: str, cy: list[int], size: int,
                    what: str, bad: list[str]) -> None:
    common = set(cx) & set(cy)
    if len(common) != size:
        bad.append(f"{what}: overlap has {len(common)} vertices, expected {size}")
        return
    if size <= 1:
        return
    ox, oy = _arc(c, x, common), _arc(c, y, common)
    if ox is None or oy is None:
        bad.append(f"{what}: shared vertices are not consecutive")
    elif ox != oy[::-1]:
        bad.append(f"{what}: shared vertices do not appear in opposite orders")


def _check_S(c: CoverGraph, bad: list[str]) -> None:
    k = c.k
    n = k * (k + 1)
    if c.vertex_count != n:
        bad.append(f"S: {c.vertex_count} vertices, expected {n}")
        return
    want_a = {k + 1: k}
    if c.census("a1") != want_a:
        bad.append(f"S: a1 census {c.census('a1')}, expected {want_a}")
    want_e = {1: 2} if k == 1 else ({1: 2 * k, k: k - 1} if k > 1 else {})
    if c.census("e1") != want_e:
        bad.append(f"S: e1 census {c.census('e1')}, expected {want_e}")
    if k == 1 or bad:
        return
    loops = {v for v in range(n) if c.perms["e1"][v] == v}
    if c.basepoint in loops:
        bad.append("S: e1-loop at the basepoint")
    p_cycles = []
    q_cycles = []
    p = c.orbit("a1", c.basepoint)
    p_cycles.append(p)
    for i in range(1, k):
        prev_q = q_cycles[-1] if q_cycles else []
        cand = [cyc for cyc in c.cycles("e1") if len(cyc) > 1 and set(cyc) & set(p_cycles[-1])
                and set(cyc) != set(prev_q)]
        if len(cand) != 1:
            bad.append(f"S: cannot identify Q_{i}")
            return
        q_cycles.append(cand[0])
        nxt = [cyc for cyc in c.cycles("a1") if set(cyc) & set(cand[0]) and set(cyc) != set(p_cycles[-1])]
        if len(nxt) != 1:
            bad.append(f"S: cannot identify P_{i + 1}")
            return
        p_cycles.append(nxt[0])
    for i in range(1, k):
        size_pq = 1 if i == 1 else i
        _opposite_order(c, "a1", p_cycles[i - 1], "e1", q_cycles[i - 1], size_pq, f"P_{i} and Q_{i}", bad)
        _opposite_order(c, "a1", p_cycles[i], "e1", q_cycles[i - 1], k - i, f"P_{i + 1} and Q_{i}", bad)
    for j, pc in enumerate(p_cycles, 1):
        for i, qc in enumerate(q_cycles, 1):
            if j not in (i, i + 1) and set(pc) & set(qc):
                bad.append(f"S: P_{j} and Q_{i} share vertices")
    want_loops = (set(p_cycles[0]) - {c.basepoint}) | (set(p_cycles[-1]) - set(q_cycles[-1]))
    if loops != want_loops:
        bad.append("S: e1-loops are not exactly at the non-shared vertices of P_1 and P_k")


def _check_Z(c: CoverGraph, bad: list[str]) -> None:
    k = c.k
    n = k * (k + 1)
    if c.vertex_count != n:
        bad.append(f"Z: {c.vertex_count} vertices, expected {n}")
        return
    if tuple(c.alphabet) != z_letters(k):
        bad.append("Z: alphabet is not C1..Ck, C1'..Ck'")
        return
    want: dict[str, dict[int, int]] = {}
    for i in range(1, k + 1):
        a, ap = f"C{i}", f"C{i}'"
        if k == 1:
            want[a] = {2: 1}
            want[ap] = {2: 1}
            continue
        if i == 1:
            want[a] = {k + 1: k}
        elif i == k:
            want[a] = {n: 1}
        else:
            want[a] = {1: k - i, n - (k - i): 1}
        if i == k:
            want[ap] = {k + 1: k}
        elif i == 1:
            want[ap] = {n: 1}
        else:
            want[ap] = {1: i - 1, n - (i - 1): 1}
    for a, w in want.items():
        got = c.census(a)
        if got != dict(sorted(w.items())):
            bad.append(f"Z: {a} census {got}, expected {w}")
    loop_count = [0] * n
    for a in c.alphabet:
        for v, w in enumerate(c.perms[a]):
            if v == w:
                loop_count[v] += 1
    if loop_count[c.basepoint]:
        bad.append("Z: loop at the basepoint")
    if max(loop_count) > 1:
        bad.append("Z: some vertex carries more than one loop")
    for i in range(1, k + 1):
        if len(label_subgraph_components(c, [f"C{i}", f"C{i}'"])) != 1:
            bad.append(f"Z: C{i}, C{i}' subgraph is disconnected")
        if i >= 2 and len(label_subgraph_components(c, [f"C{i - 1}'", f"C{i}"])) != 1:
            bad.append(f"Z: C{i - 1}', C{i} subgraph is disconnected")
    # reading C1'^j (resp. Ck^j) lands on pairwise different C1- (resp. Ck'-) cycles
    for walk, cyc_letter in (("C1'", "C1"), (f"C{k}", f"C{k}'")):
        ids = {}
        for n_c, cyc in enumerate(c.cycles(cyc_letter)):
            for v in cyc:
                ids[v] = n_c
        hit = [ids[c.step(walk, c.basepoint, j)] for j in range(k)]
        if len(set(hit)) != k:
            bad.append(f"Z: {walk}^j, j<k, do not meet {k} distinct {cyc_letter}-cycles")


def validate_cover(c: CoverGraph) -> CoverReport:
    bad: list[str] = []
    ok = _basic_checks(c, bad)
    censuses = {a: c.census(a) for a in c.alphabet} if ok else {}
    if ok and c.kind == "S":
        _check_S(c, bad)
    elif ok and c.kind == "Z":
        _check_Z(c, bad)
    return CoverReport(c.kind, c.k, c.vertex_count, censuses, bad, list(c.flags))
