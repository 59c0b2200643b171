from __future__ import annotations

import json

import numpy as np
import pytest

from raagcomm.system import (LinearSystemError, VarId, build_full_system, chain_values, check_assignment,
                             emit_json, parse_json, r_labels)
from raagcomm.trees import parse_tree_spec, path_tree, reduce, tkk_tree


def _dense(s, rows=None):
    rows = s.equalities if rows is None else rows
    a = np.zeros((len(rows), s.n_vars))
    for i, row in enumerate(rows):
        for v, c in row:
            a[i, v] += c
    return a


def _only_edge_at(s, vertex):
    p = s.product
    out = [e for e in p.out_edges[vertex] if p.edge_component[e] == s.component]
    assert len(out) == 1
    return out[0]


def _has_row(s, terms):
    target = tuple(sorted(terms.items()))
    neg = tuple(sorted((v, -c) for v, c in terms.items()))
    return target in s.equalities or neg in s.equalities


def test_corner_vertex_row_p3_pm():
    for m in (5, 7):
        s1, _ = build_full_system(path_tree(3), path_tree(m))
        p = s1.product
        e = _only_edge_at(s1, p.index(0, 0))
        ix = s1.index_of
        assert _has_row(s1, {ix(VarId(e, 1, 1)): 1, ix(VarId(e, 1, 2)): -1})
        assert _has_row(s1, {ix(VarId(e, 2, 1)): 1, ix(VarId(e, 2, 2)): -1})


def test_pivot_ratio_row_diam4():
    g2 = parse_tree_spec("t4:(1,1),(3,1);0")
    r2 = reduce(g2)
    for s in build_full_system(path_tree(7), g2):
        p = s.product
        for j in range(r2.tree.vertex_count):
            name = r2.tree.name(j)
            if not name.startswith("b"):
                continue
            mj = g2.degree(r2.to_old[j]) - 1
            v = p.index(0, j)
            if p.vertex_component[v] != s.component:
                continue
            e = _only_edge_at(s, v)
            ix = s.index_of
            assert _has_row(s, {ix(VarId(e, 1, 1)): 1, ix(VarId(e, 1, 2)): -mj})


def test_p3_p3_counts():
    s1, s2 = build_full_system(path_tree(3), path_tree(3))
    for s in (s1, s2):
        assert s.n_vars == 8
        ee = [r for r in s.equalities if len(r) == 2 and sorted(c for _, c in r) == [-1, 1]
              and len({s.variables[v].edge for v, _ in r}) == 2]
        assert len(ee) == 4
        assert s.n_vars - np.linalg.matrix_rank(_dense(s, ee)) == 4
        # every row together leaves only the all-ones direction
        a = _dense(s)
        assert s.n_vars - np.linalg.matrix_rank(a) == 1
        assert not (a @ np.ones(s.n_vars)).any()


@pytest.mark.parametrize("g1,g2,e1,e2", [("path:5", "path:6", 3, 4), ("path:6", "tkk:1", 4, 2)])
def test_full_system_sizes(g1, g2, e1, e2):
    systems = build_full_system(parse_tree_spec(g1), parse_tree_spec(g2))
    for s in systems:
        assert s.n_vars == 4 * 2 * e1 * e2
        assert len(s.strict_sums) == 4 * (e1 + e2)


def test_small_diameter_rejected():
    with pytest.raises(LinearSystemError):
        build_full_system(path_tree(2), path_tree(5))


def test_zero_assignment():
    s, _ = build_full_system(path_tree(5), path_tree(6))
    rep = check_assignment(s, [0] * s.n_vars)
    assert not any(v.startswith("equality") for v in rep.violations)
    assert sum(v.startswith("strict sum") for v in rep.violations) == len(s.strict_sums)


def _diagonal_ones(s):
    p = s.product
    diag = lambda v: p.vertices[v][0] == p.vertices[v][1]  # noqa: E731
    return [1 if diag(p.edges[v.edge].source) and diag(p.edges[v.edge].target) else 0 for v in s.variables]


@pytest.mark.parametrize("spec", ["path:3", "path:6", "tkk:2", "t4:(1,2),(2,1);1"])
def test_diagonal_all_ones(spec):
    g = parse_tree_spec(spec)
    s1, _ = build_full_system(g, g)
    x = _diagonal_ones(s1)
    assert check_assignment(s1, x).ok
    assert check_assignment(s1, [2 * v for v in x]).ok
    labels = r_labels(s1, x)
    p = s1.product
    red = reduce(g)
    for w, (a, b) in labels.items():
        i, j = p.vertices[w]
        # each directional sum is D(w) times a single label equal to 1
        d = g.degree(red.to_old[i]) - 1
        assert (a, b) == ((d, d) if i == j else (0, 0))


def test_assignment_length_mismatch():
    s, _ = build_full_system(path_tree(3), path_tree(3))
    with pytest.raises(LinearSystemError):
        check_assignment(s, [1, 2])
    with pytest.raises(LinearSystemError):
        check_assignment(s, {s.variables[0]: 1})


def test_json_round_trip():
    s, _ = build_full_system(tkk_tree(1), path_tree(6))
    text = emit_json(s)
    back = parse_json(text)
    assert back == s
    assert emit_json(back) == text


def test_hand_written_one_edge_fixture():
    # one product edge e0 and its inverse e1, the EE rows only
    doc = {
        "pair": {"left_spec": "path:3", "right_spec": "path:3"},
        "component": 1,
        "variables": [{"edge": e, "k": k, "l": l} for e in (0, 1) for k in (1, 2) for l in (1, 2)],
        "equalities": [[[0, 1], [4, -1]], [[1, 1], [6, -1]], [[2, 1], [5, -1]], [[3, 1], [7, -1]]],
        "strict_sums": [[0, 4], [1, 5], [2, 6], [3, 7]],
        "implications": [{"trigger": 0, "consequent": [4]}],
    }
    s = parse_json(json.dumps(doc))
    assert s.n_vars == 8
    assert check_assignment(s, [1] * 8).ok


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(extra=1),
    lambda d: d.pop("strict_sums"),
    lambda d: d["variables"][0].update(k=3),
    lambda d: d["equalities"].append([[99, 1]]),
    lambda d: d["equalities"].append([[0, 1.5]]),
    lambda d: d.update(component=3),
])
def test_parse_rejects_bad_documents(mutate):
    s, _ = build_full_system(path_tree(3), path_tree(3))
    doc = json.loads(emit_json(s))
    mutate(doc)
    with pytest.raises(LinearSystemError):
        parse_json(json.dumps(doc))


def test_parse_rejects_malformed_text():
    with pytest.raises(LinearSystemError):
        parse_json("{not json")


def test_chain_values_need_metadata():
    s, _ = build_full_system(path_tree(3), path_tree(3))
    assert chain_values(s, [1] * 8)
    with pytest.raises(LinearSystemError):
        chain_values(parse_json(emit_json(s)), [1] * 8)
