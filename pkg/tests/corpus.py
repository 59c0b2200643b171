"""Shared instance lists and generators for the test-suite."""

from __future__ import annotations

import random

from raagcomm.system import LABELS, Implication, LinearSystem, VarId

P3_PAIRS = [("path:3", f"path:{m}") for m in range(5, 11)]
PATH_PAIRS = [(f"path:{n}", f"path:{m}") for n in range(5, 11) for m in range(n + 1, 11)]
DIAM4_CODES = ["(1,1),(2,1)", "(1,1),(3,1)", "(1,1),(2,1),(3,1)"]
PATH_DIAM4_PAIRS = [(f"path:{m}", f"t4:{c};0") for m in (5, 7, 8, 9) for c in DIAM4_CODES]
COMMENSURABLE_PAIRS = [(f"path:{4 * k + 2}", f"tkk:{k}") for k in (1, 2, 3)]
DIAGONAL_TREES = [
    "path:3", "path:4", "path:5", "path:6", "path:8",
    "tkk:1", "tkk:2", "tkk:3",
    "t4:(1,1),(2,1);0", "t4:(1,1),(2,1),(3,1);0", "t4:(2,2);0",
    "adj:0 1 0 2 0 3 1 4 1 5",              # double star
    "adj:0 1 1 2 2 3 0 4 4 5 0 6 6 7",      # spider with three legs
]
DIAGONAL_PAIRS = [(t, t) for t in DIAGONAL_TREES]
ALL_PAIRS = P3_PAIRS + PATH_PAIRS + PATH_DIAM4_PAIRS + COMMENSURABLE_PAIRS + DIAGONAL_PAIRS


def random_system(rng: random.Random) -> LinearSystem:
    """A small homogeneous system with strict sums and implications."""
    n_edges = rng.randint(1, 3)
    variables = tuple(VarId(e, k, l) for e in range(n_edges) for k, l in LABELS)
    n = len(variables)
    rows = []
    for _ in range(rng.randint(1, n - 1)):
        vs = rng.sample(range(n), rng.randint(2, 3))
        coeffs = [rng.choice((1, 2)) for _ in vs]
        coeffs[0] = -coeffs[0]
        if len(vs) == 3 and rng.random() < 0.5:
            coeffs[1] = -coeffs[1]
        rows.append(tuple(sorted(zip(vs, coeffs))))
    stricts = tuple(tuple(sorted(rng.sample(range(n), rng.randint(1, 3)))) for _ in range(rng.randint(1, 3)))
    imps = []
    for _ in range(rng.randint(0, 3)):
        t = rng.randrange(n)
        cons = tuple(sorted(rng.sample([v for v in range(n) if v != t], rng.randint(1, 2))))
        imps.append(Implication(t, cons))
    return LinearSystem(variables, tuple(rows), stricts, tuple(imps), 1)


def random_systems(count: int = 100, seed: int = 20240607) -> list[LinearSystem]:
    rng = random.Random(seed)
    return [random_system(rng) for _ in range(count)]
