"""Exact rational feasibility for ``A x = 0`` with simple bounds.

The main routine is a phase-one simplex on a fraction-free integer tableau:
every entry is an integer and the true tableau is ``T / d`` where ``d`` is the
last pivot element.  Pivots use Bland's rule, so the method terminates.  The
tableau lives in an ``int64`` numpy array and falls back to Python integers
(``dtype=object``) once entries grow past 2**31.

Every answer is verified in exact arithmetic before it is returned: feasible
points by substitution, infeasibility by a Farkas certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

Row = tuple[tuple[int, int], ...]

_SAFE = 1 << 31


class LPError(ArithmeticError):
    """Internal consistency failure (a result did not verify)."""


class OracleGuardExceeded(ValueError):
    """The Fourier-Motzkin oracle refuses problems above its size guard."""


@dataclass(frozen=True)
class LPProblem:
    """Homogeneous equalities over ``n`` variables plus bounds.

    ``rows`` are sparse integer rows ``((var, coeff), ...)`` with rhs 0.
    ``lower[j]`` is 0 or 1.  ``upper`` (optional) marks variables bounded by 1.
    """

    n: int
    rows: tuple[Row, ...]
    lower: tuple[int, ...]
    upper: tuple[bool, ...] | None = None

    def __post_init__(self):
        if len(self.lower) != self.n:
            raise ValueError("lower bounds must cover every variable")
        if any(b not in (0, 1) for b in self.lower):
            raise ValueError("lower bounds must be 0 or 1")
        if self.upper is not None and len(self.upper) != self.n:
            raise ValueError("upper flags must cover every variable")
        for row in self.rows:
            for v, _ in row:
                if not 0 <= v < self.n:
                    raise ValueError(f"row references variable {v} outside 0..{self.n - 1}")

    def dense(self) -> list[list[int]]:
        a = [[0] * self.n for _ in self.rows]
        for i, row in enumerate(self.rows):
            for v, c in row:
                a[i][v] += int(c)
        return a


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    point: tuple[Fraction, ...] | None = None
    # Farkas data for infeasible problems without upper bounds: g = -y^T A is
    # nonnegative, and positive on at least one variable with lower bound 1.
    # Every nonnegative solution of A x = 0 vanishes wherever g > 0.
    certificate: tuple[int, ...] | None = None
    pivots: int = 0


def _verify_point(p: LPProblem, x: Sequence[Fraction]) -> bool:
    for row in p.rows:
        if sum(c * x[v] for v, c in row) != 0:
            return False
    for j in range(p.n):
        if x[j] < p.lower[j]:
            return False
        if p.upper is not None and p.upper[j] and x[j] > 1:
            return False
    return True


def _pivot(T: np.ndarray, r: int, c: int, d):
    piv = T[r, c]
    if T.dtype != object and int(np.abs(T).max()) >= _SAFE:
        T = T.astype(object)
    col = T[:, c].copy()
    row = T[r].copy()
    nz = np.nonzero(col)[0]
    nz = nz[nz != r]
    # Bareiss keeps every entry a minor, so piv * T // d is exact on rows the
    # elimination does not touch
    sub = (piv * T[nz] - np.outer(col[nz], row)) // d
    T = (piv * T) // d
    T[nz] = sub
    T[r] = row
    return T, piv


def lp_feasible(p: LPProblem) -> LPResult:
    """Exact phase-one simplex with Bland's rule."""
    A = p.dense()
    m, n = len(A), p.n
    lower = list(p.lower)
    b = [-sum(A[i][j] * lower[j] for j in range(n)) for i in range(m)]

    ub_vars = [j for j in range(n) if p.upper is not None and p.upper[j]]
    # structural columns: x' (n), upper-bound slacks; rows: equalities, bound rows
    n_struct = n + len(ub_vars)
    rows: list[list[int]] = []
    rhs: list[int] = []
    for i in range(m):
        rows.append(A[i] + [0] * len(ub_vars))
        rhs.append(b[i])
    for s, j in enumerate(ub_vars):
        r = [0] * n_struct
        r[j] = 1
        r[n + s] = 1
        rows.append(r)
        rhs.append(1 - lower[j])
    M = len(rows)
    sigma = [1] * M
    for i in range(M):
        if rhs[i] < 0:
            sigma[i] = -1
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    width = n_struct + M + 1
    T = np.zeros((M + 1, width), dtype=np.int64)
    if M:
        T[:M, :n_struct] = np.array(rows, dtype=np.int64).reshape(M, n_struct)
    T[:M, n_struct:n_struct + M] = np.eye(M, dtype=np.int64)
    T[:M, -1] = rhs
    T[M, :n_struct] = -T[:M, :n_struct].sum(axis=0)
    T[M, -1] = -sum(rhs)
    basis = list(range(n_struct, n_struct + M))
    d = 1
    pivots = 0

    while True:
        obj = T[M, :n_struct]
        neg = np.nonzero(obj < 0)[0]
        if len(neg) == 0:
            break
        c = int(neg[0])
        colv = T[:M, c]
        best = -1
        for i in np.nonzero(colv > 0)[0]:
            i = int(i)
            if best < 0:
                best = i
                continue
            # compare rhs_i / a_i with rhs_best / a_best
            lhs = int(T[i, -1]) * int(T[best, c])
            rhs_ = int(T[best, -1]) * int(T[i, c])
            if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[best]):
                best = i
        if best < 0:
            raise LPError("phase-one objective is bounded below; unbounded ray is impossible")
        T, d = _pivot(T, best, c, d)
        basis[best] = c
        pivots += 1

    if T[M, -1] == 0:
        xp = [Fraction(0)] * n_struct
        for i, bv in enumerate(basis):
            if bv < n_struct:
                xp[bv] = Fraction(int(T[i, -1]), int(d))
        x = tuple(Fraction(lower[j]) + xp[j] for j in range(n))
        if not _verify_point(p, x):
            raise LPError("simplex returned a point that does not satisfy the problem")
        return LPResult(True, x, None, pivots)

    cert = None
    if not ub_vars:
        # y_i = 1 - r(art_i); clear the denominator d, undo row flips
        y = [sigma[i] * (int(d) - int(T[M, n_struct + i])) for i in range(m)]
        g = [-sum(y[i] * A[i][j] for i in range(m)) for j in range(n)]
        if any(v < 0 for v in g) or sum(g[j] * lower[j] for j in range(n)) <= 0:
            raise LPError("Farkas certificate failed verification")
        cg = 0
        for v in g:
            cg = gcd(cg, v)
        cert = tuple(v // cg for v in g) if cg else tuple(g)
    return LPResult(False, None, cert, pivots)


# -- Fourier-Motzkin oracle ----------------------------------------------------

FM_GUARD = 24


def _normalize(coeffs: Sequence[Fraction], rhs: Fraction) -> tuple[tuple[int, ...], int]:
    den = 1
    for v in itertools.chain(coeffs, (rhs,)):
        den = lcm(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in coeffs]
    r = int(Fraction(rhs) * den)
    g = 0
    for v in itertools.chain(ints, (r,)):
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
        r //= g
    return tuple(ints), r


def fm_feasible(p: LPProblem) -> LPResult:
    """Decide feasibility by Gaussian elimination then Fourier-Motzkin (oracle only)."""
    if p.n > FM_GUARD:
        raise OracleGuardExceeded(f"{p.n} variables exceeds the Fourier-Motzkin guard of {FM_GUARD}")
    n = p.n
    eqs = [[Fraction(v) for v in r] for r in p.dense()]
    # inequalities a . x >= b
    ineq: list[tuple[list[Fraction], Fraction]] = []
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        ineq.append((e, Fraction(p.lower[j])))
        if p.upper is not None and p.upper[j]:
            ineq.append(([-v for v in e], Fraction(-1)))

    alive = set(range(n))
    while eqs:
        row = eqs.pop()
        piv = next((j for j in sorted(alive) if row[j] != 0), None)
        if piv is None:
            continue
        a = row[piv]

        def sub(r: list[Fraction]) -> list[Fraction]:
            f = r[piv] / a
            return [r[k] - f * row[k] for k in range(n)] if f else r

        eqs = [sub(r) for r in eqs]
        ineq = [(sub(c), b) for c, b in ineq]
        alive.discard(piv)

    cons = {_normalize(c, b) for c, b in ineq}
    for _ in range(len(alive)):
        if not alive:
            break
        def cost(j: int) -> int:
            pos = sum(1 for c, _ in cons if c[j] > 0)
            neg = sum(1 for c, _ in cons if c[j] < 0)
            return pos * neg - pos - neg
        j = min(sorted(alive), key=cost)
        pos = [(c, b) for c, b in cons if c[j] > 0]
        neg = [(c, b) for c, b in cons if c[j] < 0]
        new = {(c, b) for c, b in cons if c[j] == 0}
        for cp, bp in pos:
            for cn, bn in neg:
                fp, fn = -cn[j], cp[j]
                comb = [fp * x + fn * y for x, y in zip(cp, cn)]
                new.add(_normalize(comb, fp * bp + fn * bn))
        cons = new
        alive.discard(j)
    for c, b in cons:
        if all(v == 0 for v in c) and b > 0:
            return LPResult(False)
    return LPResult(True)


def scale_to_integers(x: Sequence[Fraction | int]) -> tuple[int, ...]:
    """Multiply a nonnegative rational point by the LCM of its denominators."""
    fr = [Fraction(v) for v in x]
    if any(v < 0 for v in fr):
        raise ValueError("scale_to_integers expects a nonnegative point")
    den = 1
    for v in fr:
        den = lcm(den, v.denominator)
    return tuple(int(v * den) for v in fr)
