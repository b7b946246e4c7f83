"""Dense exact-rational simplex for packing LPs.

Every LP this package solves is brought to the form

    maximize c.y  subject to  A y <= b,  y >= 0,  with b >= 0,

so the slack basis is feasible from the start and no phase one is needed.
The covering problems (the master hopset LP and the per-demand cut LP) are
the duals of such packing programs; their optimal solutions are read off the
reduced costs of the slack columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import NumericalFailure

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class PackingResult:
    value: Fraction
    primal: list  # y
    dual: list  # prices of the <= rows
    pivots: int


def solve_packing(c: Sequence, A: Sequence[Sequence], b: Sequence, max_pivots: int = 100000) -> PackingResult:
    """Maximize ``c.y`` over ``A y <= b, y >= 0`` with Bland's pivoting rule.

    ``A`` is given row-wise.  All arithmetic is exact; the returned dual vector
    is an optimal solution of ``min b.x  s.t.  A^T x >= c, x >= 0``.
    """
    m = len(A)
    nv = len(c)
    width = nv + m
    rows = []
    for i in range(m):
        if b[i] < 0:
            raise ValueError("packing form needs a nonnegative right-hand side")
        row = [Fraction(a) for a in A[i]]
        if len(row) != nv:
            raise ValueError("constraint row has the wrong length")
        slack = [ZERO] * m
        slack[i] = ONE
        rows.append(row + slack + [Fraction(b[i])])
    obj = [-Fraction(v) for v in c] + [ZERO] * m + [ZERO]
    basis = list(range(nv, nv + m))

    pivots = 0
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise NumericalFailure("packing LP is unbounded; its covering dual is infeasible")
        pivots += 1
        if pivots > max_pivots:
            raise NumericalFailure(f"simplex exceeded {max_pivots} pivots")
        _pivot(rows, obj, leave, enter)
        basis[leave] = enter

    y = [ZERO] * nv
    for i, j in enumerate(basis):
        if j < nv:
            y[j] = rows[i][-1]
    dual = obj[nv:nv + m]
    return PackingResult(value=obj[-1], primal=y, dual=list(dual), pivots=pivots)


def _pivot(rows, obj, r, col):
    prow = rows[r]
    p = prow[col]
    if p != 1:
        prow = [a / p for a in prow]
        rows[r] = prow
    nz = [j for j, a in enumerate(prow) if a]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[col]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    f = obj[col]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]
