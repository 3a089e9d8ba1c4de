"""Exact LP feasibility by the two-phase simplex method's first phase.

Only feasibility is needed here: find ``x >= 0`` with ``A x = b``. Pivoting
uses Bland's rule, so the search terminates and, for a fixed input, always
returns the same vertex.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def find_feasible(A: Sequence[Sequence], b: Sequence) -> list | None:
    """A basic feasible solution of ``A x = b, x >= 0`` or None."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append(row + [Fraction(int(k == i)) for k in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m

    # phase-one objective: minimise the sum of artificials, kept as reduced costs
    cost = [Fraction(0)] * (width + 1)
    for row in rows:
        for j in range(n):
            cost[j] -= row[j]
        cost[width] -= row[width]

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i, row in enumerate(rows):
            if row[enter] > 0:
                ratio = row[width] / row[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:   # cannot happen in phase one: the objective is bounded below
            break
        pivot = rows[leave][enter]
        rows[leave] = [v / pivot for v in rows[leave]]
        for i, row in enumerate(rows):
            if i != leave and row[enter]:
                f = row[enter]
                rows[i] = [v - f * w for v, w in zip(row, rows[leave])]
        if cost[enter]:
            f = cost[enter]
            cost = [v - f * w for v, w in zip(cost, rows[leave])]
        basis[leave] = enter

    if cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = rows[i][width]
    return x
