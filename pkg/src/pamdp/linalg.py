"""Sparse Gaussian elimination over the rationals, with a float fallback."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np


class SingularSystemError(ArithmeticError):
    pass


def solve_exact(rows: Sequence[dict], rhs: Sequence) -> list[Fraction]:
    """Solve ``A x = b`` where ``A`` is given as sparse rows ``{col: value}``.

    Elimination picks, for each column, the remaining row with the largest
    magnitude entry.  Raises :class:`SingularSystemError` if no pivot exists.
    """
    n = len(rows)
    if len(rhs) != n:
        raise ValueError("row count and right-hand side length differ")
    work = [({j: Fraction(v) for j, v in r.items() if v}, Fraction(b)) for r, b in zip(rows, rhs)]
    pending = set(range(n))
    pivots: list[tuple[int, int]] = []
    for k in range(n):
        best = None
        for i in pending:
            v = work[i][0].get(k)
            if v is not None and (best is None or abs(v) > abs(work[best][0][k])):
                best = i
        if best is None:
            raise SingularSystemError(f"no pivot for column {k}")
        pending.discard(best)
        prow, pb = work[best]
        pv = prow[k]
        for i in pending:
            row, b = work[i]
            f = row.get(k)
            if f is None:
                continue
            f = f / pv
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
            work[i] = (row, b - f * pb)
        pivots.append((k, best))
    x = [Fraction(0)] * n
    for k, i in reversed(pivots):
        row, b = work[i]
        acc = b
        for j, v in row.items():
            if j != k:
                acc -= v * x[j]
        x[k] = acc / row[k]
    return x


def solve_float(rows: Sequence[dict], rhs: Sequence) -> list[float]:
    n = len(rows)
    A = np.zeros((n, n))
    for i, r in enumerate(rows):
        for j, v in r.items():
            A[i, j] = float(v)
    try:
        return list(np.linalg.solve(A, np.array([float(b) for b in rhs], dtype=float)))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None


def solve(rows, rhs, exact: bool = True):
    if not rows:
        return []
    return solve_exact(rows, rhs) if exact else solve_float(rows, rhs)
