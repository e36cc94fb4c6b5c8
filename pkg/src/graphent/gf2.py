"""Bit-packed linear algebra over GF(2).

Rows are Python ints with bit j = column j.  Elimination works on
(row, rhs-bit) pairs so solving and nullspace extraction share one pass.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Gf2Solution:
    """A particular solution plus a basis of the homogeneous nullspace.

    The full solution set is {particular ^ any XOR-combination of basis}.
    An empty basis means the solution is unique; contrast with solve()
    returning None, which means the system is inconsistent.
    """

    particular: int
    nullspace: tuple[int, ...]
    n_cols: int


def rref(rows: list[int], n_cols: int, rhs: list[int] | None = None):
    """Reduced row echelon form; returns (rows, rhs, pivot_cols)."""
    rows = [int(r) for r in rows]
    rhs = [0] * len(rows) if rhs is None else [b & 1 for b in rhs]
    if len(rhs) != len(rows):
        raise ValueError("rhs length does not match row count")
    pivots = []
    r = 0
    for col in range(n_cols):
        sel = next((i for i in range(r, len(rows)) if rows[i] >> col & 1), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        rhs[r], rhs[sel] = rhs[sel], rhs[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> col & 1:
                rows[i] ^= rows[r]
                rhs[i] ^= rhs[r]
        pivots.append(col)
        r += 1
    return rows, rhs, pivots


def solve(rows: list[int], n_cols: int, rhs: list[int]) -> Gf2Solution | None:
    """Solve matrix . x = rhs over GF(2); None if inconsistent."""
    red, b, pivots = rref(rows, n_cols, rhs)
    for i in range(len(pivots), len(red)):
        if b[i]:
            return None  # 0 = 1 row
    particular = 0
    for i, col in enumerate(pivots):
        if b[i]:
            particular |= 1 << col
    return Gf2Solution(particular, tuple(nullspace_from_rref(red, n_cols, pivots)), n_cols)


def nullspace(rows: list[int], n_cols: int) -> list[int]:
    """Basis of {x : matrix . x = 0}."""
    red, _, pivots = rref(rows, n_cols)
    return nullspace_from_rref(red, n_cols, pivots)


def nullspace_from_rref(red: list[int], n_cols: int, pivots: list[int]) -> list[int]:
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for i, col in enumerate(pivots):
            if red[i] >> free & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis
