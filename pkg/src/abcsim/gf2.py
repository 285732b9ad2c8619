"""GF(2) linear algebra on packed int rows (bit ``c`` of a row is column ``c``)."""

from __future__ import annotations

from typing import Iterable, Sequence


def rref(rows: Iterable[int], n_cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form.

    Columns are scanned left to right; the pivot for a column is the first
    remaining row with that bit set. Returns ``(nonzero rows, pivot columns)``.
    """
    work = [r for r in rows if r]
    pivots: list[int] = []
    top = 0
    for col in range(n_cols):
        bit = 1 << col
        piv = None
        for r in range(top, len(work)):
            if work[r] & bit:
                piv = r
                break
        if piv is None:
            continue
        work[top], work[piv] = work[piv], work[top]
        prow = work[top]
        for r in range(len(work)):
            if r != top and work[r] & bit:
                work[r] ^= prow
        pivots.append(col)
        top += 1
        if top == len(work):
            break
    return work[:top], pivots


def rank(rows: Iterable[int], n_cols: int) -> int:
    return len(rref(rows, n_cols)[0])


def kernel(rows: Iterable[int], n_cols: int) -> list[int]:
    """Basis of ``{u : popcount(u & r) even for every row r}``, one vector per free column."""
    reduced, pivots = rref(rows, n_cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for row, p in zip(reduced, pivots):
            if (row >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def row_space_equal(a: Sequence[int], b: Sequence[int], n_cols: int) -> bool:
    return rref(a, n_cols)[0] == rref(b, n_cols)[0]


def in_row_space(v: int, rows: Sequence[int], n_cols: int) -> bool:
    return rank(list(rows) + [v], n_cols) == rank(rows, n_cols)


def indices_to_mask(indices: Iterable[int]) -> int:
    """1-based indices to a bitmask (bit ``i - 1``). Repeated indices cancel."""
    m = 0
    for i in indices:
        m ^= 1 << (i - 1)
    return m


def mask_to_indices(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return out


def bits(mask: int, length: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(length))


def from_bits(vec: Iterable[int]) -> int:
    m = 0
    for i, b in enumerate(vec):
        if b & 1:
            m |= 1 << i
    return m
