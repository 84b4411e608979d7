"""Exact linear algebra over Q and Z on lists of rows."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = list[Fraction]


def to_fractions(rows: Sequence[Sequence]) -> list[Row]:
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = to_fractions(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Row]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> tuple[Row, list[Row]] | None:
    """A particular solution of rows . x = rhs and a nullspace basis, or None."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(to_fractions(rows), rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[-1]
    return x, nullspace(rows, ncols)


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer matrix (zero rows dropped)."""
    m = [[int(x) for x in r] for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    out: list[list[int]] = []
    r = 0
    for c in range(ncols):
        # Euclid on column c among rows r..end
        while True:
            nz = [i for i in range(r, len(m)) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < len(m) and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-a for a in m[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                m[i] = [a - q * b for a, b in zip(m[i], m[r])]
            r += 1
            if r == len(m):
                break
    out = [row for row in m[:r] if any(row)]
    return out


def _common_denominator(rows: Sequence[Sequence[Fraction]]) -> int:
    from math import lcm

    d = 1
    for r in rows:
        for x in r:
            d = lcm(d, Fraction(x).denominator)
    return d


def lattice_basis(rows: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """Integer HNF basis of the Z-span of rational rows, with the common denominator used."""
    fr = to_fractions(rows)
    d = _common_denominator(fr)
    ints = [[int(x * d) for x in r] for r in fr]
    return hnf_rows(ints), d


def same_lattice(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    fa, fb = to_fractions(a), to_fractions(b)
    d = _common_denominator(fa + fb)
    ha = hnf_rows([[int(x * d) for x in r] for r in fa])
    hb = hnf_rows([[int(x * d) for x in r] for r in fb])
    return ha == hb


def in_lattice(v: Sequence, rows: Sequence[Sequence]) -> bool:
    return same_lattice(list(rows), list(rows) + [list(v)])
