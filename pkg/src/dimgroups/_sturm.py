"""Dense univariate polynomials over Q and Sturm-sequence root counting.

Polynomials are lists of Fractions, lowest degree first, with no trailing
zeros. The empty list is the zero polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Dense = list[Fraction]


def trim(p: Sequence) -> Dense:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Dense) -> int:
    return len(p) - 1


def evaluate(p: Dense, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


def derivative(p: Dense) -> Dense:
    return trim([i * p[i] for i in range(1, len(p))])


def divmod_poly(num: Dense, den: Dense) -> tuple[Dense, Dense]:
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num)
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    while len(rem) >= len(den) and rem:
        shift = len(rem) - len(den)
        factor = rem[-1] / lead
        quot[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] -= factor * c
        rem = trim(rem)
    return trim(quot), rem


def gcd_poly(p: Dense, q: Dense) -> Dense:
    a, b = trim(p), trim(q)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if not a:
        return a
    return [c / a[-1] for c in a]


def squarefree(p: Dense) -> Dense:
    """Squarefree part of p (same real roots, all simple)."""
    g = gcd_poly(p, derivative(p))
    if len(g) <= 1:
        return list(p)
    return divmod_poly(p, g)[0]


def sturm_sequence(p: Dense) -> list[Dense]:
    seq = [trim(p), derivative(trim(p))]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        seq.append([-c for c in r])
    seq.pop()
    return seq


def sign_changes(seq: list[Dense], t: Fraction) -> int:
    signs = []
    for q in seq:
        v = evaluate(q, t)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for s, s2 in zip(signs, signs[1:]) if s != s2)


def count_roots(p: Dense, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b]."""
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial has infinitely many roots")
    seq = sturm_sequence(squarefree(p))
    return sign_changes(seq, a) - sign_changes(seq, b)


def isolate_roots(p: Dense, a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each holding exactly one root of p in (a, b].

    An interval with lo == hi denotes an exact rational root.
    """
    p = trim(p)
    sf = squarefree(p)
    seq = sturm_sequence(sf)
    out: list[tuple[Fraction, Fraction]] = []

    def roots_in(lo: Fraction, hi: Fraction) -> int:
        return sign_changes(seq, lo) - sign_changes(seq, hi)

    stack = [(Fraction(a), Fraction(b))]
    while stack:
        lo, hi = stack.pop()
        n = roots_in(lo, hi)
        if n == 0:
            continue
        if n == 1:
            if evaluate(sf, hi) == 0:
                out.append((hi, hi))
            else:
                out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort()
    return out


def refine_root(p: Dense, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval (lo, hi] of a simple root of p by bisection."""
    sf = squarefree(trim(p))
    if lo == hi:
        return lo, hi
    seq = sturm_sequence(sf)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if evaluate(sf, mid) == 0:
            return mid, mid
        if sign_changes(seq, lo) - sign_changes(seq, mid) == 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def positive_root_bounds(p: Dense) -> tuple[Fraction, Fraction]:
    """(L, B) with every positive root of p inside (L, B); p(0) != 0 assumed."""
    p = trim(p)
    lead, const = p[-1], p[0]
    upper = 1 + max(abs(c / lead) for c in p[:-1]) if len(p) > 1 else Fraction(1)
    lower = 1 / (1 + max(abs(c / const) for c in p[1:])) if len(p) > 1 else Fraction(1)
    return lower, upper
