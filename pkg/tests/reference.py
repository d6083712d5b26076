"""Brute-force reference implementations, kept independent of the package.

Nothing here imports from ``imagepr``; matrices are plain lists of ints or
Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product


def images(rows, N):
    """All entry sets of Mx with x in {1..N'}^v and every entry an integer in 1..N."""
    v = len(rows[0])
    # any coordinate with a positive coefficient is at most N / (smallest positive entry)
    smallest = min(Fraction(a) for row in rows for a in row if a != 0)
    top = int(N / smallest)
    live = [j for j in range(v) if any(row[j] != 0 for row in rows)]
    out = {}
    for xs in product(range(1, top + 1), repeat=len(live)):
        x = [1] * v
        for j, val in zip(live, xs):
            x[j] = val
        vals = [sum(Fraction(a) * b for a, b in zip(row, x)) for row in rows]
        if all(q.denominator == 1 and 1 <= q <= N for q in vals):
            edge = frozenset(int(q) for q in vals)
            out.setdefault(edge, tuple(x))
    return out


def forced(rows, r, N):
    """True iff every one of the r**N colorings has a monochromatic image."""
    edges = list(images(rows, N))
    if not edges:
        return False
    for colors in product(range(r), repeat=N):
        if all(len({colors[v - 1] for v in e}) > 1 for e in edges):
            return False
    return True


def escapes(colors, rows):
    N = len(colors)
    return all(len({colors[v - 1] for v in e}) > 1 for e in images(rows, N))


def finite_sums(xs):
    n = len(xs)
    return {
        sum((Fraction(xs[i]) for i in idx), Fraction(0))
        for k in range(1, n + 1)
        for idx in combinations(range(n), k)
    }


def ordered_families(n, k):
    """All (F_1, ..., F_k) of nonempty subsets of {0..n-1} with max F_t < min F_{t+1}."""
    def rec(start, left):
        if left == 0:
            yield ()
            return
        for lo in range(start, n):
            for hi in range(lo, n):
                middle = range(lo + 1, hi)
                for m in range(len(middle) + 1):
                    for inner in combinations(middle, m):
                        F = (lo, *inner, hi) if hi > lo else (lo,)
                        for rest in rec(hi + 1, left - 1):
                            yield (F,) + rest
    yield from rec(0, k)


def mt_sums(a, xs):
    return {
        sum(Fraction(a[t]) * sum(Fraction(xs[i]) for i in F) for t, F in enumerate(fam))
        for fam in ordered_families(len(xs), len(a))
    }


def compress_ref(a):
    nz = [x for x in a if x != 0]
    return tuple(x for k, x in enumerate(nz) if k == 0 or nz[k - 1] != x)


def mt_rows_ref(a, width):
    return [row for row in product(range(max(a) + 1), repeat=width) if any(row) and compress_ref(row) == tuple(a)]
