"""Finite sums, compressed forms and Milliken-Taylor systems."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

from .matrix_core import RationalMatrix, to_rational

__all__ = [
    "CapExceeded",
    "CompressedSeq",
    "IndexFamily",
    "FalsificationWitness",
    "DEFAULT_CAP",
    "fs_enumerate",
    "compress",
    "mt_enumerate",
    "mt_matrix_rows",
    "ip_star_falsify",
]

DEFAULT_CAP = 20


class CapExceeded(ValueError):
    """An enumeration would exceed its configured size cap."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class CompressedSeq(tuple):
    """Nonempty tuple of positive integers with no two adjacent entries equal."""

    def __new__(cls, entries: Iterable[int]):
        entries = tuple(int(a) for a in entries)
        if not entries:
            raise ValueError("a compressed sequence is nonempty")
        if any(a <= 0 for a in entries):
            raise ValueError(f"compressed sequences have positive entries, got {entries}")
        if any(a == b for a, b in zip(entries, entries[1:])):
            raise ValueError(f"adjacent repeat in {entries}")
        return super().__new__(cls, entries)


@dataclass(frozen=True)
class IndexFamily:
    """Blocks F_1 < F_2 < ... of nonempty sets of positive indices."""

    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        for F in self.blocks:
            if not F or min(F) < 1:
                raise ValueError("blocks are nonempty sets of positive indices")
        for F, G in zip(self.blocks, self.blocks[1:]):
            if max(F) >= min(G):
                raise ValueError("blocks must satisfy max F_t < min F_{t+1}")


def _check_cap(n: int, cap: int):
    if n > cap:
        raise CapExceeded(f"sequence of length {n} exceeds cap {cap}; rerun with cap >= {n}", n)


def _as_terms(xs: Sequence) -> tuple[list, bool]:
    # integer sequences are summed as plain ints, which is much faster
    qs = [to_rational(x) for x in xs]
    if all(q.denominator == 1 for q in qs):
        return [q.numerator for q in qs], True
    return qs, False


def _to_fractions(values) -> set[Fraction]:
    return {Fraction(v) for v in values}


def fs_enumerate(xs: Sequence, cap: int = DEFAULT_CAP) -> set[Fraction]:
    """All sums over nonempty subsets of positions of ``xs``."""
    if not xs:
        raise ValueError("finite sums need a nonempty sequence")
    _check_cap(len(xs), cap)
    terms, integral = _as_terms(xs)
    sums: set = set()
    for x in terms:
        sums |= {s + x for s in sums}
        sums.add(x)
    return _to_fractions(sums) if integral else sums


def compress(a: Iterable[int]) -> CompressedSeq:
    """Delete zeros, then collapse runs of equal adjacent entries."""
    out: list[int] = []
    for x in a:
        x = int(x)
        if x < 0:
            raise ValueError(f"compress expects nonnegative integers, got {x}")
        if x and (not out or out[-1] != x):
            out.append(x)
    if not out:
        raise ValueError("empty compressed form")
    return CompressedSeq(out)


def mt_enumerate(a: Sequence[int], xs: Sequence, cap: int = DEFAULT_CAP) -> set[Fraction]:
    """Milliken-Taylor sums  sum_t a_t * sum_{n in F_t} x_n  over F_1 < ... < F_k.

    ``a`` need not be compressed. Dynamic programming over positions: state t
    holds the partial sums whose last opened block is F_t.
    """
    a = [int(t) for t in a]
    if not a:
        raise ValueError("empty coefficient sequence")
    if len(a) > len(xs):
        raise ValueError(f"empty system: {len(a)} blocks need at least {len(a)} terms, got {len(xs)}")
    _check_cap(len(xs), cap)
    k = len(a)
    terms, integral = _as_terms(xs)
    states: list[set] = [{0}] + [set() for _ in range(k)]
    for x in terms:
        nxt = [set(s) for s in states]
        for t in range(1, k + 1):
            step = a[t - 1] * x
            # extend the open block t, or open block t right after block t-1
            nxt[t] |= {s + step for s in states[t]}
            nxt[t] |= {s + step for s in states[t - 1]}
        states = nxt
    return _to_fractions(states[k]) if integral else states[k]


def mt_matrix_rows(a: Sequence[int], width: int) -> RationalMatrix:
    """Rows of the given width whose compressed form is ``a``, in lex order."""
    a = CompressedSeq(a)
    if width < len(a):
        raise ValueError(f"width {width} is below len(a)={len(a)}: no rows compress to {tuple(a)}")
    alphabet = sorted({0, *a})
    target = tuple(a)
    rows = []
    for row in product(alphabet, repeat=width):
        if any(row) and tuple(compress(row)) == target:
            rows.append(row)
    return RationalMatrix.of(rows)


@dataclass(frozen=True)
class FalsificationWitness:
    generators: tuple[int, ...]
    fs_sample: tuple[Fraction, ...]


def ip_star_falsify(
    predicate: Callable[[Fraction], bool],
    generator_bound: int,
    value_bound,
    allow_repeats: bool = False,
) -> FalsificationWitness | None:
    """Look for a generator sequence whose finite sums all avoid ``predicate``.

    Generators are positive integers up to ``value_bound``. Longer sequences
    are tried first; within one length the lexicographically least sequence
    wins, increasing (or nondecreasing with ``allow_repeats``). ``None`` means
    nothing was found at this scale, which says nothing about IP*-ness.
    """
    top = int(to_rational(value_bound) // 1)
    if top < 1 or generator_bound < 1:
        return None
    memo: dict[Fraction, bool] = {}

    def hit(s: Fraction) -> bool:
        if s not in memo:
            memo[s] = bool(predicate(s))
        return memo[s]

    def search(seq: list[int], sums: frozenset, length: int):
        if len(seq) == length:
            return tuple(seq), sums
        lo = seq[-1] if seq else 1
        if seq and not allow_repeats:
            lo += 1
        for x in range(lo, top + 1):
            fx = Fraction(x)
            new = {fx} | {s + fx for s in sums}
            if any(hit(s) for s in new):
                continue
            seq.append(x)
            found = search(seq, sums | new, length)
            seq.pop()
            if found:
                return found
        return None

    for length in range(generator_bound, 0, -1):
        found = search([], frozenset(), length)
        if found:
            gens, sums = found
            return FalsificationWitness(gens, tuple(sorted(sums)))
    return None
