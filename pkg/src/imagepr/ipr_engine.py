"""Finite-scale image partition regularity.

A matrix M and a bound N compile into the hypergraph on {1..N} whose edges
are the entry sets of the images Mx (x a vector of positive integers, all
image entries positive integers <= N). M is *forced* at (r, N) when that
hypergraph has no proper r-coloring, i.e. every r-coloring of {1..N} leaves
some image monochromatic.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matrix_core import RationalMatrix, drop_irrelevant_columns, validate

__all__ = [
    "FORCED",
    "ESCAPED",
    "BudgetExceeded",
    "ImageHypergraph",
    "Coloring",
    "ColoringCertificate",
    "Witness",
    "ThresholdResult",
    "image_vectors",
    "build_image_hypergraph",
    "solve_coloring",
    "verify_ipr_at",
    "min_forcing_N",
    "witness_for_coloring",
    "forced_witness_table",
]

FORCED = "forced"
ESCAPED = "escaped"

_INT64_HEADROOM = 2**62


class BudgetExceeded(RuntimeError):
    """A search ran past its wall-clock budget."""

    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = stats


@dataclass(frozen=True)
class ImageHypergraph:
    N: int
    edges: tuple[tuple[int, ...], ...]
    # provenance[k] is the lexicographically least x generating edges[k]
    provenance: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("vertex count must be positive")
        seen = set()
        for e in self.edges:
            if not e:
                raise ValueError("edges are nonempty")
            if e[0] < 1 or e[-1] > self.N or list(e) != sorted(set(e)):
                raise ValueError(f"edge {e} is not a sorted subset of 1..{self.N}")
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)

    @property
    def masks(self) -> list[int]:
        return [sum(1 << (v - 1) for v in e) for e in self.edges]


@dataclass(frozen=True)
class Coloring:
    """Assignment {1..N} -> {1..r}; ``colors[k]`` is the color of vertex k+1."""

    N: int
    r: int
    colors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if len(self.colors) != self.N:
            raise ValueError(f"coloring lists {len(self.colors)} colors for N={self.N}")
        if any(not 1 <= c <= self.r for c in self.colors):
            raise ValueError(f"colors must lie in 1..{self.r}")

    def __call__(self, vertex: int) -> int:
        return self.colors[vertex - 1]

    def classes(self) -> list[list[int]]:
        out = [[] for _ in range(self.r)]
        for v, c in enumerate(self.colors, 1):
            out[c - 1].append(v)
        return out

    def is_proper(self, H: ImageHypergraph) -> bool:
        return all(len({self(v) for v in e}) > 1 for e in H.edges)


@dataclass
class ColoringCertificate:
    verdict: str
    coloring: Coloring | None = None
    stats: dict = field(default_factory=dict)
    witness_table: list | None = None

    @property
    def forced(self) -> bool:
        return self.verdict == FORCED


@dataclass(frozen=True)
class Witness:
    color: int
    x: tuple[int, ...]
    image: tuple[Fraction, ...]


@dataclass
class ThresholdResult:
    threshold: int | None
    searched_up_to: int
    r: int
    # escaping certificate at threshold - 1 (or at searched_up_to if not found)
    last_escape: ColoringCertificate | None = None
    certificate: ColoringCertificate | None = None

    @property
    def found(self) -> bool:
        return self.threshold is not None


def _admissible_reduced(M: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    report = validate(M, require_admissible=True)
    if not report.admissible:
        raise ValueError(f"matrix is not verifier-admissible: {report.describe()}")
    return drop_irrelevant_columns(M)


def image_vectors(M: RationalMatrix, N: int) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """All x (lex order) with Mx a vector of positive integers <= N.

    Returns ``(xs, images, keep)`` where ``xs`` is indexed by the reduced
    columns ``keep`` and ``images`` holds the integer image rows.
    """
    R, keep = _admissible_reduced(M)
    L = math.lcm(*(x.denominator for row in R.rows for x in row))
    A = np.array([[int(x * L) for x in row] for row in R.rows], dtype=object)
    bound_scaled = N * L
    # x_j <= min over rows with a_ij > 0 of N / a_ij
    bounds = []
    for j in range(R.v):
        col = [R.rows[i][j] for i in range(R.u) if R.rows[i][j] > 0]
        bounds.append(int(min(Fraction(N) / a for a in col)))
    max_entry = int(max(abs(int(a)) for a in A.flat))
    if bound_scaled * (1 + max_entry) * max(1, max(bounds)) >= _INT64_HEADROOM:
        raise OverflowError("image enumeration would overflow 64-bit integers; lower N")
    A = A.astype(np.int64)
    xs = np.zeros((1, 0), dtype=np.int64)
    partial = np.zeros((1, R.u), dtype=np.int64)
    for j in range(R.v):
        vals = np.arange(1, bounds[j] + 1, dtype=np.int64)
        if vals.size == 0:
            return np.zeros((0, R.v), np.int64), np.zeros((0, R.u), np.int64), keep
        cand = partial[:, None, :] + vals[None, :, None] * A[:, j][None, None, :]
        cand = cand.reshape(-1, R.u)
        new_xs = np.concatenate(
            [np.repeat(xs, vals.size, axis=0), np.tile(vals, xs.shape[0])[:, None]], axis=1
        )
        ok = (cand <= bound_scaled).all(axis=1)
        partial, xs = cand[ok], new_xs[ok]
    if L != 1:
        ok = (partial % L == 0).all(axis=1)
        partial, xs = partial[ok], xs[ok]
        partial = partial // L
    return xs, partial, keep


def _full_x(x_reduced: Sequence[int], keep: tuple[int, ...], v: int) -> tuple[int, ...]:
    # columns that are zero everywhere do not affect the image; fill with 1
    full = [1] * v
    for j, val in zip(keep, x_reduced):
        full[j] = int(val)
    return tuple(full)


def build_image_hypergraph(M: RationalMatrix, N: int) -> ImageHypergraph:
    if N < 1:
        raise ValueError("N must be positive")
    xs, images, keep = image_vectors(M, N)
    if images.shape[0] == 0:
        return ImageHypergraph(N, (), ())
    words = (N + 63) // 64
    bits = np.zeros((images.shape[0], words), dtype=np.uint64)
    one = np.uint64(1)
    for col in images.T:
        idx = col - 1
        w = idx // 64
        b = (idx % 64).astype(np.uint64)
        for k in range(words):
            sel = w == k
            bits[sel, k] |= one << b[sel]
    _, first = np.unique(bits, axis=0, return_index=True)
    first.sort()
    edges, prov = [], []
    for k in first:
        edges.append(tuple(sorted({int(t) for t in images[k]})))
        prov.append(_full_x(xs[k], keep, M.v))
    return ImageHypergraph(N, tuple(edges), tuple(prov))


class _Search:
    """Depth-first weak coloring in increasing vertex order.

    Every edge is checked at its largest vertex: a color c is unavailable for
    vertex v when some edge with maximum v has all its other vertices colored
    c already. Colors are canonical: vertex 1 gets color 0 and a new color
    index is only opened after all smaller ones have appeared.
    """

    def __init__(self, N: int, masks: Sequence[int], r: int, deadline: float | None = None):
        self.N, self.r, self.deadline = N, r, deadline
        others: list[set[int]] = [set() for _ in range(N + 1)]
        for m in masks:
            top = m.bit_length()
            others[top].add(m ^ (1 << (top - 1)))
        self.others = [sorted(s, key=int.bit_count) for s in others]
        self.nodes = 0

    def run(self, prefix: Sequence[int] = ()) -> list[int] | None:
        class_masks = [0] * self.r
        colors: list[int] = []
        used = 0
        for c in prefix:
            v = len(colors) + 1
            if not self._allowed(v, c, class_masks):
                return None
            colors.append(c)
            class_masks[c] |= 1 << (v - 1)
            used = max(used, c + 1)
        return self._dfs(colors, class_masks, used)

    def _allowed(self, v: int, c: int, class_masks: list[int]) -> bool:
        cm = class_masks[c]
        for o in self.others[v]:
            if o & cm == o:
                return False
        return True

    def _dfs(self, colors, class_masks, used):
        v = len(colors) + 1
        if v > self.N:
            return list(colors)
        self.nodes += 1
        if self.deadline is not None and self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("search budget exhausted", {"nodes": self.nodes})
        bit = 1 << (v - 1)
        for c in range(min(used + 1, self.r)):
            if not self._allowed(v, c, class_masks):
                continue
            colors.append(c)
            class_masks[c] |= bit
            found = self._dfs(colors, class_masks, max(used, c + 1))
            class_masks[c] ^= bit
            colors.pop()
            if found is not None:
                return found
        return None


def _canonical_prefixes(search: _Search, depth: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(prefix, class_masks, used):
        v = len(prefix) + 1
        if len(prefix) == depth or v > search.N:
            out.append(tuple(prefix))
            return
        for c in range(min(used + 1, search.r)):
            if search._allowed(v, c, class_masks):
                class_masks[c] |= 1 << (v - 1)
                rec(prefix + [c], class_masks, max(used, c + 1))
                class_masks[c] ^= 1 << (v - 1)

    rec([], [0] * search.r, 0)
    return out


def _solve_subtree(args):
    N, masks, r, prefix, deadline = args
    s = _Search(N, masks, r, deadline)
    try:
        return s.run(prefix), s.nodes, False
    except BudgetExceeded:
        return None, s.nodes, True


def _thread_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("IMAGEPR_THREADS", "1") or 1)
    return max(1, threads)


def solve_coloring(
    H: ImageHypergraph,
    r: int,
    budget_ms: float | None = None,
    threads: int | None = None,
) -> ColoringCertificate:
    """Decide whether H has a proper r-coloring (no monochromatic edge).

    The escaping coloring returned is the lexicographically least canonical
    one, also when the search is split over worker processes.
    """
    if r < 1:
        raise ValueError("r must be positive")
    masks = H.masks
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0
    workers = _thread_count(threads)
    if workers == 1 or H.N < 8:
        search = _Search(H.N, masks, r, deadline)
        try:
            found = search.run()
        except BudgetExceeded as exc:
            exc.stats.update(edges=len(masks))
            raise
        nodes = search.nodes
    else:
        seed = _Search(H.N, masks, r)
        depth = min(H.N - 1, max(4, int(math.log(4 * workers, max(2, r))) + 2))
        prefixes = _canonical_prefixes(seed, depth)
        found, nodes = None, 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(H.N, masks, r, p, deadline) for p in prefixes]
            # map preserves prefix order, so the first hit is the lex-least
            for result, n, timed_out in pool.map(_solve_subtree, jobs):
                nodes += n
                if timed_out:
                    raise BudgetExceeded("search budget exhausted", {"nodes": nodes, "edges": len(masks)})
                if result is not None:
                    found = result
                    break
    stats = {"nodes": nodes, "edges": len(masks)}
    if found is None:
        return ColoringCertificate(FORCED, None, stats)
    coloring = Coloring(H.N, r, tuple(c + 1 for c in found))
    assert coloring.is_proper(H)
    return ColoringCertificate(ESCAPED, coloring, stats)


def verify_ipr_at(
    M: RationalMatrix,
    r: int,
    N: int,
    budget_ms: float | None = None,
    threads: int | None = None,
) -> ColoringCertificate:
    """Forced iff every r-coloring of {1..N} has a monochromatic image of M."""
    H = build_image_hypergraph(M, N)
    cert = solve_coloring(H, r, budget_ms=budget_ms, threads=threads)
    cert.stats.update(N=N, r=r)
    return cert


def min_forcing_N(
    M: RationalMatrix,
    r: int,
    N_max: int,
    budget_ms: float | None = None,
    threads: int | None = None,
) -> ThresholdResult:
    """Smallest N <= N_max at which M is forced for r colors.

    Forcing is monotone in N (a coloring of {1..N+1} restricts to {1..N}), so
    the first forced N in an upward scan is the threshold.
    """
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0
    last = None
    for N in range(1, N_max + 1):
        remaining = None if deadline is None else max(0.0, (deadline - time.monotonic()) * 1000)
        cert = verify_ipr_at(M, r, N, budget_ms=remaining, threads=threads)
        if cert.forced:
            return ThresholdResult(N, N, r, last, cert)
        last = cert
    return ThresholdResult(None, N_max, r, last, None)


def witness_for_coloring(
    M: RationalMatrix, chi: Coloring, value_filter: int | None = None
) -> Witness | None:
    """First x (lex order) whose image under M is monochromatic under chi."""
    N = chi.N if value_filter is None else min(chi.N, int(value_filter))
    if N < 1:
        return None
    xs, images, keep = image_vectors(M, N)
    if images.shape[0] == 0:
        return None
    colors = np.array((0,) + chi.colors, dtype=np.int64)
    cimg = colors[images]
    mono = (cimg == cimg[:, :1]).all(axis=1)
    hits = np.flatnonzero(mono)
    if hits.size == 0:
        return None
    k = int(hits[0])
    x = _full_x(xs[k], keep, M.v)
    image = M.apply(x)
    assert len({chi(int(t)) for t in image}) == 1
    return Witness(int(cimg[k, 0]), x, image)


def _canonical_colorings(N: int, r: int):
    def rec(prefix, used):
        if len(prefix) == N:
            yield tuple(c + 1 for c in prefix)
            return
        for c in range(min(used + 1, r)):
            prefix.append(c)
            yield from rec(prefix, max(used, c + 1))
            prefix.pop()

    yield from rec([], 0)


def forced_witness_table(M: RationalMatrix, r: int, N: int, max_colorings: int = 100_000) -> list:
    """One witness per canonical r-coloring of {1..N}; None entries mean escape."""
    # canonical colorings are at most r^N / r! + lower-order terms
    if r ** N // math.factorial(min(r, N)) > max_colorings:
        raise ValueError(f"witness table over {r}^{N} colorings exceeds max_colorings={max_colorings}")
    table = []
    for colors in _canonical_colorings(N, r):
        chi = Coloring(N, r, colors)
        table.append((chi, witness_for_coloring(M, chi)))
    return table
