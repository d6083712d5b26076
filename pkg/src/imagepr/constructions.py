"""Insertion matrices, block concatenation and segmented first-entries checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .matrix_core import (
    RationalMatrix,
    check_first_entries,
    dedup_rows,
    drop_irrelevant_columns,
    validate,
)
from .ipr_engine import verify_ipr_at
from .sequence_tools import CapExceeded

__all__ = [
    "InsertionSpec",
    "BlockStructure",
    "BlockReport",
    "SegmentedReport",
    "build_insertion",
    "insertion_rows",
    "block_concat",
    "slice_blocks",
    "segmented_check",
    "MAX_INSERTION_ROWS",
    "MAX_INSERTION_WIDTH",
]

MAX_INSERTION_ROWS = 100_000
MAX_INSERTION_WIDTH = 64


@dataclass(frozen=True)
class InsertionSpec:
    C: RationalMatrix
    Bs: tuple[RationalMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "Bs", tuple(self.Bs))
        if len(self.Bs) != self.C.v:
            raise ValueError(f"C has {self.C.v} columns but {len(self.Bs)} blocks were given")


def insertion_rows(spec: InsertionSpec) -> list[tuple[Fraction, ...]]:
    """Rows c_{i,0} b_{j(0)} ^ c_{i,1} b_{j(1)} ^ ... before deduplication.

    Ordered by i, then j lexicographically (j(0) slowest).
    """
    C, Bs = spec.C, spec.Bs
    rows = []
    for ci in C.rows:
        for j in product(*(range(B.u) for B in Bs)):
            row: tuple[Fraction, ...] = ()
            for t, B in enumerate(Bs):
                row += tuple(ci[t] * b for b in B.rows[j[t]])
            rows.append(row)
    return rows


def build_insertion(
    spec: InsertionSpec,
    max_rows: int = MAX_INSERTION_ROWS,
    max_width: int = MAX_INSERTION_WIDTH,
) -> RationalMatrix:
    count = spec.C.u * math.prod(B.u for B in spec.Bs)
    if count > max_rows:
        sizes = " * ".join(str(B.u) for B in spec.Bs)
        raise CapExceeded(
            f"insertion needs gamma * prod(u_t) = {spec.C.u} * {sizes} = {count} rows, cap is {max_rows}",
            count,
        )
    width = sum(B.v for B in spec.Bs)
    if width > max_width:
        raise CapExceeded(f"insertion width sum(v_t) = {width} exceeds cap {max_width}", width)
    return dedup_rows(RationalMatrix(tuple(insertion_rows(spec))))


def block_concat(blocks: Sequence[RationalMatrix]) -> RationalMatrix:
    if not blocks:
        raise ValueError("nothing to concatenate")
    u = blocks[0].u
    for n, B in enumerate(blocks):
        if B.u != u:
            raise ValueError(f"block {n} has {B.u} rows, expected {u}")
    return RationalMatrix(tuple(sum((B.rows[i] for B in blocks), ()) for i in range(u)))


@dataclass(frozen=True)
class BlockStructure:
    boundaries: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if len(b) < 2 or b[0] != 0:
            raise ValueError("boundaries start at 0 and delimit at least one block")
        if any(x >= y for x, y in zip(b, b[1:])):
            raise ValueError(f"boundaries must be strictly increasing: {list(b)}")

    @property
    def spans(self) -> list[tuple[int, int]]:
        return list(zip(self.boundaries, self.boundaries[1:]))


def slice_blocks(M: RationalMatrix, structure: BlockStructure) -> list[RationalMatrix]:
    if structure.boundaries[-1] != M.v:
        raise ValueError(
            f"boundary {structure.boundaries[-1]} out of range: matrix has {M.v} columns"
        )
    return [M.columns(a, b) for a, b in structure.spans]


EMPTY = "empty"
MONIC_FIRST_ENTRIES = "monic-first-entries"
FIRST_ENTRIES = "first-entries"
IPR_VERIFIED = "ipr-verified"
IPR_UNVERIFIED = "ipr-unverified"
FAILS = "fails"


@dataclass
class BlockReport:
    index: int
    columns: tuple[int, int]
    matrix: RationalMatrix
    nonzero_rows: tuple[int, ...]
    classification: str
    first_entries: bool = False
    monic: bool = False
    # verdict at the caller's (r, N) budget, None when not run
    forced_at_budget: bool | None = None


@dataclass
class SegmentedReport:
    blocks: list[BlockReport]
    budget: tuple[int, int] | None
    verdicts: list[str] = field(default_factory=list)


def _classify_block(index, span, block, budget, verify) -> BlockReport:
    nonzero = tuple(i for i, row in enumerate(block.rows) if any(x != 0 for x in row))
    if not nonzero:
        return BlockReport(index, span, block, nonzero, EMPTY)
    rows = dedup_rows(block.select_rows(nonzero))
    fe = check_first_entries(rows)
    report = BlockReport(index, span, block, nonzero, FAILS, fe.satisfies, fe.monic)
    if fe.monic:
        report.classification = MONIC_FIRST_ENTRIES
    elif fe.satisfies:
        report.classification = FIRST_ENTRIES
    if budget is not None and validate(rows).admissible:
        r, N = budget
        reduced, _ = drop_irrelevant_columns(rows)
        report.forced_at_budget = verify(reduced, r, N).forced
        if not fe.satisfies:
            report.classification = IPR_VERIFIED if report.forced_at_budget else IPR_UNVERIFIED
    return report


def segmented_check(
    M: RationalMatrix,
    structure: BlockStructure,
    verify_budget: tuple[int, int] | None = None,
) -> SegmentedReport:
    """Classify each column block of M by its nonzero rows.

    With a budget ``(r, N)`` every nonempty block is also run through the
    verifier; the resulting IPR verdict is only a statement at that scale.
    """
    zero = validate(M, require_admissible=False).zero_rows
    if zero:
        raise ValueError(f"row {zero[0]} of the matrix is zero")
    blocks = slice_blocks(M, structure)
    reports = [
        _classify_block(n, span, B, verify_budget, verify_ipr_at)
        for n, (span, B) in enumerate(zip(structure.spans, blocks))
    ]
    nonempty = [b for b in reports if b.classification != EMPTY]
    verdicts = []
    if all(b.monic for b in nonempty):
        verdicts.append("monic segmented first entries")
    if all(b.first_entries for b in nonempty):
        verdicts.append("segmented first entries")
    if verify_budget is not None and all(b.forced_at_budget for b in nonempty):
        r, N = verify_budget
        verdicts.append(f"segmented IPR (empirical at r={r}, N={N})")
    return SegmentedReport(reports, verify_budget, verdicts)
