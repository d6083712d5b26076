"""Exact-rational matrices and the structural predicates used throughout.

Entries are :class:`fractions.Fraction`, which is always normalized with a
positive denominator, so no floating point enters the core.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "RationalMatrix",
    "ValidationReport",
    "FirstEntriesReport",
    "to_rational",
    "validate",
    "check_first_entries",
    "dedup_rows",
    "diag_sum",
    "drop_irrelevant_columns",
    "SCHUR",
    "VDW_AP2",
    "VDW_AP3",
    "VDW_AP4",
]


def to_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a normalized Fraction.

    Floats are refused: a binary float is almost never the rational the
    caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                p, q = int(num), int(den)
            except ValueError:
                raise ValueError(f"malformed rational {value!r}") from None
            if q <= 0:
                raise ValueError(f"denominator must be positive in {value!r}")
            return Fraction(p, q)
        try:
            return Fraction(int(text))
        except ValueError:
            raise ValueError(f"malformed rational {value!r}") from None
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable u x v matrix of exact rationals (u, v >= 1)."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_rational(x) for x in row) for row in self.rows)
        if not rows:
            raise ValueError("a matrix needs at least one row")
        width = len(rows[0])
        if width == 0:
            raise ValueError("a matrix needs at least one column")
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} entries, expected {width}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable]) -> "RationalMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def u(self) -> int:
        return len(self.rows)

    @property
    def v(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.u, self.v

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self, start: int, stop: int) -> "RationalMatrix":
        return RationalMatrix(tuple(row[start:stop] for row in self.rows))

    def select_rows(self, indices: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(tuple(self.rows[i] for i in indices))

    def scaled(self, k) -> "RationalMatrix":
        k = to_rational(k)
        return RationalMatrix(tuple(tuple(k * x for x in row) for row in self.rows))

    def apply(self, x: Sequence) -> tuple[Fraction, ...]:
        """Exact product M x."""
        if len(x) != self.v:
            raise ValueError(f"vector has length {len(x)}, matrix has {self.v} columns")
        xs = [to_rational(t) for t in x]
        return tuple(sum((a * b for a, b in zip(row, xs)), Fraction(0)) for row in self.rows)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def to_lists(self) -> list[list[Fraction]]:
        return [list(row) for row in self.rows]

    def __str__(self) -> str:
        return "(" + "; ".join(" ".join(str(x) for x in row) for row in self.rows) + ")"


@dataclass(frozen=True)
class ValidationReport:
    zero_rows: tuple[int, ...]
    negative_entries: tuple[tuple[int, int], ...]
    non_integral_entries: tuple[tuple[int, int], ...]
    require_admissible: bool = True

    @property
    def admissible(self) -> bool:
        return not self.zero_rows and not self.negative_entries

    @property
    def ok(self) -> bool:
        return self.admissible or not self.require_admissible

    def describe(self) -> str:
        parts = []
        if self.zero_rows:
            parts.append(f"zero rows at {list(self.zero_rows)}")
        if self.negative_entries:
            parts.append(f"negative entries at {[list(p) for p in self.negative_entries]}")
        return "; ".join(parts) or "admissible"


def validate(M: RationalMatrix, require_admissible: bool = True) -> ValidationReport:
    zero_rows, negative, non_integral = [], [], []
    for i, row in enumerate(M.rows):
        if all(x == 0 for x in row):
            zero_rows.append(i)
        for j, x in enumerate(row):
            if x < 0:
                negative.append((i, j))
            if x.denominator != 1:
                non_integral.append((i, j))
    return ValidationReport(tuple(zero_rows), tuple(negative), tuple(non_integral), require_admissible)


@dataclass(frozen=True)
class FirstEntriesReport:
    satisfies: bool
    monic: bool
    first_entries: frozenset
    # (row_i, row_j, column); row_j == -1 marks a zero row, and
    # row_i == row_j marks a non-positive first entry.
    violations: tuple[tuple[int, int, int], ...] = field(default=())


def leading_column(row: Sequence[Fraction]) -> int | None:
    for k, x in enumerate(row):
        if x != 0:
            return k
    return None


def check_first_entries(M: RationalMatrix) -> FirstEntriesReport:
    """Test the first entries condition row by row.

    Two rows whose leftmost nonzero entry sits in the same column must agree
    there, and that common value must be positive.
    """
    violations: list[tuple[int, int, int]] = []
    zero_row = False
    first_entries: set[Fraction] = set()
    # column -> first row seen with its leading entry there
    owner: dict[int, int] = {}
    for i, row in enumerate(M.rows):
        t = leading_column(row)
        if t is None:
            zero_row = True
            violations.append((i, -1, -1))
            continue
        c = row[t]
        first_entries.add(c)
        if c <= 0:
            violations.append((i, i, t))
        if t in owner:
            j = owner[t]
            if M.rows[j][t] != c:
                violations.append((j, i, t))
        else:
            owner[t] = i
    satisfies = not violations and not zero_row
    monic = satisfies and first_entries == {Fraction(1)}
    return FirstEntriesReport(satisfies, monic, frozenset(first_entries), tuple(violations))


def dedup_rows(M: RationalMatrix) -> RationalMatrix:
    seen = set()
    kept = []
    for row in M.rows:
        if row not in seen:
            seen.add(row)
            kept.append(row)
    return RationalMatrix(tuple(kept))


def diag_sum(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    """Block-diagonal (A 0; 0 B)."""
    if A is None or B is None:
        raise ValueError("both diagonal blocks must be nonempty matrices")
    zero = Fraction(0)
    top = tuple(row + (zero,) * B.v for row in A.rows)
    bottom = tuple((zero,) * A.v + row for row in B.rows)
    return RationalMatrix(top + bottom)


def drop_irrelevant_columns(M: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    keep = tuple(j for j in range(M.v) if any(row[j] != 0 for row in M.rows))
    if not keep:
        raise ValueError("every column is zero; nothing to keep")
    return RationalMatrix(tuple(tuple(row[j] for j in keep) for row in M.rows)), keep


SCHUR = RationalMatrix.of([[1, 0], [0, 1], [1, 1]])
VDW_AP2 = RationalMatrix.of([[1, 0], [1, 1]])
VDW_AP3 = RationalMatrix.of([[1, 0], [1, 1], [1, 2]])
VDW_AP4 = RationalMatrix.of([[1, 0], [1, 1], [1, 2], [1, 3]])
