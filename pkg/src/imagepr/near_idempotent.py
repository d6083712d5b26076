"""Monochromatic images near 0 in the positive rationals.

The model: S is (Q_{>0}, +), the idempotent is 0, and the n-th neighborhood
is the open interval U_n = (0, 2**-n). Since U_{n+1} + U_{n+1} is contained
in U_n the filtration behaves like a local base for convergence to 0.

Two procedures turn finite forcing facts into witnesses inside U_n:

* :func:`near_zero_transfer` scales a forced configuration by a small power
  of one half and reads the coloring back onto {1..n_force}.
* :func:`diag_sum_witness` combines a witness for a finite matrix A with one
  for a second matrix B into a witness for the block diagonal (A 0; 0 B).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from .ipr_engine import Coloring, ColoringCertificate, verify_ipr_at, witness_for_coloring
from .matrix_core import RationalMatrix, diag_sum, drop_irrelevant_columns, validate
from .oracles import Oracle, RefinedOracle

__all__ = [
    "TransferError",
    "NearZeroContext",
    "NearWitness",
    "CombinedWitness",
    "neighborhood_bound",
    "filtration_holds",
    "coordinate_bound",
    "near_zero_transfer",
    "diag_sum_witness",
    "search_provider",
]


class TransferError(RuntimeError):
    """A transfer precondition or postcondition did not hold."""


def neighborhood_bound(n: int) -> Fraction:
    return Fraction(1, 2**n)


def filtration_holds(n: int) -> bool:
    # sup U_{n+1} + sup U_{n+1} <= sup U_n
    return 2 * neighborhood_bound(n + 1) <= neighborhood_bound(n)


@dataclass
class NearZeroContext:
    n: int
    oracle: Oracle
    r: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("neighborhood index must be nonnegative")
        if self.r is None:
            self.r = self.oracle.r

    @property
    def bound(self) -> Fraction:
        return neighborhood_bound(self.n)

    def contains(self, q: Fraction) -> bool:
        return 0 < q < self.bound


@dataclass(frozen=True)
class NearWitness:
    color: int
    scale: Fraction
    y: tuple[Fraction, ...]
    image: tuple[Fraction, ...]
    n: int
    x: tuple[int, ...]


def coordinate_bound(M: RationalMatrix, N: int) -> int:
    """Largest coordinate an image vector x can have when all of Mx is <= N."""
    R, _ = drop_irrelevant_columns(M)
    top = 1
    for j in range(R.v):
        col = [a for a in R.column(j) if a > 0]
        top = max(top, int(min(Fraction(N) / a for a in col)))
    return top


def _scale_exponent(n: int, largest: int) -> int:
    # minimal m with largest * 2**-m < 2**-n
    return n + largest.bit_length()


def _require_forced(M, r, N, certificate):
    if certificate is None:
        certificate = verify_ipr_at(M, r, N)
    if not certificate.forced:
        raise TransferError(f"matrix is not forced at r={r}, N={N}; no transfer possible")
    return certificate


def _induced_coloring(oracle: Oracle, scale: Fraction, N: int, r: int) -> Coloring:
    colors = []
    for t in range(1, N + 1):
        c = oracle(t * scale)
        if not 1 <= c <= r:
            raise TransferError(f"oracle color {c} at {t * scale} exceeds the forcing color count {r}")
        colors.append(c)
    return Coloring(N, r, tuple(colors))


def near_zero_transfer(
    M: RationalMatrix,
    ctx: NearZeroContext,
    forcing: tuple[int, int],
    certificate: ColoringCertificate | None = None,
) -> NearWitness:
    """Monochromatic image of M with every entry in U_n.

    ``forcing = (r, n_force)`` must be a forced pair for M, with r at least
    the oracle's color count. Choose z = 2**-m so that t*z stays in U_n for
    every t <= n_force, color t by oracle(t*z), and pull the monochromatic
    image found in {1..n_force} back up by z.
    """
    r, n_force = forcing
    if not validate(M).admissible:
        raise TransferError("matrix is not verifier-admissible")
    if ctx.r > r:
        raise TransferError(f"oracle uses {ctx.r} colors but forcing is only known for r={r}")
    _require_forced(M, r, n_force, certificate)
    largest = max(n_force, coordinate_bound(M, n_force))
    z = Fraction(1, 2 ** _scale_exponent(ctx.n, largest))
    chi = _induced_coloring(ctx.oracle, z, n_force, r)
    w = witness_for_coloring(M, chi)
    if w is None:
        raise TransferError("forced matrix produced no witness; the certificate is wrong")
    y = tuple(z * xi for xi in w.x)
    image = tuple(z * val for val in w.image)
    result = NearWitness(w.color, z, y, image, ctx.n, w.x)
    _check_near(M, ctx, result)
    return result


def _check_near(M: RationalMatrix, ctx: NearZeroContext, w: NearWitness):
    if M.apply(w.y) != w.image:
        raise TransferError("image does not match M y")
    if not all(ctx.contains(q) for q in w.image + w.y):
        raise TransferError("witness leaves the neighborhood")
    if any(ctx.oracle(q) != w.color for q in w.image):
        raise TransferError("image is not monochromatic")


@dataclass(frozen=True)
class CombinedWitness:
    color: int
    a: Fraction
    x: tuple[int, ...]
    i: int
    y: tuple[Fraction, ...]
    z: tuple[Fraction, ...]
    image: tuple[Fraction, ...]
    # per row of (A 0; 0 B): ("A" | "B", value, color)
    rows: tuple[tuple[str, Fraction, int], ...]


Provider = Callable[[RationalMatrix, RefinedOracle, int], Sequence[Fraction]]


def search_provider(max_entry: int = 4, extra_scales: int = 64) -> Provider:
    """Provider that looks for y = 2**-m x with B y monochromatic under psi.

    Scans m upward from the smallest admissible exponent and, for each m,
    x over {1..max_entry}^v in lex order. For a coloring that is eventually
    constant near 0 the scan always terminates.
    """

    def provide(B: RationalMatrix, psi: RefinedOracle, n_inner: int) -> tuple[Fraction, ...]:
        candidates = []
        for x in product(range(1, max_entry + 1), repeat=B.v):
            bx = B.apply(x)
            if all(val > 0 for val in bx):
                candidates.append((x, bx, int(max(max(bx), max(x)) // 1) + 1))
        for extra in range(extra_scales):
            for x, bx, top in candidates:
                z = Fraction(1, 2 ** (_scale_exponent(n_inner, top) + extra))
                first = psi(z * bx[0])
                if all(psi(z * val) == first for val in bx[1:]):
                    return tuple(z * xi for xi in x)
        raise TransferError(f"no psi-monochromatic image of B found with entries <= {max_entry}")

    return provide


def diag_sum_witness(
    A: RationalMatrix,
    B: RationalMatrix,
    provider: Provider,
    ctx: NearZeroContext,
    n_pick: int,
    certificate: ColoringCertificate | None = None,
) -> CombinedWitness:
    """Witness z for (A 0; 0 B) with every image entry of color j inside U_n.

    ``n_pick`` must force A for ctx.r colors. The provider supplies y with
    B y monochromatic for psi(q) = (phi(q), phi(2q), ..., phi(n_pick q)) in
    a neighborhood small enough that every multiple t*q, t <= n_pick, stays
    in U_n. With a an entry of B y, gamma(t) = phi(t a) colors {1..n_pick};
    an A-image x monochromatic for gamma and an entry i of A x give
    z = (a x, i y).
    """
    phi = ctx.oracle
    _require_forced(A, ctx.r, n_pick, certificate)
    largest = max(n_pick, coordinate_bound(A, n_pick))
    n_inner = ctx.n + largest.bit_length()
    inner_bound = neighborhood_bound(n_inner)
    psi = RefinedOracle(phi, n_pick)
    try:
        y = tuple(Fraction(q) for q in provider(B, psi, n_inner))
    except TransferError:
        raise
    except Exception as exc:
        raise TransferError(f"provider failed: {exc}") from exc
    if len(y) != B.v:
        raise TransferError(f"provider returned {len(y)} coordinates, B has {B.v} columns")
    by = B.apply(y)
    if not all(0 < q < inner_bound for q in by + y):
        raise TransferError(f"provider's witness leaves the neighborhood (0, 2^-{n_inner})")
    if len({psi(q) for q in by}) != 1:
        raise TransferError("provider's image of B is not psi-monochromatic")
    a = by[0]
    gamma = _induced_coloring(phi, a, n_pick, ctx.r)
    w = witness_for_coloring(A, gamma)
    if w is None:
        raise TransferError("no monochromatic image of A in the induced coloring of {1..n_pick}")
    i = int(w.image[0])
    j = gamma(i)
    z = tuple(a * xi for xi in w.x) + tuple(i * q for q in y)
    D = diag_sum(A, B)
    image = D.apply(z)
    rows = []
    for k, (val, s_val) in enumerate(zip(image, A.apply(w.x) + by)):
        part = "A" if k < A.u else "B"
        # A rows: a (s.x), colored gamma(s.x); B rows: i (s.y), same psi class as a
        expected = a * s_val if part == "A" else i * s_val
        if val != expected:
            raise TransferError(f"row {k} evaluates to {val}, expected {expected}")
        rows.append((part, val, phi(val)))
    result = CombinedWitness(j, a, w.x, i, y, z, image, tuple(rows))
    if any(c != j for _, _, c in rows):
        raise TransferError("combined image is not monochromatic")
    if not all(ctx.contains(q) for q in image + z):
        raise TransferError("combined witness leaves the neighborhood")
    return result
