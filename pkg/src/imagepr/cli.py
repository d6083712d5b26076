"""Command line interface.

Every subcommand reads JSON (inline or from a file) and prints one JSON
document on stdout. Exit codes: 0 success / forced, 1 escaped or nothing
found, 2 malformed input or failed precondition, 3 search budget exhausted.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import jsonio as io
from .constructions import block_concat, build_insertion, segmented_check
from .ipr_engine import (
    BudgetExceeded,
    forced_witness_table,
    min_forcing_N,
    verify_ipr_at,
    witness_for_coloring,
)
from .matrix_core import check_first_entries, dedup_rows, diag_sum, validate
from .near_idempotent import (
    NearZeroContext,
    TransferError,
    diag_sum_witness,
    near_zero_transfer,
    search_provider,
)
from .oracles import OracleError, parse_oracle
from .sequence_tools import (
    CapExceeded,
    DEFAULT_CAP,
    compress,
    fs_enumerate,
    ip_star_falsify,
    mt_enumerate,
    mt_matrix_rows,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2, 3


class Outcome:
    def __init__(self, payload, code: int = EXIT_OK, certificate=None):
        self.payload, self.code, self.certificate = payload, code, certificate


def _sorted_strs(values):
    return [io.rational_str(q) for q in sorted(values)]


def cmd_validate(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    return Outcome(io.validation_json(validate(M)))


def cmd_check_first_entries(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    return Outcome(io.first_entries_json(check_first_entries(M)))


def cmd_dedup(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    return Outcome(io.matrix_json(dedup_rows(M)))


def cmd_compress(args):
    seq = io.parse_int_sequence(io.load_json(args.seq, "seq"), "seq")
    return Outcome({"compressed": list(compress(seq))})


def cmd_fs(args):
    seq = io.parse_sequence(io.load_json(args.seq, "seq"), "seq")
    return Outcome({"sums": _sorted_strs(fs_enumerate(seq, cap=args.cap))})


def cmd_mt_enum(args):
    a = io.parse_int_sequence(io.load_json(args.a, "a"), "a")
    seq = io.parse_sequence(io.load_json(args.seq, "seq"), "seq")
    return Outcome({"sums": _sorted_strs(mt_enumerate(a, seq, cap=args.cap))})


def cmd_mt_matrix(args):
    a = io.parse_int_sequence(io.load_json(args.a, "a"), "a")
    return Outcome(io.matrix_json(mt_matrix_rows(compress(a) if args.compress else a, args.width)))


def cmd_insertion(args):
    spec = io.parse_insertion_spec(io.load_json(args.spec, "spec"))
    return Outcome(io.matrix_json(build_insertion(spec, max_rows=args.max_rows)))


def cmd_diag_sum(args):
    A = io.parse_matrix(io.load_json(args.a, "a"), "a")
    B = io.parse_matrix(io.load_json(args.b, "b"), "b")
    return Outcome(io.matrix_json(diag_sum(A, B)))


def cmd_concat(args):
    data = io.load_json(args.blocks, "blocks")
    if not isinstance(data, list):
        raise io.FormatError("blocks", "expected an array of matrices")
    blocks = [io.parse_matrix(b, f"blocks[{n}]") for n, b in enumerate(data)]
    return Outcome(io.matrix_json(block_concat(blocks)))


def cmd_segmented_check(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    structure = io.parse_structure(io.load_json(args.structure, "structure"))
    budget = None
    if args.r is not None or args.N is not None:
        if args.r is None or args.N is None:
            raise io.FormatError("budget", "-r and -N must be given together")
        budget = (args.r, args.N)
    return Outcome(io.segmented_json(segmented_check(M, structure, budget)))


def cmd_verify(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    cert = verify_ipr_at(M, args.r, args.N, budget_ms=args.budget_ms, threads=args.threads)
    if args.witness_table and cert.forced:
        cert.witness_table = forced_witness_table(M, args.r, args.N)
    payload = io.certificate_json(cert)
    return Outcome(payload, EXIT_OK if cert.forced else EXIT_NEGATIVE, payload)


def cmd_hypergraph(args):
    from .ipr_engine import build_image_hypergraph

    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    return Outcome(io.hypergraph_json(build_image_hypergraph(M, args.N)))


def cmd_min_n(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    res = min_forcing_N(M, args.r, args.n_max, budget_ms=args.budget_ms, threads=args.threads)
    payload = io.threshold_json(res)
    cert = None
    if res.certificate is not None:
        cert = dict(payload, certificate=io.certificate_json(res.certificate))
    return Outcome(payload, EXIT_OK if res.found else EXIT_NEGATIVE, cert)


def cmd_witness(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    chi = io.parse_coloring(io.load_json(args.coloring, "coloring"))
    w = witness_for_coloring(M, chi, args.bound)
    if w is None:
        return Outcome({"witness": None}, EXIT_NEGATIVE)
    return Outcome({"witness": io.witness_json(w)})


def _forcing_n(M, r, given, n_max, args):
    if given is not None:
        return given, None
    res = min_forcing_N(M, r, n_max, budget_ms=args.budget_ms, threads=args.threads)
    if not res.found:
        raise TransferError(f"matrix is not forced for r={r} up to N={n_max}")
    return res.threshold, res.certificate


def cmd_near_transfer(args):
    M = io.parse_matrix(io.load_json(args.matrix, "matrix"))
    oracle = parse_oracle(args.oracle, args.r)
    ctx = NearZeroContext(args.n, oracle)
    r = args.r or oracle.r
    n_force, cert = _forcing_n(M, r, args.n_force, args.n_max, args)
    w = near_zero_transfer(M, ctx, (r, n_force), certificate=cert)
    return Outcome(dict(io.near_witness_json(w), forcing={"r": r, "N": n_force}))


def cmd_diag_witness(args):
    A = io.parse_matrix(io.load_json(args.a, "a"), "a")
    B = io.parse_matrix(io.load_json(args.b, "b"), "b")
    oracle = parse_oracle(args.oracle, args.r)
    ctx = NearZeroContext(args.n, oracle)
    n_pick, cert = _forcing_n(A, ctx.r, args.n_pick, args.n_max, args)
    w = diag_sum_witness(A, B, search_provider(args.max_entry), ctx, n_pick, certificate=cert)
    return Outcome(dict(io.combined_witness_json(w), n_pick=n_pick))


def _predicate(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "everything":
        return lambda q: True
    if kind == "multiples":
        m = int(rest)
        return lambda q: q.denominator == 1 and q.numerator % m == 0
    if kind == "set":
        members = set(io.parse_sequence(io.load_json(rest, "predicate"), "predicate"))
        return lambda q: q in members
    raise io.FormatError("predicate", f"unknown predicate {spec!r} (everything, multiples:m, set:[...])")


def cmd_ipstar_falsify(args):
    pred = _predicate(args.predicate)
    w = ip_star_falsify(pred, args.generators, Fraction(args.values), allow_repeats=args.repeats)
    if w is None:
        return Outcome({"found": False}, EXIT_NEGATIVE)
    return Outcome(dict(io.falsification_json(w), found=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imagepr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"imagepr {__version__} (schema {io.SCHEMA_VERSION})")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="also write the JSON result to this file")
    common.add_argument("--certificate", help="write the full certificate to this file")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes for the solver (env IMAGEPR_THREADS)")
    common.add_argument("--budget-ms", type=float, default=None,
                        help="abort searches after this many milliseconds (exit 3)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "report zero rows and negative or fractional entries")
    p.add_argument("--matrix", required=True)
    p = add("check-first-entries", cmd_check_first_entries, "first entries condition")
    p.add_argument("--matrix", required=True)
    p = add("dedup", cmd_dedup, "drop repeated rows, keeping first occurrences")
    p.add_argument("--matrix", required=True)
    p = add("compress", cmd_compress, "compressed form of a sequence")
    p.add_argument("--seq", required=True)
    p = add("fs", cmd_fs, "finite sums of a sequence")
    p.add_argument("--seq", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p = add("mt-enum", cmd_mt_enum, "Milliken-Taylor sums")
    p.add_argument("--a", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p = add("mt-matrix", cmd_mt_matrix, "width-truncated Milliken-Taylor matrix")
    p.add_argument("--a", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--compress", action="store_true", help="compress --a first")
    p = add("insertion", cmd_insertion, "insertion matrix of blocks Bs into C")
    p.add_argument("--spec", required=True)
    p.add_argument("--max-rows", type=int, default=100_000)
    p = add("diag-sum", cmd_diag_sum, "block diagonal (A 0; 0 B)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p = add("concat", cmd_concat, "horizontal concatenation of blocks")
    p.add_argument("--blocks", required=True)
    p = add("segmented-check", cmd_segmented_check, "classify column blocks")
    p.add_argument("--matrix", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("-r", type=int)
    p.add_argument("-N", type=int)
    p = add("hypergraph", cmd_hypergraph, "image hypergraph of a matrix on {1..N}")
    p.add_argument("--matrix", required=True)
    p.add_argument("-N", type=int, required=True)
    p = add("verify", cmd_verify, "is every r-coloring of {1..N} forced?")
    p.add_argument("--matrix", required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-N", type=int, required=True)
    p.add_argument("--witness-table", action="store_true",
                   help="for forced verdicts, list a witness per canonical coloring")
    p = add("min-n", cmd_min_n, "least forcing N")
    p.add_argument("--matrix", required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--n-max", type=int, default=64)
    p = add("witness", cmd_witness, "first monochromatic image under a coloring")
    p.add_argument("--matrix", required=True)
    p.add_argument("--coloring", required=True)
    p.add_argument("--bound", type=int)
    p = add("near-transfer", cmd_near_transfer, "monochromatic image inside (0, 2^-n)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("-r", type=int, help="color count (defaults to the oracle's)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--n-force", type=int)
    p.add_argument("--n-max", type=int, default=64)
    p = add("diag-witness", cmd_diag_witness, "witness for (A 0; 0 B) inside (0, 2^-n)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("-r", type=int)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--n-pick", type=int)
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--max-entry", type=int, default=4)
    p = add("ipstar-falsify", cmd_ipstar_falsify, "finite sums avoiding a set")
    p.add_argument("--predicate", required=True)
    p.add_argument("--generators", type=int, required=True)
    p.add_argument("--values", required=True)
    p.add_argument("--repeats", action="store_true")
    return parser


def _write(path: str, text: str):
    Path(path).write_text(text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        os.environ["IMAGEPR_THREADS"] = str(args.threads)
    try:
        outcome = args.func(args)
    except BudgetExceeded as exc:
        print(io.dumps({"error": "budget exhausted", "stats": exc.stats}))
        return EXIT_BUDGET
    except (io.FormatError, CapExceeded, TransferError, OracleError, ValueError, OverflowError) as exc:
        print(f"imagepr {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = io.dumps(outcome.payload)
    print(text)
    if args.output:
        _write(args.output, text)
    if args.certificate and outcome.certificate is not None:
        _write(args.certificate, io.dumps(outcome.certificate))
    return outcome.code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
