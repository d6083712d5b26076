"""JSON wire formats. Rationals travel as strings ("3", "-1/2")."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .constructions import BlockStructure, InsertionSpec, SegmentedReport
from .ipr_engine import Coloring, ColoringCertificate, ImageHypergraph, ThresholdResult, Witness
from .matrix_core import FirstEntriesReport, RationalMatrix, ValidationReport, to_rational
from .near_idempotent import CombinedWitness, NearWitness
from .sequence_tools import FalsificationWitness

SCHEMA_VERSION = 1


class FormatError(ValueError):
    """Malformed input; ``field`` names the offending location."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_json(source: str, field: str = "input") -> Any:
    """Parse inline JSON, or read it from the file named by ``source``."""
    text = source.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise FormatError(field, f"cannot read {source!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(field, f"invalid JSON ({exc.msg} at line {exc.lineno})") from None


def rational_str(q: Fraction) -> str:
    return str(Fraction(q))


def parse_rational(value, field: str) -> Fraction:
    if isinstance(value, float) or isinstance(value, bool):
        raise FormatError(field, f"expected an integer or 'p/q' string, got {value!r}")
    try:
        return to_rational(value)
    except (TypeError, ValueError) as exc:
        raise FormatError(field, str(exc)) from None


def parse_sequence(data, field: str = "seq") -> list[Fraction]:
    if not isinstance(data, list):
        raise FormatError(field, "expected a JSON array")
    return [parse_rational(x, f"{field}[{k}]") for k, x in enumerate(data)]


def parse_int_sequence(data, field: str = "seq") -> list[int]:
    seq = parse_sequence(data, field)
    for k, q in enumerate(seq):
        if q.denominator != 1:
            raise FormatError(f"{field}[{k}]", f"expected an integer, got {q}")
    return [int(q) for q in seq]


def parse_matrix(data, field: str = "matrix") -> RationalMatrix:
    if not isinstance(data, dict) or "rows" not in data:
        raise FormatError(field, 'expected an object with a "rows" array')
    rows = data["rows"]
    if not isinstance(rows, list) or not rows:
        raise FormatError(f"{field}.rows", "expected a nonempty array of rows")
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise FormatError(f"{field}.rows[{i}]", "expected an array")
        parsed.append([parse_rational(x, f"{field}.rows[{i}][{j}]") for j, x in enumerate(row)])
    try:
        return RationalMatrix.of(parsed)
    except ValueError as exc:
        raise FormatError(f"{field}.rows", str(exc)) from None


def matrix_json(M: RationalMatrix) -> dict:
    return {"rows": [[rational_str(x) for x in row] for row in M.rows]}


def parse_insertion_spec(data, field: str = "spec") -> InsertionSpec:
    if not isinstance(data, dict):
        raise FormatError(field, "expected an object with C and Bs")
    if "C" not in data or "Bs" not in data:
        raise FormatError(field, "missing C or Bs")
    C = parse_matrix(data["C"], f"{field}.C")
    if not isinstance(data["Bs"], list):
        raise FormatError(f"{field}.Bs", "expected an array of matrices")
    Bs = [parse_matrix(B, f"{field}.Bs[{t}]") for t, B in enumerate(data["Bs"])]
    try:
        return InsertionSpec(C, tuple(Bs))
    except ValueError as exc:
        raise FormatError(f"{field}.Bs", str(exc)) from None


def parse_structure(data, field: str = "structure") -> BlockStructure:
    if not isinstance(data, dict) or "boundaries" not in data:
        raise FormatError(field, 'expected an object with "boundaries"')
    try:
        return BlockStructure(tuple(parse_int_sequence(data["boundaries"], f"{field}.boundaries")))
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{field}.boundaries", str(exc)) from None


def parse_coloring(data, field: str = "coloring") -> Coloring:
    if not isinstance(data, dict) or "colors" not in data:
        raise FormatError(field, 'expected an object with "colors"')
    colors = parse_int_sequence(data["colors"], f"{field}.colors")
    N = int(data.get("N", len(colors)))
    r = int(data.get("r", max(colors, default=1)))
    try:
        return Coloring(N, r, tuple(colors))
    except ValueError as exc:
        raise FormatError(field, str(exc)) from None


def coloring_json(chi: Coloring) -> dict:
    return {"N": chi.N, "r": chi.r, "colors": list(chi.colors)}


def validation_json(rep: ValidationReport) -> dict:
    return {
        "admissible": rep.admissible,
        "zero_rows": list(rep.zero_rows),
        "negative_entries": [list(p) for p in rep.negative_entries],
        "non_integral_entries": [list(p) for p in rep.non_integral_entries],
    }


def first_entries_json(rep: FirstEntriesReport) -> dict:
    return {
        "satisfies": rep.satisfies,
        "monic": rep.monic,
        "first_entries": [rational_str(c) for c in sorted(rep.first_entries)],
        "violations": [list(v) for v in rep.violations],
    }


def certificate_json(cert: ColoringCertificate) -> dict:
    out = {"verdict": cert.verdict, "stats": dict(cert.stats)}
    if cert.coloring is not None:
        out["coloring"] = coloring_json(cert.coloring)
    if cert.witness_table is not None:
        out["witness_table"] = [
            {"coloring": list(chi.colors), "witness": None if w is None else witness_json(w)}
            for chi, w in cert.witness_table
        ]
    return out


def hypergraph_json(H: ImageHypergraph) -> dict:
    return {"N": H.N, "edges": [list(e) for e in H.edges], "provenance": [list(x) for x in H.provenance]}


def threshold_json(res: ThresholdResult) -> dict:
    out = {"r": res.r, "threshold": res.threshold, "searched_up_to": res.searched_up_to}
    if res.last_escape is not None:
        out["escape"] = certificate_json(res.last_escape)
    return out


def witness_json(w: Witness) -> dict:
    return {"color": w.color, "x": list(w.x), "image": [rational_str(q) for q in w.image]}


def near_witness_json(w: NearWitness) -> dict:
    return {
        "color": w.color,
        "n": w.n,
        "scale": rational_str(w.scale),
        "x": list(w.x),
        "y": [rational_str(q) for q in w.y],
        "image": [rational_str(q) for q in w.image],
    }


def combined_witness_json(w: CombinedWitness) -> dict:
    return {
        "color": w.color,
        "a": rational_str(w.a),
        "x": list(w.x),
        "i": w.i,
        "y": [rational_str(q) for q in w.y],
        "z": [rational_str(q) for q in w.z],
        "image": [rational_str(q) for q in w.image],
        "rows": [{"block": b, "value": rational_str(val), "color": c} for b, val, c in w.rows],
    }


def falsification_json(w: FalsificationWitness) -> dict:
    return {"generators": [str(g) for g in w.generators], "fs_sample": [rational_str(q) for q in w.fs_sample]}


def segmented_json(rep: SegmentedReport) -> dict:
    return {
        "budget": None if rep.budget is None else {"r": rep.budget[0], "N": rep.budget[1]},
        "verdicts": list(rep.verdicts),
        "blocks": [
            {
                "index": b.index,
                "columns": list(b.columns),
                "nonzero_rows": list(b.nonzero_rows),
                "classification": b.classification,
                "first_entries": b.first_entries,
                "monic": b.monic,
                "forced_at_budget": b.forced_at_budget,
            }
            for b in rep.blocks
        ],
    }
