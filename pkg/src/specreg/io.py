"""Edge-list text format, report serialisation and JSON schemas.

Edge-list format: ``#`` starts a comment line, blank lines are ignored, and
every other line holds two whitespace-separated 0-based vertex ids.  The
vertex count is ``1 + max id`` unless given explicitly or by a directive
comment ``# vertices N``, which :func:`format_edge_list` always writes so
trailing isolated vertices survive a round trip.
"""

from __future__ import annotations

import csv
import io
import json
import re
from typing import IO, Iterable

import jsonschema
import numpy as np

from .errors import GraphError, ParseError
from .graph import Graph, build_graph

SCHEMA_VERSION = "1.0"
_DIRECTIVE = re.compile(r"#\s*vertices\s+(\d+)\s*$")


_COMMENT = re.compile(r"(?m)^[ \t]*#.*$")
_CONTENT_LINE = re.compile(r"(?m)^[ \t\r]*\S")


def parse_edge_list(source: str | IO[str] | Iterable[str], n: int | None = None, lenient: bool = False) -> Graph:
    """Parse edge-list text into a :class:`Graph`.

    Errors carry the 1-based line number: malformed lines raise
    :class:`ParseError`; self-loops, duplicates and out-of-range ids raise the
    graph_core error with ``line`` set.
    """
    if not isinstance(source, str):
        source = source.read() if hasattr(source, "read") else "\n".join(source)
    fast = _parse_fast(source)
    if fast is not None:
        edges, declared = fast
        if n is None:
            n = declared if declared is not None else 1 + (int(edges.max()) if len(edges) else -1)
        try:
            return build_graph(n, edges, lenient=lenient)
        except GraphError:
            pass  # re-parse line by line to attach the line number
    return _parse_slow(source, n, lenient)


def _parse_fast(text: str):
    # Whole-buffer tokenising; returns None whenever a diagnostic is needed.
    directive = None
    if "#" in text:
        for m in _COMMENT.finditer(text):
            d = _DIRECTIVE.match(m.group().strip())
            if d:
                directive = int(d.group(1))
                break
        text = _COMMENT.sub("", text)
    tokens = text.split()
    rows = len(_CONTENT_LINE.findall(text))
    if len(tokens) != 2 * rows or not "".join(tokens).isdigit():
        return None
    return np.array(tokens, dtype=np.int64).reshape(-1, 2), directive


def _parse_slow(lines, n, lenient) -> Graph:
    lines = lines.splitlines()
    edges, where = [], []
    declared = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _DIRECTIVE.match(line)
            if m and declared is None:
                declared = int(m.group(1))
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(lineno, f"expected 2 vertex ids, found {len(fields)} fields")
        pair = []
        col = 1
        for tok in fields:
            col = raw.index(tok, col - 1) + 1
            if not tok.isdigit():
                raise ParseError(lineno, f"not a nonnegative integer: {tok!r}", column=col)
            pair.append(int(tok))
            col += len(tok)
        edges.append(pair)
        where.append(lineno)
    if n is None:
        n = declared
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    try:
        return build_graph(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2), lenient=lenient)
    except GraphError as exc:
        exc.line = where[exc.index] if exc.index is not None else None
        if exc.line is not None:
            exc.args = (f"line {exc.line}: {exc.args[0]}",)
        raise


def format_edge_list(G: Graph) -> str:
    body = "".join(f"{u} {v}\n" for u, v in G.edge_array().tolist())
    return f"# vertices {G.n}\n" + body


def read_graph(path: str | None, n: int | None = None, lenient: bool = False) -> Graph:
    import sys

    if path is None or path == "-":
        return parse_edge_list(sys.stdin.read(), n=n, lenient=lenient)
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), n=n, lenient=lenient)


# -- reports -----------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


def report_dict(report) -> dict:
    d = _jsonable(report)
    d.setdefault("schema_version", SCHEMA_VERSION)
    return d


def emit_report(report, fmt: str = "json", columns: list[str] | None = None) -> bytes:
    """Serialise a report.

    JSON keeps full float precision, so ``parse_report(emit_report(r))``
    reproduces ``report_dict(r)`` exactly. CSV takes a list of row dicts (or
    a report with ``rows``) and renders floats with 12 significant digits.
    """
    if fmt == "json":
        return (json.dumps(report_dict(report), indent=2, sort_keys=True, allow_nan=False) + "\n").encode()
    if fmt == "csv":
        rows = report if isinstance(report, list) else report_rows(report)
        cols = columns or (list(rows[0].keys()) if rows else [])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(data: bytes | str) -> dict:
    return json.loads(data)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


STEP_COLUMNS = [
    "index", "type_tag", "case_tag", "n_before", "m_before", "lambda_before", "residual", "mass_b1",
    "f", "chosen_j", "alpha_j", "beta_j", "gamma_j", "ratio_j", "n_after", "m_after", "lambda_after",
    "certificates_ok", "claims_ok",
]


def report_rows(report) -> list[dict]:
    """One CSV row per decompose step (for a trace or a pipeline report)."""
    d = report_dict(report)
    steps = d.get("steps") or d.get("decompose", {}).get("steps", [])
    rows = []
    for s in steps:
        row = {k: s.get(k) for k in STEP_COLUMNS}
        row["certificates_ok"] = all(c["holds"] for c in s["certificates"])
        row["claims_ok"] = all(c["holds"] for c in s["claims"])
        rows.append(row)
    return rows


# -- schemas -----------------------------------------------------------------

_num = {"type": ["number", "null"]}
_cert = {
    "type": "object",
    "required": ["name", "lhs", "relation", "rhs", "slack", "holds", "enforced"],
    "properties": {
        "name": {"type": "string"},
        "lhs": _num,
        "relation": {"enum": [">=", "<=", ">", "=="]},
        "rhs": _num,
        "slack": _num,
        "holds": {"type": "boolean"},
        "enforced": {"type": "boolean"},
    },
}
_step = {
    "type": "object",
    "required": [
        "index", "n_before", "m_before", "lambda_before", "residual", "type_tag", "case_tag", "f",
        "chosen_j", "alpha_j", "beta_j", "gamma_j", "alphas", "betas", "gammas", "n_after", "m_after",
        "certificates", "claims", "flags",
    ],
    "properties": {
        "type_tag": {"enum": ["type1", "type2"]},
        "case_tag": {"enum": ["case1", "case2", "case3", "none"]},
        "n_before": {"type": "integer", "minimum": 0},
        "n_after": {"type": "integer", "minimum": 0},
        "certificates": {"type": "array", "items": _cert},
        "claims": {"type": "array", "items": _cert},
    },
}
TRACE_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "regime", "p", "c", "eps", "n", "m", "lambda0", "threshold", "hypothesis_met",
        "k", "termination", "final", "steps", "final_checks", "warnings",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "regime": {"enum": ["theorem", "override"]},
        "k": {"type": "integer", "minimum": 0},
        "termination": {"enum": ["type1", "below_part_count", "stalled", "case3_witness_missing"]},
        "final": {
            "type": "object",
            "required": ["n_prime", "e_prime", "d_prime"],
        },
        "steps": {"type": "array", "items": _step},
        "final_checks": {"type": "array", "items": _cert},
    },
}
REGULARITY_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "n_prime", "e_prime", "delta_max", "delta_min", "K_achieved", "c_prime_achieved",
        "rounds", "bucket_path",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "n_prime": {"type": "integer", "minimum": 0},
        "K_achieved": _num,
        "bucket_path": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    },
}
PIPELINE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "kind", "input", "regime", "decompose", "regularity", "theorem_check"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"const": "pipeline"},
        "decompose": {k: v for k, v in TRACE_SCHEMA.items() if k != "required"}
        | {"required": [r for r in TRACE_SCHEMA["required"] if r != "schema_version"]},
        "regularity": {k: v for k, v in REGULARITY_SCHEMA.items() if k != "required"}
        | {"required": [r for r in REGULARITY_SCHEMA["required"] if r != "schema_version"]},
        "theorem_check": {
            "type": "object",
            "required": ["n_floor", "passed", "density_check", "enforced"],
        },
    },
}
AUDIT_SCHEMA = {
    "type": "object",
    "required": [
        "schema_version", "kind", "n", "m", "delta_min", "d_avg", "lam", "residual", "delta_max",
        "chain_holds",
    ],
    "properties": {"schema_version": {"const": SCHEMA_VERSION}, "kind": {"const": "audit"}},
}
SPECTRAL_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "kind", "lambda", "residual", "iterations", "component_size"],
    "properties": {"schema_version": {"const": SCHEMA_VERSION}, "kind": {"const": "spectral"}},
}
SCHEMAS = {
    "trace": TRACE_SCHEMA,
    "regularity": REGULARITY_SCHEMA,
    "pipeline": PIPELINE_SCHEMA,
    "audit": AUDIT_SCHEMA,
    "spectral": SPECTRAL_SCHEMA,
}


def validate(doc: dict, kind: str) -> None:
    jsonschema.validate(doc, SCHEMAS[kind])
