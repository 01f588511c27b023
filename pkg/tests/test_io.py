import io as stdio
import json

import pytest

from specreg.decompose import Params, decompose
from specreg.errors import DuplicateEdge, ParseError, SelfLoop, VertexOutOfRange
from specreg.generators import complete, gnp, path, star
from specreg.graph import build_graph
from specreg.io import (
    STEP_COLUMNS,
    emit_report,
    format_edge_list,
    parse_edge_list,
    parse_report,
    report_dict,
    validate,
)
from specreg.pipeline import audit, run_pipeline
from specreg.regularize import almost_regularize
from specreg.sweep import SWEEP_COLUMNS


def test_parse_infers_vertex_count():
    G = parse_edge_list("0 1\n1 2\n")
    assert G == path(3)


def test_parse_skips_comments():
    G = parse_edge_list("# header\n0 1\n")
    assert (G.n, G.m) == (2, 1)


def test_parse_self_loop_line():
    with pytest.raises(SelfLoop) as info:
        parse_edge_list("0 0\n")
    assert info.value.line == 1


def test_parse_duplicate_line_number():
    with pytest.raises(DuplicateEdge) as info:
        parse_edge_list("# c\n0 1\n\n2 1\n1 0\n")
    assert info.value.line == 5


def test_parse_bad_token_column():
    with pytest.raises(ParseError) as info:
        parse_edge_list("0 1\n1  x2\n")
    assert (info.value.line, info.value.column) == (2, 4)
    with pytest.raises(ParseError) as info:
        parse_edge_list("0 1 2\n")
    assert info.value.line == 1


def test_parse_explicit_vertex_count():
    G = parse_edge_list("0 1\n", n=5)
    assert G.n == 5
    with pytest.raises(VertexOutOfRange):
        parse_edge_list("0 7\n", n=5)


def test_parse_stream_and_lines():
    assert parse_edge_list(stdio.StringIO("0 1\n1 2\n")) == path(3)
    assert parse_edge_list(["0 1", "1 2"]) == path(3)


def test_round_trip_keeps_isolated_tail():
    G = build_graph(9, [(0, 3), (3, 4), (1, 2)])
    text = format_edge_list(G)
    assert parse_edge_list(text) == G
    assert format_edge_list(parse_edge_list(text)) == text


def test_round_trip_random():
    G = gnp(300, 0.05, seed=2)
    assert parse_edge_list(format_edge_list(G)) == G


def test_audit_json_has_schema_version():
    doc = parse_report(emit_report(audit(star(9))))
    assert doc["schema_version"] == "1.0" and doc["kind"] == "audit"
    validate(doc, "audit")


def test_json_round_trip_is_exact():
    _, trace = decompose(star(9), Params(c=1, eps=0.5, p_override=2, force=True))
    data = emit_report(trace)
    assert parse_report(data) == report_dict(trace)
    assert emit_report(parse_report(data)) == data
    validate(parse_report(data), "trace")


def test_regularity_and_pipeline_schemas():
    _, rep = almost_regularize(gnp(100, 0.3, seed=1))
    validate(parse_report(emit_report(rep)), "regularity")
    _, prep = run_pipeline(complete(400), Params(c=0.9, eps=0.5))
    validate(parse_report(emit_report(prep)), "pipeline")


def test_empty_sweep_csv_is_header_only():
    out = emit_report([], "csv", columns=SWEEP_COLUMNS).decode()
    assert out == ",".join(SWEEP_COLUMNS) + "\n"


def test_decompose_csv_one_row_per_step():
    _, trace = decompose(star(9), Params(c=1, eps=0.5, p_override=2, force=True))
    lines = emit_report(trace, "csv").decode().splitlines()
    assert lines[0].split(",") == STEP_COLUMNS
    assert len(lines) == 1 + len(trace.steps)
    first = dict(zip(STEP_COLUMNS, lines[1].split(",")))
    assert first["case_tag"] == "case3"
    assert first["f"] == format(trace.steps[0].f, ".12g")


def test_json_rejects_nothing_non_finite():
    doc = json.loads(emit_report({"kind": "x", "v": float("inf")}))
    assert doc["v"] is None
