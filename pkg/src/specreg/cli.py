"""``specreg`` command-line interface.

Exit codes: 0 ok, 2 spectral hypothesis not met, 3 bad input (parse errors,
invalid graphs or parameters, usage errors), 4 certificate or verification
failure (including a missing case-3 witness), 5 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io as sio
from .decompose import Params, decompose
from .errors import (
    Case3WitnessMissing,
    CertificateViolation,
    EmptyGraph,
    GraphError,
    HypothesisNotMet,
    NoEdges,
    ParameterOutOfRange,
    ParseError,
)
from .generators import FAMILIES, GenSpec
from .pipeline import StageError, audit, run_pipeline
from .regularize import RegularizeParams, almost_regularize, verify_almost_regular
from .spectral import SolverConfig, dominant_eigenpair
from .sweep import SWEEP_COLUMNS, SweepSpec, sweep

EXIT_OK, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_CERTIFICATE, EXIT_INTERNAL = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which here means "hypothesis not met".
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--input", "-i", help="edge-list file (default: stdin)")
    g.add_argument("--output", "-o", help="main output file (default: stdout)")
    g.add_argument("--format", "-f", choices=("json", "csv"), default=None, help="report format")
    g.add_argument("--seed", type=int, default=0, help="random seed (sweep: seed base)")
    g.add_argument("--tol", type=float, default=1e-10, help="eigen-solver residual tolerance")
    g.add_argument("--max-iter", type=int, default=100_000, help="eigen-solver iteration cap")
    g.add_argument("--n", type=int, default=None, dest="n_override",
                   help="vertex count of the input (default: 1 + max id or the '# vertices' header)")
    g.add_argument("--lenient", action="store_true", help="drop self-loops and duplicate edges")

    parser = _Parser(prog="specreg", description="Spectral-radius dense subgraph toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="write a generated graph as an edge list")
    p.add_argument("family", nargs="?", choices=FAMILIES)
    p.add_argument("--size", type=int, dest="size", help="vertex count")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--xi", type=float)
    p.add_argument("--prob", type=float, help="edge probability (gnp)")
    p.add_argument("--m", type=int, help="edge count (gnm)")
    p.add_argument("--spec", help="GenSpec JSON file instead of flags")

    sub.add_parser("spectral", parents=[common], help="dominant eigenvalue of the input")

    p = sub.add_parser("audit", parents=[common], help="degree / spectral radius chain")
    p.add_argument("--eps", type=float, help="also compare lambda against n^(1/2+eps)/2")

    def decompose_flags(p):
        p.add_argument("--epsilon", type=float, default=0.5)
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--p", type=int, dest="p_override", help="override the part count")
        p.add_argument("--force", action="store_true", help="run even if the hypothesis fails")

    p = sub.add_parser("decompose", parents=[common], help="extract a dense subgraph")
    decompose_flags(p)
    p.add_argument("--trace-out", help="write the step trace here")

    def regularize_flags(p, eps=True):
        if eps:
            p.add_argument("--eps", type=float, default=1.0)
        p.add_argument("--k-target", type=float, default=64.0)
        p.add_argument("--theta", type=float, default=0.5)

    p = sub.add_parser("regularize", parents=[common], help="extract an almost-regular subgraph")
    regularize_flags(p)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--report-out", help="write the regularity report here")

    p = sub.add_parser("pipeline", parents=[common], help="decompose then regularize")
    decompose_flags(p)
    regularize_flags(p, eps=False)
    p.add_argument("--graph-out", help="write the final subgraph here")

    p = sub.add_parser("verify", parents=[common], help="check almost-regularity or a report's schema")
    p.add_argument("--k", type=float, help="check max_deg <= K min_deg on the input graph")
    p.add_argument("--report", help="JSON report to validate")
    p.add_argument("--kind", choices=sorted(sio.SCHEMAS), help="schema for --report (default: guess)")

    p = sub.add_parser("sweep", parents=[common], help="pipeline over a parameter grid, CSV out")
    p.add_argument("--family", choices=FAMILIES, default="gnp")
    p.add_argument("--n-values", type=_ints, default=[200])
    p.add_argument("--eps-values", type=_floats, default=[0.5])
    p.add_argument("--c-values", type=_floats, default=[0.5])
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--xi", type=float)
    p.add_argument("--prob", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=int, dest="p_override")
    p.add_argument("--force", action="store_true")
    return parser


def _write(path, data: bytes | str):
    if isinstance(data, str):
        data = data.encode()
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _solver(args) -> SolverConfig:
    return SolverConfig(tol=args.tol, max_iterations=args.max_iter)


def _graph(args):
    return sio.read_graph(args.input, n=args.n_override, lenient=args.lenient)


def _cmd_generate(args):
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = GenSpec.from_dict(json.load(fh))
    else:
        if args.family is None:
            raise UsageError("generate: give a family or --spec")
        spec = GenSpec(args.family, n=args.size, a=args.a, b=args.b, xi=args.xi, p=args.prob, m=args.m,
                       seed=args.seed)
    _write(args.output, sio.format_edge_list(spec.build()))
    return EXIT_OK


def _cmd_spectral(args):
    G = _graph(args)
    pair = dominant_eigenpair(G, _solver(args))
    doc = {"kind": "spectral", "lambda": pair.lam, "residual": pair.residual, "iterations": pair.iterations,
           "component_size": int(len(pair.component))}
    _write(args.output, sio.emit_report(doc))
    return EXIT_OK


def _cmd_audit(args):
    rec = audit(_graph(args), _solver(args), eps=args.eps)
    _write(args.output, sio.emit_report(rec))
    return EXIT_OK if rec.chain_holds else EXIT_CERTIFICATE


def _params(args) -> Params:
    return Params(c=args.c, eps=args.epsilon, p_override=args.p_override, force=args.force, solver=_solver(args))


def _cmd_decompose(args):
    G = _graph(args)
    try:
        out, trace = decompose(G, _params(args))
    except (CertificateViolation, Case3WitnessMissing) as exc:
        if args.trace_out and getattr(exc, "trace", None) is not None:
            _write(args.trace_out, sio.emit_report(exc.trace, args.format or "json"))
        raise
    if args.trace_out:
        _write(args.trace_out, sio.emit_report(trace, args.format or "json"))
    _write(args.output, sio.format_edge_list(out))
    return EXIT_OK


def _cmd_regularize(args):
    G = _graph(args)
    params = RegularizeParams(eps=args.eps, c=args.c, K_target=args.k_target, theta=args.theta)
    out, report = almost_regularize(G, params)
    if args.report_out:
        _write(args.report_out, sio.emit_report(report))
    _write(args.output, sio.format_edge_list(out))
    return EXIT_OK


def _cmd_pipeline(args):
    G = _graph(args)
    reg = RegularizeParams(K_target=args.k_target, theta=args.theta)
    out, report = run_pipeline(G, _params(args), reg)
    if args.graph_out:
        _write(args.graph_out, sio.format_edge_list(out))
    _write(args.output, sio.emit_report(report, args.format or "json"))
    return EXIT_OK


def _cmd_verify(args):
    if args.report:
        with open(args.report, encoding="utf-8") as fh:
            doc = json.load(fh)
        kind = args.kind or _guess_kind(doc)
        try:
            sio.validate(doc, kind)
        except Exception as exc:  # jsonschema.ValidationError
            _write(args.output, sio.emit_report({"kind": "verify", "schema": kind, "valid": False,
                                                 "error": str(exc).splitlines()[0]}))
            return EXIT_CERTIFICATE
        _write(args.output, sio.emit_report({"kind": "verify", "schema": kind, "valid": True}))
        return EXIT_OK
    if args.k is None:
        raise UsageError("verify: give --k or --report")
    G = _graph(args)
    ok, witness = verify_almost_regular(G, args.k)
    doc = {"kind": "verify", "K": args.k, "almost_regular": ok, "witness": list(witness) if witness else None}
    _write(args.output, sio.emit_report(doc))
    return EXIT_OK if ok else EXIT_CERTIFICATE


def _guess_kind(doc: dict) -> str:
    if doc.get("kind") in sio.SCHEMAS:
        return doc["kind"]
    if "steps" in doc:
        return "trace"
    return "regularity"


def _cmd_sweep(args):
    template = GenSpec(args.family, xi=args.xi, p=args.prob, m=args.m)
    spec = SweepSpec(
        template=template, n_values=args.n_values, eps_values=args.eps_values, c_values=args.c_values,
        repetitions=args.repetitions, seed_base=args.seed, p_override=args.p_override, force=args.force,
        output=args.output,
    )
    rows = sweep(spec, _solver(args))
    if args.format == "json":
        data = sio.emit_report({"kind": "sweep", "rows": rows})
    else:
        data = sio.emit_report(rows, "csv", columns=SWEEP_COLUMNS)
    _write(args.output, data)
    return EXIT_OK


COMMANDS = {
    "generate": _cmd_generate,
    "spectral": _cmd_spectral,
    "audit": _cmd_audit,
    "decompose": _cmd_decompose,
    "regularize": _cmd_regularize,
    "pipeline": _cmd_pipeline,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, HypothesisNotMet):
        return EXIT_HYPOTHESIS
    if isinstance(exc, (CertificateViolation, Case3WitnessMissing)):
        return EXIT_CERTIFICATE
    if isinstance(exc, (UsageError, ParseError, GraphError, ParameterOutOfRange, NoEdges, EmptyGraph, OSError,
                        json.JSONDecodeError)):
        return EXIT_INPUT
    return EXIT_INTERNAL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except Exception as exc:
        print(f"specreg: error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
