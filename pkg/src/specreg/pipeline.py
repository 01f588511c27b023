"""Decompose-then-regularize composition and the degree/spectral-radius audit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decompose import DecomposeTrace, Params, decompose
from .errors import CertificateViolation, NoEdges, SpecRegError
from .graph import Graph, degree_stats
from .regularize import RegularityReport, RegularizeParams, almost_regularize, verify_almost_regular
from .spectral import SolverConfig, dominant_eigenpair

SCHEMA_VERSION = "1.0"


class StageError(SpecRegError):
    """A pipeline stage failed; ``cause`` is the original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineReport:
    n: int
    m: int
    lam: float
    residual: float
    regime: str
    decompose: DecomposeTrace
    regularity: RegularityReport
    theorem_check: dict
    vertices: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "pipeline",
            "input": {"n": self.n, "m": self.m, "lambda": self.lam, "residual": self.residual},
            "regime": self.regime,
            "decompose": self.decompose.to_dict(),
            "regularity": self.regularity.to_dict(),
            "theorem_check": self.theorem_check,
            "vertices": [int(v) for v in self.vertices],
        }


def order_floor(n: int, eps: float) -> float:
    """``n ** ((2 eps^2 + eps) / 24)``: the guaranteed order of the regular subgraph."""
    return n ** ((2 * eps * eps + eps) / 24)


def run_pipeline(
    G: Graph, params: Params, reg: RegularizeParams | None = None
) -> tuple[Graph, PipelineReport]:
    """Decompose ``G``, then regularize the dense output with exponent ``1/2 + eps``.

    Errors from either stage are re-raised as :class:`StageError` tagged
    ``"decompose"`` or ``"regularize"``. In the theorem regime with the
    hypothesis met, a failed order or density check raises a
    :class:`StageError` tagged ``"theorem_check"`` wrapping a
    :class:`CertificateViolation`.
    """
    base = reg or RegularizeParams()
    reg = RegularizeParams(
        eps=0.5 + params.eps, c=base.c, K_target=base.K_target, theta=base.theta, max_rounds=base.max_rounds
    )
    try:
        dense, trace = decompose(G, params)
    except SpecRegError as exc:
        raise StageError("decompose", exc) from exc
    try:
        out, regularity = almost_regularize(dense, reg)
    except SpecRegError as exc:
        raise StageError("regularize", exc) from exc

    vertices = trace.vertices[regularity.vertices]
    regularity.vertices = vertices
    p = trace.p
    # Edge-density constant inherited from the decompose guarantee
    # d >= (4c/p^3) n^(1/2+eps), i.e. e >= (2c/p^3) n^(3/2+eps).
    c_prime = 2 * params.c / p**3
    floor = order_floor(G.n, params.eps)
    enforced = trace.regime == "theorem" and trace.hypothesis_met
    ok, _ = verify_almost_regular(out, regularity.K_achieved)
    check = {
        "n_floor": floor,
        "n_prime": out.n,
        "passed": bool(out.n >= floor),
        "density_check": {
            "c_prime": c_prime,
            "e_prime": out.m,
            "required": c_prime * out.n ** (1.5 + params.eps),
            "passed": bool(out.m >= c_prime * out.n ** (1.5 + params.eps)),
        },
        "almost_regular": ok,
        "K_achieved": regularity.K_achieved if math.isfinite(regularity.K_achieved) else None,
        "enforced": enforced,
    }
    report = PipelineReport(
        n=G.n,
        m=G.m,
        lam=trace.lambda0,
        residual=trace.steps[0].residual if trace.steps else 0.0,
        regime=trace.regime,
        decompose=trace,
        regularity=regularity,
        theorem_check=check,
        vertices=vertices,
    )
    if enforced and not (check["passed"] and check["density_check"]["passed"] and ok):
        raise StageError("theorem_check", CertificateViolation("theorem-level pipeline check failed", check, report))
    return out, report


@dataclass
class AuditRecord:
    n: int
    m: int
    delta_min: int
    d_avg: float
    lam: float
    residual: float
    delta_max: int
    chain_holds: bool
    min_equals_avg: bool
    avg_equals_lambda: bool
    lambda_equals_max: bool
    regular: bool
    regularity_consistent: bool
    lambda_at_least_avg: bool
    half_power_ratio: dict | None = None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["schema_version"] = SCHEMA_VERSION
        d["kind"] = "audit"
        return d


def audit(G: Graph, cfg: SolverConfig | None = None, eps: float | None = None) -> AuditRecord:
    """Check ``min_deg <= avg_deg <= lambda <= max_deg`` on ``G``.

    Equalities are flagged within the solver tolerance. For a regular graph
    all three should hold; ``regularity_consistent`` says whether the flags
    agree with the degree sequence. With ``eps`` the record also compares
    lambda against ``n^(1/2 + eps) / 2``.
    """
    cfg = cfg or SolverConfig()
    stats = degree_stats(G)
    d = stats.d_avg
    try:
        pair = dominant_eigenpair(G, cfg)
        lam, res = pair.lam, pair.residual
    except NoEdges:
        lam, res = 0.0, 0.0
    tol = max(cfg.tol, res) + 1e-12 * max(1.0, lam)
    chain = stats.delta_min <= d <= lam + tol and lam <= stats.delta_max + tol
    eq_min_avg = stats.delta_min == stats.d_exact
    eq_avg_lam = abs(lam - d) <= tol
    eq_lam_max = abs(lam - stats.delta_max) <= tol
    regular = stats.delta_min == stats.delta_max
    rec = AuditRecord(
        n=G.n,
        m=G.m,
        delta_min=stats.delta_min,
        d_avg=d,
        lam=lam,
        residual=res,
        delta_max=stats.delta_max,
        chain_holds=bool(chain),
        min_equals_avg=bool(eq_min_avg),
        avg_equals_lambda=bool(eq_avg_lam),
        lambda_equals_max=bool(eq_lam_max),
        regular=bool(regular),
        regularity_consistent=bool(regular == (eq_min_avg and eq_avg_lam and eq_lam_max)),
        lambda_at_least_avg=bool(lam + tol >= 2 * G.m / G.n),
    )
    if eps is not None:
        bound = 0.5 * G.n ** (0.5 + eps)
        rec.half_power_ratio = {"eps": eps, "bound": bound, "passed": bool(lam >= bound)}
    return rec
