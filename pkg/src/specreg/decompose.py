"""Perron-vector decomposition: shrink a graph of large spectral radius to a dense subgraph.

Each round takes the current graph's Perron vector ``x`` and sorts vertices
by their entries. It then splits them into ``p`` near-equal parts
``B_1..B_p``, with ``B_1`` holding the largest entries. If ``B_1`` carries at
most ``1/2 - 1/p^2`` of the squared mass ("type 1"), the answer is ``G - B_1``.
Otherwise ("type 2") one of three extractions produces a smaller graph with
comparable spectral radius, and the process repeats on it:

* case 1: ``G[B_1]`` when the eigenweight ``f`` inside ``B_1`` is at least ``lambda/sqrt(p)``;
* case 2: ``G[B_1 | B_j]`` when the mass ``alpha_j`` outside ``B_1 | B_j`` is small;
* case 3: the ``B_1``-``B_j`` crossing edges, for the first ``j`` with
  ``gamma_j / sqrt(3 beta_j) > 1/(9 sqrt(p))``.

Every inequality used to justify a step is evaluated on the computed
eigenpair and stored as a :class:`Certificate`.  ``certificates`` hold for
any ``p``; ``claims`` additionally need the theorem's ``p`` and hypothesis,
and are enforced only in that regime (``regime == "theorem"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import (
    Case3WitnessMissing,
    CertificateViolation,
    HypothesisNotMet,
    ParameterOutOfRange,
    PartCountOverflow,
    TooFewVertices,
    WrongType,
)
from .generators import as_fraction
from .graph import Graph, bipartite_between, drop_isolated, induced_subgraph
from .spectral import EigenPair, SolverConfig, dominant_eigenpair, edge_weight, rayleigh

# Relative allowance for float rounding on top of the residual slack.
ROUNDING = 1e-12
INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Params:
    c: float
    eps: float
    p_override: int | None = None
    force: bool = False
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not self.c > 0:
            raise ParameterOutOfRange(f"c must be positive, got {self.c}")
        if not (0 < self.eps <= 0.5):
            raise ParameterOutOfRange(f"eps must lie in (0, 1/2], got {self.eps}")
        if self.p_override is not None and self.p_override < 2:
            raise ParameterOutOfRange(f"p_override must be >= 2, got {self.p_override}")

    @property
    def regime(self) -> str:
        return "theorem" if self.p_override is None else "override"

    def part_count(self) -> int:
        return theorem_part_count(self.eps) if self.p_override is None else int(self.p_override)


@dataclass
class Certificate:
    name: str
    lhs: float
    relation: str
    rhs: float
    slack: float
    holds: bool
    enforced: bool = True

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": _num(self.lhs),
            "relation": self.relation,
            "rhs": _num(self.rhs),
            "slack": _num(self.slack),
            "holds": self.holds,
            "enforced": self.enforced,
        }


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def certify(name, lhs, relation, rhs, slack=0.0, enforced=True) -> Certificate:
    """Evaluate ``lhs relation rhs`` allowing ``slack`` plus a rounding margin.

    Strict ``>`` gets no allowance: it records a selection rule exactly as
    the algorithm applied it.
    """
    lhs, rhs = float(lhs), float(rhs)
    if relation == ">":
        holds = lhs > rhs
    else:
        margin = slack + ROUNDING * max(1.0, abs(lhs), abs(rhs) if math.isfinite(rhs) else 1.0)
        if relation == ">=":
            holds = lhs >= rhs - margin
        elif relation == "<=":
            holds = lhs <= rhs + margin
        elif relation == "==":
            holds = abs(lhs - rhs) <= margin
        else:
            raise ValueError(f"unknown relation {relation!r}")
    return Certificate(name, lhs, relation, rhs, float(slack), bool(holds), enforced)


@dataclass
class PartitionPlan:
    p: int
    eta: float
    parts: list
    masses: np.ndarray
    b1_min_entry: float
    labels: np.ndarray

    def sizes(self) -> list[int]:
        return [len(b) for b in self.parts]


@dataclass
class DecomposeStep:
    index: int
    n_before: int
    m_before: int
    lambda_before: float
    residual: float
    slack: float
    mass_b1: float
    type_tag: str
    case_tag: str = "none"
    f: float | None = None
    chosen_j: int | None = None
    alpha_j: float | None = None
    beta_j: float | None = None
    gamma_j: float | None = None
    ratio_j: float | None = None
    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    part_union_size: int | None = None
    n_after: int = 0
    m_after: int = 0
    lambda_after: float | None = None
    certificates: list = field(default_factory=list)
    claims: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def violations(self) -> list[Certificate]:
        return [c for c in self.certificates + self.claims if c.enforced and not c.holds]

    def to_dict(self) -> dict:
        d = {
            k: getattr(self, k)
            for k in (
                "index", "n_before", "m_before", "type_tag", "case_tag", "chosen_j",
                "part_union_size", "n_after", "m_after", "flags",
            )
        }
        for k in (
            "lambda_before", "residual", "slack", "mass_b1", "f", "alpha_j", "beta_j",
            "gamma_j", "ratio_j", "lambda_after",
        ):
            d[k] = _num(getattr(self, k))
        d["alphas"] = [_num(v) for v in self.alphas]
        d["betas"] = [_num(v) for v in self.betas]
        d["gammas"] = [_num(v) for v in self.gammas]
        d["certificates"] = [c.to_dict() for c in self.certificates]
        d["claims"] = [c.to_dict() for c in self.claims]
        return d


@dataclass
class DecomposeTrace:
    regime: str
    p: int
    eta: float
    c: float
    eps: float
    n: int
    m: int
    lambda0: float
    threshold: float
    hypothesis_met: bool
    forced: bool
    steps: list = field(default_factory=list)
    k: int = 0
    termination: str = ""
    termination_bound: float | None = None
    vertices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False)
    final_checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def final(self) -> dict:
        n1 = int(len(self.vertices))
        e1 = self.steps[-1].m_after if self.steps else self.m
        return {"n_prime": n1, "e_prime": int(e1), "d_prime": (2.0 * e1 / n1) if n1 else 0.0}

    def violations(self) -> list[Certificate]:
        out = [v for s in self.steps for v in s.violations()]
        return out + [c for c in self.final_checks if c.enforced and not c.holds]

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "p": self.p,
            "eta": self.eta,
            "c": self.c,
            "eps": self.eps,
            "n": self.n,
            "m": self.m,
            "lambda0": _num(self.lambda0),
            "threshold": _num(self.threshold),
            "hypothesis_met": self.hypothesis_met,
            "forced": self.forced,
            "k": self.k,
            "termination": self.termination,
            "termination_bound": _num(self.termination_bound),
            "final": self.final,
            "vertices": [int(v) for v in self.vertices],
            "steps": [s.to_dict() for s in self.steps],
            "final_checks": [c.to_dict() for c in self.final_checks],
            "warnings": list(self.warnings),
        }


class Extraction(NamedTuple):
    graph: Graph
    kept: np.ndarray
    step: DecomposeStep


def theorem_part_count(eps) -> int:
    """``ceil(18 ** ((2 - 2 eps) / eps))``, exactly.

    ``eps`` is rationalised first (0.4 -> 2/5), so integer exponents give the
    exact power of 18. Non-integer rational exponents give an irrational
    power, whose ceiling is taken at 60 significant digits.
    """
    e = as_fraction(eps)
    if not (0 < e <= Fraction(1, 2)):
        raise ParameterOutOfRange(f"eps must lie in (0, 1/2], got {eps}")
    expo = (2 - 2 * e) / e
    if expo.denominator == 1:
        val = 18 ** expo.numerator
    else:
        with mpmath.workdps(60):
            val = int(mpmath.ceil(mpmath.power(18, mpmath.mpf(expo.numerator) / expo.denominator)))
    if val > INT64_MAX:
        raise PartCountOverflow(f"p = ceil(18^{expo}) exceeds 2^63 for eps = {eps}; use p_override")
    return int(val)



def make_partition(G: Graph, pair: EigenPair, p: int) -> PartitionPlan:
    """Split ``V`` into ``p`` parts by descending eigenvector entry (ties: smaller id).

    ``B_1`` takes the top ``ceil(n/p)``; the rest are dealt round-robin to
    ``B_2..B_p`` so part sizes differ by at most one.
    """
    n = G.n
    if p < 2:
        raise ParameterOutOfRange(f"p must be >= 2, got {p}")
    if n < p:
        raise TooFewVertices(f"{n} vertices cannot fill {p} parts")
    x = pair.x
    order = np.lexsort((np.arange(n), -x))
    b1 = -(-n // p)
    labels = np.empty(n, dtype=np.int64)
    labels[order[:b1]] = 0
    labels[order[b1:]] = 1 + np.arange(n - b1) % (p - 1)
    parts = [np.flatnonzero(labels == i) for i in range(p)]
    masses = np.bincount(labels, weights=x * x, minlength=p)
    return PartitionPlan(
        p=p,
        eta=1.0 / p**2,
        parts=parts,
        masses=masses,
        b1_min_entry=float(x[order[b1 - 1]]),
        labels=labels,
    )


def classify(plan: PartitionPlan) -> str:
    return "type1" if plan.masses[0] <= 0.5 - plan.eta else "type2"


def _edge_terms(G: Graph, x: np.ndarray, labels: np.ndarray):
    e = G.edge_array()
    w = x[e[:, 0]] * x[e[:, 1]]
    return e, w, labels[e[:, 0]], labels[e[:, 1]]


def _new_step(G, pair, plan, index, type_tag) -> DecomposeStep:
    return DecomposeStep(
        index=index,
        n_before=G.n,
        m_before=G.m,
        lambda_before=pair.lam,
        residual=pair.residual,
        slack=pair.slack,
        mass_b1=float(plan.masses[0]),
        type_tag=type_tag,
    )


def _eigen_identity(pair, w_total):
    return certify("eigen_identity", 2.0 * w_total, "==", pair.lam, pair.slack)


def extract_type1(G: Graph, pair: EigenPair, plan: PartitionPlan, params: Params, index: int = 0) -> Extraction:
    """Type-1 output ``G - B_1``, with its weight, entry and edge-count certificates."""
    if classify(plan) != "type1":
        raise WrongType("extract_type1 needs a type-1 partition")
    n, p, eta, lam, slack = G.n, plan.p, plan.eta, pair.lam, pair.slack
    x = pair.x
    _, w, lu, lv = _edge_terms(G, x, plan.labels)
    outside = (lu != 0) & (lv != 0)
    rest = np.flatnonzero(plan.labels != 0)
    H, kept = induced_subgraph(G, rest)

    step = _new_step(G, pair, plan, index, "type1")
    step.n_after, step.m_after = H.n, H.m
    max_sq = float((x[rest] ** 2).max()) if len(rest) else 0.0
    step.certificates = [
        _eigen_identity(pair, w.sum()),
        certify("type1_mass", plan.masses[0], "<=", 0.5 - eta),
        certify("outside_weight", w[outside].sum(), ">=", eta * lam, slack),
        certify("entry_bound", max_sq, "<=", (0.5 - eta) / (n // p)),
        certify("edge_bound", H.m, ">=", 2 * eta * lam * n / p, slack * n),
        certify("type1_order", H.n, ">=", (p - 1) * n // p),
    ]
    return Extraction(H, kept, step)


def _restriction_rayleigh(H: Graph, kept: np.ndarray, x: np.ndarray) -> float:
    y = x[kept]
    norm = np.linalg.norm(y)
    return rayleigh(H, y / norm) if norm > 0 else 0.0


def extract_type2(G: Graph, pair: EigenPair, plan: PartitionPlan, params: Params, index: int = 0) -> Extraction:
    """One type-2 shrinking step (cases 1-3), recording all proof quantities."""
    if classify(plan) != "type2":
        raise WrongType("extract_type2 needs a type-2 partition")
    n, p, lam, slack = G.n, plan.p, pair.lam, pair.slack
    x, labels, masses = pair.x, plan.labels, plan.masses
    sq = math.sqrt(p)
    theorem_regime = params.regime == "theorem"
    _, w, lu, lv = _edge_terms(G, x, labels)

    f = float(w[(lu == 0) & (lv == 0)].sum())
    cross = (lu == 0) != (lv == 0)
    other = np.where(lu == 0, lv, lu)[cross]
    gammas = np.bincount(other, weights=w[cross], minlength=p)[1:] / lam
    betas = masses[1:]
    # Mass outside B_1 | B_i as prefix + suffix sums, so exact zeros stay exact.
    pre = np.concatenate([[0.0], np.cumsum(betas)[:-1]])
    suf = np.concatenate([np.cumsum(betas[::-1])[::-1][1:], [0.0]])
    alphas = pre + suf
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(betas > 0, gammas / np.sqrt(3.0 * betas), 0.0)

    step = _new_step(G, pair, plan, index, "type2")
    step.f = f
    step.alphas, step.betas, step.gammas = alphas.tolist(), betas.tolist(), gammas.tolist()
    b1 = plan.parts[0]
    b1_size = len(b1)
    certs = [_eigen_identity(pair, w.sum()), certify("type2_mass", plan.masses[0], ">", 0.5 - plan.eta)]

    if f >= lam / sq:
        step.case_tag = "case1"
        H, kept = induced_subgraph(G, b1)
        step.part_union_size = b1_size
        certs += [
            certify("case1_f", f, ">=", lam / sq),
            certify("case1_lambda", _restriction_rayleigh(H, kept, x), ">=", lam / sq, slack),
            certify("case1_size", H.n, "<=", b1_size),
        ]
    else:
        small = np.flatnonzero(alphas <= 0.5 - 1.0 / sq)
        if len(small):
            j = int(small[0]) + 2
            step.case_tag = "case2"
            union = np.union1d(b1, plan.parts[j - 1])
            H, kept = induced_subgraph(G, union)
            step.part_union_size = len(union)
            inside = float(edge_weight(H, x[kept]))
            certs += [
                certify("case2_alpha", alphas[j - 2], "<=", 0.5 - 1.0 / sq),
                certify("case2_weight", inside, ">=", lam / sq, slack),
                certify("case2_lambda", _restriction_rayleigh(H, kept, x), ">=", lam / sq, slack),
                certify("case2_size", H.n, "<=", 2 * b1_size),
            ]
        else:
            step.case_tag = "case3"
            thresh = 1.0 / (9.0 * sq)
            hits = np.flatnonzero(ratios > thresh)
            forced = False
            if len(hits):
                i = int(hits[0])
            elif params.force and ratios.max() > 0:
                i = int(np.argmax(ratios))
                forced = True
                step.flags.append("forced_case3_witness")
            else:
                raise Case3WitnessMissing(
                    f"no j in 2..{p} has gamma_j/sqrt(3 beta_j) > 1/(9 sqrt p) = {thresh:.6g}"
                    f" (max {ratios.max():.6g})",
                    ratios.tolist(),
                )
            j = i + 2
            bj = plan.parts[j - 1]
            full, full_kept = bipartite_between(G, b1, bj)
            step.part_union_size = full.n
            scale = math.sqrt((alphas[i] + betas[i]) / betas[i])
            y = x[full_kept].copy()
            y[np.isin(full_kept, bj)] *= scale
            ynorm = float(np.linalg.norm(y))
            ray_y = 2.0 * edge_weight(full, y)
            H, sub = drop_isolated(full)
            kept = full_kept[sub]
            in_b1 = np.isin(kept, b1)
            e = H.edge_array()
            crossing = bool(np.all(in_b1[e[:, 0]] != in_b1[e[:, 1]]))
            certs += [
                certify("crossing_witness", ratios[i], ">", thresh, enforced=not forced),
                certify("y_unit", abs(ynorm - 1.0), "<=", 1e-9),
                certify("case3_crossing", int(crossing), ">=", 1),
                certify("case3_size", full.n, "<=", 2 * b1_size),
            ]
            step.claims += [
                certify("case3_y_bound", ray_y, ">=", 2 * ratios[i] * lam, slack, enforced=theorem_regime),
                certify("case3_lambda", ray_y, ">=", 2 * lam / (9 * sq), slack, enforced=theorem_regime),
            ]
        step.chosen_j = j
        step.alpha_j, step.beta_j = float(alphas[j - 2]), float(betas[j - 2])
        step.gamma_j, step.ratio_j = float(gammas[j - 2]), float(ratios[j - 2])

    union_size = step.part_union_size
    step.claims += [
        certify("size_lower", union_size, ">=", n / p, enforced=theorem_regime),
        certify("size_upper", union_size, "<=", 3 * n / p, enforced=theorem_regime and n >= 2 * p),
    ]
    step.certificates = certs
    step.n_after, step.m_after = H.n, H.m
    return Extraction(H, kept, step)


def termination_bound(n: int, c: float, eps: float, p: int) -> float:
    """Upper bound on the number of type-2 steps; ``inf`` when ``p <= 18^2``."""
    den = math.log(p / 324.0)
    if den <= 0:
        return math.inf
    return ((1 - 2 * eps) * math.log(n) - math.log(c)) / den


def decompose(G: Graph, params: Params, observer=None) -> tuple[Graph, DecomposeTrace]:
    """Run the type-1/type-2 loop from ``G`` until a type-1 extraction.

    Returns the final subgraph and a trace whose ``vertices`` are the output's
    vertex ids in ``G``. Raises :class:`CertificateViolation` when an enforced
    inequality fails; the partial trace rides on the exception.

    ``observer(graph, pair, plan, extraction)`` is called after every step
    with the step's input graph, eigenpair, partition and result.
    """
    p = params.part_count()
    pair = dominant_eigenpair(G, params.solver)
    threshold = params.c * G.n ** (0.5 + params.eps)
    hyp = pair.lam >= threshold
    if not hyp and not params.force:
        raise HypothesisNotMet(
            f"lambda = {pair.lam:.6g} < c n^(1/2+eps) = {threshold:.6g}", pair.lam, threshold
        )
    theorem = params.regime == "theorem" and hyp
    trace = DecomposeTrace(
        regime=params.regime, p=p, eta=1.0 / p**2, c=params.c, eps=params.eps, n=G.n, m=G.m,
        lambda0=pair.lam, threshold=threshold, hypothesis_met=bool(hyp), forced=params.force,
        termination_bound=termination_bound(G.n, params.c, params.eps, p),
    )
    if not hyp:
        trace.warnings.append("hypothesis not met; proceeding because force is set")
    if params.regime == "override":
        trace.warnings.append("non-theorem regime: p overridden, claims reported but not enforced")

    cur, kept = G, np.arange(G.n, dtype=np.int64)
    sq = math.sqrt(p)
    while True:
        if trace.steps:
            prev = trace.steps[-1]
            prev.lambda_after = pair.lam
            big = prev.n_before >= 2 * p
            prev.claims += [
                certify("next_lambda", pair.lam, ">=", prev.lambda_before / (6 * sq),
                        prev.slack, enforced=theorem),
                certify("hypothesis_carry", pair.lam, ">=",
                        params.c * cur.n ** (0.5 + params.eps), prev.slack, enforced=theorem and big),
            ]
            _check(prev, trace)
        if cur.n < p:
            trace.termination = "below_part_count"
            trace.warnings.append(f"current graph has {cur.n} < p = {p} vertices; stopped")
            break
        plan = make_partition(cur, pair, p)
        index = len(trace.steps)
        if classify(plan) == "type1":
            ext = extract_type1(cur, pair, plan, params, index)
            if observer:
                observer(cur, pair, plan, ext)
            trace.steps.append(ext.step)
            cur, kept = ext.graph, kept[ext.kept]
            trace.termination = "type1"
            _check(ext.step, trace)
            break
        try:
            ext = extract_type2(cur, pair, plan, params, index)
        except Case3WitnessMissing as exc:
            exc.trace = trace
            trace.termination = "case3_witness_missing"
            raise
        step = ext.step
        big = cur.n >= 2 * p
        for claim in step.claims:
            claim.enforced = theorem and (big or claim.name not in ("size_upper",))
        if observer:
            observer(cur, pair, plan, ext)
        trace.steps.append(step)
        trace.k += 1
        stalled = ext.graph.n >= cur.n
        cur, kept = ext.graph, kept[ext.kept]
        if stalled:
            step.flags.append("stalled")
            trace.termination = "stalled"
            trace.warnings.append(f"step {index} did not reduce the vertex count; stopped")
            _check(step, trace)
            break
        pair = dominant_eigenpair(cur, params.solver)

    trace.vertices = kept
    _final_checks(trace, cur, params, p, theorem)
    return cur, trace


def _check(step: DecomposeStep, trace: DecomposeTrace):
    bad = step.violations()
    if bad:
        c = bad[0]
        raise CertificateViolation(
            f"step {step.index}: {c.name}: {c.lhs!r} {c.relation} {c.rhs!r} fails (slack {c.slack:.3g})",
            c,
            trace,
        )


def _final_checks(trace: DecomposeTrace, out: Graph, params: Params, p: int, theorem: bool):
    on = theorem and trace.termination == "type1"
    n1 = out.n
    d1 = 2.0 * out.m / n1 if n1 else 0.0
    trace.final_checks = [
        certify("order_floor", n1, ">=", trace.n ** (params.eps / 3), enforced=on),
        certify("degree_floor", d1, ">=", 4 * params.c / p**3 * n1 ** (0.5 + params.eps), enforced=on),
        certify("step_count_bound", trace.k, "<=", trace.termination_bound, enforced=on),
    ]
    bad = [c for c in trace.final_checks if c.enforced and not c.holds]
    if bad:
        c = bad[0]
        raise CertificateViolation(f"final check {c.name} fails: {c.lhs!r} {c.relation} {c.rhs!r}", c, trace)
