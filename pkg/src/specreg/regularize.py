"""Extract a K-almost-regular dense subgraph by dyadic degree bucketing and peeling.

One round:

1. bucket non-isolated vertices by degree class ``floor(log2 deg)``;
2. over bucket pairs ``i <= j`` keep the induced subgraph on ``D_i | D_j``
   with the most edges (ties go to the smaller ``(i, j)``);
3. repeatedly delete every vertex whose degree is below ``theta`` times the
   current average degree;
4. stop once ``max_deg <= K_target * min_deg``, otherwise start another round.

A round that changes nothing ends the run with the ``stalled`` flag; the
achieved ratio is reported either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificateViolation, Collapsed, NoEdges, ParameterOutOfRange
from .graph import Graph, induced_subgraph


@dataclass(frozen=True)
class RegularizeParams:
    eps: float = 1.0
    c: float = 1.0
    K_target: float = 64.0
    theta: float = 0.5
    max_rounds: int | None = None

    def __post_init__(self):
        if not (0 < self.eps <= 1):
            raise ParameterOutOfRange(f"eps must lie in (0, 1], got {self.eps}")
        if not (0 < self.theta < 1):
            raise ParameterOutOfRange(f"theta must lie in (0, 1), got {self.theta}")
        if not self.K_target >= 2:
            raise ParameterOutOfRange(f"K_target must be >= 2, got {self.K_target}")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ParameterOutOfRange("max_rounds must be >= 1")


@dataclass
class RoundRecord:
    n_in: int
    m_in: int
    delta_in: int
    pair: tuple
    retained: int
    retention_floor: float
    peel_start_avg: float
    m_after_peel: int
    n_after_peel: int
    peel_passes: int
    peel_edge_fraction: float
    edge_floor_recorded: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["pair"] = list(self.pair)
        return d


@dataclass
class RegularityReport:
    n_prime: int
    e_prime: int
    delta_max: int
    delta_min: int
    K_achieved: float
    c_prime_achieved: float
    eps: float
    rounds: int
    bucket_path: list
    round_records: list = field(default_factory=list)
    stalled: bool = False
    k_target_met: bool = True
    vertices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False)

    def to_dict(self) -> dict:
        return {
            "n_prime": self.n_prime,
            "e_prime": self.e_prime,
            "delta_max": self.delta_max,
            "delta_min": self.delta_min,
            "K_achieved": self.K_achieved if math.isfinite(self.K_achieved) else None,
            "c_prime_achieved": self.c_prime_achieved,
            "eps": self.eps,
            "rounds": self.rounds,
            "bucket_path": [list(p) for p in self.bucket_path],
            "round_records": [r.to_dict() for r in self.round_records],
            "stalled": self.stalled,
            "k_target_met": self.k_target_met,
            "vertices": [int(v) for v in self.vertices],
        }


def _degree_class(deg: np.ndarray) -> np.ndarray:
    # floor(log2 d) for d >= 1, computed on integers; -1 marks isolated vertices.
    cls = np.full(len(deg), -1, dtype=np.int64)
    pos = deg > 0
    cls[pos] = np.frexp(deg[pos].astype(np.float64))[1] - 1
    return cls


def degree_buckets(G: Graph) -> list[tuple[int, np.ndarray]]:
    """``[(i, D_i)]`` with ``D_i = {v : 2^i <= deg v < 2^(i+1)}``, ascending ``i``."""
    if G.m == 0:
        raise NoEdges("degree buckets need at least one edge")
    cls = _degree_class(G.degrees())
    return [(int(i), np.flatnonzero(cls == i)) for i in np.unique(cls[cls >= 0])]


def verify_almost_regular(G: Graph, K: float) -> tuple[bool, tuple[int, int] | None]:
    """``max_deg <= K * min_deg``; witness is (a max-degree vertex, a min-degree vertex)."""
    if G.n == 0:
        return True, None
    deg = G.degrees()
    hi, lo = int(np.argmax(deg)), int(np.argmin(deg))
    return bool(deg[hi] <= K * deg[lo]), (hi, lo)


def _select_pair(G: Graph):
    cls = _degree_class(G.degrees())
    ids = np.unique(cls[cls >= 0])
    pos = np.searchsorted(ids, cls)
    e = G.edge_array()
    a, b = pos[e[:, 0]], pos[e[:, 1]]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    B = len(ids)
    M = np.zeros((B, B), dtype=np.int64)
    np.add.at(M, (lo, hi), 1)
    best, best_pair = -1, None
    for i in range(B):
        for j in range(i, B):
            kept = M[i, i] if i == j else M[i, i] + M[j, j] + M[i, j]
            if kept > best:
                best, best_pair = int(kept), (i, j)
    i, j = best_pair
    members = np.flatnonzero(((pos == i) | (pos == j)) & (cls >= 0))
    return (int(ids[i]), int(ids[j])), best, members


def _peel(G: Graph, theta: float) -> tuple[np.ndarray, int]:
    alive = np.ones(G.n, dtype=bool)
    src, dst = G.sources(), G.neighbors
    passes = 0
    while True:
        live_edge = alive[src] & alive[dst]
        deg = np.bincount(src[live_edge], minlength=G.n)
        n_alive = int(alive.sum())
        if n_alive == 0:
            return alive, passes
        avg = deg[alive].sum() / n_alive
        drop = alive & (deg < theta * avg)
        if not drop.any():
            return alive, passes
        alive &= ~drop
        passes += 1


def _ratio_up(dmax: int, dmin: int) -> float:
    # Smallest float K with dmax <= K * dmin, so the reported ratio always verifies.
    if dmin == 0:
        return math.inf
    K = dmax / dmin
    while K * dmin < dmax:
        K = math.nextafter(K, math.inf)
    return K


def almost_regularize(G: Graph, params: RegularizeParams | None = None) -> tuple[Graph, RegularityReport]:
    params = params or RegularizeParams()
    if G.m == 0:
        raise NoEdges("cannot regularize a graph without edges")
    max_rounds = params.max_rounds or 10 * max(1, math.ceil(math.log2(max(G.n, 2))))
    cur, kept = G, np.arange(G.n, dtype=np.int64)
    records, path = [], []
    stalled = False
    for _ in range(max_rounds):
        pair, retained, members = _select_pair(cur)
        delta = int(cur.degrees().max())
        floor = cur.m / (math.ceil(math.log2(delta)) + 1) ** 2
        if retained < floor:
            raise CertificateViolation(f"bucket pair kept {retained} < pigeonhole floor {floor:.3f}")
        sel, sel_kept = induced_subgraph(cur, members)
        start_avg = 2.0 * sel.m / sel.n
        alive, passes = _peel(sel, params.theta)
        peeled, sub = induced_subgraph(sel, np.flatnonzero(alive))
        if peeled.m == 0:
            raise Collapsed("peeling removed every edge", last_nonempty=(sel, kept[sel_kept]))
        records.append(
            RoundRecord(
                n_in=cur.n,
                m_in=cur.m,
                delta_in=delta,
                pair=pair,
                retained=retained,
                retention_floor=floor,
                peel_start_avg=start_avg,
                m_after_peel=peeled.m,
                n_after_peel=peeled.n,
                peel_passes=passes,
                peel_edge_fraction=peeled.m / sel.m,
                edge_floor_recorded=(params.theta / 2) * start_avg * peeled.n / 2,
            )
        )
        path.append(pair)
        unchanged = peeled.n == cur.n and peeled.m == cur.m
        cur, kept = peeled, kept[sel_kept[sub]]
        if verify_almost_regular(cur, params.K_target)[0]:
            break
        if unchanged:
            stalled = True
            break

    deg = cur.degrees()
    dmax, dmin = int(deg.max()), int(deg.min())
    report = RegularityReport(
        n_prime=cur.n,
        e_prime=cur.m,
        delta_max=dmax,
        delta_min=dmin,
        K_achieved=_ratio_up(dmax, dmin),
        c_prime_achieved=cur.m / cur.n ** (1 + params.eps),
        eps=params.eps,
        rounds=len(records),
        bucket_path=path,
        round_records=records,
        stalled=stalled,
        k_target_met=bool(dmin and dmax <= params.K_target * dmin),
        vertices=kept,
    )
    return cur, report
