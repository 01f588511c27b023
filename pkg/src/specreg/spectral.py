"""Perron pair of a graph adjacency matrix, certified by its residual.

The solver is shifted power iteration on ``A + shift*I``.  The shift breaks
the +-lambda periodicity of bipartite components, where the plain power map
oscillates forever.  By default the shift follows half the current Rayleigh
estimate, which keeps the contraction factor near 1/3 on bipartite graphs
instead of ``1 - 2/lambda`` for a fixed unit shift.  Each connected component is solved separately from the
all-ones start, and the component with the largest spectral radius wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DimensionMismatch, NoEdges, NotConverged, NotUnit, ParameterOutOfRange, TooLarge
from .graph import Graph, induced_subgraph


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iterations: int = 100_000
    # None: adaptive, half the current Rayleigh estimate at every step.
    shift: float | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterOutOfRange("tol must be positive")
        if self.max_iterations < 1:
            raise ParameterOutOfRange("max_iterations must be >= 1")
        if self.shift is not None and self.shift < 0:
            raise ParameterOutOfRange("shift must be nonnegative")


@dataclass(frozen=True, eq=False)
class EigenPair:
    lam: float
    x: np.ndarray = field(repr=False)
    residual: float
    iterations: int
    component: np.ndarray = field(repr=False)

    @property
    def slack(self) -> float:
        """Allowance for proof inequalities evaluated on this approximate pair."""
        return 2.0 * self.residual * np.sqrt(len(self.x))


def _power(A, n: int, cfg: SolverConfig) -> tuple[float, np.ndarray, float, int]:
    # Iterates in extended precision: a float64 matvec alone leaves a
    # summation-error floor near 1e-9 on hubs of degree ~1e4.
    x = np.full(n, 1.0 / np.sqrt(n), dtype=np.longdouble)
    it = 0
    for it in range(cfg.max_iterations + 1):
        y = A @ x
        lam = x @ y
        if np.linalg.norm(y - lam * x) <= 0.5 * cfg.tol or it == cfg.max_iterations:
            break
        z = y + (0.5 * lam if cfg.shift is None else cfg.shift) * x
        x = z / np.linalg.norm(z)
    x64 = (x / np.linalg.norm(x)).astype(np.float64)
    lam, res = _certify(A, x64)
    if res > cfg.tol:
        raise NotConverged(
            f"residual {res:.3e} > tol {cfg.tol:.1e} after {it} iterations", (lam, x64, res, it)
        )
    return lam, x64, res, it


def _certify(A, x64: np.ndarray) -> tuple[float, float]:
    x = x64.astype(np.longdouble)
    y = A @ x
    lam = x @ y
    return float(lam), float(np.linalg.norm(y - lam * x))


def dominant_eigenpair(G: Graph, cfg: SolverConfig | None = None) -> EigenPair:
    """Largest adjacency eigenvalue with a nonnegative unit eigenvector.

    The vector is supported on one connected component: the one with the
    largest spectral radius, ties (within ``2*tol``) going to the component
    with the smallest vertex id.  ``lam`` is the Rayleigh quotient of the
    returned vector and ``residual`` is ``||A x - lam x||``.
    """
    cfg = cfg or SolverConfig()
    if G.m == 0:
        raise NoEdges("graph has no edges; spectral radius is 0")
    ncomp, labels = connected_components(G.adjacency(), directed=False)
    deg = G.degrees()

    if ncomp == 1:
        groups = [np.arange(G.n)]
    else:
        order = np.argsort(labels, kind="stable")
        bounds = np.flatnonzero(np.diff(labels[order])) + 1
        groups = [g for g in np.split(order, bounds) if len(g) > 1]
        groups.sort(key=lambda g: g[0])

    best = None
    for comp in groups:
        # lambda <= max degree, so a component that cannot win is skipped.
        if best is not None and deg[comp].max() <= best[0] + 2 * cfg.tol:
            continue
        H = G if len(comp) == G.n else induced_subgraph(G, comp)[0]
        A = H.adjacency(dtype=np.longdouble)
        try:
            lam, xc, res, it = _power(A, len(comp), cfg)
        except NotConverged as exc:
            lam, xc, res, it = exc.best
            x = np.zeros(G.n)
            x[comp] = xc
            raise NotConverged(str(exc), EigenPair(lam, x, res, it, comp)) from None
        if best is None or lam > best[0] + 2 * cfg.tol:
            best = (lam, xc, res, it, comp)

    lam, xc, res, it, comp = best
    x = np.zeros(G.n)
    x[comp] = xc
    return EigenPair(lam=lam, x=x, residual=res, iterations=it, component=comp)


def rayleigh(G: Graph, x) -> float:
    """``2 * sum_{uv in E} x_u x_v`` for a unit vector ``x``: a lower bound on lambda(G)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (G.n,):
        raise DimensionMismatch(f"vector has shape {x.shape}, graph has {G.n} vertices")
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > 1e-9:
        raise NotUnit(f"||x|| = {norm!r} is not 1")
    return edge_weight(G, x) * 2.0


def edge_weight(G: Graph, x) -> float:
    """``sum_{uv in E} x_u x_v`` (each edge once), no normalisation checks."""
    x = np.asarray(x, dtype=np.float64)
    return 0.5 * float(x @ (G.adjacency() @ x))


def exact_spectral_radius_small(G: Graph) -> float:
    """Spectral radius from a dense symmetric eigendecomposition (LAPACK ``syevd``)."""
    if G.n > 64:
        raise TooLarge(f"dense oracle limited to n <= 64, got {G.n}")
    if G.n == 0 or G.m == 0:
        return 0.0
    dense = G.adjacency().toarray()
    return float(np.linalg.eigvalsh(dense)[-1])
