"""Deterministic graph constructions and seeded random families.

Random graphs draw from numpy's ``Generator(PCG64(seed))`` with the 64-bit
seed taken from the GenSpec.  For a fixed numpy major version the output is
identical across runs and machines.

GenSpec JSON schema (all keys except ``family`` optional, unused keys ignored)::

    {"family": "complete" | "complete_bipartite" | "star" | "path" | "cycle"
               | "subdivided_star" | "gnp" | "gnm",
     "n": int, "a": int, "b": int, "xi": float, "p": float, "m": int,
     "seed": int}

``star`` with ``n`` means K_{1,n-1}; ``complete_bipartite`` uses ``a`` and ``b``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterOutOfRange
from .graph import INDEX, Graph, _from_trusted_edges

FAMILIES = ("complete", "complete_bipartite", "star", "path", "cycle", "subdivided_star", "gnp", "gnm")


def as_fraction(x, max_den: int = 10**6) -> Fraction:
    """Nearest simple rational to ``x`` (so 0.4 -> 2/5 and 1/3 -> 1/3)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x).limit_denominator(max_den)


def ceil_power(n: int, exponent) -> int:
    """``ceil(n ** exponent)`` that is exact when the power is an integer.

    ``10**5 ** 0.6`` is 1000 mathematically, but floating point may land a
    hair above it; we recognise exact integer powers through integer
    arithmetic on the rationalised exponent.
    """
    e = as_fraction(exponent)
    val = float(n) ** float(e)
    r = round(val)
    if r >= 0 and r ** e.denominator == n ** e.numerator:
        return int(r)
    return int(math.ceil(val))


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int | None = None
    a: int | None = None
    b: int | None = None
    xi: float | None = None
    p: float | None = None
    m: int | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        known = {k: d[k] for k in ("family", "n", "a", "b", "xi", "p", "m", "seed") if k in d}
        if "family" not in known:
            raise ParameterOutOfRange("GenSpec needs a 'family'")
        return cls(**known)

    def build(self) -> Graph:
        f = self.family
        if f == "complete":
            return complete(_need(self.n, "n"))
        if f == "complete_bipartite":
            return complete_bipartite(_need(self.a, "a"), _need(self.b, "b"))
        if f == "star":
            return star(_need(self.n, "n") - 1)
        if f == "path":
            return path(_need(self.n, "n"))
        if f == "cycle":
            return cycle(_need(self.n, "n"))
        if f == "subdivided_star":
            return subdivided_star(_need(self.n, "n"), _need(self.xi, "xi"))
        if f in ("gnp", "gnm"):
            return random_graph(self)
        raise ParameterOutOfRange(f"unknown family {f!r}; expected one of {', '.join(FAMILIES)}")


def _need(value, name):
    if value is None:
        raise ParameterOutOfRange(f"missing parameter {name!r}")
    return value


def _check_size(k, name, least=1):
    if int(k) != k or k < least:
        raise ParameterOutOfRange(f"{name} must be an integer >= {least}, got {k}")
    return int(k)


def _graph(n, pairs) -> Graph:
    pairs = np.asarray(pairs, dtype=INDEX).reshape(-1, 2)
    return _from_trusted_edges(n, pairs[:, 0], pairs[:, 1])


def complete(n: int) -> Graph:
    n = _check_size(n, "n")
    u, v = np.triu_indices(n, k=1)
    return _from_trusted_edges(n, u.astype(INDEX), v.astype(INDEX))


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with parts ``0..a-1`` and ``a..a+b-1``."""
    a = _check_size(a, "a")
    b = _check_size(b, "b")
    u = np.repeat(np.arange(a, dtype=INDEX), b)
    v = np.tile(np.arange(a, a + b, dtype=INDEX), a)
    return _from_trusted_edges(a + b, u, v)


def star(leaves: int) -> Graph:
    """K_{1,leaves}, center 0."""
    return complete_bipartite(1, leaves)


def path(n: int) -> Graph:
    n = _check_size(n, "n")
    u = np.arange(n - 1, dtype=INDEX)
    return _from_trusted_edges(n, u, u + 1)


def cycle(n: int) -> Graph:
    n = _check_size(n, "n", least=3)
    u = np.arange(n, dtype=INDEX)
    return _from_trusted_edges(n, u, (u + 1) % n)


def subdivided_star(n: int, xi: float) -> Graph:
    """Star K_{1,s-1}, s = ceil(n^(2 xi)), with the edge 0-1 subdivided n-s times.

    Vertex 0 is the center, ``1..s-1`` the star's leaves, and ``s..n-1`` the
    subdivision vertices in path order, so the pendant path reads
    ``0, s, s+1, ..., n-1, 1``.
    """
    n = _check_size(n, "n", least=3)
    if not (0 < xi <= 0.5):
        raise ParameterOutOfRange(f"xi must lie in (0, 1/2], got {xi}")
    s = ceil_power(n, 2 * as_fraction(xi))
    if s > n or s < 2:
        raise ParameterOutOfRange(f"ceil(n^(2 xi)) = {s} must lie in 2..n")
    leaves = np.arange(2, s, dtype=INDEX)
    chain = np.concatenate([[0], np.arange(s, n, dtype=INDEX), [1]]).astype(INDEX)
    u = np.concatenate([np.zeros(len(leaves), dtype=INDEX), chain[:-1]])
    v = np.concatenate([leaves, chain[1:]])
    return _from_trusted_edges(n, u, v)


def _decode_pairs(n: int, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Row-major linear index over pairs u < v.
    row_start = np.arange(n, dtype=INDEX)
    row_start = row_start * n - row_start * (row_start + 1) // 2
    u = np.searchsorted(row_start, k, side="right") - 1
    v = k - row_start[u] + u + 1
    return u.astype(INDEX), v.astype(INDEX)


def random_graph(spec: GenSpec, seed: int | None = None) -> Graph:
    """G(n, p) or G(n, m) from a PCG64 stream seeded with ``seed`` (default ``spec.seed``)."""
    seed = spec.seed if seed is None else seed
    n = _check_size(_need(spec.n, "n"), "n")
    rng = np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))
    total = n * (n - 1) // 2
    if spec.family == "gnp":
        p = float(_need(spec.p, "p"))
        if not (0.0 <= p <= 1.0):
            raise ParameterOutOfRange(f"probability must lie in [0, 1], got {p}")
        if p == 0.0 or total == 0:
            k = np.zeros(0, dtype=INDEX)
        elif p == 1.0:
            k = np.arange(total, dtype=INDEX)
        else:
            # Geometric skipping: gaps between successive present pairs.
            chunks, pos = [], -1
            while pos < total:
                want = int(p * (total - pos) + 10 * math.sqrt(p * total) + 16)
                steps = np.cumsum(rng.geometric(p, size=want).astype(INDEX)) + pos
                chunks.append(steps)
                pos = int(steps[-1])
            k = np.concatenate(chunks)
            k = k[k < total]
    elif spec.family == "gnm":
        m = int(_need(spec.m, "m"))
        if m < 0 or m > total:
            raise ParameterOutOfRange(f"m must lie in 0..{total}, got {m}")
        k = np.sort(rng.choice(total, size=m, replace=False)).astype(INDEX)
    else:
        raise ParameterOutOfRange(f"random_graph needs family gnp or gnm, got {spec.family!r}")
    u, v = _decode_pairs(n, k)
    return _from_trusted_edges(n, u, v)


def gnp(n: int, p: float, seed: int = 0) -> Graph:
    return random_graph(GenSpec("gnp", n=n, p=p, seed=seed))


def gnm(n: int, m: int, seed: int = 0) -> Graph:
    return random_graph(GenSpec("gnm", n=n, m=m, seed=seed))
