"""Independent brute-force references used by the tests (plain Python sets)."""

import itertools
import math


def edge_set(G):
    return {(min(u, v), max(u, v)) for u, v in G.edge_list()}


def induced_edges(edges, S):
    S = set(S)
    return {(u, v) for u, v in edges if u in S and v in S}


def crossing_edges(edges, A, B):
    A, B = set(A), set(B)
    return {(u, v) for u, v in edges if (u in A and v in B) or (u in B and v in A)}


def degrees(n, edges):
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def closed_form_lambda(family, *args):
    """Spectral radius of classic families from their closed forms."""
    if family == "star":
        (m,) = args
        return math.sqrt(m)
    if family == "complete_bipartite":
        a, b = args
        return math.sqrt(a * b)
    if family == "cycle":
        return 2.0
    if family == "complete":
        (n,) = args
        return float(n - 1)
    if family == "path":
        (n,) = args
        return 2 * math.cos(math.pi / (n + 1))
    raise KeyError(family)


def all_pairs(n):
    return list(itertools.combinations(range(n), 2))
