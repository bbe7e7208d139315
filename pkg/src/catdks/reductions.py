"""Preprocessing/postprocessing reductions that wrap every solver.

Covers degree-capping via a greedy core, union-until-k accumulation, the
bipartite double cover and its collapse, randomized edge pruning to reach
kD <= n, weight bucketing, and the subexponential-regime preprocessing.
All randomized operations take an explicit 64-bit seed.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .graphs import Graph, induced_subgraph, normalize_vertex_set


class StallError(RuntimeError):
    """The inner solver of union_until_k made no progress."""


@dataclass(frozen=True)
class GreedyResult:
    h_prime: tuple[int, ...]          # the k-subgraph U ∪ U'
    g_prime: Graph                    # induced on V \ U, relabeled
    g_prime_vertices: tuple[int, ...] # original ids of g_prime, by new id
    cap_degree: float                 # degree threshold D (max degree of g_prime)
    gamma: float                      # max{cap_degree * k / n, 1}
    u: tuple[int, ...]
    u_prime: tuple[int, ...]


def _top_by(keys, count, items):
    """Top `count` items by key desc, tie by smaller item."""
    order = sorted(items, key=lambda v: (-keys[v], v))
    return order[:count]


def greedy_core(g: Graph, k: int) -> GreedyResult:
    """Degree-capping greedy: U = highest-degree half, U' = best neighbors of U.

    Produces the baseline k-subgraph h_prime = U ∪ U' with average degree at
    least max{c * cap_degree * k / n, 1} (measured c documented in tests), and
    the residual graph g_prime = G[V \\ U] with max degree <= cap_degree.

    Fallback: when g has fewer than ceil(k/2) edges, h_prime is a maximal set
    of disjoint edges padded to k vertices.
    """
    if not 2 <= k <= g.n:
        raise ValueError(f"k={k} out of range 2..{g.n}")
    half = (k + 1) // 2
    deg = g.degrees
    u = _top_by(deg, half, range(g.n))
    cap_degree = float(min(deg[v] for v in u))

    if g.m < half:
        # matching fallback: disjoint edges greedily by id, padded to k vertices
        used: set[int] = set()
        for (a, b) in sorted(g.edges):
            if a not in used and b not in used and len(used) + 2 <= k:
                used.add(a)
                used.add(b)
        pad = (v for v in range(g.n) if v not in used)
        while len(used) < k:
            used.add(next(pad))
        h_prime = tuple(sorted(used))
    else:
        uset = set(u)
        into_u = np.zeros(g.n, dtype=np.int64)
        for v in range(g.n):
            into_u[v] = len(g.adj[v] & uset)
        u_prime = _top_by(into_u, half, range(g.n))
        h_prime = normalize_vertex_set(list(u) + u_prime)

    rest = [v for v in range(g.n) if v not in set(u)]
    g_prime, mapping = induced_subgraph(g, rest)
    gamma = max(cap_degree * k / g.n, 1.0)
    u_prime_out = tuple(sorted(set(h_prime) - set(u)))
    return GreedyResult(h_prime=h_prime, g_prime=g_prime, g_prime_vertices=mapping,
                        cap_degree=cap_degree, gamma=gamma,
                        u=tuple(sorted(u)), u_prime=u_prime_out)


def union_until_k(g: Graph, k: int,
                  inner: Callable[[Graph], Iterable[int]]) -> tuple[int, ...]:
    """Accumulate inner-solver subgraphs until k vertices, removing found edges.

    inner is called on the current residual graph and must return a nonempty
    vertex set spanning at least one residual edge; otherwise a StallError is
    raised. Overshoot (up to 2k) is pruned greedily by lowest degree back to
    exactly k; if the residual runs out of edges first, arbitrary untouched
    vertices pad the set to k.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    remaining = set(g.edges)
    accum: set[int] = set()
    while len(accum) < k:
        if not remaining:
            pad = (v for v in range(g.n) if v not in accum)
            while len(accum) < k:
                accum.add(next(pad))
            break
        current = Graph(n=g.n, edges=frozenset(remaining))
        found = normalize_vertex_set(inner(current))
        fset = set(found)
        removed = {e for e in remaining if e[0] in fset and e[1] in fset}
        if not found or not removed:
            raise StallError("inner solver returned an empty or edgeless subgraph")
        remaining -= removed
        accum |= fset
    if len(accum) > k:
        accum = set(prune_to_size(g, accum, k))
    return tuple(sorted(accum))


def prune_to_size(g: Graph, s: Iterable[int], k: int) -> tuple[int, ...]:
    """Greedily drop lowest-induced-degree vertices (ties by id) down to k."""
    alive = set(normalize_vertex_set(s))
    adj = g.adj
    deg = {v: len(adj[v] & alive) for v in alive}
    while len(alive) > k:
        v = min(alive, key=lambda x: (deg[x], x))
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
    return tuple(sorted(alive))


def bipartite_double_cover(g: Graph) -> Graph:
    """Two vertex copies; edge (u, v) becomes (u, v+n) and (v, u+n)."""
    n = g.n
    edges = []
    for (u, v) in g.edges:
        edges.append((u, v + n))
        edges.append((v, u + n))
    return Graph.from_edges(2 * n, edges, bipartition=range(n))


def collapse_double_cover(cover_set: Iterable[int], n: int) -> tuple[int, ...]:
    """Collapse the two cover sides: v -> v mod n, deduplicated."""
    return tuple(sorted({v % n for v in cover_set}))


def prune_to_kD_le_n(g: Graph, k: int, seed: int) -> tuple[Graph, float]:
    """Keep each edge independently with probability n/(kD) when kD > n.

    Returns (pruned graph, retention probability); identity (prob 1.0) when
    kD <= n already.
    """
    d_max = g.max_degree()
    if k * d_max <= g.n:
        return g, 1.0
    p_keep = g.n / (k * d_max)
    rng = np.random.default_rng(seed)
    ordered = sorted(g.edges)
    keep = rng.random(len(ordered)) < p_keep
    edges = [e for e, kp in zip(ordered, keep) if kp]
    return Graph(n=g.n, edges=frozenset(edges), bipartition=g.bipartition), p_keep


def weight_buckets(g: Graph) -> list[Graph]:
    """Bucket weighted edges into powers of two from max weight down to max/n^2.

    Bucket i holds weights in (max/2^(i+1), max/2^i]; edges below the floor are
    dropped. Only nonempty buckets are returned (at most 2*log2(n)+1).
    """
    if g.weights is None:
        raise ValueError("weight_buckets requires a weighted graph")
    if not g.weights:
        return []
    wmax = max(g.weights.values())
    floor = wmax / (g.n * g.n)
    n_buckets = int(2 * math.log2(g.n)) + 1 if g.n > 1 else 1
    buckets: list[list[tuple[int, int]]] = [[] for _ in range(n_buckets)]
    for e, w in g.weights.items():
        if w <= floor * (1 - 1e-12):
            continue
        i = 0
        bound = wmax
        while w <= bound / 2 and i < n_buckets - 1:
            bound /= 2
            i += 1
        buckets[i].append(e)
    return [Graph.from_edges(g.n, b) for b in buckets if b]


def exp_preprocess(g: Graph, k: int, d: float, eps: float, seed: int) -> Graph:
    """Preprocessing for the cluster-based subexponential solver.

    Step 1: if d > k^(1-beta) (beta = log_n k), thin edges with retention
    probability k^(1-beta)/d. Step 2: if the resulting k/2-largest degree D'
    satisfies D'k < n, add the edges of G(n, 1/k); otherwise prune so kD <= n.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    if not 2 <= k <= g.n:
        raise ValueError(f"k={k} out of range")
    n = g.n
    beta = math.log(k) / math.log(n) if n > 1 else 1.0
    if not 0 < beta < 1:
        warnings.warn(f"beta = log_n(k) = {beta:.3f} outside (0,1); "
                      "preprocessing guarantees degrade", stacklevel=2)
    rng = np.random.default_rng(seed)
    edges = sorted(g.edges)
    target = k ** (1 - beta)
    if d > target:
        p_keep = target / d
        keep = rng.random(len(edges)) < p_keep
        edges = [e for e, kp in zip(edges, keep) if kp]
    pruned = Graph.from_edges(n, edges)
    degs = np.sort(pruned.degrees)[::-1]
    d_half = int(degs[min((k + 1) // 2, n) - 1]) if n else 0
    if d_half * k < n:
        # sparse side: superpose G(n, 1/k) noise edges
        p = 1.0 / k
        iu, ju = np.triu_indices(n, 1)
        mask = rng.random(len(iu)) < p
        extra = list(zip(iu[mask].tolist(), ju[mask].tolist()))
        return Graph.from_edges(n, edges + extra)
    out, _ = prune_to_kD_le_n(pruned, k, seed=int(rng.integers(0, 2**63 - 1)))
    return out
