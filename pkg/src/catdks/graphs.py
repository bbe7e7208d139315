"""Immutable undirected graph with degree/density queries and small exact oracles.

Vertices are dense integer ids in [0, n). Adjacency is stored as frozensets
for O(1) membership and fast set intersection, which the hair steps and
caterpillar counting lean on heavily.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Malformed edge-list input."""


class BudgetExceededError(RuntimeError):
    """An exhaustive operation was asked to exceed its configured budget."""


def normalize_vertex_set(members: Iterable[int]) -> tuple[int, ...]:
    """Sorted, duplicate-free tuple of vertex ids."""
    return tuple(sorted(set(int(v) for v in members)))


def _canon_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices [0, n).

    edges: canonical (u, v) pairs with u < v, deduplicated, no self-loops.
    weights: optional strictly-positive weight per edge (same key order as edges).
    bipartition: optional frozenset of "left" vertices; every edge must cross.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    weights: Optional[dict[tuple[int, int], float]] = None
    bipartition: Optional[frozenset[int]] = None

    def __post_init__(self):
        for (u, v) in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edge ({u},{v}) endpoint out of range [0,{self.n})")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if u > v:
                raise GraphFormatError(f"edge ({u},{v}) not in canonical order")
        if self.weights is not None:
            if set(self.weights) != set(self.edges):
                raise GraphFormatError("weights must cover exactly the edge set")
            for e, w in self.weights.items():
                if not w > 0:
                    raise GraphFormatError(f"non-positive weight {w} on edge {e}")
        if self.bipartition is not None:
            left = self.bipartition
            for (u, v) in self.edges:
                if (u in left) == (v in left):
                    raise GraphFormatError(f"edge ({u},{v}) does not cross the bipartition")

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]],
                   weights: Optional[dict[tuple[int, int], float]] = None,
                   bipartition: Optional[Iterable[int]] = None) -> "Graph":
        """Build a graph, canonicalizing and deduplicating edges; rejects self-loops."""
        canon = set()
        for (u, v) in edges:
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            canon.add(_canon_edge(int(u), int(v)))
        w = None
        if weights is not None:
            w = {_canon_edge(u, v): float(x) for (u, v), x in weights.items()}
        bp = frozenset(bipartition) if bipartition is not None else None
        return Graph(n=int(n), edges=frozenset(canon), weights=w, bipartition=bp)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for (u, v) in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for (u, v) in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @cached_property
    def adjacency_matrix(self):
        """scipy CSR adjacency (0/1, symmetric)."""
        from scipy.sparse import coo_matrix

        if self.m == 0:
            return coo_matrix((self.n, self.n)).tocsr()
        rows, cols = [], []
        for (u, v) in self.edges:
            rows += [u, v]
            cols += [v, u]
        data = np.ones(2 * self.m, dtype=np.float64)
        return coo_matrix((data, (rows, cols)), shape=(self.n, self.n)).tocsr()

    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def unweighted(self) -> "Graph":
        if self.weights is None:
            return self
        return Graph(n=self.n, edges=self.edges, weights=None, bipartition=self.bipartition)

    def edge_count_within(self, s: Iterable[int]) -> int:
        sset = set(s)
        adj = self.adj
        return sum(1 for u in sset for v in adj[u] if v > u and v in sset)


@dataclass(frozen=True)
class DensityReport:
    vertex_count: int
    edge_count: int
    average_degree: float
    min_degree: int
    log_density: float


@dataclass(frozen=True)
class SolveResult:
    """A vertex subset with its density and provenance.

    density is always the average degree of the induced subgraph in the host
    graph the result refers to.
    """
    vertices: tuple[int, ...]
    density: float
    provenance: str
    gamma: float = 0.0
    target_ratio: Optional[float] = None

    def better_than(self, other: Optional["SolveResult"]) -> bool:
        """Total order: density desc, vertex count asc, lexicographic."""
        if other is None:
            return True
        return (-self.density, len(self.vertices), self.vertices) < \
               (-other.density, len(other.vertices), other.vertices)


def load_graph(path) -> Graph:
    """Read the edge-list text format: header "n m", then "u v" or "u v w" lines.

    Lines starting with '#' are comments. Repeated edges are deduplicated;
    self-loops and non-positive weights are rejected.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"bad header line: {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"bad header line: {lines[0]!r}") from exc
    edges = []
    weights: dict[tuple[int, int], float] = {}
    weighted = False
    for ln in lines[1:1 + m]:
        parts = ln.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"malformed edge line: {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"malformed edge line: {ln!r}") from exc
        if u == v:
            raise GraphFormatError(f"self-loop: {ln!r}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"endpoint out of range: {ln!r}")
        edges.append((u, v))
        if len(parts) == 3:
            weighted = True
            try:
                w = float(parts[2])
            except ValueError as exc:
                raise GraphFormatError(f"malformed weight: {ln!r}") from exc
            if not w > 0:
                raise GraphFormatError(f"non-positive weight: {ln!r}")
            weights[_canon_edge(u, v)] = w
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header declares {m} edges, file has {len(lines) - 1}")
    return Graph.from_edges(n, edges, weights if weighted else None)


def save_graph(g: Graph, path) -> None:
    """Write the edge-list format read back by load_graph."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{g.n} {g.m}\n")
        for (u, v) in sorted(g.edges):
            if g.weights is not None:
                f.write(f"{u} {v} {g.weights[(u, v)]!r}\n")
            else:
                f.write(f"{u} {v}\n")


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph induced on s, relabeled to [0, |s|).

    Returns (subgraph, mapping) where mapping[new_id] = old_id.
    """
    members = normalize_vertex_set(s)
    for v in members:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range [0,{g.n})")
    index = {old: new for new, old in enumerate(members)}
    mset = set(members)
    edges = [(index[u], index[v]) for (u, v) in g.edges if u in mset and v in mset]
    weights = None
    if g.weights is not None:
        weights = {(index[u], index[v]): w for (u, v), w in g.weights.items()
                   if u in mset and v in mset}
    bp = None
    if g.bipartition is not None:
        bp = [index[v] for v in members if v in g.bipartition]
    return Graph.from_edges(len(members), edges, weights, bp), members


def neighborhood(g: Graph, s: Iterable[int]) -> tuple[int, ...]:
    """Union of neighbor sets of members of s (not excluding s itself)."""
    out: set[int] = set()
    adj = g.adj
    for v in s:
        out |= adj[v]
    return tuple(sorted(out))


def density_report(g: Graph, s: Iterable[int]) -> DensityReport:
    """Degree/density statistics of the subgraph induced on s.

    log_density is log(avg degree) / log(vertex count), reported as 0 when the
    average degree is at most 1 (constant-degree convention) or the set is a
    single vertex.
    """
    members = normalize_vertex_set(s)
    if not members:
        raise ValueError("density_report of empty vertex set")
    mset = set(members)
    adj = g.adj
    degs = [len(adj[v] & mset) for v in members]
    edge_count = sum(degs) // 2
    vc = len(members)
    avg = 2.0 * edge_count / vc
    if vc > 1 and avg > 1.0:
        log_density = math.log(avg) / math.log(vc)
    else:
        log_density = 0.0
    return DensityReport(vertex_count=vc, edge_count=edge_count,
                         average_degree=avg, min_degree=min(degs),
                         log_density=log_density)


def peel_to_min_degree(g: Graph, s: Iterable[int], threshold: float) -> tuple[int, ...]:
    """Maximal subset of s whose induced minimum degree is >= threshold.

    Standard core-peeling fixpoint; may be empty.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    alive = set(normalize_vertex_set(s))
    adj = g.adj
    deg = {v: len(adj[v] & alive) for v in alive}
    queue = [v for v in alive if deg[v] < threshold]
    while queue:
        v = queue.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] < threshold:
                    queue.append(u)
    return tuple(sorted(alive))


def brute_force_dks(g: Graph, k: int, budget: int = 5_000_000) -> SolveResult:
    """Exact densest k-subgraph by enumeration; ties broken by lexicographically
    smallest vertex set. Intended as a test oracle at desk scale."""
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    if math.comb(g.n, k) > budget:
        raise BudgetExceededError(f"C({g.n},{k}) exceeds budget {budget}")
    # bitmask adjacency: popcount-based edge counting
    masks = [0] * g.n
    for (u, v) in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    best_edges = -1
    best: Optional[tuple[int, ...]] = None
    for combo in combinations(range(g.n), k):
        sel = 0
        e = 0
        for v in combo:
            e += (masks[v] & sel).bit_count()
            sel |= 1 << v
        if e > best_edges:
            best_edges = e
            best = combo
    assert best is not None
    return SolveResult(vertices=best, density=2.0 * best_edges / k,
                       provenance="brute-force")
