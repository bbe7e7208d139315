"""The densest-k-subgraph solver family.

dks_local extracts a dense bipartite candidate from (S, Gamma(S)) by
top-degree selection over all sizes k' <= k. The branch engine enumerates (or
samples) leaf choices at each hair step of a caterpillar schedule, running
dks_local at every step; cluster mode generalizes leaves to C-subsets for the
subexponential variant. The top-level approximate() driver assembles the
preprocessing pipeline: weight buckets, greedy degree cap, bipartite double
cover, caterpillar search, collapse, and resize to exactly k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

import numpy as np

from .caterpillar import BACKBONE, HAIR, CaterpillarSchedule, build_schedule, choose_rs
from .graphs import (Graph, SolveResult, density_report, induced_subgraph,
                     normalize_vertex_set)
from .reductions import (bipartite_double_cover, collapse_double_cover,
                         greedy_core, prune_to_size, union_until_k, weight_buckets)


@dataclass
class SolverConfig:
    s_max: int = 4
    leaf_budget: int = 2000
    seed: int = 0
    local_rounds_cap: int = 64   # cap on union_until_k rounds as a safety net


def _fold(best: Optional[SolveResult], cand: Optional[SolveResult]) -> Optional[SolveResult]:
    if cand is None:
        return best
    return cand if cand.better_than(best) else best


def bipartite_average_degree(n_left: int, n_right: int, cross_edges: int) -> float:
    total = n_left + n_right
    return 2.0 * cross_edges / total if total else 0.0


def dks_local(g: Graph, s_set: Iterable[int], k: int,
              universe: Optional[set[int]] = None,
              provenance: str = "local") -> SolveResult:
    """Densest bipartite candidate on (S, Gamma(S)).

    For each k' = 1..k, T_k' is the top-k' of Gamma(S) by degree into S (ties
    by id); the candidate pairs T_k' with the min{k', |S|} members of S having
    the most neighbors in T_k'. Candidates are compared by bipartite average
    degree (ties: fewer vertices, then lexicographic); the returned density is
    the induced average degree of the winning vertex set in the host graph.

    `universe`, when given, restricts Gamma(S) and all edges to that subset.
    """
    S = list(normalize_vertex_set(s_set))
    if not S:
        raise ValueError("dks_local requires a nonempty set")
    if k < 1:
        raise ValueError("k must be >= 1")
    adj = g.adj
    sset = set(S)
    gamma: set[int] = set()
    for v in S:
        gamma |= adj[v]
    if universe is not None:
        gamma &= universe
    if not gamma:
        return SolveResult(vertices=tuple(S), density=0.0, provenance=provenance)
    gamma_list = sorted(gamma)
    deg_into_s = {j: len(adj[j] & sset) for j in gamma_list}
    order = sorted(gamma_list, key=lambda j: (-deg_into_s[j], j))

    s_ids = np.array(S, dtype=np.int64)
    cnt = np.zeros(len(S), dtype=np.int64)
    pos = {v: i for i, v in enumerate(S)}

    best_key = None
    best_sets: Optional[tuple[list[int], list[int]]] = None
    t_members: list[int] = []
    for kp in range(1, k + 1):
        if kp - 1 < len(order):
            j = order[kp - 1]
            t_members.append(j)
            for u in adj[j]:
                if u in pos:
                    cnt[pos[u]] += 1
        m = min(kp, len(S))
        idx = np.lexsort((s_ids, -cnt))[:m]
        e = int(cnt[idx].sum())
        avg = bipartite_average_degree(m, len(t_members), e)
        chosen_s = sorted(s_ids[idx].tolist())
        verts = sorted(set(chosen_s) | set(t_members))
        key = (-avg, len(verts), tuple(verts))
        if best_key is None or key < best_key:
            best_key = key
            best_sets = (chosen_s, list(t_members))
        if kp >= len(order) and m >= len(S):
            break  # candidates can no longer change
    assert best_sets is not None
    verts = normalize_vertex_set(best_sets[0] + best_sets[1])
    dens = density_report(g, verts).average_degree
    return SolveResult(vertices=verts, density=dens, provenance=provenance)


@dataclass(frozen=True)
class BranchState:
    current_set: frozenset[int]
    step_index: int
    chosen_leaves: tuple[tuple[int, ...], ...]


def _gamma(adj, s: set[int]) -> set[int]:
    out: set[int] = set()
    for v in s:
        out |= adj[v]
    return out


def _run_branch_steps(g: Graph, k: int, sched: CaterpillarSchedule,
                      clusters: Sequence[tuple[int, ...]],
                      cluster_local: bool) -> Optional[SolveResult]:
    """Replay one full branch (a fixed cluster per hair step); returns its best."""
    adj = g.adj
    best: Optional[SolveResult] = None
    current: set[int] = set(range(g.n))
    ci = 0
    for t, kind in enumerate(sched.steps, start=1):
        if t > 1:
            best = _fold(best, dks_local(g, current, k, provenance=f"local@t={t}"))
        if kind == HAIR:
            J = clusters[ci]
            ci += 1
            current = current & _gamma(adj, set(J))
            if cluster_local and current:
                best = _fold(best, dks_local(
                    g, J, k, universe=current | set(J),
                    provenance=f"cluster-local@t={t}"))
            if not current:
                return best  # branch abandoned
        else:
            current = _gamma(adj, current)
            if not current:
                return best
    return best


def _branch_best(g: Graph, k: int, sched: CaterpillarSchedule, budget: int,
                 seed: int, cluster_size: int = 1,
                 cluster_local: bool = False) -> Optional[SolveResult]:
    """Best subgraph over enumerated or sampled branches of the schedule.

    With cluster_size 1 this is the combinatorial caterpillar solver; larger
    clusters realize the subexponential hair step. Full enumeration is used
    when the branch space fits in `budget`, otherwise `budget` branches are
    sampled deterministically from `seed`.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    if g.n == 0:
        raise ValueError("empty graph")
    cands = [v for v in range(g.n) if len(g.adj[v]) > 0]
    if not cands:
        return None
    n_hairs = sched.num_leaves
    n_clusters = math.comb(len(cands), cluster_size)
    enumerate_all = n_clusters ** n_hairs <= budget

    if enumerate_all:
        adj = g.adj
        best: Optional[SolveResult] = None

        def dfs(t: int, current: set[int]) -> None:
            nonlocal best
            if t > sched.s:
                return
            kind = sched.steps[t - 1]
            if t > 1:
                best = _fold(best, dks_local(g, current, k, provenance=f"local@t={t}"))
            if kind == HAIR:
                for J in combinations(cands, cluster_size):
                    nxt = current & _gamma(adj, set(J))
                    if cluster_local and nxt:
                        best = _fold(best, dks_local(
                            g, J, k, universe=nxt | set(J),
                            provenance=f"cluster-local@t={t}"))
                    if nxt:
                        dfs(t + 1, nxt)
            else:
                nxt = _gamma(adj, current)
                if nxt:
                    dfs(t + 1, nxt)

        dfs(1, set(range(g.n)))
        return best

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(budget):
        clusters = []
        for _ in range(n_hairs):
            pick = rng.choice(len(cands), size=cluster_size, replace=False)
            clusters.append(tuple(sorted(cands[i] for i in pick)))
        best = _fold(best, _run_branch_steps(g, k, sched, clusters, cluster_local))
    return best


def dks_cat_combinatorial(g: Graph, k: int, r: int, s: int, leaf_budget: int,
                          seed: int = 0) -> SolveResult:
    """Combinatorial caterpillar solver: enumerate/sample leaves at hair steps,
    fold dks_local at every step, then grow the best branch output to exactly
    k vertices with union_until_k."""
    sched = build_schedule(r, s)
    if g.n == 0:
        raise ValueError("empty graph")

    prov = f"caterpillar(r={r},s={s})"

    def inner(current: Graph) -> tuple[int, ...]:
        res = _branch_best(current, k, sched, leaf_budget, seed)
        if res is not None and res.vertices:
            fset = set(res.vertices)
            if any(u in fset and v in fset for (u, v) in current.edges):
                return res.vertices
        # residual has edges but no branch spans one: fall back to a single edge
        return min(current.edges)

    if g.m == 0:
        verts = tuple(range(min(k, g.n)))
        return SolveResult(vertices=verts, density=0.0, provenance="edgeless")
    verts = union_until_k(g, k, inner)
    dens = density_report(g, verts).average_degree
    return SolveResult(vertices=verts, density=dens, provenance=prov)


def dks_exp(g: Graph, k: int, eps: float, cluster_budget: int, seed: int = 0,
            cluster_size: Optional[int] = None, s_max: int = 5) -> SolveResult:
    """Cluster-based hair steps: intersect with Gamma(J_t) for C-subsets J_t,
    additionally running dks_local on each cluster against its candidate set.

    C defaults to round(n^(2*beta*eps/(2*beta*eps+alpha))) with beta = log_n k
    and alpha = 1 - beta. With C = 1 the cluster-local pass is skipped and the
    result matches dks_cat_combinatorial exactly.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    n = g.n
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    beta = math.log(max(k, 2)) / math.log(n)
    alpha = max(1.0 - beta, 1e-9)
    alpha_prime = min(alpha + 2 * beta * eps, 0.999)
    r, s = choose_rs(alpha_prime, s_max)
    if cluster_size is None:
        cluster_size = max(1, round(n ** (2 * beta * eps / (2 * beta * eps + alpha))))
    if cluster_size == 1:
        return dks_cat_combinatorial(g, k, r, s, cluster_budget, seed)
    sched = build_schedule(r, s)
    best = _branch_best(g, k, sched, cluster_budget, seed,
                        cluster_size=cluster_size, cluster_local=True)
    if best is None:
        verts = tuple(range(min(k, n)))
        return SolveResult(vertices=verts, density=0.0, provenance="edgeless")
    if len(best.vertices) > k:
        verts = prune_to_size(g, best.vertices, k)
        return SolveResult(vertices=verts,
                           density=density_report(g, verts).average_degree,
                           provenance=best.provenance)
    return best


def resize_to_k(g: Graph, s: Iterable[int], k: int) -> tuple[int, ...]:
    """Prune (lowest degree first) or pad (neighbors first, then untouched
    vertices) a vertex set to exactly k members."""
    cur = set(normalize_vertex_set(s))
    if len(cur) > k:
        return prune_to_size(g, cur, k)
    adj = g.adj
    while len(cur) < k:
        fringe: dict[int, int] = {}
        for v in cur:
            for u in adj[v]:
                if u not in cur:
                    fringe[u] = fringe.get(u, 0) + 1
        if fringe:
            pick = max(fringe, key=lambda u: (fringe[u], -u))
        else:
            pick = next(v for v in range(g.n) if v not in cur)
        cur.add(pick)
    return tuple(sorted(cur))


def approximate(g: Graph, k: int, config: Optional[SolverConfig] = None) -> SolveResult:
    """Top-level driver: weight buckets -> greedy degree cap -> bipartite
    double cover -> caterpillar search at the cap's log-density -> collapse ->
    resize to k; returns the denser of the caterpillar output and the greedy
    baseline."""
    config = config or SolverConfig()
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    if g.weights is not None:
        best: Optional[SolveResult] = None
        for i, bucket in enumerate(weight_buckets(g)):
            res = approximate(bucket, min(k, bucket.n), config)
            res = SolveResult(vertices=res.vertices, density=res.density,
                              provenance=f"bucket{i}:{res.provenance}",
                              gamma=res.gamma)
            best = _fold(best, res)
        if best is None:
            verts = tuple(range(k))
            return SolveResult(vertices=verts, density=0.0, provenance="edgeless")
        return best
    if k == g.n:
        verts = tuple(range(g.n))
        return SolveResult(vertices=verts,
                           density=density_report(g, verts).average_degree,
                           provenance="whole-graph")
    if g.m == 0:
        verts = tuple(range(k))
        return SolveResult(vertices=verts, density=0.0, provenance="edgeless")
    if k == 1:
        return SolveResult(vertices=(0,), density=0.0, provenance="single-vertex")

    core = greedy_core(g, k)
    greedy_verts = resize_to_k(g, core.h_prime, k)
    greedy_res = SolveResult(vertices=greedy_verts,
                             density=density_report(g, greedy_verts).average_degree,
                             provenance="greedy", gamma=core.gamma)

    cat_res: Optional[SolveResult] = None
    gp = core.g_prime
    if gp.m > 0 and gp.n > 1:
        cover = bipartite_double_cover(gp)
        cap = max(core.cap_degree, float(gp.max_degree()))
        if cap > 1.0:
            alpha = math.log(cap) / math.log(cover.n)
            alpha = min(max(alpha, 1e-6), 1 - 1e-6)
            r, s = choose_rs(alpha, config.s_max)
            k_cover = min(2 * k, cover.n)
            cov_res = dks_cat_combinatorial(cover, k_cover, r, s,
                                            config.leaf_budget, config.seed)
            collapsed = collapse_double_cover(cov_res.vertices, gp.n)
            original = [core.g_prime_vertices[v] for v in collapsed]
            verts = resize_to_k(g, original, k)
            cat_res = SolveResult(vertices=verts,
                                  density=density_report(g, verts).average_degree,
                                  provenance=f"caterpillar(r={r},s={s})",
                                  gamma=core.gamma)

    best = greedy_res if cat_res is None or greedy_res.better_than(cat_res) else cat_res
    return best
