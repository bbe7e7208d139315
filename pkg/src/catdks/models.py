"""Random graph models and planted-subgraph distinguishers.

Generators are deterministic under a 64-bit seed. Distinguishers compute one
statistic each and compare against a threshold (decision is "planted" iff
statistic > threshold); the threshold constants were calibrated once on null
Monte-Carlo runs and are frozen as regression values.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .caterpillar import build_schedule, max_witness_count
from .graphs import Graph, density_report, normalize_vertex_set


@dataclass(frozen=True)
class PlantedInstance:
    graph: Graph
    planted: Optional[tuple[int, ...]]
    model: str  # null | random-planted | dense-in-random
    params: dict
    ground_truth_density: Optional[float] = None


@dataclass(frozen=True)
class DistinguishVerdict:
    statistic: str
    value: float
    threshold: float
    decision: str  # "planted" | "null-model"
    notes: str = ""

    @staticmethod
    def decide(statistic: str, value: float, threshold: float,
               notes: str = "") -> "DistinguishVerdict":
        return DistinguishVerdict(statistic=statistic, value=float(value),
                                  threshold=float(threshold),
                                  decision="planted" if value > threshold else "null-model",
                                  notes=notes)


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p), each pair an edge independently with probability p."""
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} out of [0,1]")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n < 2 or p == 0:
        return Graph.from_edges(n, [])
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    if p == 1:
        mask = np.ones(len(iu), dtype=bool)
    else:
        mask = rng.random(len(iu)) < p
    edges = zip(iu[mask].tolist(), ju[mask].tolist())
    return Graph.from_edges(n, edges)


def _replace_induced(base: Graph, location: tuple[int, ...],
                     inner_edges: Iterable[tuple[int, int]]) -> Graph:
    loc_set = set(location)
    kept = [e for e in base.edges if not (e[0] in loc_set and e[1] in loc_set)]
    mapped = [(location[a], location[b]) for (a, b) in inner_edges]
    return Graph.from_edges(base.n, kept + mapped)


def plant(n: int, alpha: float, k: int, beta: float, seed: int) -> PlantedInstance:
    """Plant G(k, k^(beta-1)) on a random k-set inside G(n, n^(alpha-1))."""
    if not (0 < alpha < 1 and 0 < beta <= 1):
        raise ValueError("alpha in (0,1) and beta in (0,1] required")
    if k > n:
        raise ValueError("k > n")
    rng = np.random.default_rng(seed)
    base = gen_gnp(n, n ** (alpha - 1), int(rng.integers(0, 2**63 - 1)))
    location = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
    h = gen_gnp(k, k ** (beta - 1), int(rng.integers(0, 2**63 - 1)))
    g = _replace_induced(base, location, h.edges)
    gt = density_report(g, location).average_degree if k else None
    return PlantedInstance(graph=g, planted=location, model="random-planted",
                           params={"n": n, "alpha": alpha, "k": k, "beta": beta,
                                   "seed": seed},
                           ground_truth_density=gt)


def plant_arbitrary(g_base: Graph, h: Graph, location: Iterable[int],
                    seed: int = 0) -> PlantedInstance:
    """Replace the induced subgraph on `location` by an arbitrary graph h."""
    loc = normalize_vertex_set(location)
    if len(loc) != h.n:
        raise ValueError(f"location size {len(loc)} != |V(h)| = {h.n}")
    g = _replace_induced(g_base, loc, h.edges)
    gt = density_report(g, loc).average_degree if loc else None
    return PlantedInstance(graph=g, planted=loc, model="dense-in-random",
                           params={"n": g_base.n, "k": len(loc), "seed": seed},
                           ground_truth_density=gt)


def null_instance(n: int, alpha: float, seed: int) -> PlantedInstance:
    g = gen_gnp(n, n ** (alpha - 1), seed)
    return PlantedInstance(graph=g, planted=None, model="null",
                           params={"n": n, "alpha": alpha, "seed": seed})


# ---------------------------------------------------------------------------
# distinguishers


def degree_distinguisher(g: Graph, k: int, expected_null_degree: float,
                         c: float = 1.0) -> DistinguishVerdict:
    """Mean degree of the top-k vertices vs the null expectation plus
    c*sqrt(log n) standard deviations."""
    if g.n == 0 or k == 0:
        return DistinguishVerdict.decide("top-k-degree", 0.0, expected_null_degree)
    deg = np.sort(g.degrees)[::-1]
    stat = float(deg[:k].mean())
    thr = expected_null_degree + c * math.sqrt(max(math.log(max(g.n, 2)), 1.0)) \
        * math.sqrt(max(expected_null_degree, 1.0))
    return DistinguishVerdict.decide("top-k-degree", stat, thr,
                                     notes=f"c={c}")


def intersection_distinguisher(g: Graph, pair_budget: int, seed: int = 0,
                               c: float = 3.0) -> DistinguishVerdict:
    """Max neighborhood-intersection size over enumerated or sampled pairs.

    The null mean n*p^2 and binomial deviation are estimated from the realized
    edge density.
    """
    n = g.n
    if n < 2:
        return DistinguishVerdict.decide("max-pair-intersection", 0.0, 0.0)
    p_hat = 2 * g.m / (n * (n - 1))
    mean = n * p_hat * p_hat
    sigma = math.sqrt(max(mean, 1.0))
    thr = mean + c * math.sqrt(max(math.log(n), 1.0)) * sigma
    adj = g.adj
    total_pairs = n * (n - 1) // 2
    best = 0
    if total_pairs <= pair_budget:
        for u in range(n):
            for v in range(u + 1, n):
                best = max(best, len(adj[u] & adj[v]))
    else:
        rng = np.random.default_rng(seed)
        us = rng.integers(0, n, size=pair_budget)
        vs = rng.integers(0, n - 1, size=pair_budget)
        for u, v in zip(us.tolist(), vs.tolist()):
            if v >= u:
                v += 1
            best = max(best, len(adj[u] & adj[v]))
    return DistinguishVerdict.decide("max-pair-intersection", float(best), thr,
                                     notes=f"c={c}")


def lambda2_estimate(g: Graph, iters: Optional[int] = None, tol: float = 1e-6,
                     seed: int = 0, restarts: int = 3) -> float:
    """Largest-magnitude eigenvalue of the adjacency operator on the
    complement of the all-ones direction, by deflated power iteration.

    Warns and returns the best estimate when not converged within the
    iteration cap (default 10n).
    """
    n = g.n
    if n == 0:
        raise ValueError("empty graph")
    if g.m == 0:
        return 0.0
    A = g.adjacency_matrix
    iters = iters if iters is not None else 10 * n
    rng = np.random.default_rng(seed)
    best = 0.0
    converged = False
    for _ in range(restarts):
        x = rng.standard_normal(n)
        x -= x.mean()
        nrm = np.linalg.norm(x)
        if nrm == 0:
            continue
        x /= nrm
        prev_q = None
        for _ in range(iters):
            y = A @ x
            y -= y.mean()          # deflate the all-ones direction
            nrm = np.linalg.norm(y)
            if nrm == 0:
                prev_q = 0.0
                converged = True
                break
            x = y / nrm
            q = float(x @ (A @ x))
            if prev_q is not None and abs(q - prev_q) < tol:
                prev_q = q
                converged = True
                break
            prev_q = q
        if prev_q is not None:
            best = max(best, abs(prev_q))
    if not converged:
        warnings.warn("power iteration did not converge; returning best estimate",
                      stacklevel=2)
    return best


def planted_rayleigh(g: Graph, h_set: Iterable[int]) -> float:
    """Exact Rayleigh quotient of the +1 / -k/(n-k) test vector.

    The vector is orthogonal to all-ones by construction; this is asserted in
    exact rational arithmetic.
    """
    members = normalize_vertex_set(h_set)
    k, n = len(members), g.n
    if not 0 < k < n:
        raise ValueError("need 0 < |h_set| < n")
    inside = set(members)
    neg = Fraction(-k, n - k)
    assert k * Fraction(1) + (n - k) * neg == 0  # x ⟂ 1 exactly
    num = Fraction(0)
    for (u, v) in g.edges:
        xu = Fraction(1) if u in inside else neg
        xv = Fraction(1) if v in inside else neg
        num += 2 * xu * xv
    den = Fraction(k) + Fraction(k * k, n - k)
    return float(num / den)


def spectral_distinguisher(g: Graph, k: int, rho: float, c: float = 2.0,
                           seed: int = 0) -> DistinguishVerdict:
    """Deflated top-magnitude eigenvalue vs c * n^(rho/2)."""
    stat = lambda2_estimate(g, seed=seed)
    thr = c * g.n ** (rho / 2)
    return DistinguishVerdict.decide("lambda2", stat, thr, notes=f"c={c}")


def sdp_dual_certificate(g: Graph, k: int, seed: int = 0) -> dict:
    """Dual certificate y_i = D/n, t = lambda2 + kD/n, z = 0, of value
    dual_value = k^2 D / n + k * lambda2; feasible iff psd_margin (min
    eigenvalue of (D/n)J - A + lambda2 I) is nonnegative.

    D is the realized average degree 2|E|/n. lambda2 here is the top
    eigenvalue of the centered adjacency A - (D/n)J, which makes the
    certificate matrix psd by construction; on G(n,p) it coincides with the
    deflated estimate up to lower-order terms. Dense eigendecomposition;
    intended for n in the hundreds.
    """
    n = g.n
    if n == 0 or g.m == 0:
        return {"dual_value": 0.0, "psd_margin": 0.0, "lambda2": 0.0}
    D = 2 * g.m / n
    A = g.adjacency_matrix.toarray()
    J = np.ones((n, n))
    lam2 = float(np.linalg.eigvalsh(A - (D / n) * J)[-1])
    dual_value = k * k * D / n + k * lam2
    M = (D / n) * J - A + lam2 * np.eye(n)
    margin = float(np.linalg.eigvalsh(M)[0])
    return {"dual_value": dual_value, "psd_margin": margin, "lambda2": lam2}


def _dense_subset_heuristic(g: Graph, k: int, rounds: int = 4) -> tuple[int, ...]:
    """Top-k degrees followed by a few rounds of degree-into-set refinement."""
    deg = g.degrees
    order = sorted(range(g.n), key=lambda v: (-deg[v], v))
    current = set(order[:k])
    adj = g.adj
    best = tuple(sorted(current))
    best_edges = g.edge_count_within(best)
    for _ in range(rounds):
        score = {v: len(adj[v] & current) for v in range(g.n)}
        order = sorted(range(g.n), key=lambda v: (-score[v], v))
        current = set(order[:k])
        cand = tuple(sorted(current))
        e = g.edge_count_within(cand)
        if e > best_edges:
            best, best_edges = cand, e
    return best


def sdp_dual_distinguisher(g: Graph, k: int, c: float = 1.0,
                           witness: Optional[Iterable[int]] = None) -> DistinguishVerdict:
    """Primal witness edges vs the null dual bound c * k(sqrt(D) + k^2 D / n).

    Any k-subgraph's edge count lower-bounds the SDP value, which for a random
    graph is upper-bounded by the dual certificate; a witness beating that
    bound certifies the graph is not null. The witness defaults to a greedy
    dense-subset heuristic.
    """
    n = g.n
    if n == 0 or g.m == 0:
        return DistinguishVerdict.decide("primal-witness-edges", 0.0, 0.0)
    D = 2 * g.m / n
    thr = c * k * (math.sqrt(D) + k * k * D / n)
    verts = normalize_vertex_set(witness) if witness is not None \
        else _dense_subset_heuristic(g, k)
    stat = float(g.edge_count_within(verts))
    return DistinguishVerdict.decide("primal-witness-edges", stat, thr,
                                     notes=f"c={c}")


def caterpillar_distinguisher(g: Graph, r: int, s: int, budget: int,
                              seed: int = 0, c: float = 4.0) -> DistinguishVerdict:
    """Max caterpillar witness count vs c * (log n)^(s-r)."""
    sched = build_schedule(r, s)
    _, count = max_witness_count(g, sched, budget, seed)
    thr = c * math.log(max(g.n, 3)) ** (s - r)
    return DistinguishVerdict.decide("max-witness-count", float(count), thr,
                                     notes=f"c={c}")
