"""Caterpillar schedules, counting with fixed leaves, and candidate-set traces.

An (r,s)-caterpillar is built in s steps from a single backbone vertex: step t
adds a length-1 hair when the interval [(t-1)r/s, tr/s] contains an integer,
and extends the backbone otherwise. It has r+1 leaves and s-r internal
vertices. Counting is by dynamic programming over the rightmost backbone
vertex, so it counts homomorphisms (internal vertices may collide); the
injective count is available as a brute-force variant flag for small graphs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import Graph, normalize_vertex_set

HAIR = "hair"
BACKBONE = "backbone"


@dataclass(frozen=True)
class CaterpillarSchedule:
    r: int
    s: int
    steps: tuple[str, ...]

    @property
    def num_leaves(self) -> int:
        return self.r + 1

    @property
    def num_internal(self) -> int:
        return self.s - self.r

    def hair_positions(self) -> tuple[int, ...]:
        """1-based step indices that are hair steps."""
        return tuple(t for t, kind in enumerate(self.steps, start=1) if kind == HAIR)


@dataclass(frozen=True)
class CandidateTrace:
    sets: tuple[tuple[int, ...], ...]          # S(0..s)
    kinds: tuple[str, ...]                     # step kind per t=1..s
    fractional_exponents: tuple[Fraction, ...] # fr(t*r/s) per t=1..s

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sets)

    def to_json(self, n: int) -> str:
        rows = []
        for t, kind in enumerate(self.kinds, start=1):
            fr = self.fractional_exponents[t - 1]
            rows.append({
                "step": t,
                "kind": kind,
                "size": len(self.sets[t]),
                "predicted": n ** float(fr),
            })
        return json.dumps(rows)


def _interval_contains_integer(t: int, r: int, s: int) -> bool:
    # exact rational test: exists integer m with (t-1)r <= m*s <= t*r
    lo = -((-(t - 1) * r) // s)   # ceil((t-1)r/s)
    hi = (t * r) // s             # floor(tr/s)
    return lo <= hi


def build_schedule(r: int, s: int) -> CaterpillarSchedule:
    """Deterministic hair/backbone step sequence for coprime 0 < r < s."""
    if not (0 < r < s):
        raise ValueError(f"require 0 < r < s, got r={r}, s={s}")
    if math.gcd(r, s) != 1:
        raise ValueError(f"r={r} and s={s} must be coprime")
    steps = tuple(HAIR if _interval_contains_integer(t, r, s) else BACKBONE
                  for t in range(1, s + 1))
    assert steps.count(HAIR) == r + 1
    return CaterpillarSchedule(r=r, s=s, steps=steps)


def choose_rs(alpha: float, s_max: int) -> tuple[int, int]:
    """Coprime r/s with s <= s_max minimizing |r/s - alpha|.

    Ties prefer r/s >= alpha, then the smallest s.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    if s_max < 2:
        raise ValueError("s_max must be >= 2")
    a = Fraction(alpha).limit_denominator(10**9)
    best = None
    for s in range(2, s_max + 1):
        for r in range(1, s):
            if math.gcd(r, s) != 1:
                continue
            frac = Fraction(r, s)
            key = (abs(frac - a), frac < a, s)
            if best is None or key < best[0]:
                best = (key, (r, s))
    assert best is not None
    return best[1]


def count_caterpillars(g: Graph, sched: CaterpillarSchedule,
                       leaves: Sequence[int], injective: bool = False) -> int:
    """Number of caterpillar copies whose ordered leaf sequence is `leaves`.

    Homomorphism count by DP along the backbone: O(s * |E|). With
    injective=True, internal vertices must be distinct from each other and
    from the leaves (brute force; small graphs only).
    """
    if len(leaves) != sched.num_leaves:
        raise ValueError(f"expected {sched.num_leaves} leaves, got {len(leaves)}")
    if injective:
        return _count_injective(g, sched, leaves)
    adj = g.adj
    leaf_iter = iter(leaves)
    # counts[v] = ways to realize the current prefix with rightmost backbone vertex v
    # step 1 is always a hair step, so seed from the first leaf's neighborhood
    counts = {v: 1 for v in adj[next(leaf_iter)]}
    for kind in sched.steps[1:]:
        if kind == HAIR:
            leaf = next(leaf_iter)
            nbrs = adj[leaf]
            counts = {v: c for v, c in counts.items() if v in nbrs}
        else:
            nxt: dict[int, int] = {}
            for v, c in counts.items():
                for u in adj[v]:
                    nxt[u] = nxt.get(u, 0) + c
            counts = nxt
        if not counts:
            return 0
    return sum(counts.values())


def _count_injective(g: Graph, sched: CaterpillarSchedule, leaves: Sequence[int]) -> int:
    adj = g.adj
    total = 0

    def extend(step: int, backbone_v: Optional[int], used: tuple[int, ...],
               leaf_idx: int) -> int:
        if step > sched.s:
            return 1
        kind = sched.steps[step - 1]
        acc = 0
        if kind == HAIR:
            leaf = leaves[leaf_idx]
            if backbone_v is None:
                # initial backbone vertex chosen together with the first hair
                for v in adj[leaf]:
                    if v not in leaves:
                        acc += extend(step + 1, v, (v,), leaf_idx + 1)
            elif leaf in adj[backbone_v]:
                acc = extend(step + 1, backbone_v, used, leaf_idx + 1)
        else:
            assert backbone_v is not None
            for u in adj[backbone_v]:
                if u not in used and u not in leaves:
                    acc += extend(step + 1, u, used + (u,), leaf_idx)
        return acc

    total = extend(1, None, (), 0)
    return total


def candidate_trace(g: Graph, sched: CaterpillarSchedule,
                    leaves: Sequence[int]) -> CandidateTrace:
    """Replay the candidate sets S(t): hair intersects with the next leaf's
    neighborhood, backbone expands to the full neighborhood."""
    if len(leaves) != sched.num_leaves:
        raise ValueError(f"expected {sched.num_leaves} leaves, got {len(leaves)}")
    adj = g.adj
    current: set[int] = set(range(g.n))
    sets = [tuple(sorted(current))]
    leaf_iter = iter(leaves)
    exps = []
    for t, kind in enumerate(sched.steps, start=1):
        if kind == HAIR:
            current = current & adj[next(leaf_iter)]
        else:
            nxt: set[int] = set()
            for v in current:
                nxt |= adj[v]
            current = nxt
        sets.append(tuple(sorted(current)))
        x = Fraction(t * sched.r, sched.s)
        exps.append(x - (x.numerator // x.denominator))
    return CandidateTrace(sets=tuple(sets), kinds=sched.steps,
                          fractional_exponents=tuple(exps))


def max_witness_count(g: Graph, sched: CaterpillarSchedule, budget: int,
                      seed: int = 0) -> tuple[tuple[int, ...], int]:
    """Distinct leaf tuple maximizing the caterpillar count.

    Leaves are ordered but pairwise distinct (a witness is a vertex *set*;
    repeated leaves degenerate into lower-order intersection counts). Full
    lexicographic enumeration when the tuple space fits in `budget`, otherwise
    seeded uniform sampling of `budget` tuples. Ties resolved by
    (count, lexicographically smallest tuple). Returns (leaves, count).
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    cands = [v for v in range(g.n) if g.degrees[v] > 0]
    if not cands:
        return tuple([0] * sched.num_leaves), 0
    arity = sched.num_leaves
    if len(cands) < arity:
        # degenerate: not enough distinct non-isolated vertices for a witness
        return tuple((cands * arity)[:arity]), 0
    space = math.perm(len(cands), arity)
    if space <= budget:
        tuples: Iterable[tuple[int, ...]] = (
            t for t in product(cands, repeat=arity) if len(set(t)) == arity)
    else:
        rng = np.random.default_rng(seed)
        tuples = (tuple(cands[i] for i in
                        rng.choice(len(cands), size=arity, replace=False))
                  for _ in range(budget))
    best_tuple: Optional[tuple[int, ...]] = None
    best_count = -1
    for tup in tuples:
        c = count_caterpillars(g, sched, tup)
        if c > best_count or (c == best_count and (best_tuple is None or tup < best_tuple)):
            best_count = c
            best_tuple = tup
    assert best_tuple is not None
    return best_tuple, best_count
