"""Greedy construction and reduction-based local search for maximum clique."""

from __future__ import annotations

import random
import time

from ..graph import Graph

_GREEDY_VARIANTS = ("random_karp", "max_degree")


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        lsb = mask & -mask
        out.append(lsb.bit_length() - 1)
        mask ^= lsb
    return out


def _best_in(mask: int, cand: int, adj: tuple[int, ...]) -> int:
    """Vertex of ``mask`` with most neighbors inside ``cand`` (lowest id wins ties)."""
    pick, pick_score = -1, -1
    while mask:
        lsb = mask & -mask
        v = lsb.bit_length() - 1
        mask ^= lsb
        score = (adj[v] & cand).bit_count()
        if score > pick_score:
            pick_score, pick = score, v
    return pick


def solve_greedy(g: Graph, variant: str = "max_degree", seed: int = 0, restarts: int = 1):
    """Sequential clique growth: pick a vertex, keep only its neighbors, repeat.

    ``random_karp`` picks uniformly from the candidate set; ``max_degree``
    picks the candidate with the most neighbors among the remaining
    candidates (ties to the lowest id).  Best clique over ``restarts``
    rounds; deterministic for a fixed seed.
    """
    from . import SolveResult, verify_clique

    if variant not in _GREEDY_VARIANTS:
        raise ValueError(f"variant must be one of {_GREEDY_VARIANTS}, got {variant!r}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    start = time.perf_counter()
    rng = random.Random(seed)
    adj = g.adj_bits
    full = (1 << g.node_count) - 1

    best: list[int] = []
    for _ in range(restarts):
        clique: list[int] = []
        cand = full
        while cand:
            if variant == "random_karp":
                v = rng.choice(_bits(cand))
            else:
                v = _best_in(cand, cand, adj)
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique

    clique_t = tuple(sorted(best))
    verify_clique(g, clique_t)
    return SolveResult(
        clique=clique_t,
        clique_size=len(clique_t),
        proven_optimal=len(clique_t) == g.node_count,
        wall_seconds=time.perf_counter() - start,
        solver_id="greedy",
    )


def solve_local_search(
    g: Graph,
    budget: float,
    seed: int = 0,
    bms_samples: int = 64,
    on_incumbent=None,
):
    """Repeated clique construction with degree-based graph reduction.

    Every improvement of the best clique triggers a peel: any surviving
    vertex v with deg(v) + 1 <= best size cannot belong to a larger
    clique, so it is removed and degrees cascade.  If the whole graph
    peels away the incumbent is provably maximum.  Construction round 0
    is the deterministic max-connectivity greedy; later rounds start at
    a random vertex and grow by best-of-``bms_samples`` candidate
    sampling.  Anytime within ``budget`` wall seconds.
    """
    from . import SolveResult, verify_clique

    if budget <= 0:
        raise ValueError("budget must be positive")
    start = time.perf_counter()
    deadline = start + budget
    rng = random.Random(seed)
    adj = g.adj_bits
    n = g.node_count

    alive = (1 << n) - 1
    degree = list(g.degrees)
    best: list[int] = []
    proven = False

    def construct(round_idx: int) -> list[int]:
        if round_idx == 0:
            v = max(_bits(alive), key=lambda u: (degree[u], -u))
        else:
            v = rng.choice(_bits(alive))
        clique = [v]
        cand = adj[v] & alive
        while cand:
            cand_list = _bits(cand)
            if round_idx == 0 or len(cand_list) <= bms_samples:
                pick = _best_in(cand, cand, adj)
            else:
                sample = {rng.choice(cand_list) for _ in range(bms_samples)}
                pick = max(
                    sorted(sample),
                    key=lambda u: (adj[u] & cand).bit_count(),
                )
            clique.append(pick)
            cand &= adj[pick]
        return clique

    def reduce_below(threshold: int) -> None:
        # peel every vertex that cannot appear in a clique larger than threshold
        nonlocal alive
        stack = [v for v in _bits(alive) if degree[v] + 1 <= threshold]
        while stack:
            v = stack.pop()
            bit = 1 << v
            if not alive & bit:
                continue
            alive &= ~bit
            for w in _bits(adj[v] & alive):
                degree[w] -= 1
                if degree[w] + 1 <= threshold:
                    stack.append(w)

    round_idx = 0
    while alive:
        clique = construct(round_idx)
        round_idx += 1
        if len(clique) > len(best):
            best = clique
            if on_incumbent:
                on_incumbent(sorted(best), time.perf_counter() - start)
            reduce_below(len(best))
        if not alive:
            proven = True  # graph peeled away: nothing larger exists
            break
        if time.perf_counter() > deadline:
            break

    clique_t = tuple(sorted(best))
    verify_clique(g, clique_t)
    return SolveResult(
        clique=clique_t,
        clique_size=len(clique_t),
        proven_optimal=proven,
        wall_seconds=time.perf_counter() - start,
        solver_id="fastwclq-like",
        budget_exhausted=not proven,
    )
