"""Brute-force reference computations, written independently of the package.

Each oracle recomputes from the raw list of ingested edges on every call;
nothing is incremental.
"""

import math


def popularity(edges, v, t, tau):
    """Sum of exp(-(t - t_i) / tau) over every in-edge (., v, t_i) with t_i <= t."""
    return math.fsum(math.exp(-(t - ti) / tau) for _, d, ti in edges if d == v and ti <= t)


def popularity_table(edges, t, tau):
    """``popularity`` for every destination at once, from one pass over ``edges``."""
    terms = {}
    for _, d, ti in edges:
        if ti <= t:
            terms.setdefault(d, []).append(math.exp(-(t - ti) / tau))
    return {d: math.fsum(v) for d, v in terms.items()}


def tcomem_score(edges, u, v, t, tw, tau, lam, queue_cap=None):
    """Direct evaluation of the t-CoMem formula from the full edge history."""
    recent = [(ti, d) for s, d, ti in edges if s == u]
    if queue_cap is not None:
        recent = recent[-queue_cap:]
    table = popularity_table(edges, t, tau)
    decayed = math.fsum(math.exp(-(t - ti) / tw) * table.get(n, 0.0) for ti, n in recent if t - ti <= tw)
    c = sum(1 for s, d, _ in edges if (s, d) == (u, v) or ((s, d) == (v, u) and u != v))
    total = decayed + lam * c / (1 + c)
    if total == 0:
        return 0.0
    return 1.0 / (1.0 + 1.0 / total)


def edgebank_unlimited(edges, u, v):
    return int(any(s == u and d == v for s, d, _ in edges))


def topk_by_sort(edges, t, tau, k):
    """Full sort of every destination's decayed popularity; ties by node id."""
    nodes = {d for _, d, _ in edges}
    table = sorted(nodes, key=lambda n: (-popularity(edges, n, t, tau), n))
    return table[:k]


def auroc_pairs(pos, neg):
    """O(P*N) pair count with half credit for ties."""
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))
