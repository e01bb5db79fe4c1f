"""Vendor-consistency verification of a cluster universe.

A vendor listing the same product twice is assumed to be a feed error, so a
valid cluster holds at most one product per vendor. Clusters are visited in
creation order; inside a violating vendor group the product most similar to
the cluster representative stays (the representative itself can never be
evicted) and the rest leave. An evicted product migrates to the most similar
cluster that holds no product of its vendor at that moment, provided the
similarity clears the threshold; otherwise it founds a new single-product
cluster at the end of the universe.

Candidate clusters are fetched through an inverted token-to-cluster map over
representative titles. A cluster sharing no token with the product would have
similarity 0, which can never clear a positive threshold, so the map loses no
valid candidate.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .index import ProductIndex
from .scoring import ClusterUniverse

VERIFY_METRICS = ("cs", "cs-idf")


def binary_cosine(a: frozenset, b: frozenset) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / math.sqrt(len(a) * len(b))


def idf_cosine(a: frozenset, b: frozenset, idf_sq: Sequence[float]) -> float:
    num = sum(idf_sq[w] for w in a & b)
    norm_a = sum(idf_sq[w] for w in a)
    norm_b = sum(idf_sq[w] for w in b)
    if norm_a <= 0.0 or norm_b <= 0.0:
        return 0.0
    return num / math.sqrt(norm_a * norm_b)


def product_similarity(index: ProductIndex, p: int, pi: int, metric: str = "cs") -> float:
    """Similarity of a product to a cluster representative, in [0, 1]."""
    if metric not in VERIFY_METRICS:
        raise ValueError(f"unknown verify metric {metric!r}")
    a = index.token_set(p)
    b = index.token_set(pi)
    if metric == "cs":
        return binary_cosine(a, b)
    idf_sq = (index.idf * index.idf).tolist()
    return idf_cosine(a, b, idf_sq)


def find_candidates(
    p: int,
    vendor: int,
    universe: ClusterUniverse,
    token_sets: List[frozenset],
    token_map: Dict[int, List[int]],
) -> List[int]:
    """Clusters sharing at least one token with p and free of p's vendor."""
    seen: Set[int] = set()
    for w in token_sets[p]:
        for ci in token_map.get(w, ()):
            seen.add(ci)
    out = []
    for ci in sorted(seen):
        if vendor not in universe.clusters[ci].members:
            out.append(ci)
    return out


def scan_violators(universe: ClusterUniverse) -> List[Tuple[int, int]]:
    """(cluster index, vendor) pairs that still break the one-per-vendor rule."""
    out = []
    for ci, cluster in enumerate(universe.clusters):
        for v, members in cluster.members.items():
            if len(members) > 1:
                out.append((ci, v))
    return out


def verify_universe(
    universe: ClusterUniverse,
    index: ProductIndex,
    tau: float = 0.4,
    metric: str = "cs",
) -> ClusterUniverse:
    """Evict surplus same-vendor products and re-home them (in place).

    Deterministic processing order: clusters in creation order, vendors in
    first-appearance order, evicted products by descending similarity to the
    representative then ascending product ID. Migration validity is judged
    against the current universe, so earlier moves constrain later ones.
    """
    if metric not in VERIFY_METRICS:
        raise ValueError(f"unknown verify metric {metric!r}")
    fw = index.forward
    n = len(fw)
    token_sets = [index.token_set(p) for p in range(n)]
    if metric == "cs-idf":
        idf_sq = (index.idf * index.idf).tolist()

        def sim(p: int, q: int) -> float:
            return idf_cosine(token_sets[p], token_sets[q], idf_sq)

    else:

        def sim(p: int, q: int) -> float:
            return binary_cosine(token_sets[p], token_sets[q])

    token_map: Dict[int, List[int]] = {}

    def register(ci: int) -> None:
        for w in token_sets[universe.clusters[ci].pi]:
            token_map.setdefault(w, []).append(ci)

    for ci in range(len(universe.clusters)):
        register(ci)

    pids = fw.product_ids
    ci = 0
    while ci < len(universe.clusters):
        cluster = universe.clusters[ci]
        for vendor in list(cluster.vendors):
            members = cluster.members.get(vendor, [])
            if len(members) < 2:
                continue
            sims = {p: sim(p, cluster.pi) for p in members}
            if cluster.pi in members:
                keeper = cluster.pi
            else:
                keeper = min(members, key=lambda p: (-sims[p], pids[p]))
            evicted = sorted(
                (p for p in members if p != keeper),
                key=lambda p: (-sims[p], pids[p]),
            )
            for p in evicted:
                universe.remove(p, ci)
                best: Optional[int] = None
                best_sim = 0.0
                for cand in find_candidates(p, vendor, universe, token_sets, token_map):
                    s = sim(p, universe.clusters[cand].pi)
                    if s > best_sim:
                        best_sim = s
                        best = cand
                if best is not None and best_sim > tau:
                    universe.add_member(p, vendor, best)
                else:
                    new_ci = universe.insert(
                        ("new", pids[p]), p, vendor, float(universe.s1[p]), record=None
                    )
                    register(new_ci)
        ci += 1

    leftovers = scan_violators(universe)
    if leftovers:
        raise RuntimeError(f"verification left violators: {leftovers[:5]}")
    return universe
