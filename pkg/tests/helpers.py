"""Independent oracles and named test graphs.

Everything here recomputes quantities by brute force or dense linear
algebra, deliberately avoiding the code paths under test.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from corrtree.graphs import FiniteRegularGraph


# ---------------------------------------------------------------- tree oracles

def _grow_two_ball_tree(d: int, k: int, r: int):
    """Explicitly build a chunk of T_d containing S_r(v) and S_r(w), dist(v,w)=k.

    Fixpoint construction: keep completing the degree of any vertex within
    distance r-1 of either endpoint, recomputing distances by BFS from
    scratch each round. Returns (adjacency, dist_v, dist_w).
    """
    adjacency: list[list[int]] = [[] for _ in range(k + 1)]
    for i in range(k):
        adjacency[i].append(i + 1)
        adjacency[i + 1].append(i)
    while True:
        dist_v = _tree_distances(adjacency, 0)
        dist_w = _tree_distances(adjacency, k)
        grew = False
        for u in range(len(adjacency)):
            if min(dist_v[u], dist_w[u]) < r and len(adjacency[u]) < d:
                for _ in range(d - len(adjacency[u])):
                    adjacency.append([u])
                    adjacency[u].append(len(adjacency) - 1)
                grew = True
        if not grew:
            return adjacency, dist_v, dist_w


def bfs_ball_size(d: int, r: int) -> int:
    """|S_r| in T_d by explicit construction (no closed form)."""
    adjacency, dist, _ = _grow_two_ball_tree(d, 0, r)
    return sum(1 for x in dist if x <= r)


def bfs_sphere_size(d: int, k: int) -> int:
    adjacency, dist, _ = _grow_two_ball_tree(d, 0, k)
    return sum(1 for x in dist if x == k)


def bfs_patch_vertex_count(d: int, k: int, r: int) -> int:
    """|S_r(v) union S_r(w)| by explicit construction."""
    _, dist_v, dist_w = _grow_two_ball_tree(d, k, r)
    return sum(1 for dv, dw in zip(dist_v, dist_w) if min(dv, dw) <= r)


def bfs_patch_overlap_count(d: int, k: int, r: int) -> int:
    _, dist_v, dist_w = _grow_two_ball_tree(d, k, r)
    return sum(1 for dv, dw in zip(dist_v, dist_w) if dv <= r and dw <= r)


def _tree_distances(adjacency: list[list[int]], source: int) -> list[int]:
    dist = [-1] * len(adjacency)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        for v in adjacency[u]:
            if dist[v] == -1:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def enumerate_walk_distances(d: int, k: int) -> dict[int, int]:
    """Counts of all d^k labeled walks of length k on T_d by final distance.

    Positions are tracked as explicit root-to-vertex paths (tuples of child
    labels); every step chooses among d labeled moves, so this enumerates
    genuinely distinct walks, independent of the distance-chain reduction.
    """
    counts: dict[int, int] = {}

    def step(path: tuple[int, ...], remaining: int):
        if remaining == 0:
            counts[len(path)] = counts.get(len(path), 0) + 1
            return
        if path:
            step(path[:-1], remaining - 1)          # back toward the root
            for child in range(d - 1):
                step(path + (child,), remaining - 1)
        else:
            for child in range(d):
                step((child,), remaining - 1)

    step((), k)
    return counts


# --------------------------------------------------------------- graph oracles

def girth_by_edge_deletion(graph: FiniteRegularGraph) -> float:
    """Exact girth: the shortest cycle through edge (u,v) is the shortest
    u-v path avoiding that edge, plus one."""
    best = math.inf
    for u, v in graph.edges():
        dist = {u: 0}
        q = deque([u])
        while q:
            x = q.popleft()
            for y in graph.adjacency[x]:
                if x == u and y == v:
                    continue
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        if v in dist:
            best = min(best, dist[v] + 1)
    return best


def rho_dense(graph: FiniteRegularGraph) -> float:
    """Operator norm on mean-zero vectors via full eigendecomposition."""
    n = graph.n
    A = np.zeros((n, n))
    for u, nbrs in enumerate(graph.adjacency):
        for v in nbrs:
            A[u, v] += 1.0
    eigs = np.linalg.eigvalsh(A)
    return float(max(abs(eigs[0]), abs(eigs[-2])))


def adjacency_from_edges(n: int, d: int, edges, girth_lower_bound=3):
    adjacency = [[] for _ in range(n)]
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    return FiniteRegularGraph(
        n=n, d=d, adjacency=adjacency, girth_lower_bound=girth_lower_bound
    )


# ----------------------------------------------------------------- test graphs

def complete_graph(n: int) -> FiniteRegularGraph:
    return adjacency_from_edges(
        n, n - 1, [(u, v) for u in range(n) for v in range(u + 1, n)]
    )


def cycle_graph(n: int) -> FiniteRegularGraph:
    return adjacency_from_edges(
        n, 2, [(i, (i + 1) % n) for i in range(n)], girth_lower_bound=n
    )


def petersen_graph() -> FiniteRegularGraph:
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))        # outer cycle
        edges.append((i, i + 5))              # spokes
        edges.append((5 + i, 5 + (i + 2) % 5))  # inner pentagram
    return adjacency_from_edges(10, 3, edges, girth_lower_bound=5)


def complete_bipartite_33() -> FiniteRegularGraph:
    return adjacency_from_edges(
        6, 3, [(u, v) for u in range(3) for v in range(3, 6)]
    )


def two_triangles() -> FiniteRegularGraph:
    return adjacency_from_edges(
        6, 2, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    )
