"""Finite d-regular graphs and finite patches of the d-regular tree.

Provides the two host structures everything else runs on: simple d-regular
graphs with a recorded girth guarantee, and "tree patches" (the union of two
radius-r balls around the endpoints of a length-k path in the d-regular
tree), plus girth computation and girth-constrained random generation.

Vertices are dense integers 0..n-1 throughout.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FiniteRegularGraph",
    "TreePatch",
    "GraphGenerationError",
    "ball_size",
    "sphere_size",
    "build_tree_patch",
    "random_regular_graph",
    "girth",
]


class GraphGenerationError(RuntimeError):
    """Raised when girth-constrained generation exhausts its attempt budget."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


def ball_size(d: int, r: int) -> int:
    """Number of vertices within distance r of a vertex of the d-regular tree.

    Closed form 1 + d*((d-1)^r - 1)/(d-2), which requires d >= 3.
    """
    if d < 3:
        raise ValueError(f"ball_size requires d >= 3, got d={d}")
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got r={r}")
    if r == 0:
        return 1
    return 1 + d * ((d - 1) ** r - 1) // (d - 2)


def sphere_size(d: int, k: int) -> int:
    """Number of vertices at distance exactly k from a vertex of T_d.

    Equals d*(d-1)^(k-1), the count of non-backtracking walks of length k.
    """
    if d < 2:
        raise ValueError(f"sphere_size requires d >= 2, got d={d}")
    if k < 1:
        raise ValueError(f"sphere_size requires k >= 1, got k={k}")
    return d * (d - 1) ** (k - 1)


@dataclass
class FiniteRegularGraph:
    """A simple d-regular graph on vertices 0..n-1.

    ``girth_lower_bound`` records what the constructor guarantees; the true
    girth (see :func:`girth`) is at least this value.
    """

    n: int
    d: int
    adjacency: list[list[int]]
    girth_lower_bound: int = 3

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency length does not match vertex count")
        if (self.n * self.d) % 2 != 0:
            raise ValueError(f"n*d must be even, got n={self.n}, d={self.d}")
        seen = set()
        for u, nbrs in enumerate(self.adjacency):
            if len(nbrs) != self.d:
                raise ValueError(f"vertex {u} has degree {len(nbrs)}, expected {self.d}")
            if u in nbrs:
                raise ValueError(f"self-loop at vertex {u}")
            if len(set(nbrs)) != len(nbrs):
                raise ValueError(f"multi-edge at vertex {u}")
            for v in nbrs:
                if not 0 <= v < self.n:
                    raise ValueError(f"neighbor {v} out of range")
                seen.add((min(u, v), max(u, v)))
        if 2 * len(seen) != self.n * self.d:
            raise ValueError("adjacency is not symmetric")

    @property
    def edge_count(self) -> int:
        return self.n * self.d // 2

    def edges(self) -> list[tuple[int, int]]:
        return sorted(
            (u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v
        )

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = [False] * self.n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == self.n

    def to_edge_list(self) -> str:
        """Serialize as plain text: first line "n d", then one "u v" per edge."""
        lines = [f"{self.n} {self.d}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str, girth_lower_bound: int = 3) -> "FiniteRegularGraph":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or len(rows[0]) != 2:
            raise ValueError("edge list must start with a 'n d' header line")
        n, d = int(rows[0][0]), int(rows[0][1])
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for row in rows[1:]:
            if len(row) != 2:
                raise ValueError(f"malformed edge line: {' '.join(row)}")
            u, v = int(row[0]), int(row[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            adjacency[u].append(v)
            adjacency[v].append(u)
        return cls(n=n, d=d, adjacency=adjacency, girth_lower_bound=girth_lower_bound)


@dataclass
class TreePatch:
    """Union of the radius-r balls around both endpoints of a length-k path in T_d.

    Stores distances from every patch vertex to both endpoints; every
    downstream estimator needs them and patches are small. For k=0 the two
    endpoints coincide and the patch is a single ball.
    """

    d: int
    k: int
    r: int
    adjacency: list[list[int]]
    v: int
    w: int
    dist_v: list[int]
    dist_w: list[int]
    _ball_v: np.ndarray = field(init=False, repr=False)
    _ball_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dv = np.asarray(self.dist_v)
        dw = np.asarray(self.dist_w)
        self._ball_v = np.flatnonzero(dv <= self.r)
        self._ball_w = np.flatnonzero(dw <= self.r)

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @property
    def ball_v(self) -> np.ndarray:
        """Indices of vertices within distance r of endpoint v."""
        return self._ball_v

    @property
    def ball_w(self) -> np.ndarray:
        return self._ball_w

    def overlap(self) -> np.ndarray:
        """Indices of vertices lying in both balls."""
        dv = np.asarray(self.dist_v)
        dw = np.asarray(self.dist_w)
        return np.flatnonzero((dv <= self.r) & (dw <= self.r))


def build_tree_patch(d: int, k: int, r: int) -> TreePatch:
    """Construct S_r(v) union S_r(w) in T_d with dist(v, w) = k, by BFS growth.

    Starts from the v-w path and repeatedly gives full degree d to every
    vertex lying strictly inside either ball; children added this way sit one
    step further from both endpoints.
    """
    if d < 3:
        raise ValueError(f"tree patches require d >= 3, got d={d}")
    if k < 0 or r < 0:
        raise ValueError("k and r must be nonnegative")

    if k == 0:
        adjacency: list[list[int]] = [[]]
        dist_v = [0]
        v_idx = w_idx = 0
    else:
        adjacency = [[] for _ in range(k + 1)]
        for i in range(k):
            adjacency[i].append(i + 1)
            adjacency[i + 1].append(i)
        dist_v = list(range(k + 1))
        v_idx, w_idx = 0, k
    dist_w = [k - t for t in dist_v]

    queue = deque(range(len(adjacency)))
    while queue:
        u = queue.popleft()
        if min(dist_v[u], dist_w[u]) >= r:
            continue
        for _ in range(d - len(adjacency[u])):
            c = len(adjacency)
            adjacency.append([u])
            adjacency[u].append(c)
            dist_v.append(dist_v[u] + 1)
            dist_w.append(dist_w[u] + 1)
            queue.append(c)

    # middle path vertices fall outside both balls once k > 2r+1; drop them
    # (the patch then splits into two components, one per ball)
    keep = [u for u in range(len(adjacency)) if min(dist_v[u], dist_w[u]) <= r]
    if len(keep) != len(adjacency):
        index = {old: new for new, old in enumerate(keep)}
        adjacency = [
            [index[nb] for nb in adjacency[old] if nb in index] for old in keep
        ]
        dist_v = [dist_v[old] for old in keep]
        dist_w = [dist_w[old] for old in keep]
        v_idx = index[v_idx]
        w_idx = index[w_idx]

    return TreePatch(
        d=d, k=k, r=r, adjacency=adjacency, v=v_idx, w=w_idx,
        dist_v=dist_v, dist_w=dist_w,
    )


def girth(graph: FiniteRegularGraph) -> float:
    """Length of the shortest cycle, or math.inf for forests.

    BFS from every vertex; a non-tree edge (u, w) seen from root s witnesses
    a cycle of length at most dist(u) + dist(w) + 1, and the minimum over all
    roots is exact.
    """
    if graph.edge_count == 0:
        raise ValueError("girth requires at least one edge")
    n = graph.n
    adj = graph.adjacency
    best = math.inf
    for s in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w and parent[w] != u:
                    cand = dist[u] + dist[w] + 1
                    if cand < best:
                        best = cand
    return best


def random_regular_graph(
    n: int,
    d: int,
    min_girth: int = 3,
    seed: int = 0,
    max_attempts: int = 200,
) -> FiniteRegularGraph:
    """Random simple d-regular graph on n vertices with girth >= min_girth.

    Configuration-model stub pairing where each proposed edge is rejected if
    it would close a cycle shorter than min_girth (checked by a local BFS of
    depth min_girth - 2). A pairing that dead-ends is thrown away and
    restarted; the sample is close to, but not exactly, uniform over
    girth-constrained graphs.

    Deterministic for a fixed seed. Raises GraphGenerationError once
    max_attempts restarts are used up.
    """
    if n <= 0 or d <= 0:
        raise ValueError("n and d must be positive")
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d must be even, got n={n}, d={d}")
    if d >= n:
        raise ValueError(f"simple graph needs d < n, got d={d}, n={n}")
    if min_girth < 3:
        raise ValueError(f"min_girth must be at least 3, got {min_girth}")

    rng = np.random.default_rng(seed)
    reach = min_girth - 2  # new edge (u,v) is legal iff dist(u,v) > reach

    for attempt in range(max_attempts):
        adjacency: list[list[int]] = [[] for _ in range(n)]
        free = [u for u in range(n) for _ in range(d)]
        dead_end = False
        while free and not dead_end:
            placed = False
            for _ in range(64):
                if len(free) < 2:
                    break
                i = int(rng.integers(len(free)))
                j = int(rng.integers(len(free)))
                if i == j:
                    continue
                u, v = int(free[i]), int(free[j])
                if u == v or _within_distance(adjacency, u, v, reach):
                    continue
                adjacency[u].append(v)
                adjacency[v].append(u)
                for idx in sorted((i, j), reverse=True):
                    free[idx] = free[-1]
                    free.pop()
                placed = True
                break
            if not placed:
                dead_end = True
        if not dead_end and not free:
            return FiniteRegularGraph(
                n=n, d=d, adjacency=adjacency, girth_lower_bound=min_girth
            )

    raise GraphGenerationError(
        f"no d-regular graph with girth >= {min_girth} found for n={n}, d={d} "
        f"after {max_attempts} attempts",
        attempts=max_attempts,
    )


def _within_distance(adjacency: list[list[int]], u: int, v: int, limit: int) -> bool:
    """True iff v is within graph distance `limit` of u (limit >= 1 includes adjacency)."""
    if limit <= 0:
        return False
    dist = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        if dist[x] >= limit:
            continue
        for y in adjacency[x]:
            if y not in dist:
                if y == v:
                    return True
                dist[y] = dist[x] + 1
                q.append(y)
    return False
