"""Undirected simple graphs and the metric/combinatorial primitives the rest
of the package is built on.

Vertices are integers ``0..n-1``. Graphs are immutable after construction and
safe to share across threads. Distances and girths of acyclic/disconnected
configurations are reported as ``math.inf``, never as a sentinel integer.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

INFINITY = math.inf


class GraphError(ValueError):
    """Malformed graph input: bad vertex ids, duplicate edges, parse errors."""


class Reindexed(NamedTuple):
    """Result of a vertex deletion or induction.

    The new graph is densely re-indexed; ``to_old[new_id]`` recovers the
    original vertex id and ``to_new`` maps surviving original ids forward.
    """

    graph: "Graph"
    to_new: dict[int, int]
    to_old: tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph as sorted adjacency tuples."""

    n: int
    m: int
    adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise GraphError(f"vertex count must be nonnegative, got {n}")
        neighbors: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if v in neighbors[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            neighbors[u].add(v)
            neighbors[v].add(u)
            m += 1
        return cls(n=n, m=m, adj=tuple(tuple(sorted(s)) for s in neighbors))

    def validate(self) -> None:
        """Walk the structure and check every representation invariant."""
        if len(self.adj) != self.n:
            raise GraphError("adjacency length differs from vertex count")
        degree_sum = 0
        for v, row in enumerate(self.adj):
            if list(row) != sorted(set(row)):
                raise GraphError(f"adjacency of {v} is not sorted and duplicate-free")
            for u in row:
                if not 0 <= u < self.n:
                    raise GraphError(f"neighbor {u} of {v} out of range")
                if u == v:
                    raise GraphError(f"self-loop at vertex {v}")
                if v not in self.adj[u]:
                    raise GraphError(f"asymmetric edge ({v}, {u})")
            degree_sum += len(row)
        if degree_sum != 2 * self.m:
            raise GraphError(f"edge count {self.m} inconsistent with degree sum {degree_sum}")

    # -- basic queries ------------------------------------------------------

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range for n={self.n}")

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(row) for row in self.adj), default=0)

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, row in enumerate(self.adj):
            for v in row:
                if u < v:
                    yield (u, v)

    def is_regular(self) -> int | None:
        """The common degree if the graph is regular, else None."""
        if self.n == 0:
            return None
        degrees = {len(row) for row in self.adj}
        return degrees.pop() if len(degrees) == 1 else None

    # -- distances and neighborhoods ---------------------------------------

    def distance(self, u: int, v: int) -> float:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return 0
        dist = {u: 0}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            for z in self.adj[w]:
                if z not in dist:
                    dist[z] = dist[w] + 1
                    if z == v:
                        return dist[z]
                    queue.append(z)
        return INFINITY

    def neighborhood(self, v: int, r: int) -> tuple[int, ...]:
        """All vertices at BFS distance <= r from v, as a sorted tuple."""
        self._check_vertex(v)
        if r < 0:
            raise GraphError(f"radius must be nonnegative, got {r}")
        seen = {v}
        frontier = [v]
        for _ in range(r):
            nxt = []
            for w in frontier:
                for z in self.adj[w]:
                    if z not in seen:
                        seen.add(z)
                        nxt.append(z)
            if not nxt:
                break
            frontier = nxt
        return tuple(sorted(seen))

    def component(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self.neighborhood(v, self.n)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(self.component(0)) == self.n

    def bipartition(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """A 2-coloring as (part0, part1) if the graph is bipartite, else None."""
        color = [-1] * self.n
        for start in range(self.n):
            if color[start] != -1:
                continue
            color[start] = 0
            queue = deque([start])
            while queue:
                w = queue.popleft()
                for z in self.adj[w]:
                    if color[z] == -1:
                        color[z] = 1 - color[w]
                        queue.append(z)
                    elif color[z] == color[w]:
                        return None
        part0 = tuple(v for v in range(self.n) if color[v] == 0)
        part1 = tuple(v for v in range(self.n) if color[v] == 1)
        return part0, part1

    # -- girth ---------------------------------------------------------------

    def girth(self) -> float:
        """Length of the shortest simple cycle; inf for forests.

        Exact per-root BFS: the shortest cycle through each root is found by
        the first non-tree edge, and the scan depth shrinks as better cycles
        are discovered, so high-girth graphs stay cheap.
        """
        best: float = INFINITY
        dist = [-1] * self.n
        parent = [-1] * self.n
        stamp = [-1] * self.n
        for root in range(self.n):
            if best == 3:
                break
            cutoff = self.n if best is INFINITY else int(best) // 2
            dist[root] = 0
            parent[root] = -1
            stamp[root] = root
            queue = deque([root])
            while queue:
                u = queue.popleft()
                du = dist[u]
                if du >= cutoff:
                    continue
                for w in self.adj[u]:
                    if stamp[w] != root:
                        stamp[w] = root
                        dist[w] = du + 1
                        parent[w] = u
                        queue.append(w)
                    elif w != parent[u]:
                        cycle = du + dist[w] + 1
                        if cycle < best:
                            best = cycle
                            cutoff = int(best) // 2
        return best

    # -- subgraphs -----------------------------------------------------------

    def induced_subgraph(self, keep: Iterable[int]) -> Reindexed:
        keep_list = list(keep)
        if len(set(keep_list)) != len(keep_list):
            raise GraphError("duplicate vertex ids in keep set")
        for v in keep_list:
            self._check_vertex(v)
        to_old = tuple(sorted(keep_list))
        to_new = {old: new for new, old in enumerate(to_old)}
        edges = [
            (to_new[u], to_new[v])
            for u, v in self.edges()
            if u in to_new and v in to_new
        ]
        return Reindexed(Graph.from_edges(len(to_old), edges), to_new, to_old)

    def delete_vertex(self, v: int) -> Reindexed:
        self._check_vertex(v)
        return self.induced_subgraph(u for u in range(self.n) if u != v)

    # -- degree statistics ---------------------------------------------------

    def high_degree_friend_fraction(self, d_threshold: int) -> tuple[float, float]:
        """(beta, good_fraction) for the degree-propagation check.

        beta is the fraction of vertices with degree below ``d_threshold``;
        good_fraction counts vertices with at least ``ceil(d_threshold/2)``
        friends whose degree is at least ``ceil(d_threshold/2)``. For every
        graph, good_fraction >= 1 - 2*beta.
        """
        if d_threshold < 1:
            raise GraphError(f"degree threshold must be >= 1, got {d_threshold}")
        if self.n == 0:
            return 0.0, 1.0
        half = (d_threshold + 1) // 2
        low = sum(1 for row in self.adj if len(row) < d_threshold)
        good = 0
        for row in self.adj:
            qualifying = sum(1 for u in row if len(self.adj[u]) >= half)
            if qualifying >= half:
                good += 1
        return low / self.n, good / self.n


def tree_diameter(g: Graph) -> int:
    """Longest shortest-path distance in a forest (max over components)."""

    def farthest(src: int) -> tuple[int, int]:
        dist = {src: 0}
        queue = deque([src])
        far, fard = src, 0
        while queue:
            w = queue.popleft()
            for z in g.adj[w]:
                if z not in dist:
                    dist[z] = dist[w] + 1
                    if dist[z] > fard:
                        far, fard = z, dist[z]
                    queue.append(z)
        return far, fard

    seen: set[int] = set()
    diameter = 0
    for start in range(g.n):
        if start in seen:
            continue
        seen.update(g.component(start))
        u, _ = farthest(start)
        _, d = farthest(u)
        diameter = max(diameter, d)
    return diameter


# -- text format --------------------------------------------------------------
#
# Line 1: "n m". Then m lines "u v" with 0 <= u < v < n. Lines starting with
# '#' are comments. Duplicate or self-loop lines are load errors.


def loads(text: str) -> Graph:
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: expected two integers, got {raw!r}") from None
        if header is None:
            header = (a, b)
            continue
        if not a < b:
            raise GraphError(f"line {lineno}: edges must satisfy u < v, got {a} {b}")
        edges.append((a, b))
    if header is None:
        raise GraphError("missing header line 'n m'")
    n, m = header
    if len(edges) != m:
        raise GraphError(f"header declares {m} edges but {len(edges)} were given")
    return Graph.from_edges(n, edges)


def dumps(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges()))
    return "\n".join(lines) + "\n"


def load_file(path) -> Graph:
    with open(path, "r", encoding="utf-8") as handle:
        return loads(handle.read())


def dump_file(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(g))
