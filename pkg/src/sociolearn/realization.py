"""Random arrival order machinery: arrival times, realized observation
structure, and the containment events the probabilistic bounds talk about.

Arrival times are i.i.d. uniform on [0,1]. Orienting each edge from the later
to the earlier endpoint yields the realized directed network; an agent's
realized subnetwork is everything reachable from him along strictly
decreasing arrival times, which is exactly the part of the world that can
influence his action.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .graph import Graph

logger = logging.getLogger(__name__)


def draw_times(n: int, rng: np.random.Generator) -> np.ndarray:
    """n distinct uniforms on [0,1]; exact collisions are redrawn pairwise."""
    times = rng.random(n)
    while True:
        order = np.argsort(times, kind="stable")
        collided = order[1:][times[order[1:]] == times[order[:-1]]]
        if collided.size == 0:
            return times
        logger.debug("resampling %d tied arrival times", collided.size)
        times[collided] = rng.random(collided.size)


@dataclass(frozen=True)
class Realization:
    """Per-vertex arrival times plus the derived arrival ranks."""

    times: np.ndarray
    rank: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a nonempty 1-d array")
        if len(np.unique(times)) != times.size:
            raise ValueError("arrival times must be distinct")
        order = np.argsort(times, kind="stable")
        rank = np.empty(times.size, dtype=np.int64)
        rank[order] = np.arange(times.size)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "_order", order)

    @property
    def n(self) -> int:
        return self.times.size

    @property
    def order(self) -> np.ndarray:
        """Vertices sorted by arrival time (order[k] arrives k-th)."""
        return self._order  # type: ignore[attr-defined]


def sample_arrivals(n: int, rng: np.random.Generator) -> Realization:
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    return Realization(draw_times(n, rng))


class RealizedView(NamedTuple):
    """What the arrival order exposes to one agent.

    ``observed_friends`` are the friends that arrived earlier; ``reachable``
    is the vertex set of the realized subnetwork (always contains the agent).
    """

    observed_friends: tuple[int, ...]
    reachable: tuple[int, ...]


def realized_view(g: Graph, real: Realization, v: int) -> RealizedView:
    g._check_vertex(v)
    times = real.times
    observed = tuple(u for u in g.adj[v] if times[u] < times[v])
    # Iterative stack walk along strictly decreasing arrival times.
    seen = {v}
    stack = [v]
    while stack:
        w = stack.pop()
        tw = times[w]
        for z in g.adj[w]:
            if z not in seen and times[z] < tw:
                seen.add(z)
                stack.append(z)
    return RealizedView(observed_friends=observed, reachable=tuple(sorted(seen)))


def localization_event(g: Graph, real: Realization, v: int, r: int) -> bool:
    """True iff the realized subnetwork of v stays inside his (r-1)-ball."""
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    ball = set(g.neighborhood(v, r - 1))
    return all(u in ball for u in realized_view(g, real, v).reachable)


def w_event(
    g: Graph,
    real: Realization,
    v: int,
    designated: Iterable[int],
    r: int,
) -> bool:
    """True iff every designated friend who arrived before v has his realized
    subnetwork, computed with v removed from the graph, confined to his own
    (r-1)-neighborhood there."""
    designated = tuple(designated)
    friends = set(g.adj[v])
    bad = [u for u in designated if u not in friends]
    if bad:
        raise ValueError(f"designated vertices {bad} are not friends of {v}")
    early = [u for u in designated if real.times[u] < real.times[v]]
    if not early:
        return True
    deleted, to_new, to_old = g.delete_vertex(v)
    sub_real = Realization(real.times[list(to_old)])
    for u in early:
        if not localization_event(deleted, sub_real, to_new[u], r):
            return False
    return True
