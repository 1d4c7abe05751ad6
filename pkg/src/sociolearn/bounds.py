"""Closed-form learning bounds and the local-learning certificate machinery.

A certificate for an agent v names d designated friends, each of degree at
least d, whose r-neighborhoods after deleting v are pairwise disjoint with all
degrees in them capped by D. A valid certificate yields the lower bound
l(v) >= 1 - delta(p, d, r, D) with

    psi   = 2d * (e*D/r)**r
    delta = psi + 18 / (sqrt(d-1) * (2p - 1 - psi))

which is informative only when p >= (1+psi)/2 and delta < 1. The r=0
convention psi = 2d always invalidates the bound, matching its inapplicability
to triangle-dense neighborhoods.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import NamedTuple

from .graph import Graph, GraphError, INFINITY, tree_diameter


class CertificateError(ValueError):
    """Structurally malformed certificate (bad ids, sizes, parameters)."""


# -- closed-form quantities -----------------------------------------------------


def psi(d: int, r: int, cap_d: int) -> float:
    """Containment-failure mass 2d*(e*D/r)**r; r=0 uses the x**0 = 1 convention."""
    if d < 0 or r < 0 or cap_d < 0:
        raise ValueError(f"negative inputs: d={d}, r={r}, cap_d={cap_d}")
    if d == 0:
        return 0.0
    if r == 0:
        return 2.0 * d
    if cap_d == 0:
        return 0.0
    try:
        value = 2.0 * d * (math.e * cap_d / r) ** r
    except OverflowError:
        return sys.float_info.max
    return min(value, sys.float_info.max)


@dataclass(frozen=True)
class BoundReport:
    """Evaluated learning-quality bound for one parameter tuple."""

    p: float
    d: int
    r: int
    cap_d: int
    psi: float
    delta: float      # math.inf when the p >= (1+psi)/2 requirement fails
    valid: bool
    vacuous: bool     # reported bound carries no information (delta >= 1)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "r": self.r,
            "cap_d": self.cap_d,
            "psi": self.psi,
            "delta": None if math.isinf(self.delta) else self.delta,
            "valid": self.valid,
            "vacuous": self.vacuous,
        }


def delta_bound(p: float, d: int, r: int, cap_d: int) -> BoundReport:
    if d < 2:
        raise ValueError(f"the bound divides by sqrt(d-1); need d >= 2, got {d}")
    if not 0.5 < float(p) <= 1.0:
        raise ValueError(f"signal precision must be in (1/2, 1], got {p}")
    p = float(p)
    psi_val = psi(d, r, cap_d)
    valid = 2.0 * p - 1.0 - psi_val > 0.0
    if valid:
        delta = psi_val + 18.0 / (math.sqrt(d - 1) * (2.0 * p - 1.0 - psi_val))
    else:
        delta = math.inf
    return BoundReport(
        p=p,
        d=d,
        r=r,
        cap_d=cap_d,
        psi=psi_val,
        delta=delta,
        valid=valid,
        vacuous=(not valid) or delta >= 1.0,
    )


class LocalizationBound(NamedTuple):
    """Failure-probability bound 2*(e*D/r)**r for realized-subnetwork escape."""

    value: float
    vacuous: bool


def localization_bound(r: int, cap_d: int) -> LocalizationBound:
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    if cap_d < 0:
        raise ValueError(f"degree cap must be nonnegative, got {cap_d}")
    if cap_d == 0:
        return LocalizationBound(0.0, False)
    try:
        value = 2.0 * (math.e * cap_d / r) ** r
    except OverflowError:
        value = sys.float_info.max
    return LocalizationBound(min(value, sys.float_info.max), value >= 1.0)


@dataclass(frozen=True)
class Lemma3Report:
    """Average learning-quality bound for induced subnetworks of a regular graph."""

    value: float       # clamped at 0
    factor: float      # 2/sqrt(alpha) + (1-alpha)*lambda2^2/(alpha^3 * D^1.5)
    vacuous: bool
    delta: BoundReport

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "factor": self.factor,
            "vacuous": self.vacuous,
            "delta": self.delta.to_dict(),
        }


def lemma3_bound(
    alpha: float,
    cap_d: int,
    g_girth: float,
    lambda2_abs: float,
    p: float,
) -> Lemma3Report:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if lambda2_abs < 0:
        raise ValueError(f"lambda2 magnitude must be nonnegative, got {lambda2_abs}")
    if not (g_girth == INFINITY or g_girth >= 3):
        raise ValueError(f"girth must be >= 3 or infinite, got {g_girth}")
    r = 10**6 if g_girth == INFINITY else (int(g_girth) - 3) // 2
    delta = delta_bound(p, cap_d, r, cap_d)
    factor = 2.0 / math.sqrt(alpha) + (1.0 - alpha) * lambda2_abs**2 / (
        alpha**3 * cap_d**1.5
    )
    if not delta.valid:
        return Lemma3Report(value=0.0, factor=factor, vacuous=True, delta=delta)
    raw = 1.0 - factor * delta.delta
    return Lemma3Report(
        value=max(0.0, raw), factor=factor, vacuous=raw <= 0.0, delta=delta
    )


def theorem4_bound(delta: float, alpha: float) -> float:
    """sqrt(delta/alpha): the failure-probability bound for random elimination."""
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return math.sqrt(delta / alpha)


# -- certificates -----------------------------------------------------------------


@dataclass(frozen=True)
class LLRCertificate:
    """Witness that agent v bridges d disjoint social circles."""

    v: int
    d: int
    r: int
    cap_d: int
    designated: tuple[int, ...]
    exact: bool = True  # False when the search fell back to the greedy packer

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "d": self.d,
            "r": self.r,
            "cap_d": self.cap_d,
            "designated": list(self.designated),
            "exact": self.exact,
        }


def _deleted_balls(g: Graph, v: int, vertices, r: int) -> dict[int, frozenset]:
    """r-neighborhoods of the given vertices in the graph with v removed,
    expressed in original vertex ids."""
    deleted, to_new, to_old = g.delete_vertex(v)
    balls = {}
    for u in vertices:
        ball = deleted.neighborhood(to_new[u], r)
        balls[u] = frozenset(to_old[w] for w in ball)
    return balls


def verify_certificate(g: Graph, cert: LLRCertificate) -> bool:
    """Check every certificate invariant against the graph by explicit BFS in
    the vertex-deleted graph. Degree thresholds count degrees in the full
    graph (including edges to v)."""
    if not 0 <= cert.v < g.n:
        raise CertificateError(f"vertex {cert.v} out of range")
    if cert.d < 0 or cert.r < 0 or cert.cap_d < 0:
        raise CertificateError("certificate parameters must be nonnegative")
    if len(set(cert.designated)) != len(cert.designated):
        raise CertificateError("designated list contains duplicates")
    for u in cert.designated:
        if not 0 <= u < g.n:
            raise CertificateError(f"designated vertex {u} out of range")

    if len(cert.designated) != cert.d:
        return False
    friends = set(g.adj[cert.v])
    if any(u not in friends for u in cert.designated):
        return False
    if any(g.degree(u) < cert.d for u in cert.designated):
        return False
    balls = _deleted_balls(g, cert.v, cert.designated, cert.r)
    covered: set[int] = set()
    for u in cert.designated:
        ball = balls[u]
        if covered & ball:
            return False
        covered |= ball
    return all(g.degree(w) <= cert.cap_d for w in covered)


def _friend_h_index(g: Graph, v: int) -> int:
    degrees = sorted((g.degree(u) for u in g.adj[v]), reverse=True)
    d = 0
    for k, deg in enumerate(degrees, start=1):
        if deg >= k:
            d = k
    return d


def certificate_radius(g_girth: float, g: Graph) -> int:
    """floor((girth - 3) / 2), capped at the diameter for acyclic graphs."""
    if g_girth == INFINITY:
        return tree_diameter(g)
    return max((int(g_girth) - 3) // 2, 0)


def girth_certificate(g: Graph, v: int) -> LLRCertificate:
    """Certificate from the shortest-cycle route: disjointness comes for free
    because any intersection of r-neighborhoods would close a short cycle."""
    g._check_vertex(v)
    r = certificate_radius(g.girth(), g)
    d = _friend_h_index(g, v)
    designated = tuple(u for u in g.adj[v] if g.degree(u) >= d)[:d]
    return LLRCertificate(
        v=v, d=d, r=r, cap_d=g.max_degree(), designated=designated, exact=True
    )


EXACT_PACKING_LIMIT = 20


def _max_disjoint_exact(conflicts: list[int], count: int) -> int:
    """Maximum independent set in a conflict graph given as bitmasks.

    Returns the chosen-member bitmask of one maximum set; memoized over the
    available-vertex mask, intended for count <= 20.
    """
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def best(avail: int) -> int:
        if avail == 0:
            return 0
        low = (avail & -avail).bit_length() - 1
        without = best(avail & ~(1 << low))
        with_low = (1 << low) | best(avail & ~(1 << low) & ~conflicts[low])
        return with_low if bin(with_low).count("1") > bin(without).count("1") else without

    return best((1 << count) - 1)


def search_certificate(g: Graph, v: int, r: int) -> LLRCertificate:
    """Best certificate at the given radius: binary-search the target d, keep
    friends of sufficient degree, and pack their neighborhoods disjointly
    (exact branch-and-bound up to 20 candidates, greedy by smallest
    neighborhood beyond that, flagged on the result)."""
    g._check_vertex(v)
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    friends = list(g.adj[v])
    if not friends:
        return LLRCertificate(v=v, d=0, r=r, cap_d=0, designated=(), exact=True)
    balls = _deleted_balls(g, v, friends, r)

    def pack(d: int) -> tuple[tuple[int, ...], bool] | None:
        cands = [u for u in friends if g.degree(u) >= d]
        if len(cands) < d:
            return None
        exact = len(cands) <= EXACT_PACKING_LIMIT
        if exact:
            conflicts = [0] * len(cands)
            for i, u in enumerate(cands):
                for j in range(i + 1, len(cands)):
                    if balls[u] & balls[cands[j]]:
                        conflicts[i] |= 1 << j
                        conflicts[j] |= 1 << i
            mask = _max_disjoint_exact(conflicts, len(cands))
            chosen = [cands[i] for i in range(len(cands)) if mask >> i & 1]
        else:
            chosen = []
            taken: set[int] = set()
            for u in sorted(cands, key=lambda u: (len(balls[u]), u)):
                if not taken & balls[u]:
                    chosen.append(u)
                    taken |= balls[u]
        if len(chosen) < d:
            return None
        return tuple(sorted(chosen[:d])), exact

    lo, hi = 0, len(friends)
    found: dict[int, tuple[tuple[int, ...], bool]] = {0: ((), True)}
    while lo < hi:
        mid = (lo + hi + 1) // 2
        result = pack(mid)
        if result is not None:
            found[mid] = result
            lo = mid
        else:
            hi = mid - 1
    designated, exact = found[lo]
    cap = max((g.degree(w) for u in designated for w in balls[u]), default=0)
    return LLRCertificate(
        v=v, d=lo, r=r, cap_d=cap, designated=designated, exact=exact
    )
