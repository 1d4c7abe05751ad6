"""Agents' information sets, decision rules, trial execution, and an exact
equilibrium oracle for small graphs.

The oracle computes the canonical state-symmetric equilibrium in the enriched
observation mode where every agent also sees the vertex set of his realized
subnetwork. That extra observation restores a sequential structure: an agent
whose realized subnetwork has m vertices only ever observes agents whose
realized subnetworks are strictly smaller, so strategies can be resolved by
induction on m, with posterior ties broken toward the agent's own signal.
All oracle arithmetic is exact (integer scenario weights over a common
denominator).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np

from .graph import Graph
from .realization import Realization, realized_view

ORACLE_MAX_VERTICES = 9


class BudgetError(RuntimeError):
    """Exact enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class WorldState:
    """A drawn state of the world: theta, one signal per agent, precision."""

    theta: int
    signals: np.ndarray
    p: float


def _check_precision(p) -> float:
    pf = float(p)
    if not 0.5 < pf <= 1.0:
        raise ValueError(f"signal precision must be in (1/2, 1], got {p}")
    return pf


def sample_world(n: int, p, rng: np.random.Generator) -> WorldState:
    pf = _check_precision(p)
    if n < 1:
        raise ValueError(f"need at least one agent, got n={n}")
    theta = int(rng.integers(0, 2))
    flips = rng.random(n)
    signals = np.where(flips < pf, theta, 1 - theta).astype(np.uint8)
    return WorldState(theta=theta, signals=signals, p=pf)


class InformationSet(NamedTuple):
    """What one agent sees when he acts.

    ``observed`` holds (friend id, action) pairs for friends that arrived
    earlier, sorted by friend id. ``reachable_ids`` is present only in the
    enriched observation mode and then equals the vertex set of the agent's
    realized subnetwork.
    """

    own_signal: int
    observed: tuple[tuple[int, int], ...]
    reachable_ids: tuple[int, ...] | None = None


# -- pure rules -----------------------------------------------------------------


def rule_signal(info: InformationSet) -> int:
    return info.own_signal


def rule_cascade(info: InformationSet) -> int:
    """Copy the observed majority once it leads by two, else follow the signal."""
    delta = sum(1 if a == 1 else -1 for _, a in info.observed)
    if delta >= 2:
        return 1
    if delta <= -2:
        return 0
    return info.own_signal


def rule_designated_majority(info: InformationSet, designated) -> int:
    """Majority action among observed designated friends; ties and an empty
    intersection fall back to the agent's own signal."""
    designated = frozenset(designated)
    ones = zeros = 0
    for u, a in info.observed:
        if u in designated:
            if a == 1:
                ones += 1
            else:
                zeros += 1
    if ones > zeros:
        return 1
    if zeros > ones:
        return 0
    return info.own_signal


PolicyTable = Mapping[tuple, int]


@dataclass(frozen=True)
class DecisionRule:
    """A pluggable, pure mapping from information sets to actions."""

    kind: str  # "signal" | "cascade" | "designated_majority" | "policy"
    designated: Mapping[int, frozenset] | None = None
    policy: PolicyTable | None = None

    @classmethod
    def signal(cls) -> "DecisionRule":
        return cls(kind="signal")

    @classmethod
    def cascade(cls) -> "DecisionRule":
        return cls(kind="cascade")

    @classmethod
    def designated_majority(cls, designated: Mapping[int, frozenset]) -> "DecisionRule":
        return cls(kind="designated_majority", designated=dict(designated))

    @classmethod
    def from_policy(cls, policy: PolicyTable) -> "DecisionRule":
        return cls(kind="policy", policy=policy)

    @property
    def needs_reachable(self) -> bool:
        return self.kind == "policy"

    def decide(self, v: int, info: InformationSet) -> int:
        if self.kind == "signal":
            return rule_signal(info)
        if self.kind == "cascade":
            return rule_cascade(info)
        if self.kind == "designated_majority":
            designated = self.designated.get(v, frozenset()) if self.designated else frozenset()
            return rule_designated_majority(info, designated)
        key = (v, info.own_signal, info.observed, info.reachable_ids)
        try:
            return self.policy[key]  # type: ignore[index]
        except KeyError:
            raise RuntimeError(
                f"policy table has no entry for agent {v} with information {key}"
            ) from None


def run_trial(
    g: Graph,
    rule: DecisionRule,
    world: WorldState,
    real: Realization,
) -> np.ndarray:
    """Play out one arrival sequence; returns the full action profile."""
    if world.signals.size != g.n or real.n != g.n:
        raise ValueError("world, realization, and graph sizes disagree")
    times = real.times
    actions = np.zeros(g.n, dtype=np.uint8)
    needs_reach = rule.needs_reachable
    for v in real.order:
        tv = times[v]
        observed = tuple((u, int(actions[u])) for u in g.adj[v] if times[u] < tv)
        reach = realized_view(g, real, v).reachable if needs_reach else None
        info = InformationSet(int(world.signals[v]), observed, reach)
        actions[v] = rule.decide(int(v), info)
    return actions


# -- exact oracle -----------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    """Exact per-agent learning qualities plus the equilibrium policy tables.

    ``scenario_actions`` keeps the full enumeration (one action bitmask per
    (permutation, theta, signals) scenario) so downstream exact checks can
    reuse it; the scenario with flat index
    ``perm_index * 2^(n+1) + theta * 2^n + signal_bits`` pairs with the
    permutation at ``perm_index`` in ``itertools.permutations(range(n))``.
    """

    n: int
    p: Fraction
    l: tuple[Fraction, ...]
    L: Fraction
    policy: dict
    scenario_count: int
    scenario_actions: np.ndarray
    l_by_theta: tuple[tuple[Fraction, Fraction], ...]


def _reach_in_perm(g: Graph, rank: dict[int, int], v: int) -> tuple[int, ...]:
    seen = {v}
    stack = [v]
    while stack:
        w = stack.pop()
        rw = rank[w]
        for z in g.adj[w]:
            if z not in seen and rank[z] < rw:
                seen.add(z)
                stack.append(z)
    return tuple(sorted(seen))


def exact_oracle(g: Graph, p: Fraction) -> OracleResult:
    """Exact learning qualities of the canonical equilibrium by enumerating
    every (theta, signal vector, arrival permutation) triple.

    For each information set the posterior over theta is the exact weighted
    frequency across all scenarios producing that information set; the action
    is the Bayes action with posterior ties resolved toward the agent's own
    signal. Feasible up to n=9; n=6 takes about a second.
    """
    p = Fraction(p)
    if not Fraction(1, 2) < p <= 1:
        raise ValueError(f"signal precision must be in (1/2, 1], got {p}")
    n = g.n
    if n < 1:
        raise ValueError("graph must have at least one vertex")
    if n > ORACLE_MAX_VERTICES:
        raise BudgetError(
            f"exact enumeration supports up to {ORACLE_MAX_VERTICES} vertices, got {n}"
        )
    a, den = p.numerator, p.denominator
    b = den - a
    n_fact = 1
    for i in range(2, n + 1):
        n_fact *= i
    total_weight = 2 * n_fact * den**n
    if total_weight >= 2**62:
        raise BudgetError(
            "scenario weights would overflow 64-bit accumulators; "
            f"use a coarser precision ratio than {p}"
        )

    sig_count = 1 << n
    block = 2 * sig_count
    perms = list(itertools.permutations(range(n)))
    n_perms = len(perms)

    # Integer scenario weights: W[theta][sig] = a^#correct * b^#wrong.
    weights = np.zeros((2, sig_count), dtype=np.int64)
    for sig in range(sig_count):
        ones = bin(sig).count("1")
        weights[1, sig] = a**ones * b ** (n - ones)
        weights[0, sig] = a ** (n - ones) * b**ones
    w_flat = np.concatenate([weights[0], weights[1]])
    sig_vec = np.tile(np.arange(sig_count, dtype=np.int64), 2)

    # Per permutation and vertex: observed friends and reachable set, grouped
    # by reachable-set size. Distinct (v, observed, reachable) triples are
    # interned so scenario keys are small integers.
    ctx_index: dict[tuple, int] = {}
    ctx_list: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = []
    by_stage: list[list[list[tuple[int, tuple[int, ...], int]]]] = [
        [[] for _ in range(n_perms)] for _ in range(n + 1)
    ]
    for perm_idx, perm in enumerate(perms):
        rank = {v: k for k, v in enumerate(perm)}
        for v in range(n):
            observed = tuple(u for u in g.adj[v] if rank[u] < rank[v])
            reach = _reach_in_perm(g, rank, v)
            ctx_key = (v, observed, reach)
            ctx_id = ctx_index.get(ctx_key)
            if ctx_id is None:
                ctx_id = len(ctx_list)
                ctx_index[ctx_key] = ctx_id
                ctx_list.append(ctx_key)
            by_stage[len(reach)][perm_idx].append((v, observed, ctx_id))

    actions = np.zeros(n_perms * block, dtype=np.uint16)
    policy: dict[tuple, int] = {}

    def entry_keys(perm_idx: int, v: int, observed, ctx_id: int) -> np.ndarray:
        seg = actions[perm_idx * block : (perm_idx + 1) * block]
        bits = np.zeros(block, dtype=np.int64)
        for j, u in enumerate(observed):
            bits |= ((seg >> u) & 1).astype(np.int64) << j
        own = (sig_vec >> v) & 1
        return (np.int64(ctx_id) << 9) | (own << 8) | bits

    for stage in range(1, n + 1):
        involved = [
            (perm_idx, entry)
            for perm_idx in range(n_perms)
            for entry in by_stage[stage][perm_idx]
        ]
        if not involved:
            continue
        key_chunks = []
        for perm_idx, (v, observed, ctx_id) in involved:
            key_chunks.append(entry_keys(perm_idx, v, observed, ctx_id))
        all_keys = np.concatenate(key_chunks)
        all_w = np.tile(w_flat, len(involved))
        all_theta = np.tile(
            np.repeat(np.array([0, 1], dtype=np.int64), sig_count), len(involved)
        )
        uniq, inverse = np.unique(all_keys, return_inverse=True)
        acc = np.zeros((len(uniq), 2), dtype=np.int64)
        np.add.at(acc, (inverse, all_theta), all_w)
        own_bit = ((uniq >> 8) & 1).astype(np.int64)
        resolved = np.where(
            acc[:, 1] > acc[:, 0], 1, np.where(acc[:, 1] < acc[:, 0], 0, own_bit)
        ).astype(np.uint16)

        for (key, act) in zip(uniq.tolist(), resolved.tolist()):
            ctx_id = key >> 9
            own = (key >> 8) & 1
            bits = key & 0xFF
            v, observed, reach = ctx_list[ctx_id]
            pairs = tuple((u, (bits >> j) & 1) for j, u in enumerate(observed))
            policy[(v, own, pairs, reach)] = act

        offset = 0
        for (perm_idx, (v, observed, ctx_id)), chunk in zip(involved, key_chunks):
            pos = np.searchsorted(uniq, chunk)
            act_bits = resolved[pos].astype(np.uint16)
            seg = actions[perm_idx * block : (perm_idx + 1) * block]
            seg |= act_bits << v
            offset += block

    # Tally exact learning qualities.
    l_num = np.zeros((n, 2), dtype=object)
    theta_vec = np.repeat(np.array([0, 1], dtype=np.int64), sig_count)
    for perm_idx in range(n_perms):
        seg = actions[perm_idx * block : (perm_idx + 1) * block].astype(np.int64)
        for v in range(n):
            bits = (seg >> v) & 1
            match = np.where(theta_vec == 1, bits, 1 - bits)
            for theta in (0, 1):
                half = slice(theta * sig_count, (theta + 1) * sig_count)
                l_num[v, theta] += int(match[half] @ weights[theta])

    per_theta_den = n_fact * den**n
    l_by_theta = tuple(
        (
            Fraction(int(l_num[v, 0]), per_theta_den),
            Fraction(int(l_num[v, 1]), per_theta_den),
        )
        for v in range(n)
    )
    l = tuple(
        Fraction(int(l_num[v, 0]) + int(l_num[v, 1]), total_weight) for v in range(n)
    )
    big_l = sum(l, Fraction(0)) / n
    return OracleResult(
        n=n,
        p=p,
        l=l,
        L=big_l,
        policy=policy,
        scenario_count=n_perms * block,
        scenario_actions=actions,
        l_by_theta=l_by_theta,
    )


def deviation_quality(g: Graph, oracle: OracleResult, v: int, decide) -> Fraction:
    """Exact correctness probability for agent v when he unilaterally plays
    ``decide(info)`` while everyone else keeps the oracle policy.

    Agents acting before v are unaffected by the deviation, so their recorded
    scenario actions stay valid and v's alternative action can be evaluated
    directly per scenario.
    """
    n = g.n
    p = oracle.p
    a, den = p.numerator, p.denominator
    b = den - a
    sig_count = 1 << n
    block = 2 * sig_count
    perms = list(itertools.permutations(range(n)))
    num = 0
    for perm_idx, perm in enumerate(perms):
        rank = {u: k for k, u in enumerate(perm)}
        observed = tuple(u for u in g.adj[v] if rank[u] < rank[v])
        reach = _reach_in_perm(g, rank, v)
        seg = oracle.scenario_actions[perm_idx * block : (perm_idx + 1) * block]
        for theta in (0, 1):
            for sig in range(sig_count):
                mask = int(seg[theta * sig_count + sig])
                pairs = tuple((u, (mask >> u) & 1) for u in observed)
                info = InformationSet((sig >> v) & 1, pairs, reach)
                if decide(info) == theta:
                    ones = bin(sig).count("1")
                    correct = ones if theta == 1 else n - ones
                    num += a**correct * b ** (n - correct)
    n_fact = 1
    for i in range(2, n + 1):
        n_fact *= i
    return Fraction(num, 2 * n_fact * den**n)
