"""Generators for every network family the experiments run on.

Deterministic families (cliques, bipartite celebrity graphs, cycles, paths,
stars) are built directly. Random regular graphs use the pairing model with
rejection. The expander family is a Cayley-graph construction on PSL(2,q) or
PGL(2,q) driven by integer quaternions of norm p; it is fully deterministic
and self-checking (group order, regularity, connectivity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .graph import Graph, GraphError


class GenError(ValueError):
    """Invalid generator parameters."""


class RetryBudgetError(RuntimeError):
    """Pairing-model rejection sampling exhausted its restart budget."""

    def __init__(self, message: str, retries: int):
        super().__init__(message)
        self.retries = retries


# -- deterministic families ----------------------------------------------------


def clique(n: int) -> Graph:
    if n < 1:
        raise GenError(f"clique needs n >= 1, got {n}")
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def celebrity(k: int, m: int) -> Graph:
    """Complete bipartite graph: commoners 0..k-1, celebrities k..k+m-1."""
    if k < 1 or m < 1:
        raise GenError(f"celebrity graph needs both part sizes >= 1, got k={k}, m={m}")
    return Graph.from_edges(k + m, [(c, k + s) for c in range(k) for s in range(m)])


def celebrity_parts(k: int, m: int) -> dict[str, tuple[int, ...]]:
    return {
        "commoners": tuple(range(k)),
        "celebrities": tuple(range(k, k + m)),
    }


def cycle(n: int) -> Graph:
    if n < 3:
        raise GenError(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(v, v + 1) for v in range(n - 1)] + [(0, n - 1)])


def path(n: int) -> Graph:
    if n < 1:
        raise GenError(f"path needs n >= 1, got {n}")
    return Graph.from_edges(n, [(v, v + 1) for v in range(n - 1)])


def star(leaves: int) -> Graph:
    if leaves < 1:
        raise GenError(f"star needs at least one leaf, got {leaves}")
    return Graph.from_edges(leaves + 1, [(0, v) for v in range(1, leaves + 1)])


def petersen() -> Graph:
    """Kneser graph K(5,2): the standard 3-regular girth-5 fixture."""
    from itertools import combinations

    pairs = list(combinations(range(5), 2))
    index = {p: i for i, p in enumerate(pairs)}
    edges = [
        (index[a], index[b])
        for a in pairs
        for b in pairs
        if a < b and not set(a) & set(b)
    ]
    return Graph.from_edges(10, edges)


# -- random regular graphs -------------------------------------------------------


def random_regular(n: int, d: int, seed: int) -> Graph:
    """Sample a simple d-regular graph via the pairing model.

    Stubs are shuffled and paired; any attempt producing a self-loop or a
    repeated edge is rejected wholesale and restarted. Deterministic given
    the seed. The restart budget is 100*n attempts.
    """
    if not 0 <= d < max(n, 1):
        raise GenError(f"regular graph needs 0 <= d < n, got n={n}, d={d}")
    if (n * d) % 2 != 0:
        raise GenError(f"n*d must be even, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    budget = 100 * n
    stubs = np.repeat(np.arange(n), d)
    for attempt in range(budget):
        order = rng.permutation(stubs)
        seen: set[tuple[int, int]] = set()
        ok = True
        for i in range(0, len(order), 2):
            u, v = int(order[i]), int(order[i + 1])
            if u == v:
                ok = False
                break
            edge = (u, v) if u < v else (v, u)
            if edge in seen:
                ok = False
                break
            seen.add(edge)
        if ok:
            return Graph.from_edges(n, sorted(seen))
    raise RetryBudgetError(
        f"pairing model failed to produce a simple {d}-regular graph on {n} "
        f"vertices after {budget} restarts",
        retries=budget,
    )


# -- expander construction -------------------------------------------------------


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(x: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit integers."""
    if x < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if x % small == 0:
            return x == small
    d = x - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        y = pow(a, d, x)
        if y in (1, x - 1):
            continue
        for _ in range(s - 1):
            y = y * y % x
            if y == x - 1:
                break
        else:
            return False
    return True


def legendre_symbol(a: int, q: int) -> int:
    """(a|q) for odd prime q: +1 for residues, -1 for non-residues, 0 for a=0."""
    a %= q
    if a == 0:
        return 0
    r = pow(a, (q - 1) // 2, q)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class LpsParams:
    """Parameters of the quaternion Cayley-graph expander of degree p+1.

    Requires distinct primes p, q, both congruent to 1 mod 4, with q > 2*sqrt(p).
    When p is a quadratic residue mod q the graph lives on PSL(2,q), has
    q(q^2-1)/2 vertices, and is non-bipartite; otherwise it lives on PGL(2,q),
    has q(q^2-1) vertices, and is bipartite.
    """

    p: int
    q: int

    def __post_init__(self):
        problems = []
        if not is_prime(self.p):
            problems.append(f"p={self.p} is not prime")
        if not is_prime(self.q):
            problems.append(f"q={self.q} is not prime")
        if self.p == self.q:
            problems.append("p and q must be distinct")
        if self.p % 4 != 1:
            problems.append(f"p={self.p} is not 1 mod 4")
        if self.q % 4 != 1:
            problems.append(f"q={self.q} is not 1 mod 4")
        if self.q * self.q <= 4 * self.p:
            problems.append(f"q={self.q} must exceed 2*sqrt(p)={2 * math.sqrt(self.p):.3f}")
        if problems:
            raise GenError("invalid expander parameters: " + "; ".join(problems))

    @property
    def degree(self) -> int:
        return self.p + 1

    @property
    def legendre_p_q(self) -> int:
        return legendre_symbol(self.p, self.q)

    @property
    def bipartite(self) -> bool:
        return self.legendre_p_q == -1

    @property
    def vertex_count(self) -> int:
        order = self.q * (self.q * self.q - 1)
        return order // 2 if self.legendre_p_q == 1 else order

    @property
    def girth_lower_bound(self) -> int:
        return math.ceil((2 / 3) * math.log(self.vertex_count, self.p))

    def metadata(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "degree": self.degree,
            "legendre_p_q": self.legendre_p_q,
            "bipartite": self.bipartite,
            "vertex_count": self.vertex_count,
            "girth_lower_bound": self.girth_lower_bound,
        }


def quaternion_generators(p: int) -> list[tuple[int, int, int, int]]:
    """All (a0,a1,a2,a3) with a0 odd positive and a0^2+a1^2+a2^2+a3^2 = p.

    For p = 1 mod 4 there are exactly p+1 of them and a1,a2,a3 come out even.
    """
    limit = math.isqrt(p)
    sols = []
    for a0 in range(1, limit + 1, 2):
        rest0 = p - a0 * a0
        for a1 in range(-limit, limit + 1):
            rest1 = rest0 - a1 * a1
            if rest1 < 0:
                continue
            for a2 in range(-limit, limit + 1):
                rest2 = rest1 - a2 * a2
                if rest2 < 0:
                    continue
                a3 = math.isqrt(rest2)
                if a3 * a3 == rest2:
                    if a3 == 0:
                        sols.append((a0, a1, a2, 0))
                    else:
                        sols.append((a0, a1, a2, a3))
                        sols.append((a0, a1, a2, -a3))
    sols.sort()
    return sols


def _sqrt_minus_one(q: int) -> int:
    for i in range(2, q):
        if i * i % q == q - 1:
            return i
    raise GenError(f"-1 has no square root mod {q}")


def _canonical(mat: tuple[int, int, int, int], q: int) -> tuple[int, int, int, int]:
    # Scale so the first nonzero entry is 1: unique coset representative in PGL.
    for entry in mat:
        if entry != 0:
            inv = pow(entry, q - 2, q)
            return tuple(x * inv % q for x in mat)  # type: ignore[return-value]
    raise GenError("zero matrix cannot be canonicalized")


def lps(params: LpsParams) -> Graph:
    """Cayley-graph expander of degree p+1 on PSL(2,q) or PGL(2,q).

    Vertices are canonicalized projective 2x2 matrices enumerated in
    lexicographic order; edges come from right multiplication by the p+1
    quaternion generators. The generator set is closed under inversion, so
    the result is undirected. Group order, regularity, and connectivity are
    verified before returning.
    """
    p, q = params.p, params.q
    i = _sqrt_minus_one(q)
    gens = []
    for a0, a1, a2, a3 in quaternion_generators(p):
        mat = (
            (a0 + a1 * i) % q,
            (a2 + a3 * i) % q,
            (-a2 + a3 * i) % q,
            (a0 - a1 * i) % q,
        )
        gens.append(_canonical(mat, q))
    if len(set(gens)) != p + 1:
        raise GenError(
            f"expected {p + 1} distinct generators, found {len(set(gens))}"
        )

    want_psl = params.legendre_p_q == 1
    squares = {x * x % q for x in range(1, q)}

    # Canonical projective tuples in lex order: first nonzero entry is 1.
    candidates = []
    for b in range(q):
        for c in range(q):
            candidates.extend((1, b, c, d) for d in range(q))
    for c in range(q):
        candidates.extend((0, 1, c, d) for d in range(q))
    candidates.extend((0, 0, 1, d) for d in range(q))
    candidates.append((0, 0, 0, 1))

    index: dict[tuple[int, int, int, int], int] = {}
    for tup in candidates:
        a, b, c, d = tup
        det = (a * d - b * c) % q
        if det == 0:
            continue
        if want_psl and det not in squares:
            continue
        index[tup] = len(index)
    if len(index) != params.vertex_count:
        raise GenError(
            f"group enumeration produced {len(index)} elements, "
            f"expected {params.vertex_count}"
        )

    edges: set[tuple[int, int]] = set()
    for mat, vid in index.items():
        a, b, c, d = mat
        for s in gens:
            e, f, g_, h = s
            prod = (
                (a * e + b * g_) % q,
                (a * f + b * h) % q,
                (c * e + d * g_) % q,
                (c * f + d * h) % q,
            )
            uid = index[_canonical(prod, q)]
            if uid == vid:
                raise GenError("generator acted as identity: self-loop")
            edges.add((vid, uid) if vid < uid else (uid, vid))

    graph = Graph.from_edges(len(index), sorted(edges))
    if graph.is_regular() != p + 1:
        raise GenError("expander construction is not (p+1)-regular")
    if not graph.is_connected():
        raise GenError("expander construction is not connected")
    return graph


# -- recipes ---------------------------------------------------------------------


@dataclass(frozen=True)
class GenRecipe:
    """A buildable description of a graph: family tag plus parameters."""

    family: str
    params: dict
    seed: int | None = None

    _FAMILIES = ("clique", "celebrity", "cycle", "path", "star", "random_regular", "lps")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise GenError(f"unknown family {self.family!r}; expected one of {self._FAMILIES}")
        if self.family == "random_regular" and self.seed is None:
            raise GenError("random_regular requires a seed")

    def build(self) -> Graph:
        fam = self.family
        if fam == "clique":
            return clique(int(self.params["n"]))
        if fam == "celebrity":
            return celebrity(int(self.params["k"]), int(self.params["m"]))
        if fam == "cycle":
            return cycle(int(self.params["n"]))
        if fam == "path":
            return path(int(self.params["n"]))
        if fam == "star":
            return star(int(self.params["leaves"]))
        if fam == "random_regular":
            return random_regular(int(self.params["n"]), int(self.params["d"]), int(self.seed))
        return lps(LpsParams(int(self.params["p"]), int(self.params["q"])))

    def metadata(self) -> dict[str, Any]:
        meta: dict[str, Any] = {"family": self.family, "params": dict(self.params)}
        if self.seed is not None:
            meta["seed"] = self.seed
        if self.family == "celebrity":
            parts = celebrity_parts(int(self.params["k"]), int(self.params["m"]))
            meta["parts"] = {name: list(ids) for name, ids in parts.items()}
            meta["bipartite"] = True
        if self.family == "lps":
            meta["lps"] = LpsParams(int(self.params["p"]), int(self.params["q"])).metadata()
            meta["bipartite"] = meta["lps"]["bipartite"]
        return meta
