"""Top-of-spectrum adjacency eigenvalues and the spectral facts built on them.

Two routes: an exact dense symmetric solve for graphs up to ``DENSE_LIMIT``
vertices, and power iteration on A^2 with deflation for larger graphs. Both
order eigenvalues by absolute value. For connected regular graphs the leading
eigenvalue is reported exactly as the degree; for bipartite regular graphs the
value -D is part of the spectrum and gets flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Graph

DENSE_LIMIT = 512
ITERATION_CAP = 100_000
_SEED = 0x5EED

class SpectralError(RuntimeError):
    """Raised when the iterative eigensolver fails to converge."""


@dataclass(frozen=True)
class SpectralReport:
    lambda1_abs: float
    lambda2_abs: float
    method: str          # "dense" | "iterative"
    iterations: int
    residual: float
    bipartite_note: bool  # |lambda2| == lambda1 on a connected regular graph

    def to_dict(self) -> dict:
        return {
            "lambda1_abs": self.lambda1_abs,
            "lambda2_abs": self.lambda2_abs,
            "method": self.method,
            "iterations": self.iterations,
            "residual": self.residual,
            "bipartite_note": self.bipartite_note,
        }


@dataclass(frozen=True)
class RamanujanReport:
    is_ramanujan: bool
    degree: int
    relevant_lambda: float
    bound: float
    bipartite: bool
    # For bipartite graphs the -D eigenvalue is excluded before comparing
    # against 2*sqrt(D-1), the standard bipartite convention.
    convention: str

    def to_dict(self) -> dict:
        return {
            "is_ramanujan": self.is_ramanujan,
            "degree": self.degree,
            "relevant_lambda": self.relevant_lambda,
            "bound": self.bound,
            "bipartite": self.bipartite,
            "convention": self.convention,
        }


def _adjacency_dense(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.float64)
    for u, row in enumerate(g.adj):
        for v in row:
            a[u, v] = 1.0
    return a


def adjacency_sparse(g: Graph) -> sp.csr_array:
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    for v in range(g.n):
        indptr[v + 1] = indptr[v] + len(g.adj[v])
    indices = np.fromiter(
        (u for row in g.adj for u in row), dtype=np.int64, count=int(indptr[-1])
    )
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_array((data, indices, indptr), shape=(g.n, g.n))


def _abs_spectrum_dense(g: Graph) -> np.ndarray:
    eigs = np.linalg.eigvalsh(_adjacency_dense(g))
    return np.sort(np.abs(eigs))[::-1]


def _power_iterate(
    op: sp.csr_array,
    deflate: list[np.ndarray],
    tol: float,
    cap: int = ITERATION_CAP,
) -> tuple[float, int, float]:
    """Largest |eigenvalue| of the symmetric operator restricted to the
    orthogonal complement of ``deflate``, via power iteration on op^2.

    Returns (value, iterations, residual). The estimate converges from below,
    and stopping requires the estimate to be stable across a window of sweeps.
    """
    n = op.shape[0]
    rng = np.random.default_rng(_SEED)
    x = rng.standard_normal(n)
    basis = []
    for d in deflate:
        d = d / np.linalg.norm(d)
        for b in basis:
            d = d - (b @ d) * b
        norm = np.linalg.norm(d)
        if norm > 1e-12:
            basis.append(d / norm)

    def project(vec: np.ndarray) -> np.ndarray:
        for b in basis:
            vec = vec - (b @ vec) * b
        return vec

    x = project(x)
    norm = np.linalg.norm(x)
    if norm < 1e-12 or n == 0:
        return 0.0, 0, 0.0
    x /= norm
    estimate = 0.0
    stable = 0
    window = 10
    for iteration in range(1, cap + 1):
        y = project(op @ (op @ x))
        mu = float(x @ y)                       # Rayleigh quotient of op^2
        new_estimate = math.sqrt(max(mu, 0.0))
        residual = float(np.linalg.norm(y - mu * x))
        norm = np.linalg.norm(y)
        if norm < 1e-14:
            return new_estimate, iteration, residual
        x = y / norm
        if abs(new_estimate - estimate) <= tol * max(1.0, new_estimate):
            stable += 1
            if stable >= window:
                return new_estimate, iteration, residual
        else:
            stable = 0
        estimate = new_estimate
    raise SpectralError(
        f"power iteration did not converge within {cap} iterations "
        f"(last estimate {estimate:.12g})"
    )


def top_two_eigenvalues(g: Graph, tol: float = 1e-8, method: str = "auto") -> SpectralReport:
    """|lambda_1| and |lambda_2| of the adjacency matrix, ordered by absolute value."""
    if g.n == 0:
        raise SpectralError("empty graph has no spectrum")
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "dense" if g.n <= DENSE_LIMIT else "iterative"

    degree = g.is_regular()
    connected = g.is_connected()

    if method == "dense":
        spectrum = _abs_spectrum_dense(g)
        lambda1 = float(spectrum[0])
        lambda2 = float(spectrum[1]) if g.n > 1 else 0.0
        iterations, residual = 0, 0.0
    else:
        op = adjacency_sparse(g)
        ones = np.ones(g.n)
        if degree is not None and connected:
            lambda1 = float(degree)
            lambda2, iterations, residual = _power_iterate(op, [ones], tol)
        else:
            lambda1, it1, res1 = _power_iterate(op, [], tol)
            # Deflating the converged dominant vector is not available in
            # eigenvalue-only form; rerun against the uniform direction as a
            # best effort and keep the larger residual.
            lambda2, it2, res2 = _power_iterate(op, [ones], tol)
            iterations, residual = it1 + it2, max(res1, res2)

    if degree is not None and connected:
        lambda1 = float(degree)
    note = (
        degree is not None
        and connected
        and g.n > 1
        and abs(lambda2 - lambda1) <= max(tol, 1e-9) * max(1.0, lambda1)
    )
    return SpectralReport(
        lambda1_abs=lambda1,
        lambda2_abs=lambda2,
        method=method,
        iterations=iterations,
        residual=residual,
        bipartite_note=bool(note),
    )


def mixing_discrepancy(
    g: Graph,
    v1,
    v2,
    lambda2_abs: float,
    tol: float = 1e-9,
) -> tuple[float, float, bool]:
    """Edge-count deviation between two disjoint vertex sets versus the
    random-graph expectation, checked against the spectral bound.

    Returns (lhs, rhs, holds) with
    lhs = | |E(V1,V2)| - (D/|V|)|V1||V2| | and rhs = lambda2_abs*sqrt(|V1||V2|).
    """
    degree = g.is_regular()
    if degree is None:
        raise ValueError("mixing bound requires a regular graph")
    s1, s2 = set(v1), set(v2)
    if s1 & s2:
        raise ValueError("vertex sets must be disjoint")
    for v in s1 | s2:
        g._check_vertex(v)
    crossing = sum(1 for u in s1 for w in g.adj[u] if w in s2)
    expected = degree / g.n * len(s1) * len(s2)
    lhs = abs(crossing - expected)
    rhs = lambda2_abs * math.sqrt(len(s1) * len(s2))
    return lhs, rhs, lhs <= rhs + tol


def ramanujan_check(g: Graph, tol: float = 1e-8, method: str = "auto") -> RamanujanReport:
    """Whether the nontrivial spectral radius is within 2*sqrt(D-1) + tol."""
    degree = g.is_regular()
    if degree is None:
        raise ValueError("the spectral gap check requires a regular graph")
    if not g.is_connected():
        raise ValueError("the spectral gap check requires a connected graph")
    bipartite = g.bipartition() is not None
    if method == "auto":
        method = "dense" if g.n <= DENSE_LIMIT else "iterative"

    if method == "dense":
        spectrum = _abs_spectrum_dense(g)
        relevant = float(spectrum[2]) if bipartite else float(spectrum[1])
    else:
        op = adjacency_sparse(g)
        deflate = [np.ones(g.n)]
        if bipartite:
            part0, _ = g.bipartition()
            sign = -np.ones(g.n)
            sign[list(part0)] = 1.0
            deflate.append(sign)
        relevant, _, _ = _power_iterate(op, deflate, tol)

    bound = 2.0 * math.sqrt(degree - 1)
    convention = (
        "bipartite: -D eigenvalue excluded before the comparison"
        if bipartite
        else "second eigenvalue by absolute value"
    )
    return RamanujanReport(
        is_ramanujan=relevant <= bound + tol,
        degree=degree,
        relevant_lambda=relevant,
        bound=bound,
        bipartite=bipartite,
        convention=convention,
    )
