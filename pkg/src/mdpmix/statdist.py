"""Stationary distributions of irreducible chains.

Two independent solvers are provided so that either can serve as an oracle
for the other: a direct linear solve and a Cesàro-average iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import NoConvergence, NonPositiveResult, SingularSystem
from .model import Distribution, ROW_SUM_TOL


@dataclass(frozen=True)
class SolveOptions:
    method: Literal["linear", "cesaro"] = "linear"
    tol: float = 1e-12
    max_iters: int = 10**6

    def __post_init__(self) -> None:
        if self.method not in ("linear", "cesaro"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


def check_stochastic(P: np.ndarray, tol: float = ROW_SUM_TOL) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {P.shape}")
    if np.any(P < 0) or np.any(P > 1):
        raise ValueError("matrix entries outside [0, 1]")
    if np.max(np.abs(P.sum(axis=1) - 1.0)) > tol:
        raise ValueError("matrix rows do not sum to 1")
    return P


def strongly_connected_components(adjacency: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit."""
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            edges = adjacency[v]
            while pos < len(edges):
                w = edges[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return components


def is_irreducible(P: np.ndarray) -> bool:
    """True iff the graph with an edge ``i -> j`` whenever ``P[i, j] > 0`` is strongly connected."""
    P = np.asarray(P)
    adjacency = [np.flatnonzero(row > 0).tolist() for row in P]
    return len(strongly_connected_components(adjacency)) == 1


def _finish(mu: np.ndarray) -> Distribution:
    if not np.all(np.isfinite(mu)):
        raise SingularSystem("solution has non-finite entries")
    mu = mu / mu.sum()
    if np.any(mu <= 0.0):
        raise NonPositiveResult(
            f"stationary vector has non-positive entry {mu.min():.3g}; "
            "is the chain irreducible?"
        )
    return Distribution(mu)


def stationary_linear(P: np.ndarray) -> Distribution:
    """Solve ``mu P = mu``, ``sum(mu) = 1`` directly.

    The last equation of ``(P^T - I) mu = 0`` is replaced by the
    normalization constraint; the square system is then solved by LU with
    partial pivoting.
    """
    P = check_stochastic(P)
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        mu = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"stationary system is singular: {exc}") from exc
    return _finish(mu)


def stationary_cesaro(P: np.ndarray, opts: SolveOptions | None = None) -> Distribution:
    """Limit of ``mu_0 (P + P^2 + ... + P^m) / m`` from a uniform start.

    Averages over ``m = 1, 2, 4, 8, ...`` terms are built by doubling,
    ``A_2m = (A_m + P^m A_m) / 2``, which keeps the plain Cesàro limit (and
    so converges for periodic chains) while reaching an error of ``tol`` in
    ``O(log(1/tol))`` matrix products instead of ``O(1/tol)`` steps.
    Iteration stops once two successive averages differ by less than
    ``opts.tol`` in the max norm. ``opts.max_iters`` caps the number of
    doublings.
    """
    opts = opts or SolveOptions(method="cesaro")
    P = check_stochastic(P)
    n = P.shape[0]
    mu0 = np.full(n, 1.0 / n)
    power = P.copy()
    avg = P.copy()
    prev = mu0 @ avg
    for _ in range(opts.max_iters):
        avg = 0.5 * (avg + power @ avg)
        power = power @ power
        # squaring amplifies row-sum drift like (1 + eps)**(2**k)
        avg /= avg.sum(axis=1, keepdims=True)
        power /= power.sum(axis=1, keepdims=True)
        cur = mu0 @ avg
        if np.max(np.abs(cur - prev)) < opts.tol:
            return _finish(cur)
        prev = cur
    raise NoConvergence(f"Cesàro average did not settle after {opts.max_iters} doublings")


def stationary(P: np.ndarray, opts: SolveOptions | None = None) -> Distribution:
    opts = opts or SolveOptions()
    if opts.method == "cesaro":
        return stationary_cesaro(P, opts)
    return stationary_linear(P)


def residual(P: np.ndarray, mu) -> float:
    """Max-norm of ``mu P - mu``."""
    mu = np.asarray(mu, dtype=float)
    P = np.asarray(P, dtype=float)
    if P.shape != (mu.size, mu.size):
        raise ValueError(f"dimension mismatch: P {P.shape}, mu {mu.shape}")
    return float(np.max(np.abs(mu @ P - mu)))
