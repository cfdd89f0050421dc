"""Structural verdicts, fixed points and centrality measures.

Every verdict here is decided on the graph alone (strong components, closed
components, periods, reachability).  Spectral quantities are only used by
the tests as an independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Abelson, DeGroot, FriedkinJohnsen, Taylor, _diag, _opinions
from .exceptions import ConvergenceError, DimensionError, DomainError, RefusalError
from .graph import (
    ComponentPeriod,
    DirectedWeightedGraph,
    component_period,
    graph_from_matrix,
    reachable_from,
    roots_and_quasi_strong,
    source_nodes,
    strong_components,
)
from .matrices import (
    as_nonnegative,
    as_stochastic,
    laplacian_left_null,
    laplacian_of,
    left_fixed_vector,
    m_matrix_solve,
)

__all__ = [
    "ConvergenceVerdict",
    "StabilityVerdict",
    "PDependencePartition",
    "CentralityResult",
    "TaylorFixedPoint",
    "FJFixedPoint",
    "ContainmentReport",
    "AnalysisReport",
    "PREJUDICE_TOL",
    "degroot_verdict",
    "abelson_verdict",
    "taylor_verdict",
    "fj_verdict",
    "french_social_power",
    "abelson_social_power",
    "prejudiced_from_gamma",
    "prejudiced_from_lambda",
    "classify_p_dependence",
    "degroot_limit",
    "abelson_limit",
    "taylor_stability_and_final",
    "taylor_final",
    "fj_stability_and_final",
    "fj_final",
    "influence_centrality",
    "pagerank",
    "containment_certificate",
    "containment_check",
    "nash_residual",
    "analyze",
]

#: lambda_i < 1 - PREJUDICE_TOL marks agent i as prejudiced in the Friedkin-Johnsen model.
PREJUDICE_TOL = 1e-12
CONTAINMENT_SEED = 0xC0FFEE
CONTAINMENT_DIRECTIONS = 256


def _fmt(nodes) -> str:
    return "{" + ",".join(str(v + 1) for v in sorted(nodes)) + "}"


@dataclass(frozen=True)
class ConvergenceVerdict:
    """Convergence/consensus verdict with a machine-readable ``reason`` tag.

    Tags: ``quasi-strong-aperiodic``, ``quasi-strong``,
    ``multiple-closed-components:{..};{..}``,
    ``closed-component-periodic:{..}``.  Node lists in tags are 1-based.
    """

    convergent: bool
    consensus: bool
    reason: str
    closed_components: tuple[ComponentPeriod, ...]

    def to_dict(self):
        return {
            "convergent": self.convergent,
            "consensus": self.consensus,
            "reason": self.reason,
            "closed_components": [
                {"nodes": [v + 1 for v in c.component], "period": c.period, "has_cycle": c.has_cycle}
                for c in self.closed_components
            ],
        }


@dataclass(frozen=True)
class PDependencePartition:
    prejudiced: frozenset[int]
    p_dependent: frozenset[int]
    p_independent: frozenset[int]

    @property
    def all_dependent(self) -> bool:
        return not self.p_independent

    def dependent_indices(self) -> np.ndarray:
        return np.array(sorted(self.p_dependent), dtype=int)

    def independent_indices(self) -> np.ndarray:
        return np.array(sorted(self.p_independent), dtype=int)

    def to_dict(self):
        return {k: [v + 1 for v in sorted(getattr(self, k))]
                for k in ("prejudiced", "p_dependent", "p_independent")}


@dataclass(frozen=True)
class StabilityVerdict:
    """Asymptotic stability and convergence of a model with prejudiced agents."""

    stable: bool
    convergent: bool
    reason: str
    partition: PDependencePartition

    def to_dict(self):
        return {"stable": self.stable, "convergent": self.convergent, "reason": self.reason,
                "p_dependence": self.partition.to_dict()}


@dataclass(frozen=True)
class CentralityResult:
    """A probability vector over agents together with the method that produced it."""

    method: str
    vector: np.ndarray
    parameters: dict = field(default_factory=dict)

    def consensus_value(self, x0):
        """Weighted opinion ``vector . x0`` (the consensus value for social power)."""
        return self.vector @ np.asarray(x0, dtype=float)

    def to_dict(self):
        return {"method": self.method, "vector": self.vector.tolist(), "parameters": dict(self.parameters)}


# ---------------------------------------------------------------------------
# verdicts


def _closed_periods(G: DirectedWeightedGraph):
    dec = strong_components(G)
    return dec, tuple(component_period(G, c) for c in dec.closed_components)


def _multi_reason(closed):
    return "multiple-closed-components:" + ";".join(_fmt(c.component) for c in closed)


def degroot_verdict(W) -> ConvergenceVerdict:
    """Convergence iff every closed strong component is aperiodic; consensus
    iff additionally there is exactly one closed component."""
    G = graph_from_matrix(as_stochastic(W))
    _, closed = _closed_periods(G)
    periodic = [c for c in closed if c.period > 1]
    if periodic:
        reason = "closed-component-periodic:" + ";".join(_fmt(c.component) for c in periodic)
        return ConvergenceVerdict(False, False, reason, closed)
    if len(closed) == 1:
        return ConvergenceVerdict(True, True, "quasi-strong-aperiodic", closed)
    return ConvergenceVerdict(True, False, _multi_reason(closed), closed)


def abelson_verdict(A) -> ConvergenceVerdict:
    """The linear Abelson model always converges; consensus iff the graph is quasi-strong."""
    G = graph_from_matrix(as_nonnegative(A, "A"))
    _, closed = _closed_periods(G)
    if len(closed) == 1:
        return ConvergenceVerdict(True, True, "quasi-strong", closed)
    return ConvergenceVerdict(True, False, _multi_reason(closed), closed)


def prejudiced_from_gamma(gamma) -> frozenset[int]:
    return frozenset(np.flatnonzero(np.asarray(gamma, dtype=float) > 0).tolist())


def prejudiced_from_lambda(lam, tol=PREJUDICE_TOL) -> frozenset[int]:
    return frozenset(np.flatnonzero(np.asarray(lam, dtype=float) < 1.0 - tol).tolist())


def classify_p_dependence(G: DirectedWeightedGraph, prejudiced) -> PDependencePartition:
    """Split agents into P-dependent (prejudiced or reachable from a prejudiced agent) and the rest."""
    prejudiced = frozenset(int(v) for v in prejudiced)
    dependent = reachable_from(G, prejudiced)
    return PDependencePartition(prejudiced, dependent, frozenset(range(G.n)) - dependent)


def taylor_verdict(A, gamma) -> StabilityVerdict:
    """Hurwitz stability iff every agent is P-dependent; the model always converges."""
    A = as_nonnegative(A, "A")
    part = classify_p_dependence(graph_from_matrix(A), prejudiced_from_gamma(gamma))
    if part.all_dependent:
        return StabilityVerdict(True, True, "all-p-dependent", part)
    return StabilityVerdict(False, True, "p-independent:" + _fmt(part.p_independent), part)


def fj_verdict(W, lam) -> StabilityVerdict:
    """Schur stability iff every agent is P-dependent; convergence iff in addition
    the P-independent block (a French-DeGroot model) converges."""
    W = as_stochastic(W)
    lam = _diag(lam, W.shape[0])
    part = classify_p_dependence(graph_from_matrix(W), prejudiced_from_lambda(lam))
    if part.all_dependent:
        return StabilityVerdict(True, True, "all-p-dependent", part)
    idx = part.independent_indices()
    sub = degroot_verdict(W[np.ix_(idx, idx)])
    tag = "p-independent:" + _fmt(part.p_independent)
    if sub.convergent:
        return StabilityVerdict(False, True, tag + ";block-regular", part)
    # translate the sub-block reason back to original agent labels
    periodic = [c for c in sub.closed_components if c.period > 1]
    nodes = ";".join(_fmt(idx[list(c.component)]) for c in periodic)
    return StabilityVerdict(False, False, tag + ";block-periodic:" + nodes, part)


# ---------------------------------------------------------------------------
# social power and limits


def _closed_split(G):
    dec = strong_components(G)
    closed = dec.closed_components
    closed_nodes = sorted(v for c in closed for v in c)
    rest = sorted(set(range(G.n)) - set(closed_nodes))
    return closed, np.array(closed_nodes, dtype=int), np.array(rest, dtype=int)


def french_social_power(W) -> CentralityResult:
    """Left fixed probability vector of a fully regular ``W``.

    The consensus value from ``x0`` is ``p . x0``.

    Raises
    ------
    RefusalError
        If the model is not guaranteed to reach consensus.
    """
    W = as_stochastic(W)
    verdict = degroot_verdict(W)
    if not verdict.consensus:
        raise RefusalError(f"consensus not guaranteed ({verdict.reason})", verdict.reason)
    # p vanishes off the unique closed component, whose block of W is itself stochastic
    (comp,) = [c.component for c in verdict.closed_components]
    comp = np.array(comp, dtype=int)
    p = np.zeros(W.shape[0])
    p[comp] = left_fixed_vector(W[np.ix_(comp, comp)])
    return CentralityResult("french-social-power", p)


def abelson_social_power(A) -> CentralityResult:
    """Probability vector with ``p^T L[A] = 0`` for a quasi-strong graph.

    Raises
    ------
    RefusalError
        If the graph is not quasi-strongly connected.
    """
    A = as_nonnegative(A, "A")
    verdict = abelson_verdict(A)
    if not verdict.consensus:
        raise RefusalError(f"consensus not guaranteed ({verdict.reason})", verdict.reason)
    (comp,) = [c.component for c in verdict.closed_components]
    comp = np.array(comp, dtype=int)
    p = np.zeros(A.shape[0])
    p[comp] = laplacian_left_null(laplacian_of(A[np.ix_(comp, comp)]))
    return CentralityResult("abelson-social-power", p)


def degroot_limit(W, X0) -> np.ndarray:
    """Exact limit ``W^infinity X0`` of a convergent French-DeGroot model.

    Each closed component reaches its own consensus ``p_C . X0[C]``; the
    remaining agents then solve ``(I - W_NN) X_N = W_NC X_C``.
    """
    W = as_stochastic(W)
    X0, scalar = _opinions(X0, W.shape[0], "X0")
    verdict = degroot_verdict(W)
    if not verdict.convergent:
        raise RefusalError(f"model does not converge ({verdict.reason})", verdict.reason)
    X = _split_limit(graph_from_matrix(W), X0,
                     lambda c: left_fixed_vector(W[np.ix_(c, c)]),
                     lambda N, C, XC: m_matrix_solve(np.eye(len(N)) - W[np.ix_(N, N)], W[np.ix_(N, C)] @ XC))
    return X[:, 0] if scalar else X


def abelson_limit(A, X0) -> np.ndarray:
    """Exact limit ``lim exp(-L t) X0`` of the linear Abelson model."""
    A = as_nonnegative(A, "A")
    X0, scalar = _opinions(X0, A.shape[0], "X0")
    L = laplacian_of(A)
    X = _split_limit(graph_from_matrix(A), X0,
                     lambda c: laplacian_left_null(laplacian_of(A[np.ix_(c, c)])),
                     lambda N, C, XC: np.linalg.solve(L[np.ix_(N, N)], -L[np.ix_(N, C)] @ XC))
    return X[:, 0] if scalar else X


def _split_limit(G, X0, weights_of, solve_rest):
    closed, closed_nodes, rest = _closed_split(G)
    X = np.zeros_like(X0)
    for comp in closed:
        c = np.array(comp, dtype=int)
        X[c] = weights_of(c) @ X0[c]
    if rest.size:
        X[rest] = solve_rest(rest, closed_nodes, X[closed_nodes])
    return X


# ---------------------------------------------------------------------------
# Taylor model


@dataclass(frozen=True)
class TaylorFixedPoint:
    """Mixing matrix ``M`` (columns ordered as ``[dependent prejudices, independent limits]``)
    and the resulting final opinions of the P-dependent agents."""

    stable: bool
    partition: PDependencePartition
    dependent: np.ndarray
    independent: np.ndarray
    M: np.ndarray | None
    x1: np.ndarray | None


def taylor_stability_and_final(A, gamma, u, x2_limit=None) -> TaylorFixedPoint:
    """Stability verdict, mixing matrix and P-dependent limits of the Taylor model.

    ``M = (L11 + G11)^{-1} [G11, -L12]`` where ``-L12 >= 0`` holds the weights
    from independent to dependent agents, so ``M`` is stochastic.  The limit
    ``x1 = M [u1; x2_limit]`` is computed when there are no P-independent
    agents or when ``x2_limit`` is supplied.
    """
    model = Taylor(A, gamma, u)
    part = classify_p_dependence(graph_from_matrix(model.A), prejudiced_from_gamma(model.gamma))
    D, I = part.dependent_indices(), part.independent_indices()
    if D.size == 0:
        return TaylorFixedPoint(False, part, D, I, None, None)
    L = laplacian_of(model.A)
    Z = L[np.ix_(D, D)] + np.diag(model.gamma[D])
    rhs = np.hstack([np.diag(model.gamma[D]), -L[np.ix_(D, I)]])
    M = m_matrix_solve(Z, rhs)
    x1 = None
    if I.size == 0:
        x1 = M @ model.u[D]
    elif x2_limit is not None:
        x2, _ = _opinions(x2_limit, I.size, "x2_limit")
        x1 = M @ np.vstack([model.u[D], x2])
    return TaylorFixedPoint(part.all_dependent, part, D, I, M, x1)


def taylor_final(A, gamma, u, x0=None) -> np.ndarray:
    """Final opinions of every agent; ``x0`` is needed only when P-independent agents exist."""
    model = Taylor(A, gamma, u)
    scalar = np.asarray(u).ndim == 1
    fp = taylor_stability_and_final(model.A, model.gamma, model.u)
    X = np.zeros_like(model.u)
    if fp.independent.size:
        if x0 is None:
            raise RefusalError("P-independent agents present: their limit depends on x0", "p-independent")
        X0, _ = _opinions(x0, model.n, "x0")
        I = fp.independent
        X[I] = abelson_limit(model.A[np.ix_(I, I)], X0[I])
        if fp.dependent.size:
            fp = taylor_stability_and_final(model.A, model.gamma, model.u, X[I])
    if fp.dependent.size:
        X[fp.dependent] = fp.x1
    return X[:, 0] if scalar else X


# ---------------------------------------------------------------------------
# Friedkin-Johnsen model


@dataclass(frozen=True)
class FJFixedPoint:
    """Control matrix ``V`` (columns ordered as ``[dependent prejudices, independent limits]``)
    and the final opinions.  ``final`` is filled when every agent's limit is known."""

    stable: bool
    convergent: bool
    partition: PDependencePartition
    dependent: np.ndarray
    independent: np.ndarray
    V: np.ndarray | None
    x1: np.ndarray | None
    final: np.ndarray | None


def _coupled_fixed_point(LW, drift, C, X_start, tol=1e-12, max_iter=1_000_000):
    X = X_start
    for _ in range(max_iter):
        X_next = LW @ X @ C.T + drift
        if np.max(np.abs(X_next - X)) < tol:
            return X_next
        X = X_next
    raise ConvergenceError("topic-coupled fixed-point iteration did not converge", estimate=X)


def fj_stability_and_final(W, lam, U, C=None, x2_limit=None) -> FJFixedPoint:
    """Stability verdict, control matrix and fixed point of the Friedkin-Johnsen model.

    ``V = (I - L11 W11)^{-1} [I - L11, L11 W12]`` with ``L = Lambda``.  With a
    topic-coupling matrix ``C`` the fixed point of
    ``X = Lambda W X C^T + (I - Lambda) U`` is found by iterating from ``U``.

    Raises
    ------
    RefusalError
        If ``Lambda = I`` (the model is then French-DeGroot; use :func:`degroot_verdict`).
    """
    model = FriedkinJohnsen(W, lam, U, C)
    if np.all(model.lam == 1.0):
        raise RefusalError("Lambda = I: this is the French-DeGroot model, use degroot_verdict",
                           "lambda-identity")
    verdict = fj_verdict(model.W, model.lam)
    part = verdict.partition
    D, I = part.dependent_indices(), part.independent_indices()
    W_, l = model.W, model.lam
    Z = np.eye(D.size) - l[D, None] * W_[np.ix_(D, D)]
    rhs = np.hstack([np.diag(1.0 - l[D]), l[D, None] * W_[np.ix_(D, I)]])
    V = m_matrix_solve(Z, rhs)
    x1 = final = None
    x2 = None
    if I.size and x2_limit is not None:
        x2, _ = _opinions(x2_limit, I.size, "x2_limit")
    if verdict.convergent and (I.size == 0 or x2 is not None):
        U1 = model.u[D]
        if model.C is None:
            x1 = V @ (U1 if I.size == 0 else np.vstack([U1, x2]))
        else:
            LW = l[D, None] * W_[np.ix_(D, D)]
            drift = (1.0 - l[D, None]) * U1
            if I.size:
                drift = drift + (l[D, None] * W_[np.ix_(D, I)]) @ x2 @ model.C.T
            x1 = _coupled_fixed_point(LW, drift, model.C, U1)
        final = np.zeros_like(model.u)
        final[D] = x1
        if I.size:
            final[I] = x2
    return FJFixedPoint(verdict.stable, verdict.convergent, part, D, I, V, x1, final)


def fj_final(W, lam, U, x0=None, C=None) -> np.ndarray:
    """Final opinions of every agent; ``x0`` is needed only when P-independent agents exist."""
    model = FriedkinJohnsen(W, lam, U, C)
    scalar = np.asarray(U).ndim == 1
    verdict = fj_verdict(model.W, model.lam)
    if not verdict.convergent:
        raise RefusalError(f"model does not converge ({verdict.reason})", verdict.reason)
    x2 = None
    I = verdict.partition.independent_indices()
    if I.size:
        if x0 is None:
            raise RefusalError("P-independent agents present: their limit depends on x0", "p-independent")
        X0, _ = _opinions(x0, model.n, "x0")
        W22 = model.W[np.ix_(I, I)]
        if model.C is None:
            x2 = degroot_limit(W22, X0[I])
        else:
            x2 = _coupled_fixed_point(W22, 0.0, model.C, X0[I])
    if np.all(model.lam == 1.0):
        X = x2
    else:
        X = fj_stability_and_final(model.W, model.lam, model.u, model.C, x2).final
    return X[:, 0] if scalar else X


# ---------------------------------------------------------------------------
# centralities


def influence_centrality(W, lam) -> CentralityResult:
    """Mean row ``c = V^T 1 / n`` of the control matrix ``V = (I - Lambda W)^{-1} (I - Lambda)``.

    ``lam`` may be a scalar ``alpha`` (``Lambda = alpha I``) or the diagonal of Lambda.

    Raises
    ------
    RefusalError
        If some agent is P-independent (the model is not asymptotically stable).
    """
    W = as_stochastic(W)
    n = W.shape[0]
    params = {"alpha": float(lam)} if np.ndim(lam) == 0 else {"lambda": _diag(lam, n).tolist()}
    lam = _diag(lam, n)
    if np.any(lam < 0) or np.any(lam > 1):
        raise DomainError("lambda out of [0,1]")
    verdict = fj_verdict(W, lam)
    if not verdict.stable:
        raise RefusalError(f"model is not asymptotically stable ({verdict.reason})", verdict.reason)
    Zt = (np.eye(n) - lam[:, None] * W).T
    y = m_matrix_solve(Zt, np.ones(n))
    return CentralityResult("influence-centrality", (1.0 - lam) * y / n, params)


def pagerank(W, m=0.15, mode="closed-form", tol=1e-13, max_iter=1_000_000) -> CentralityResult:
    """PageRank with teleportation probability ``m``.

    ``closed-form`` solves ``c^T = (m/n) 1^T (I - (1-m) W)^{-1}``; ``iterate``
    runs ``p^T <- (1-m) p^T W + (m/n) 1^T`` from the uniform vector until the
    l1 change drops below ``tol``.
    """
    W = as_stochastic(W)
    if not 0.0 < m < 1.0:
        raise DomainError(f"damping m must lie in (0, 1), got {m!r}")
    n = W.shape[0]
    params = {"damping": float(m), "mode": mode}
    if mode == "closed-form":
        c = m_matrix_solve((np.eye(n) - (1.0 - m) * W).T, np.full(n, m / n))
        return CentralityResult("pagerank", c, params)
    if mode != "iterate":
        raise DomainError(f"mode must be 'closed-form' or 'iterate', got {mode!r}")
    p = np.full(n, 1.0 / n)
    for k in range(1, max_iter + 1):
        p_next = (1.0 - m) * (p @ W) + m / n
        if np.sum(np.abs(p_next - p)) < tol:
            params["iterations"] = k
            return CentralityResult("pagerank", p_next, params)
        p = p_next
    raise ConvergenceError("PageRank iteration did not converge", estimate=p, iterations=max_iter)


# ---------------------------------------------------------------------------
# containment


@dataclass(frozen=True)
class ContainmentReport:
    """``status`` is ``"certified"``, ``"support-test passed"`` or ``"violated"``.

    For violations ``witness`` is a direction ``v`` and ``agent`` an index with
    ``v . x_agent > max_k v . s_k + margin``.
    """

    status: str
    margin: float
    witness: np.ndarray | None = None
    agent: int | None = None

    @property
    def contained(self) -> bool:
        return self.status != "violated"

    def to_dict(self):
        return {
            "status": self.status,
            "margin": self.margin,
            "witness": None if self.witness is None else self.witness.tolist(),
            "agent": None if self.agent is None else self.agent + 1,
        }


def containment_certificate(A, B) -> np.ndarray:
    """Stochastic ``n x m`` weights ``K`` with ``x(inf) = K s`` for the Taylor model with leaders.

    Built from the mixing matrix ``M`` and the reduction ``u = diag(1/gamma) B s``.

    Raises
    ------
    RefusalError
        If some agent is not influenced, directly or indirectly, by a leader.
    """
    A = as_nonnegative(A, "A")
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != A.shape[0]:
        raise DimensionError(f"B must have {A.shape[0]} rows")
    gamma = B.sum(axis=1)
    fp = taylor_stability_and_final(A, gamma, np.zeros(A.shape[0]))
    if not fp.stable:
        raise RefusalError("not every agent is P-dependent; containment is not guaranteed",
                           "p-independent:" + _fmt(fp.partition.p_independent))
    G = np.zeros_like(B)
    on = gamma > 0
    G[on] = B[on] / gamma[on, None]
    # all agents are dependent, so M's columns follow D = sorted(range(n)) = identity order
    return fp.M @ G


def containment_check(x_final, leaders, certificate=None, tol=1e-8) -> ContainmentReport:
    """Check that every row of ``x_final`` lies in the convex hull of the leader rows.

    With a stochastic ``n x m`` ``certificate`` satisfying ``x_final = K s`` the
    answer is exact.  Otherwise ``d = 1`` uses the exact interval test and
    ``d > 1`` a support-function test over 256 reproducible random
    directions, which can only refute containment.
    """
    X, _ = _opinions(x_final, name="x_final")
    S, _ = _opinions(leaders, name="leaders")
    if X.shape[1] != S.shape[1]:
        raise DimensionError(f"x_final has {X.shape[1]} coordinates, leaders have {S.shape[1]}")
    scale = max(1.0, float(np.max(np.abs(S))), float(np.max(np.abs(X))))
    if certificate is not None:
        K = np.asarray(certificate, dtype=float)
        if (K.shape == (X.shape[0], S.shape[0]) and np.all(K >= -1e-9)
                and np.all(np.abs(K.sum(axis=1) - 1.0) <= 1e-9)
                and np.max(np.abs(K @ S - X)) <= 1e-9 * scale):
            return ContainmentReport("certified", 0.0)
    if X.shape[1] == 1:
        lo, hi = S.min(), S.max()
        slack = 1e-12 * scale
        below, above = lo - X[:, 0], X[:, 0] - hi
        i = int(np.argmax(np.maximum(below, above)))
        gap = float(max(below[i], above[i]))
        if gap > slack:
            v = np.array([-1.0]) if below[i] > above[i] else np.array([1.0])
            return ContainmentReport("violated", gap, v, i)
        return ContainmentReport("certified", gap)
    rng = np.random.default_rng(CONTAINMENT_SEED)
    dirs = rng.standard_normal((CONTAINMENT_DIRECTIONS, X.shape[1]))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    gaps = dirs @ X.T - np.max(dirs @ S.T, axis=1, keepdims=True)
    k, i = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
    gap = float(gaps[k, i])
    if gap > tol:
        return ContainmentReport("violated", gap, dirs[k], int(i))
    return ContainmentReport("support-test passed", gap)


# ---------------------------------------------------------------------------
# game-theoretic view


def nash_residual(W, lam, u, x) -> float:
    """Largest distance between an agent's opinion and its best response.

    Agent ``i`` minimises ``lam_i sum_j w_ij (x_j - x_i)^2 + (1 - lam_i)(x_i - u_i)^2``
    over ``x_i`` with the others fixed.  The minimiser is
    ``(lam_i sum_{j != i} w_ij x_j + (1 - lam_i) u_i) / (1 - lam_i w_ii)``; an
    agent with ``lam_i = w_ii = 1`` has a constant cost and contributes zero.
    """
    W = as_stochastic(W)
    n = W.shape[0]
    lam = _diag(lam, n)
    u = np.asarray(u, dtype=float).reshape(n)
    x = np.asarray(x, dtype=float).reshape(n)
    w_ii = np.diag(W)
    pull = lam * (W @ x - w_ii * x) + (1.0 - lam) * u
    denom = 1.0 - lam * w_ii
    free = denom <= 1e-15
    best = np.where(free, x, pull / np.where(free, 1.0, denom))
    return float(np.max(np.abs(x - best)))


# ---------------------------------------------------------------------------
# reports


@dataclass
class AnalysisReport:
    """Structural facts about a model's graph plus its verdicts and derived quantities."""

    model: str
    n: int
    components: list
    roots: list
    quasi_strong: bool
    sources: list
    verdict: dict
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "model": self.model,
            "n": self.n,
            "components": self.components,
            "roots": self.roots,
            "quasi_strong": self.quasi_strong,
            "sources": self.sources,
            "verdict": self.verdict,
        }
        out.update(self.extras)
        return out


def _model_tag(spec):
    return {DeGroot: "degroot", Abelson: "abelson", Taylor: "taylor", FriedkinJohnsen: "fj"}[type(spec)]


def analyze(spec, x0=None, verdict_only=False) -> AnalysisReport:
    """Build an :class:`AnalysisReport` for a model configuration.

    ``verdict_only=True`` restricts the report to graph-theoretic facts and
    verdicts (no linear solves).
    """
    tag = _model_tag(spec)
    matrix = spec.A if tag in ("abelson", "taylor") else spec.W
    G = graph_from_matrix(matrix)
    dec = strong_components(G)
    roots, qs = roots_and_quasi_strong(G, dec)
    components = []
    for comp, closed in zip(dec.components, dec.closed):
        per = component_period(G, comp)
        components.append({"nodes": [v + 1 for v in comp], "closed": closed,
                           "period": per.period, "has_cycle": per.has_cycle})
    if tag == "degroot":
        verdict = degroot_verdict(spec.W)
    elif tag == "abelson":
        verdict = abelson_verdict(spec.A)
    elif tag == "taylor":
        verdict = taylor_verdict(spec.A, spec.gamma)
    else:
        verdict = fj_verdict(spec.W, spec.lam)
    report = AnalysisReport(tag, G.n, components, sorted(v + 1 for v in roots), qs,
                            sorted(v + 1 for v in source_nodes(G)), verdict.to_dict())
    if tag == "abelson" and spec.coupling is not None:
        report.verdict = {"note": "no verdict is rendered for nonlinear couplings"}
        return report
    if verdict_only:
        return report

    extras = report.extras
    if tag == "degroot" and verdict.consensus:
        extras["social_power"] = french_social_power(spec.W).vector.tolist()
    elif tag == "abelson" and verdict.consensus:
        extras["social_power"] = abelson_social_power(spec.A).vector.tolist()
    elif tag == "taylor":
        fp = taylor_stability_and_final(spec.A, spec.gamma, spec.u)
        if fp.M is not None:
            extras["mixing_matrix"] = fp.M.tolist()
        if fp.stable or x0 is not None:
            extras["final_opinions"] = taylor_final(spec.A, spec.gamma, spec.u, x0).tolist()
    elif tag == "fj":
        if verdict.stable:
            extras["influence_centrality"] = influence_centrality(spec.W, spec.lam).vector.tolist()
        if not np.all(spec.lam == 1.0):
            fp = fj_stability_and_final(spec.W, spec.lam, spec.u, spec.C)
            extras["control_matrix"] = fp.V.tolist()
        if verdict.convergent and (verdict.stable or x0 is not None):
            extras["final_opinions"] = fj_final(spec.W, spec.lam, spec.u, x0, spec.C).tolist()
    if tag in ("degroot", "abelson") and verdict.convergent and x0 is not None:
        limit = degroot_limit(spec.W, x0) if tag == "degroot" else abelson_limit(spec.A, x0)
        extras["final_opinions"] = np.asarray(limit).tolist()
    return report
