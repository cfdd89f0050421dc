"""Trajectory simulators for the French-DeGroot, Abelson, Taylor and Friedkin-Johnsen models.

Opinions are stored as ``n x d`` arrays, row ``i`` being agent ``i``'s
opinion on ``d`` topics.  Every simulator also accepts a 1-D vector of scalar
opinions and then reports 1-D states through :attr:`Trajectory.final`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import DimensionError, DomainError, NonFiniteStateError
from .graph import graph_from_matrix, reachable_from
from .matrices import (
    as_nonnegative,
    as_stochastic,
    laplacian_of,
    matrix_exponential,
)

__all__ = [
    "DeGroot",
    "Abelson",
    "Taylor",
    "FriedkinJohnsen",
    "Trajectory",
    "COUPLINGS",
    "degroot_step",
    "degroot_simulate",
    "abelson_simulate_linear",
    "abelson_simulate_nonlinear",
    "taylor_simulate",
    "fj_step",
    "fj_simulate",
    "simulate",
]

EXPM_MAX_N = 2000


def _constant_coupling(a, b):
    return np.ones(np.broadcast(a, b).shape)


def _inverse_quadratic(a, b):
    return 1.0 / (1.0 + (a - b) ** 2)


#: Built-in coupling functions ``g(x_i, x_j)`` for the nonlinear Abelson model.
COUPLINGS: dict[str, Callable] = {
    "constant": _constant_coupling,
    "inverse-quadratic": _inverse_quadratic,
}


def _opinions(X, n=None, name="X"):
    X = np.asarray(X, dtype=float)
    scalar = X.ndim == 1
    if scalar:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] < 1:
        raise DimensionError(f"{name} must be a vector or an n x d matrix, got shape {X.shape}")
    if n is not None and X.shape[0] != n:
        raise DimensionError(f"{name} has {X.shape[0]} rows, expected {n}")
    if not np.all(np.isfinite(X)):
        raise DomainError(f"{name} has non-finite entries")
    return X, scalar


def _diag(lam, n):
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        lam = np.full(n, float(lam))
    elif lam.ndim == 2:
        if lam.shape != (n, n) or np.any(lam - np.diag(np.diag(lam))):
            raise DimensionError("Lambda must be a diagonal n x n matrix or a length-n vector")
        lam = np.diag(lam).copy()
    if lam.shape != (n,):
        raise DimensionError(f"expected {n} diagonal entries, got shape {lam.shape}")
    return lam


# ---------------------------------------------------------------------------
# model configurations


@dataclass(frozen=True)
class DeGroot:
    W: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "W", as_stochastic(self.W))

    @property
    def n(self):
        return self.W.shape[0]


@dataclass(frozen=True)
class Abelson:
    A: np.ndarray
    coupling: Callable | str | None = None

    def __post_init__(self):
        object.__setattr__(self, "A", as_nonnegative(self.A, "A"))
        if isinstance(self.coupling, str) and self.coupling not in COUPLINGS:
            raise DomainError(f"unknown coupling {self.coupling!r}; choose from {sorted(COUPLINGS)}")

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class Taylor:
    """Reduced Taylor model ``dx/dt = -(L[A] + diag(gamma)) x + diag(gamma) u``.

    Use :meth:`from_sources` to reduce the form with communication sources.
    """

    A: np.ndarray
    gamma: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        A = as_nonnegative(self.A, "A")
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.shape != (A.shape[0],):
            raise DimensionError(f"gamma must have length {A.shape[0]}")
        if np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
            raise DomainError("gamma entries must be finite and >= 0")
        u, _ = _opinions(self.u, A.shape[0], "u")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "u", u)

    @property
    def n(self):
        return self.A.shape[0]

    @classmethod
    def from_sources(cls, A, B, s):
        """Reduce ``sum_k b_ik (s_k - x_i)`` to ``gamma_i (u_i - x_i)``.

        ``gamma_i = sum_k b_ik`` and ``u_i = sum_k b_ik s_k / gamma_i``
        (``u_i = 0`` for agents with ``gamma_i = 0``).
        """
        B = np.asarray(B, dtype=float)
        s, _ = _opinions(s, name="s")
        if B.ndim != 2 or B.shape[1] != s.shape[0]:
            raise DimensionError(f"B must be n x m with m = {s.shape[0]} sources, got {B.shape}")
        if np.any(B < 0) or not np.all(np.isfinite(B)):
            raise DomainError("B entries must be finite and >= 0")
        gamma = B.sum(axis=1)
        u = np.zeros((B.shape[0], s.shape[1]))
        on = gamma > 0
        u[on] = (B[on] @ s) / gamma[on, None]
        return cls(A, gamma, u)


@dataclass(frozen=True)
class FriedkinJohnsen:
    W: np.ndarray
    lam: np.ndarray
    u: np.ndarray
    C: np.ndarray | None = None

    def __post_init__(self):
        W = as_stochastic(self.W)
        n = W.shape[0]
        lam = _diag(self.lam, n)
        if np.any(lam < 0) or np.any(lam > 1):
            raise DomainError("lambda out of [0,1]")
        u, _ = _opinions(self.u, n, "u")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "u", u)
        if self.C is not None:
            C = as_stochastic(self.C, name="C")
            if C.shape[0] != u.shape[1]:
                raise DimensionError(f"C must be {u.shape[1]} x {u.shape[1]}")
            object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.W.shape[0]


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    """Recorded states ``states[k]`` (each ``n x d``) at ``times[k]``.

    ``stop_reason`` is one of ``"converged"``, ``"step-limit"``,
    ``"periodic-orbit-suspected"`` for discrete runs and ``"horizon"`` for
    continuous ones.
    """

    model: str
    times: np.ndarray
    states: np.ndarray
    dt: float | None = None
    stop_reason: str = "horizon"
    scalar: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.states.shape[1]

    @property
    def d(self):
        return self.states.shape[2]

    @property
    def final(self) -> np.ndarray:
        x = self.states[-1]
        return x[:, 0] if self.scalar else x

    def __len__(self):
        return len(self.times)


def _discrete_run(model, step, X0, k_max, tol, scalar):
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    states = [X0]
    reason = "step-limit"
    X = X0
    for _ in range(int(k_max)):
        X_next = step(X)
        states.append(X_next)
        if np.max(np.abs(X_next - X)) < tol:
            reason = "converged"
            break
        X = X_next
    if reason == "step-limit" and len(states) >= 3:
        if np.max(np.abs(states[-1] - states[-3])) < tol:
            reason = "periodic-orbit-suspected"
    S = np.stack(states)
    return Trajectory(model, np.arange(len(S)), S, None, reason, scalar)


def degroot_step(W, X) -> np.ndarray:
    """One pooling step ``X' = W X``."""
    W = np.asarray(W, dtype=float)
    X = np.asarray(X, dtype=float)
    if W.ndim != 2 or W.shape[1] != X.shape[0]:
        raise DimensionError(f"W is {W.shape} but X has {X.shape[0]} rows")
    return W @ X


def degroot_simulate(W, X0, k_max=1000, early_stop_tol=1e-10) -> Trajectory:
    """Iterate ``X(k+1) = W X(k)`` from ``X0``.

    Stops early once successive states differ by less than ``early_stop_tol``
    in the max-norm.  A run that hits ``k_max`` while ``X(k) ~ X(k-2)`` is
    flagged ``"periodic-orbit-suspected"``.
    """
    W = as_stochastic(W)
    X0, scalar = _opinions(X0, W.shape[0], "X0")
    return _discrete_run("degroot", lambda X: W @ X, X0, k_max, early_stop_tol, scalar)


def _steps(T, dt):
    if T < 0 or not math.isfinite(T):
        raise DomainError("horizon T must be finite and >= 0")
    if not dt > 0:
        raise DomainError("dt must be positive")
    N = int(math.floor(T / dt + 1e-9))
    times = [k * dt for k in range(N + 1)]
    if T - times[-1] > 1e-9 * max(1.0, T):
        times.append(T)
    return np.array(times)


def _rk4(f, X, h):
    k1 = f(X)
    k2 = f(X + 0.5 * h * k1)
    k3 = f(X + 0.5 * h * k2)
    k4 = f(X + h * k3)
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate_rk4(model, f, X0, times, dt, scalar, metadata=None):
    states = [X0]
    X = X0
    for k in range(1, len(times)):
        with np.errstate(over="ignore", invalid="ignore"):
            X_next = _rk4(f, X, times[k] - times[k - 1])
        if not np.all(np.isfinite(X_next)):
            partial = Trajectory(model, times[:k], np.stack(states), dt, "non-finite", scalar, dict(metadata or {}))
            raise NonFiniteStateError(f"non-finite state at t = {times[k]:g}", partial)
        states.append(X_next)
        X = X_next
    return Trajectory(model, times, np.stack(states), dt, "horizon", scalar, dict(metadata or {}))


def _integrate_affine(model, G, c, X0, times, dt, scalar, metadata):
    # Exact stepping of dX/dt = -G X + c: X(t+h) = E X(t) + (I - E) xbar with G xbar = c.
    xbar = np.linalg.solve(G, c) if c is not None else None
    E_dt = matrix_exponential(-G, dt)

    def propagate(X, h):
        # only the final partial step (T not a multiple of dt) needs its own propagator
        E = E_dt if abs(h - dt) <= 1e-9 * dt else matrix_exponential(-G, h)
        if xbar is None:
            return E @ X
        return E @ (X - xbar) + xbar

    states = [X0]
    X = X0
    for k in range(1, len(times)):
        X = propagate(X, times[k] - times[k - 1])
        states.append(X)
    return Trajectory(model, times, np.stack(states), dt, "horizon", scalar, metadata)


def _pick_method(method, n):
    if method is None:
        return "expm" if n <= EXPM_MAX_N else "rk4"
    if method == "exact-expm-stepping":
        return "expm"
    if method not in ("expm", "rk4"):
        raise DomainError(f"method must be 'expm' (alias 'exact-expm-stepping') or 'rk4', got {method!r}")
    return method


def abelson_simulate_linear(A, x0, T, dt=0.01, method=None) -> Trajectory:
    """Simulate ``dx/dt = -L[A] x`` on ``[0, T]``, recording every ``dt``.

    ``method="expm"`` advances with the exact propagator ``exp(-L dt)``
    (computed once); ``method="rk4"`` uses classical fixed-step Runge-Kutta.
    The default picks ``expm`` for ``n <= 2000``.
    """
    L = laplacian_of(A)
    X0, scalar = _opinions(x0, L.shape[0], "x0")
    times = _steps(T, dt)
    method = _pick_method(method, L.shape[0])
    meta = {"method": method}
    if method == "expm":
        return _integrate_affine("abelson", L, None, X0, times, dt, scalar, meta)
    return _integrate_rk4("abelson", lambda X: -L @ X, X0, times, dt, scalar, meta)


def abelson_simulate_nonlinear(A, g, x0, T, dt=0.01) -> Trajectory:
    """RK4 for ``dx_i/dt = sum_{j != i} a_ij g(x_i, x_j) (x_j - x_i)``.

    ``g`` is a name from :data:`COUPLINGS` or a vectorised callable with range
    in ``(0, 1]``; it is applied topic by topic.  No convergence verdict is
    attached to nonlinear runs.

    Raises
    ------
    NonFiniteStateError
        If the state blows up; the exception carries the trajectory so far.
    """
    A = np.array(as_nonnegative(A, "A"))
    np.fill_diagonal(A, 0.0)
    if isinstance(g, str):
        if g not in COUPLINGS:
            raise DomainError(f"unknown coupling {g!r}; choose from {sorted(COUPLINGS)}")
        g = COUPLINGS[g]
    X0, scalar = _opinions(x0, A.shape[0], "x0")
    times = _steps(T, dt)

    def f(X):
        out = np.empty_like(X)
        for col in range(X.shape[1]):
            x = X[:, col]
            xi, xj = x[:, None], x[None, :]
            out[:, col] = np.sum(A * g(xi, xj) * (xj - xi), axis=1)
        return out

    return _integrate_rk4("abelson-nonlinear", f, X0, times, dt, scalar, {"method": "rk4"})


def taylor_simulate(A, gamma, u, x0, T, dt=0.01, method=None) -> Trajectory:
    """Simulate ``dx/dt = -(L[A] + Gamma) x + Gamma u``.

    The exact method steps ``X(t+dt) = E X(t) + (I - E) xbar`` with
    ``E = exp(-(L + Gamma) dt)`` and ``(L + Gamma) xbar = Gamma u``.  When
    some agent is P-independent ``L + Gamma`` is singular and the run falls
    back to RK4; ``metadata["fallback"]`` records this.
    """
    model = Taylor(A, gamma, u)
    n = model.n
    L = laplacian_of(model.A)
    G = L + np.diag(model.gamma)
    c = model.gamma[:, None] * model.u
    X0, scalar = _opinions(x0, n, "x0")
    if X0.shape[1] != c.shape[1]:
        raise DimensionError(f"x0 has {X0.shape[1]} topics but u has {c.shape[1]}")
    times = _steps(T, dt)
    method = _pick_method(method, n)
    meta = {"method": method}
    if method == "expm":
        prejudiced = np.flatnonzero(model.gamma > 0)
        dependent = reachable_from(graph_from_matrix(model.A), prejudiced)
        if len(dependent) == n:
            return _integrate_affine("taylor", G, c, X0, times, dt, scalar, meta)
        meta = {"method": "rk4", "fallback": "rk4: L + Gamma is singular (P-independent agents present)"}
    return _integrate_rk4("taylor", lambda X: -G @ X + c, X0, times, dt, scalar, meta)


def fj_step(W, lam, U, X, C=None) -> np.ndarray:
    """One step ``X' = Lambda W X C^T + (I - Lambda) U`` (``C`` defaults to identity)."""
    W = np.asarray(W, dtype=float)
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    n = W.shape[0]
    if W.ndim != 2 or W.shape != (n, n) or X.shape[0] != n or U.shape != X.shape:
        raise DimensionError(f"incoherent shapes W {W.shape}, X {X.shape}, U {U.shape}")
    lam = _diag(lam, n)
    WX = W @ X
    if C is not None:
        C = np.asarray(C, dtype=float)
        if X.ndim != 2 or C.shape != (X.shape[1], X.shape[1]):
            raise DimensionError(f"C must be {X.shape[-1]} x {X.shape[-1]}")
        WX = WX @ C.T
    lam_b = lam if X.ndim == 1 else lam[:, None]
    return lam_b * WX + (1.0 - lam_b) * U


def fj_simulate(W, lam, U, X0, k_max=1000, early_stop_tol=1e-10, C=None) -> Trajectory:
    """Iterate the Friedkin-Johnsen update from ``X0``; stopping rules as :func:`degroot_simulate`."""
    model = FriedkinJohnsen(W, lam, U, C)
    X0, scalar = _opinions(X0, model.n, "X0")
    if X0.shape != model.u.shape:
        raise DimensionError(f"X0 shape {X0.shape} does not match u shape {model.u.shape}")
    lam_b = model.lam[:, None]
    drift = (1.0 - lam_b) * model.u
    if model.C is None:
        step = lambda X: lam_b * (model.W @ X) + drift
    else:
        step = lambda X: lam_b * (model.W @ X @ model.C.T) + drift
    return _discrete_run("fj", step, X0, k_max, early_stop_tol, scalar)


def simulate(spec, x0, *, k_max=1000, tol=1e-10, T=None, dt=0.01, method=None) -> Trajectory:
    """Dispatch on a model configuration.

    Discrete models use ``k_max``/``tol``; continuous ones use ``T``/``dt``/``method``.
    """
    if isinstance(spec, DeGroot):
        return degroot_simulate(spec.W, x0, k_max, tol)
    if isinstance(spec, FriedkinJohnsen):
        return fj_simulate(spec.W, spec.lam, spec.u, x0, k_max, tol, spec.C)
    if T is None:
        raise DomainError("continuous-time models need a horizon T")
    if isinstance(spec, Abelson):
        if spec.coupling is None:
            return abelson_simulate_linear(spec.A, x0, T, dt, method)
        return abelson_simulate_nonlinear(spec.A, spec.coupling, x0, T, dt)
    if isinstance(spec, Taylor):
        return taylor_simulate(spec.A, spec.gamma, spec.u, x0, T, dt, method)
    raise TypeError(f"unknown model configuration {type(spec).__name__}")
