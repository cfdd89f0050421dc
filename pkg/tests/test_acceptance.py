"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
repeated at the end of the pytest report.
"""
import time

import numpy as np
import pytest

from acceptance_log import criterion
from instances import (
    U_FJ,
    W_EX1,
    W_FJ,
    W_STUBBORN,
    random_cyclic,
    random_gamma,
    random_lambda,
    random_nonnegative,
    random_stochastic,
)
from opindyn.analysis import (
    containment_certificate,
    containment_check,
    degroot_verdict,
    fj_final,
    fj_stability_and_final,
    fj_verdict,
    french_social_power,
    influence_centrality,
    nash_residual,
    pagerank,
    taylor_final,
    taylor_stability_and_final,
    taylor_verdict,
)
from opindyn.dynamics import Taylor, abelson_simulate_linear, degroot_simulate, fj_simulate
from opindyn.matrices import matrix_exponential
from oracles import exact_solve, expm_dense, laplacian, power_limit, spectral_radius_dense

# x(inf) for Lambda = diag(1,0,0,1), from rational elimination of (I - Lambda W) x = (I - Lambda) u
FJ_ORACLE = np.array([0.39003623188405795, -0.2, 0.6, 0.3740942028985507])


def best_time(fn, repeat=5):
    fn()  # warm-up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_01_social_power():
    with criterion(1, "social power of the 3-agent example = (2/7, 3/7, 2/7) within 1e-10, < 1 ms"):
        p = french_social_power(W_EX1).vector
        assert np.max(np.abs(p - np.array([2, 3, 2]) / 7)) <= 1e-10
        assert best_time(lambda: french_social_power(W_EX1)) < 1e-3


def test_criterion_02_stubborn_fixed_point():
    with criterion(2, "stubborn-agent example reaches (a, (a+c)/2, c) within 1e-8 for 20 draws, < 10 ms"):
        rng = np.random.default_rng(2)
        draws = rng.uniform(-10, 10, (20, 3))

        def runs():
            return [degroot_simulate(W_STUBBORN, x0).final for x0 in draws]

        for (a, _, c), x in zip(draws, runs()):
            assert np.max(np.abs(x - [a, (a + c) / 2, c])) <= 1e-8
        assert best_time(runs, repeat=3) < 10e-3


def test_criterion_03_fj_example_suite():
    with criterion(3, "FJ example: consensus 0.6, cleavage, diag(1,0,0,1) oracle within 1e-6, < 50 ms"):
        def suite():
            t1 = fj_simulate(W_FJ, 1.0, U_FJ, U_FJ)
            t2 = fj_simulate(W_FJ, 1 - np.diag(W_FJ), U_FJ, U_FJ)
            fp = fj_stability_and_final(W_FJ, [1, 0, 0, 1], U_FJ)
            return t1, t2, fp

        t1, t2, fp = suite()
        # (i) Lambda = I: consensus at the stubborn agent's opinion
        assert np.max(np.abs(t1.final - 0.6)) <= 1e-6
        # (ii) Lambda = I - diag(W): convergence, agent 3 fixed, distinct final opinions
        assert t2.stop_reason == "converged"
        assert np.all(t2.states[:, 2, 0] == 0.6)
        x = t2.final
        assert min(abs(x[i] - x[j]) for i in range(4) for j in range(i + 1, 4)) > 1e-3
        # (iii) Lambda = diag(1,0,0,1)
        x = fp.final[:, 0]
        assert fp.stable
        assert np.max(np.abs(x - FJ_ORACLE)) <= 1e-6
        assert abs(x[0] - x[3]) < 0.05
        assert best_time(suite, repeat=3) < 50e-3


def _verdict_instances(rng):
    out = []
    for k in range(500):
        n = int(rng.integers(1, 9))
        if k % 10 < 3:
            out.append(random_stochastic(rng, n))
        elif k % 10 == 3 and n >= 2:
            # two stubborn agents: several closed components
            W = random_stochastic(rng, n)
            for i in rng.choice(n, 2, replace=False):
                W[i] = np.eye(n)[i]
            out.append(W)
        elif k % 10 < 7:
            out.append(random_stochastic(rng, n, zero_diag=True))
        elif n >= 2:
            out.append(random_cyclic(rng, n, extra=int(rng.integers(0, 3))))
        else:
            out.append(np.ones((1, 1)))
    return out


def test_criterion_04_verdict_oracle_equivalence():
    with criterion(4, "degroot_verdict agrees with brute-force power sequences on 500 matrices, < 30 s"):
        t0 = time.perf_counter()
        mats = _verdict_instances(np.random.default_rng(4))
        assert sum(bool(np.any(np.diag(W) == 0)) for W in mats) >= 100
        tally = {(True, True): 0, (True, False): 0, (False, False): 0}
        for W in mats:
            v = degroot_verdict(W)
            convergent, consensus, _ = power_limit(W)
            assert (v.convergent, v.consensus) == (convergent, consensus), W
            tally[convergent, consensus] += 1
        # the sample must exercise every verdict class
        assert min(tally.values()) >= 30, tally
        assert time.perf_counter() - t0 < 30


def test_criterion_05_discretization_bridge():
    with criterion(5, "exp(-tau L) stochastic with positive diagonal; DeGroot under it tracks Abelson within 1e-8, < 10 s"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(1, 11))
            A = random_nonnegative(rng, n)
            tau = float(rng.choice([0.05, 0.1, 0.5]))
            L = laplacian(A)
            W_tau = matrix_exponential(-L, tau)
            assert np.max(np.abs(W_tau.sum(axis=1) - 1)) <= 1e-9
            assert np.all(np.diag(W_tau) > 0) and np.all(W_tau >= -1e-9)
            x0 = rng.uniform(-1, 1, (n, 2))
            K = 20
            disc = degroot_simulate(W_tau, x0, k_max=K, early_stop_tol=0.0)
            cont = abelson_simulate_linear(A, x0, T=K * tau, dt=tau)
            assert len(disc) == len(cont) == K + 1
            for k in range(K + 1):
                reference = expm_dense(-L * (k * tau)) @ x0  # independent exponential
                assert np.max(np.abs(disc.states[k] - reference)) <= 1e-8
                assert np.max(np.abs(cont.states[k] - reference)) <= 1e-8
        assert time.perf_counter() - t0 < 10


def _stability_instances():
    rng = np.random.default_rng(6)
    fj, taylor = [], []
    for _ in range(300):
        n = int(rng.integers(1, 9))
        W = random_stochastic(rng, n, density=rng.uniform(0.1, 0.7))
        fj.append((W, random_lambda(rng, n, p_free=rng.uniform(0.3, 0.95)), rng.uniform(-1, 1, n)))
    for _ in range(300):
        n = int(rng.integers(1, 9))
        A = random_nonnegative(rng, n, density=rng.uniform(0.05, 0.6))
        taylor.append((A, random_gamma(rng, n, p_zero=rng.uniform(0.3, 0.95)), rng.uniform(-1, 1, n)))
    return fj, taylor


FJ_CASES, TAYLOR_CASES = _stability_instances()


def test_criterion_06_stability_iff_p_dependence():
    with criterion(6, "stability verdicts match rho(Lambda W) < 1 and rho(exp(-(L+G))) < 1 on 300+300 instances, < 30 s"):
        t0 = time.perf_counter()
        counts = {"fj-stable": 0, "fj-unstable": 0, "taylor-stable": 0, "taylor-unstable": 0}
        for W, lam, _ in FJ_CASES:
            stable = spectral_radius_dense(lam[:, None] * W) < 1 - 1e-9
            assert fj_verdict(W, lam).stable == stable
            counts["fj-stable" if stable else "fj-unstable"] += 1
        for A, gamma, _ in TAYLOR_CASES:
            stable = spectral_radius_dense(expm_dense(-(laplacian(A) + np.diag(gamma)))) < 1 - 1e-9
            assert taylor_verdict(A, gamma).stable == stable
            counts["taylor-stable" if stable else "taylor-unstable"] += 1
        assert min(counts.values()) >= 30, counts
        assert time.perf_counter() - t0 < 30


def test_criterion_07_control_matrices_stochastic():
    with criterion(7, "V and M row sums 1 within 1e-9 and entries >= -1e-9 on stable instances"):
        checked = 0
        for W, lam, u in FJ_CASES:
            if not fj_verdict(W, lam).stable:
                continue
            V = fj_stability_and_final(W, lam, u).V
            assert np.max(np.abs(V.sum(axis=1) - 1)) <= 1e-9 and V.min() >= -1e-9
            checked += 1
        for A, gamma, u in TAYLOR_CASES:
            if not taylor_verdict(A, gamma).stable:
                continue
            M = taylor_stability_and_final(A, gamma, u).M
            assert np.max(np.abs(M.sum(axis=1) - 1)) <= 1e-9 and M.min() >= -1e-9
            checked += 1
        assert checked >= 60


def test_criterion_08_centrality_duality():
    with criterion(8, "pagerank(m=0.15) = influence centrality(0.85 I) within 1e-10 on 50 W; alpha=0.999 gap < 1e-2"):
        rng = np.random.default_rng(8)
        for _ in range(50):
            W = random_stochastic(rng, int(rng.integers(1, 11)))
            pr = pagerank(W, 0.15).vector
            ic = influence_centrality(W, 0.85).vector
            assert np.max(np.abs(pr - ic)) <= 1e-10
        c = influence_centrality(W_EX1, 0.999).vector
        assert np.sum(np.abs(c - np.array([2, 3, 2]) / 7)) < 1e-2


def test_criterion_09_non_expansive():
    with criterion(9, "every DeGroot step on 100 random runs keeps per-topic min/max monotone (1e-12 slack)"):
        rng = np.random.default_rng(9)
        for _ in range(100):
            n, d = int(rng.integers(1, 11)), int(rng.integers(1, 4))
            W = random_stochastic(rng, n, zero_diag=rng.random() < 0.4)
            traj = degroot_simulate(W, rng.uniform(-5, 5, (n, d)), k_max=200)
            lo, hi = traj.states.min(axis=1), traj.states.max(axis=1)
            assert np.all(lo[1:] >= lo[:-1] - 1e-12)
            assert np.all(hi[1:] <= hi[:-1] + 1e-12)


def _leader_instance(rng, n, m, d):
    while True:
        A = random_nonnegative(rng, n, density=rng.uniform(0.2, 0.7))
        B = np.where(rng.random((n, m)) < 0.4, rng.uniform(0.1, 2.0, (n, m)), 0.0)
        if B.any() and taylor_verdict(A, B.sum(axis=1)).stable:
            return A, B, rng.uniform(-3, 3, (m, d))


def test_criterion_10_containment():
    with criterion(10, "1-D finals inside [min s, max s]; 2-D algebraic certificate on 20 instances, < 5 s"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(10)
        for _ in range(20):
            A, B, s = _leader_instance(rng, int(rng.integers(2, 9)), 2, 1)
            model = Taylor.from_sources(A, B, s)
            x = taylor_final(model.A, model.gamma, model.u)
            assert np.all(x >= s.min() - 1e-12) and np.all(x <= s.max() + 1e-12)
            assert containment_check(x, s).status == "certified"
        for _ in range(20):
            A, B, s = _leader_instance(rng, int(rng.integers(2, 9)), 3, 2)
            model = Taylor.from_sources(A, B, s)
            x = taylor_final(model.A, model.gamma, model.u)
            # independent equilibrium: (L + diag(B 1)) x = B s
            oracle = np.linalg.solve(laplacian(A) + np.diag(B.sum(axis=1)), B @ s)
            assert np.max(np.abs(x - oracle)) <= 1e-9
            K = containment_certificate(A, B)
            assert containment_check(x, s, certificate=K).status == "certified"
        assert time.perf_counter() - t0 < 5


def test_criterion_11_nash_residual():
    with criterion(11, "nash_residual <= 1e-9 at every FJ fixed point of the criterion-6 instances"):
        checked = 0
        for W, lam, u in FJ_CASES:
            v = fj_verdict(W, lam)
            if not v.convergent or np.all(lam == 1.0):
                continue
            x = fj_final(W, lam, u, x0=u)
            assert nash_residual(W, lam, u, x) <= 1e-9
            checked += 1
        # a rational fixed point as well
        lam = [1, 0, 0, 1]
        x = [float(v) for v in exact_solve((np.eye(4) - np.diag(lam) @ W_FJ).tolist(),
                                           ((1 - np.array(lam)) * U_FJ).tolist())]
        assert nash_residual(W_FJ, lam, U_FJ, x) <= 1e-9
        assert checked >= 100


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
