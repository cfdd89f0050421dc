"""Laplacian flows: exact stepping, the sampled-data bridge, nonlinear couplings."""
# %%
import numpy as np

import opindyn as od

rng = np.random.default_rng(1)
A = np.where(rng.random((6, 6)) < 0.4, rng.uniform(0.2, 2.0, (6, 6)), 0.0)
np.fill_diagonal(A, 0.0)
x0 = rng.uniform(-1, 1, 6)

print(od.abelson_verdict(A).reason)
traj = od.abelson_simulate_linear(A, x0, T=30.0, dt=0.1)
print("state at T=30:", np.round(traj.final, 6))
print("exact limit:  ", np.round(od.abelson_limit(A, x0), 6))

# %% Sampling the flow every tau gives a DeGroot model with W = exp(-tau L).
tau = 0.1
W_tau = od.matrix_exponential(-od.laplacian_of(A), tau)
print("row sums:", W_tau.sum(axis=1).round(12), "min diagonal:", W_tau.diagonal().min())
disc = od.degroot_simulate(W_tau, x0, k_max=300, early_stop_tol=0.0)
print("max gap to the flow:", np.abs(disc.states[:301] - traj.states).max())

# %% Bounded-confidence style coupling slows agreement between distant opinions.
for g in ("constant", "inverse-quadratic"):
    t = od.abelson_simulate_nonlinear([[0, 1], [1, 0]], g, [0.0, 3.0], T=2.0, dt=0.01)
    print(f"{g:>18}: x(2) = {t.final.round(4)}")
